import numpy as np
import pytest

from heisenlab.core import HomogeneousHom, UsageError, koranyi_distance, random_homomorphism
from heisenlab.degree import (
    KoranyiBall,
    OmegaDomain,
    PreconditionError,
    boundary_gap,
    degree_smooth,
    homotopy_eval,
    min_injectivity_constant,
    newton_batch,
    preimages,
)
from heisenlab.geodesic import FOUR_PI, TWO_PI, omega_codes
from heisenlab.maps import MapHandle, map_eval


def centre(n):
    return np.r_[np.zeros(2 * n), TWO_PI]


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("alt", [False, True])
def test_extension_degree(n, alt):
    res = degree_smooth(MapHandle.extension_F(n, alt_slice=alt), centre(n))
    assert res.regular
    assert res.value == (-1) ** n
    assert len(res.preimages) == 1
    np.testing.assert_allclose(res.preimages[0].to_array(), centre(n), atol=1e-9)


def test_identity_degree_at_interior_targets():
    for target in ([0.0, 0.0, 3.0], [0.5, -0.5, TWO_PI], [0.1, 0.2, 11.0]):
        assert degree_smooth(MapHandle.identity(1), np.array(target)).value == 1


def test_degree_zero_outside_image():
    res = degree_smooth(MapHandle.extension_F(1), np.array([0.0, 0.0, -1.0]))
    assert res.value == 0 and res.preimages == []


def test_off_axis_target_has_single_preimage():
    # F̃ is a bijection of Ω, so every interior target has exactly one preimage
    target = np.array([0.7, -0.3, 5.0])
    pts = preimages(MapHandle.extension_F(1), target)
    assert len(pts) == 1
    np.testing.assert_allclose(map_eval(MapHandle.extension_F(1), pts[0].to_array()), target, atol=1e-9)


def test_target_on_boundary_image_is_rejected():
    with pytest.raises(PreconditionError):
        degree_smooth(MapHandle.extension_F(1), np.array([0.0, 0.0, FOUR_PI - 1e-4]))


def test_newton_converges_from_nearby_seed():
    m = MapHandle.dilation(1, 2.0)
    X, res, alive = newton_batch(m, np.array([0.2, 0.4, 0.4]), np.array([[0.0, 0.0, 0.0], [0.3, 0.1, 0.2]]))
    assert np.all(alive) and np.all(res < 1e-12)
    np.testing.assert_allclose(X, [[0.1, 0.2, 0.1]] * 2, atol=1e-10)


def test_omega_seeds_are_inside():
    for n in (1, 2, 3):
        assert np.all(omega_codes(OmegaDomain(n).seeds(4)) == 1)


def test_ball_domain():
    ball = KoranyiBall(np.zeros(3), 0.5)
    S = ball.boundary_samples(0, 100)
    np.testing.assert_allclose(koranyi_distance(S, np.zeros(3)), 0.5, rtol=1e-12)
    assert np.all(ball.contains(ball.seeds(5)))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_homomorphism_degree_over_ball(n):
    A = random_homomorphism(np.random.default_rng(n), n)
    res = degree_smooth(MapHandle.homomorphism(A), np.zeros(2 * n + 1), KoranyiBall(np.zeros(2 * n + 1), 1.0))
    assert res.value == 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_reversing_homomorphism_degree_is_sign_of_det(n):
    # λ < 0 gives det = λ^(n+1): orientation flips only when n is even
    A = random_homomorphism(np.random.default_rng(10 + n), n, reversing=True)
    res = degree_smooth(MapHandle.homomorphism(A), np.zeros(2 * n + 1), KoranyiBall(np.zeros(2 * n + 1), 1.0))
    assert res.value == (-1) ** (n + 1)


def test_even_reflection_degree_parity():
    for n in (1, 2):
        res = degree_smooth(MapHandle.even_reflection(n), np.zeros(2 * n + 1), KoranyiBall(np.zeros(2 * n + 1), 1.0))
        assert res.value == (-1) ** (n + 1)


def test_homotopy_endpoints():
    A = random_homomorphism(np.random.default_rng(0), 1)
    m = MapHandle.dilation(1, 1.5)
    q = np.array([0.3, -0.4, 0.2])
    np.testing.assert_allclose(homotopy_eval(A, m, 0.0, q), A(q))
    np.testing.assert_allclose(homotopy_eval(A, m, 1.0, q), map_eval(m, q), atol=1e-12)
    with pytest.raises(UsageError):
        homotopy_eval(A, m, 1.5, q)


def test_injectivity_constant_of_dilation():
    assert min_injectivity_constant(HomogeneousHom.dilation(1, 2.0)) == pytest.approx(2.0, rel=1e-12)


def test_boundary_gap_for_small_perturbation():
    A = random_homomorphism(np.random.default_rng(3), 1)
    a = min_injectivity_constant(A)
    g = np.array([0.1 * a, 0.0, 0.0])
    pert = MapHandle.composite([MapHandle.homomorphism(A), MapHandle.left_translation(g)])
    assert boundary_gap(A, pert, 1.0) > 0


def test_boundary_gap_vanishes_for_exact_map_through_origin():
    # m collapses the sphere onto the origin, so the homotopy hits 0 at s = 1
    A = HomogeneousHom.identity(1)
    gap = boundary_gap(A, MapHandle.dilation(1, 0.0), 1.0)
    assert gap == pytest.approx(0.0, abs=1e-12)


def test_non_injective_rejected():
    A = HomogeneousHom(1, np.zeros((2, 2)), 0.0)
    with pytest.raises(UsageError):
        min_injectivity_constant(A)
