import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heisenlab.core import DomainError, HomogeneousHom, UsageError, group_mul, koranyi_distance
from heisenlab.geodesic import FOUR_PI, TWO_PI, geodesic_points, omega_codes, sample_H_arrays, sample_omega
from heisenlab.maps import (
    MapHandle,
    boundary_f,
    catalog_map,
    domain_mask,
    even_reflection,
    extension_F,
    map_eval,
    slice_matrix,
)


def flip_a(u):
    n = u.shape[-1] // 2
    v = u.copy()
    v[..., :n] *= -1
    return v


@pytest.mark.parametrize("n", [1, 2, 3])
def test_boundary_f_reflects_the_leaf_direction(n):
    u, s = sample_H_arrays(0, 500, (0.0, TWO_PI), n)
    np.testing.assert_allclose(boundary_f(geodesic_points(u, s)), geodesic_points(flip_a(u), s), atol=1e-12)


def test_boundary_f_known_value():
    # Φ((1,0), π) = (0,-2,2π) and Φ((-1,0), π) = (0,2,2π)
    np.testing.assert_allclose(boundary_f(np.array([0.0, -2.0, TWO_PI])), [0.0, 2.0, TWO_PI], atol=1e-14)


def test_boundary_f_fixes_poles():
    np.testing.assert_array_equal(boundary_f(np.zeros(3)), np.zeros(3))
    np.testing.assert_array_equal(boundary_f(np.array([0.0, 0.0, FOUR_PI])), [0.0, 0.0, FOUR_PI])


def test_boundary_f_rejects_points_off_H():
    with pytest.raises(DomainError):
        boundary_f(np.array([0.0, 0.0, 1.0]))
    assert np.all(np.isnan(boundary_f(np.array([0.0, 0.0, 1.0]), check=False)))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_extension_agrees_with_boundary_map_on_H(n):
    u, s = sample_H_arrays(1, 2000, (0.0, TWO_PI), n)
    P = geodesic_points(u, s)
    np.testing.assert_allclose(extension_F(P), boundary_f(P), atol=1e-9)


def test_alternative_slice_matrix_does_not_extend_f():
    # the alternative matrix is a reflection on each slice, but a different one
    u, s = sample_H_arrays(1, 200, (0.5, TWO_PI - 0.5), 1)
    P = geodesic_points(u, s)
    assert np.max(np.abs(extension_F(P, alt_slice=True) - boundary_f(P))) > 1.0


@pytest.mark.parametrize("alt", [False, True])
def test_slice_matrix_is_reflection(alt):
    for s in np.linspace(0, TWO_PI, 9):
        C = slice_matrix(s, alt)
        np.testing.assert_allclose(C @ C, np.eye(2), atol=1e-14)
        assert np.linalg.det(C) == pytest.approx(-1.0)


@pytest.mark.parametrize("n", [1, 2])
def test_extension_maps_omega_to_omega_and_preserves_heights(n):
    P = sample_omega(7, 500, n, t_margin=0.01, radius_fraction=(0.0, 0.99))
    Q = extension_F(P)
    assert np.all(omega_codes(Q) == 1)
    np.testing.assert_array_equal(Q[:, -1], P[:, -1])
    np.testing.assert_allclose(np.linalg.norm(Q[:, :-1], axis=1), np.linalg.norm(P[:, :-1], axis=1), rtol=1e-12)


def test_extension_continuous_at_top_pole():
    # slices shrink to a point as t -> 4π, so images converge to p1
    p1 = np.array([0.0, 0.0, FOUR_PI])
    for eps in (1e-2, 1e-4, 1e-6):
        P = sample_omega(2, 50, 1, t_margin=eps / 2, radius_fraction=(0.0, 0.99))
        P = P[P[:, -1] > FOUR_PI - eps]
        if len(P):
            assert np.max(np.linalg.norm(extension_F(P) - p1, axis=1)) < 10 * eps ** (1 / 3)


def test_extension_rejects_outside():
    with pytest.raises(DomainError):
        extension_F(np.array([5.0, 0.0, 1.0]))


def test_even_reflection():
    np.testing.assert_array_equal(even_reflection(np.array([1.0, 2.0, 3.0, 4.0, 5.0])), [-1, -2, 3, 4, -5])


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_even_reflection_is_automorphism(a, b, c):
    rng = np.random.default_rng(0)
    p = np.array([a, b, c])
    q = rng.normal(size=3)
    np.testing.assert_allclose(even_reflection(group_mul(p, q)), group_mul(even_reflection(p), even_reflection(q)),
                               atol=1e-10)


def test_catalog_maps():
    p = np.array([0.3, -0.2, 1.0])
    np.testing.assert_allclose(catalog_map("dilation", 1, 2.0)(p), [0.6, -0.4, 4.0])
    g = np.array([1.0, 0.0, 0.0])
    np.testing.assert_allclose(catalog_map("left_translation", 1, g)(p), group_mul(g, p))
    np.testing.assert_allclose(catalog_map("identity", 1)(p), p)
    np.testing.assert_allclose(catalog_map("homomorphism", 1)(p), p)
    with pytest.raises(UsageError):
        catalog_map("nope", 1)


def test_translation_is_isometry():
    rng = np.random.default_rng(2)
    T = MapHandle.left_translation(rng.normal(size=5))
    P, Q = rng.normal(size=(2, 100, 5))
    np.testing.assert_allclose(koranyi_distance(T(P), T(Q)), koranyi_distance(P, Q), rtol=1e-12)


def test_composite_and_linear():
    A = HomogeneousHom.dilation(1, 2.0)
    m = MapHandle.composite([MapHandle.homomorphism(A), MapHandle.dilation(1, 0.5)])
    p = np.array([1.0, 2.0, 3.0])
    np.testing.assert_allclose(m(p), p)
    L = np.eye(3)
    L[2, 0] = 1.0
    np.testing.assert_allclose(MapHandle.linear(L)(p), [1.0, 2.0, 4.0])


def test_handle_validation():
    with pytest.raises(UsageError):
        MapHandle("bogus", 1)
    with pytest.raises(UsageError):
        MapHandle.dilation(1, -1.0)
    with pytest.raises(UsageError):
        map_eval(MapHandle.identity(2), np.zeros(3))


def test_domain_mask():
    P = np.array([[0.0, 0.0, TWO_PI], [5.0, 0.0, 1.0]])
    np.testing.assert_array_equal(domain_mask(MapHandle.extension_F(1), P), [True, False])
    np.testing.assert_array_equal(domain_mask(MapHandle.boundary_f(1), P), [False, False])
    np.testing.assert_array_equal(domain_mask(MapHandle.identity(1), P), [True, True])


def test_right_translation_moves_points_by_gauge():
    rng = np.random.default_rng(5)
    g = rng.normal(size=3)
    P = rng.normal(size=(200, 3))
    moved = MapHandle.right_translation(g)(P)
    np.testing.assert_allclose(koranyi_distance(moved, P), koranyi_distance(g, np.zeros(3)), rtol=1e-12)
    np.testing.assert_allclose(catalog_map("right_translation", 1, g)(P), group_mul(P, g))
