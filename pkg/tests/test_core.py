import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from heisenlab.core import (
    DomainError,
    HomogeneousHom,
    Point,
    TangentVector,
    UsageError,
    contact_form,
    dilate,
    frame_matrix,
    frame_vectors,
    gauge,
    group_inv,
    group_mul,
    hom_matrix_gap,
    hom_property_gap,
    koranyi_distance,
    koranyi_distance_flipped,
    random_homomorphism,
    sample_unit_sphere,
    skew_form,
    symplectic_pairing,
)

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def points(n):
    return arrays(np.float64, 2 * n + 1, elements=coord)


# hand-computed values


def test_product_example():
    p = group_mul(np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]))
    np.testing.assert_array_equal(p, [1.0, 1.0, -2.0])


def test_product_example_reversed_order_flips_twist():
    p = group_mul(np.array([0.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0]))
    np.testing.assert_array_equal(p, [1.0, 1.0, 2.0])


def test_gauge_of_horizontal_345():
    assert koranyi_distance(np.zeros(3), np.array([3.0, 4.0, 0.0])) == pytest.approx(5.0, rel=1e-15)


def test_gauge_of_vertical_point():
    # (|w|^4 + t^2)^(1/4) with w = 0, t = 16
    assert gauge(np.array([0.0, 0.0, 16.0])) == pytest.approx(4.0, rel=1e-15)


def test_dilation_example():
    np.testing.assert_array_equal(dilate(2.0, np.array([1.0, 0.0, 1.0])), [2.0, 0.0, 4.0])


def test_dilation_by_zero_collapses():
    np.testing.assert_array_equal(dilate(0.0, np.array([1.0, 2.0, 3.0])), [0.0, 0.0, 0.0])


def test_negative_dilation_rejected():
    with pytest.raises(UsageError):
        dilate(-1.0, np.zeros(3))


def test_frame_at_point():
    F = frame_matrix(np.array([1.0, 1.0, 0.0]))
    # X = ∂x + 2y∂t, Y = ∂y - 2x∂t
    np.testing.assert_array_equal(F[:, 0], [1.0, 0.0, 2.0])
    np.testing.assert_array_equal(F[:, 1], [0.0, 1.0, -2.0])
    np.testing.assert_array_equal(F[:, 2], [0.0, 0.0, 1.0])


def test_pairing_matches_skew_form():
    rng = np.random.default_rng(3)
    w1, w2 = rng.normal(size=(2, 4))
    assert symplectic_pairing(w1, w2) == pytest.approx(w1 @ skew_form(2) @ w2, abs=1e-14)


def test_point_roundtrip_and_validation():
    p = Point(np.array([1.0, 2.0]), np.array([3.0, 4.0]), 5.0)
    assert p.n == 2
    np.testing.assert_array_equal(p.to_array(), [1, 2, 3, 4, 5])
    assert Point.from_array(p.to_array()).allclose(p)
    with pytest.raises(UsageError):
        Point(np.array([1.0]), np.array([1.0, 2.0]), 0.0)
    with pytest.raises(UsageError):
        Point(np.array([np.nan]), np.array([1.0]), 0.0)


def test_point_in_point_out():
    p = Point.from_array([1.0, 2.0, 3.0])
    q = group_mul(p, group_inv(p))
    assert isinstance(q, Point)
    assert q.allclose(Point.origin(1))


def test_dimension_mismatch():
    with pytest.raises(UsageError):
        group_mul(np.zeros(3), np.zeros(5))


# group and metric properties


@given(points(1), points(1), points(1))
def test_associativity(p, q, r):
    lhs = group_mul(group_mul(p, q), r)
    rhs = group_mul(p, group_mul(q, r))
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-9)


@given(points(2))
def test_inverse(p):
    np.testing.assert_allclose(group_mul(p, group_inv(p)), 0.0, atol=1e-12)
    np.testing.assert_allclose(group_mul(group_inv(p), p), 0.0, atol=1e-12)


@given(points(1), points(1), st.floats(0.01, 10))
def test_dilation_is_automorphism(p, q, s):
    lhs = dilate(s, group_mul(p, q))
    rhs = group_mul(dilate(s, p), dilate(s, q))
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-9)


@given(points(1), points(1), points(1))
def test_left_invariance(g, p, q):
    d = koranyi_distance(p, q)
    assert koranyi_distance(group_mul(g, p), group_mul(g, q)) == pytest.approx(d, rel=1e-9, abs=1e-9)


@given(points(2), points(2), points(2))
def test_triangle_inequality(p, q, r):
    assert koranyi_distance(p, r) <= koranyi_distance(p, q) + koranyi_distance(q, r) + 1e-9


@given(points(1), points(1))
def test_symmetry(p, q):
    assert koranyi_distance(p, q) == pytest.approx(koranyi_distance(q, p), rel=1e-12, abs=1e-12)


@given(points(1), points(1), st.floats(0.01, 10))
def test_dilation_homogeneity(p, q, s):
    d = koranyi_distance(dilate(s, p), dilate(s, q))
    assert d == pytest.approx(s * koranyi_distance(p, q), rel=1e-10, abs=1e-12)


def test_flipped_vertical_sign_is_not_left_invariant():
    g, p, q = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), np.zeros(3)
    before = koranyi_distance_flipped(p, q)
    after = koranyi_distance_flipped(group_mul(g, p), group_mul(g, q))
    assert abs(after - before) > 0.1
    # the invariant form is unaffected by the same translation
    assert koranyi_distance(group_mul(g, p), group_mul(g, q)) == pytest.approx(koranyi_distance(p, q))


def test_flipped_and_invariant_agree_at_equal_heights():
    # with t = t' the vertical term is ±2·pairing, and the sign is squared away
    rng = np.random.default_rng(7)
    P, Q = rng.normal(size=(2, 50, 5))
    Q[:, -1] = P[:, -1]
    np.testing.assert_allclose(koranyi_distance_flipped(P, Q), koranyi_distance(P, Q), rtol=1e-13)


# contact form


@given(points(2))
def test_frame_is_horizontal(p):
    base = Point.from_array(p)
    vals = [contact_form(v) for v in frame_vectors(base)]
    np.testing.assert_allclose(vals[:-1], 0.0, atol=1e-12)
    assert vals[-1] == 1.0


def test_tangent_vector_validation():
    base = Point.origin(1)
    with pytest.raises(UsageError):
        TangentVector(base, np.ones(2), np.ones(1), 0.0)


# homogeneous homomorphisms


@pytest.mark.parametrize("n", [1, 2, 3])
def test_random_homomorphism_satisfies_matrix_identity(n):
    A = random_homomorphism(np.random.default_rng(n), n)
    assert hom_matrix_gap(A.M, A.lam) < 1e-12
    assert np.linalg.det(A.M) == pytest.approx(A.lam ** n, rel=1e-9)
    assert A.det == pytest.approx(A.lam ** (n + 1), rel=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_matrix_identity_equivalent_to_group_test(seed):
    rng = np.random.default_rng(seed)
    A = random_homomorphism(rng, 2)
    bad = A.M + 1e-3 * rng.normal(size=A.M.shape)
    assert hom_property_gap(A.M, A.lam) < 1e-12 and hom_matrix_gap(A.M, A.lam) < 1e-12
    assert hom_property_gap(bad, A.lam) > 1e-6 and hom_matrix_gap(bad, A.lam) > 1e-6


def test_reversing_homomorphism_has_negative_multiplier():
    A = random_homomorphism(np.random.default_rng(0), 2, reversing=True)
    assert A.lam < 0
    assert A.det == pytest.approx(A.lam ** 3, rel=1e-9)


def test_non_homomorphism_rejected():
    with pytest.raises(UsageError):
        HomogeneousHom(1, np.array([[2.0, 0.0], [0.0, 1.0]]), 1.0)


def test_dilation_homomorphism():
    A = HomogeneousHom.dilation(2, 3.0)
    p = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    np.testing.assert_allclose(A(p), dilate(3.0, p))


def test_sample_unit_sphere_on_gauge_sphere():
    Q = sample_unit_sphere(np.random.default_rng(1), 2, 200, radius=0.7)
    np.testing.assert_allclose(gauge(Q), 0.7, rtol=1e-13)


def test_error_hierarchy():
    assert issubclass(DomainError, ValueError)
    assert issubclass(UsageError, ValueError)
