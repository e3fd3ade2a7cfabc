import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heisenlab.core import DomainError, UsageError, koranyi_distance
from heisenlab.geodesic import TWO_PI, GeodesicParam, SphereParam, geodesic_points
from heisenlab.lipschitz import (
    closed_form_same_height,
    closed_form_same_height_arr,
    lipschitz_scan,
    same_height_isometry_check,
    sample_pairs,
    triangle_decomposition,
)
from heisenlab.maps import MapHandle


def sphere(n, seed):
    u = np.random.default_rng(seed).normal(size=2 * n)
    return SphereParam.from_vector(u / np.linalg.norm(u))


def test_closed_form_known_value():
    u = SphereParam(np.array([1.0]), np.array([0.0]))
    v = SphereParam(np.array([0.0]), np.array([1.0]))
    assert closed_form_same_height(np.pi, u, v) == pytest.approx(2 ** 1.75, rel=1e-15)


def test_closed_form_vanishes_at_poles_and_for_equal_directions():
    u, v = sphere(2, 0), sphere(2, 1)
    assert closed_form_same_height(0.0, u, v) == 0.0
    assert closed_form_same_height(TWO_PI, u, v) == pytest.approx(0.0, abs=1e-15)
    assert closed_form_same_height(1.3, u, u) == 0.0


@given(st.floats(0.0, TWO_PI), st.integers(0, 1000))
def test_closed_form_matches_direct(s, seed):
    rng = np.random.default_rng(seed)
    U, V = rng.normal(size=(2, 4))
    U /= np.linalg.norm(U)
    V /= np.linalg.norm(V)
    direct = koranyi_distance(geodesic_points(U, s), geodesic_points(V, s))
    assert closed_form_same_height_arr(s, U, V) == pytest.approx(direct, rel=1e-10, abs=1e-12)


def test_closed_form_range_check():
    with pytest.raises(UsageError):
        closed_form_same_height(7.0, sphere(1, 0), sphere(1, 1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_same_height_isometry(n):
    rep = same_height_isometry_check(2000, 5, n)
    assert rep.max_ratio <= 1e-10


def test_f_is_not_an_isometry_across_heights():
    rep = lipschitz_scan(MapHandle.boundary_f(1), 5000, 1)
    assert rep.max_ratio > 1.05


def test_isometries_scan_to_one():
    rep = lipschitz_scan(MapHandle.even_reflection(1), 2000, 0)
    assert rep.max_ratio == pytest.approx(1.0, abs=1e-10)
    assert rep.p95_ratio == pytest.approx(1.0, abs=1e-10)


def test_dilation_scan_ratio():
    rep = lipschitz_scan(MapHandle.dilation(2, 3.0), 500, 0)
    assert rep.max_ratio == pytest.approx(3.0, rel=1e-12)


def test_scan_is_seeded():
    a = lipschitz_scan(MapHandle.boundary_f(1), 1000, 3)
    b = lipschitz_scan(MapHandle.boundary_f(1), 1000, 3)
    assert a.max_ratio == b.max_ratio
    assert a.to_dict() == b.to_dict()


def test_scan_usage_errors():
    with pytest.raises(UsageError):
        lipschitz_scan(MapHandle.boundary_f(1), 0, 0)
    with pytest.raises(UsageError):
        lipschitz_scan(MapHandle.boundary_f(1), 10, 0, s_range=(2.0, 1.0))
    with pytest.raises(UsageError):
        lipschitz_scan(MapHandle.boundary_f(1), 10, 0, metric="cc")


def test_pairs_csv_header():
    sample, _ = sample_pairs(MapHandle.boundary_f(2), 3, 0)
    buf = io.StringIO()
    sample.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "s1,a1_0,a1_1,b1_0,b1_1,s2,a2_0,a2_1,b2_0,b2_1,d_source,d_image,ratio"
    assert len(lines) == 4
    row = [float(v) for v in lines[1].split(",")]
    assert row[-1] == pytest.approx(row[-2] / row[-3])


def test_triangle_decomposition():
    p = GeodesicParam(sphere(1, 0), 1.0)
    pp = GeodesicParam(sphere(1, 1), 2.5)
    q, b = triangle_decomposition(p, pp)
    assert q.s == p.s
    assert b.triangle_slack >= -1e-12
    assert b.isometry_gap < 1e-10
    with pytest.raises(DomainError):
        triangle_decomposition(GeodesicParam(None, 0.0), pp)
