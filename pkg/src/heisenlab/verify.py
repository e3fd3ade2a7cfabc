"""Named verification checks, one group per library module, used by ``heisenlab verify-all``.

Every check returns a :class:`Check` with observed and expected values and the
tolerance it was judged at.  ``tol`` is the default identity tolerance (1e-10).
Checks whose tolerance is fixed by construction record it separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .core import group_mul, koranyi_distance, random_homomorphism, sample_unit_sphere
from .degree import KoranyiBall, boundary_gap, degree_smooth, min_injectivity_constant
from .differential import contact_defect_direction, contact_report, pansu_estimate, pansu_quotient, scaling_diagnostic
from .geodesic import (
    FOUR_PI,
    TWO_PI,
    GeodesicParam,
    cc_distance_from_origin_on_H,
    geodesic_points,
    invert_points,
    phi_height,
    phi_height_inverse,
    sample_H_arrays,
    sample_omega,
    slice_radius,
)
from .lipschitz import closed_form_same_height_arr, lipschitz_scan, same_height_isometry_check
from .maps import MapHandle, map_eval

SLOPE_EXPECTED = -0.5
SLOPE_TOL = 0.1
SCALING_SCALES = np.logspace(-1, -4, 13)


@dataclass
class Check:
    name: str
    status: str
    observed: object
    expected: object
    tolerance: object = None
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        d = {"name": self.name, "status": self.status, "observed": self.observed,
             "expected": self.expected, "tolerance": self.tolerance}
        if self.info:
            d["info"] = self.info
        return d


def _bound(name, observed, bound, tolerance=None, **info) -> Check:
    """Pass when ``observed <= bound``."""
    ok = bool(np.isfinite(observed) and observed <= bound)
    return Check(name, "pass" if ok else "fail", float(observed), f"<= {bound!r}", tolerance, info)


def _equal(name, observed, expected, **info) -> Check:
    return Check(name, "pass" if observed == expected else "fail", observed, expected, 0, info)


def _rel(a, b):
    return np.abs(a - b) / np.maximum(1.0, np.abs(b))


def _rng(seed, name):
    return rngmod.stream(seed, f"verify.{name}")


# --- heis-core ------------------------------------------------------------------


def check_metric_axioms(n: int, seed: int, tol: float, samples: int = 10_000) -> list[Check]:
    r = _rng(seed, "metric")
    P, Q, R, G = (r.normal(size=(samples, 2 * n + 1)) for _ in range(4))
    s = r.uniform(0.1, 10.0, size=samples)
    dpq = koranyi_distance(P, Q)
    tri = np.max((koranyi_distance(P, R) - dpq - koranyi_distance(Q, R)) / (1.0 + dpq))
    inv = np.max(_rel(koranyi_distance(group_mul(G, P), group_mul(G, Q)), dpq))
    SP, SQ = P.copy(), Q.copy()
    SP[:, :-1] *= s[:, None]
    SP[:, -1] *= s * s
    SQ[:, :-1] *= s[:, None]
    SQ[:, -1] *= s * s
    hom = np.max(_rel(koranyi_distance(SP, SQ), s * dpq))
    assoc = np.max(_rel(group_mul(group_mul(P, Q), R), group_mul(P, group_mul(Q, R))))
    return [
        _bound("metric.triangle_inequality", tri, tol, tol),
        _bound("metric.left_invariance", inv, tol, tol),
        _bound("metric.dilation_homogeneity", hom, tol, tol),
        _bound("group.associativity", assoc, tol, tol),
    ]


# --- geodesic ---------------------------------------------------------------------


def check_geodesic(n: int, seed: int, tol: float, samples: int = 1000) -> list[Check]:
    r = _rng(seed, "geodesic")
    s = r.uniform(0.0, TWO_PI, samples)
    phi_rt = np.max(np.abs(phi_height_inverse(phi_height(s)) - s))
    u, s2 = sample_H_arrays(seed, samples, (0.1, TWO_PI - 0.1), n, name="verify.geodesic_roundtrip")
    P = geodesic_points(u, s2)
    uu, ss = invert_points(P)
    uu = uu / np.linalg.norm(uu, axis=1, keepdims=True)
    # coordinates, not d_K: the gauge turns 1e-15 of height into 1e-8
    back = geodesic_points(uu, ss)
    Phi_rt = max(np.max(np.abs(uu - u)), np.max(np.abs(ss - s2)), np.max(np.abs(back - P)))
    rad = np.max(np.abs(np.linalg.norm(P[:, :-1], axis=1) - slice_radius(s2)))
    g = GeodesicParam(None, TWO_PI)
    p1 = geodesic_points(u[:1], np.array([TWO_PI]))[0]
    return [
        _bound("geodesic.phi_roundtrip", phi_rt, tol, tol),
        _bound("geodesic.Phi_roundtrip", Phi_rt, 1e-9, 1e-9),
        _bound("geodesic.slice_radius_identity", rad, 1e-12, 1e-12),
        _equal("geodesic.d_cc_p0_p1", cc_distance_from_origin_on_H(g), TWO_PI),
        _bound("geodesic.endpoint_p1", float(np.max(np.abs(p1 - np.r_[np.zeros(2 * n), FOUR_PI]))), 1e-12, 1e-12),
    ]


# --- maps ---------------------------------------------------------------------------


def check_maps(n: int, seed: int, tol: float, samples: int = 10_000) -> list[Check]:
    u, s = sample_H_arrays(seed, samples, (0.0, TWO_PI), n, name="verify.maps")
    P = geodesic_points(u, s)
    f = MapHandle.boundary_f(n)
    fP = map_eval(f, P)
    ext = np.max(np.abs(map_eval(MapHandle.extension_F(n), P) - fP))
    inv = np.max(np.abs(map_eval(f, fP) - P))
    heights = np.max(np.abs(fP[:, -1] - P[:, -1]))
    return [
        _bound("maps.extension_matches_boundary_f", ext, 1e-9, 1e-9),
        _bound("maps.boundary_f_involution", inv, tol, tol),
        _bound("maps.boundary_f_preserves_height", heights, 1e-12, 1e-12),
    ]


# --- lipschitz -----------------------------------------------------------------------


def check_closed_form(n: int, seed: int, tol: float, samples: int = 10_000) -> list[Check]:
    r = _rng(seed, "closed_form")
    u, s = sample_H_arrays(seed, samples, (0.0, TWO_PI), n, name="verify.closed_form")
    v = r.normal(size=u.shape)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    direct = koranyi_distance(geodesic_points(u, s), geodesic_points(v, s))
    closed = closed_form_same_height_arr(s, u, v)
    gap = np.max(np.abs(direct - closed) / np.maximum(1.0, direct))
    return [_bound("lipschitz.closed_form_identity", gap, tol, tol)]


def check_isometry(n: int, seed: int, tol: float, samples: int = 10_000) -> list[Check]:
    rep = same_height_isometry_check(samples, seed, n, (1e-3, TWO_PI - 1e-3))
    return [_bound("lipschitz.same_height_isometry", rep.max_ratio, tol, tol, n_pairs=rep.n_pairs)]


def check_lipschitz_stability(n: int, seed: int, samples: int = 10_000) -> list[Check]:
    f = MapHandle.boundary_f(n)
    small = lipschitz_scan(f, samples, seed)
    big = lipschitz_scan(f, 10 * samples, seed)
    rel = abs(big.max_ratio - small.max_ratio) / big.max_ratio
    chk = _bound("lipschitz.boundary_f_ratio_stability", rel, 0.05, 0.05,
                 max_ratio_small=small.max_ratio, max_ratio_large=big.max_ratio,
                 n_small=small.n_pairs, n_large=big.n_pairs)
    info = Check("lipschitz.boundary_f_max_ratio", "info", big.max_ratio, None, None,
                 {"p95_ratio": big.p95_ratio, "n_pairs": big.n_pairs})
    return [chk, info]


# --- differential ----------------------------------------------------------------------


def check_contact(n: int, seed: int, tol: float, samples: int = 100) -> list[Check]:
    r = _rng(seed, "contact")
    p = r.normal(size=2 * n + 1)
    ev = contact_report(MapHandle.even_reflection(n), p)
    rr = 1.7
    dl = contact_report(MapHandle.dilation(n, rr), p)
    F = MapHandle.extension_F(n)
    interior = sample_omega(seed, samples, n, name="verify.contact_interior")
    reps = [contact_report(F, x) for x in interior]
    min_res = min(c.residual for c in reps)
    dets = np.array([c.jac_det for c in reps])
    expected_det_ev = (-1.0) ** (n + 1)
    return [
        _bound("contact.even_reflection_lambda", abs(ev.lam + 1.0), 1e-8, 1e-8, lam=ev.lam),
        _bound("contact.even_reflection_det", abs(ev.jac_det - expected_det_ev), 1e-6, 1e-6,
               det=ev.jac_det, expected_det=expected_det_ev),
        _bound("contact.even_reflection_residual", ev.residual, 1e-8, 1e-8),
        _bound("contact.dilation_lambda", abs(dl.lam - rr * rr), 1e-8, 1e-8, lam=dl.lam),
        _bound("contact.dilation_det_identity", dl.det_identity_gap, 1e-6, 1e-6, det=dl.jac_det),
        Check("contact.extension_F_noncontact", "pass" if min_res > 0.1 else "fail", min_res, "> 0.1", None,
              {"points": samples}),
        _bound("contact.extension_F_det", float(np.max(np.abs(dets - (-1.0) ** n))), 1e-6, 1e-6),
    ]


def check_pansu(n: int, seed: int, samples: int = 100) -> list[Check]:
    r = _rng(seed, "pansu")
    probes = sample_unit_sphere(r, n, 16)
    p = 0.5 * r.normal(size=2 * n + 1)
    A = random_homomorphism(r, n)
    maps = {
        "homomorphism": MapHandle.homomorphism(A),
        "dilation": MapHandle.dilation(n, 2.0),
        "translation": MapHandle.left_translation(0.5 * r.normal(size=2 * n + 1)),
    }
    worst = 0.0
    for m in maps.values():
        for s in (1.0, 0.5):
            worst = max(worst, float(np.max(np.abs(pansu_quotient(m, p, probes, s)
                                                   - pansu_quotient(m, p, probes, s / 10)))))
    checks = [_bound("pansu.scale_independence", worst, 1e-12, 1e-12)]
    est = pansu_estimate(maps["homomorphism"], p, [0.5, 0.1, 0.02], probes)
    fit_err = float(max(np.max(np.abs(est.hom.M - A.M)), abs(est.hom.lam - A.lam)))
    checks.append(Check("pansu.homomorphism_converges", "pass" if est.converged and fit_err <= 1e-8 else "fail",
                        {"converged": est.converged, "fit_error": fit_err}, {"converged": True, "fit_error": "<= 1e-08"},
                        1e-8))
    est_d = pansu_estimate(maps["dilation"], p, [0.5, 0.1, 0.02], probes)
    checks.append(Check("pansu.dilation_converges", "pass" if est_d.converged else "fail",
                        est_d.converged, True, None, {"lam": est_d.hom.lam}))
    F = MapHandle.extension_F(n)
    interior = sample_omega(seed, samples, n, name="verify.pansu_interior")
    diverged = sum(not pansu_estimate(F, x, [0.05, 0.005, 0.0005], probes).converged for x in interior)
    frac = diverged / samples
    checks.append(Check("pansu.extension_F_nonconvergence", "pass" if frac >= 0.95 else "fail", frac, ">= 0.95",
                        None, {"points": samples}))
    return checks


def check_scaling(n: int, seed: int, samples: int = 20) -> list[Check]:
    L = np.eye(2 * n + 1)
    L[-1, 0] = 1.0
    lin = MapHandle.linear(L)
    r = _rng(seed, "scaling")
    ps = r.normal(size=(samples, 2 * n + 1))
    oracle = [scaling_diagnostic(lin, p, contact_defect_direction(lin, p), SCALING_SCALES).slope() for p in ps]
    F = MapHandle.extension_F(n)
    interior = sample_omega(seed, samples, n, name="verify.scaling_interior")
    slopes = []
    for p in interior:
        tab = scaling_diagnostic(F, p, contact_defect_direction(F, p), SCALING_SCALES)
        slopes.append(tab.slope() if not tab.truncated else np.nan)
    A = random_homomorphism(r, n)
    hom = MapHandle.homomorphism(A)
    q = np.zeros(2 * n + 1)
    q[0] = 1.0
    hom_slope = scaling_diagnostic(hom, ps[0], q, SCALING_SCALES).slope()

    def dev(vals):
        vals = np.asarray(vals, dtype=float)
        return float(np.max(np.abs(vals - SLOPE_EXPECTED))) if np.all(np.isfinite(vals)) else math.inf

    return [
        _bound("scaling.noncontact_linear_oracle_slope", dev(oracle), SLOPE_TOL, SLOPE_TOL,
               slopes=[min(oracle), max(oracle)]),
        _bound("scaling.extension_F_slope", dev(slopes), SLOPE_TOL, SLOPE_TOL,
               slopes=[float(np.nanmin(slopes)), float(np.nanmax(slopes))]),
        _bound("scaling.homomorphism_slope_flat", abs(hom_slope), 1e-6, 1e-6),
    ]


# --- degree -------------------------------------------------------------------------


def check_degree(n: int, seed: int) -> list[Check]:
    target = np.r_[np.zeros(2 * n), TWO_PI]
    expected = (-1) ** n
    out = []
    for alt, name in ((False, "degree_F_tilde"), (True, "degree_F_tilde_alt_slice")):
        res = degree_smooth(MapHandle.extension_F(n, alt_slice=alt), target, seed=seed)
        out.append(_equal(name, res.value, expected, preimages=[p.to_array().tolist() for p in res.preimages],
                          signs=res.jacobian_signs))
    return out


def check_homotopy(n: int, seed: int, samples: int = 1000) -> list[Check]:
    r = _rng(seed, "homotopy")
    A = random_homomorphism(r, n)
    a = min_injectivity_constant(A, samples, seed)
    radius = 0.5
    # right translation moves every image point by gauge(g) = a r / 2
    g = np.zeros(2 * n + 1)
    g[0] = 0.5 * a * radius
    pert = MapHandle.composite([MapHandle.homomorphism(A), MapHandle.right_translation(g)])
    Q = sample_unit_sphere(r, n, samples, radius)
    eps = float(np.max(koranyi_distance(map_eval(pert, Q), map_eval(MapHandle.homomorphism(A), Q)))) / radius
    gap = boundary_gap(A, pert, radius, samples, seed)
    ball = KoranyiBall(np.zeros(2 * n + 1), radius)
    deg_A = degree_smooth(MapHandle.homomorphism(A), np.zeros(2 * n + 1), ball, seed=seed).value
    deg_pert = degree_smooth(pert, np.zeros(2 * n + 1), ball, seed=seed).value
    expected = int(np.sign(A.lam ** (n + 1)))
    return [
        Check("homotopy.perturbation_below_a", "pass" if eps < a else "fail", eps, f"< {a!r}", None),
        Check("homotopy.boundary_gap_positive", "pass" if gap > 0 else "fail", gap, "> 0", None,
              {"a_times_r": a * radius, "eps_times_r": eps * radius}),
        _equal("homotopy.degree_homomorphism", deg_A, expected),
        _equal("homotopy.degree_perturbed", deg_pert, expected),
    ]


SUITES = {
    "metric": lambda c: check_metric_axioms(c.n, c.seed, c.tol, c.samples),
    "geodesic": lambda c: check_geodesic(c.n, c.seed, c.tol, min(c.samples, 1000)),
    "maps": lambda c: check_maps(c.n, c.seed, c.tol, c.samples),
    "closed_form": lambda c: check_closed_form(c.n, c.seed, c.tol, c.samples),
    "isometry": lambda c: check_isometry(c.n, c.seed, c.tol, c.samples),
    "lipschitz": lambda c: check_lipschitz_stability(c.n, c.seed, c.samples),
    "contact": lambda c: check_contact(c.n, c.seed, c.tol),
    "pansu": lambda c: check_pansu(c.n, c.seed),
    "scaling": lambda c: check_scaling(c.n, c.seed),
    "degree": lambda c: check_degree(c.n, c.seed),
    "homotopy": lambda c: check_homotopy(c.n, c.seed),
}


def run_all(config) -> list[Check]:
    checks = []
    for suite in SUITES.values():
        checks.extend(suite(config))
    return sorted(checks, key=lambda c: c.name)


__all__ = ["Check", "SUITES", "run_all"] + [k for k in dir() if k.startswith("check_")]
