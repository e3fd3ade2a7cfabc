"""Monte-Carlo distance-ratio scans on H and the same-height isometry of f."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .core import DomainError, UsageError, koranyi_distance
from .geodesic import (
    POLE_EPS,
    TWO_PI,
    GeodesicParam,
    SphereParam,
    geodesic_point,
    geodesic_points,
    sample_sphere_arrays,
)
from .maps import MapHandle, map_eval
from .rng import stream

DEFAULT_S_RANGE = (1e-3, TWO_PI - 1e-3)


def closed_form_same_height_arr(s, U, V):
    """Vectorised closed form of ``d_K(Φ(u, s), Φ(v, s))``."""
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    n = U.shape[-1] // 2
    a, b = U[..., :n], U[..., n:]
    a2, b2 = V[..., :n], V[..., n:]
    sq = np.sum((U - V) ** 2, axis=-1)
    cross = np.sum(a * b2, axis=-1) - np.sum(b * a2, axis=-1)
    s = np.asarray(s, dtype=float)
    return 2.0 * np.abs(np.sin(0.5 * s)) * (sq * sq + 4.0 * cross * cross) ** 0.25


def closed_form_same_height(s: float, u: SphereParam, v: SphereParam) -> float:
    """``(2 - 2cos s)^{1/2} ((|a-a'|² + |b-b'|²)² + 4|a·b' - b·a'|²)^{1/4}``."""
    if not 0.0 <= s <= TWO_PI:
        raise UsageError("s must lie in [0, 2π]")
    return float(closed_form_same_height_arr(s, u.vector(), v.vector()))


@dataclass
class ScanReport:
    n_pairs: int
    max_ratio: float
    p95_ratio: float
    argmax_pair: tuple[GeodesicParam, GeodesicParam]
    seed: int
    metric: str = "koranyi"
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        p, q = self.argmax_pair
        return {
            "n_pairs": self.n_pairs,
            "max_ratio": self.max_ratio,
            "p95_ratio": self.p95_ratio,
            "argmax_pair": [
                {"u": p.sphere.vector().tolist(), "s": p.s},
                {"u": q.sphere.vector().tolist(), "s": q.s},
            ],
            "seed": self.seed,
            "metric": self.metric,
            "notes": list(self.notes),
        }


@dataclass
class PairSample:
    """Raw pairs from a scan, one row per pair."""

    u1: np.ndarray
    s1: np.ndarray
    u2: np.ndarray
    s2: np.ndarray
    d_source: np.ndarray
    d_image: np.ndarray

    @property
    def ratio(self) -> np.ndarray:
        return self.d_image / self.d_source

    def write_csv(self, path_or_file) -> None:
        n = self.u1.shape[1] // 2
        header = (["s1"] + [f"a1_{i}" for i in range(n)] + [f"b1_{i}" for i in range(n)]
                  + ["s2"] + [f"a2_{i}" for i in range(n)] + [f"b2_{i}" for i in range(n)]
                  + ["d_source", "d_image", "ratio"])
        own = isinstance(path_or_file, str)
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh)
            w.writerow(header)
            for row in zip(self.s1, self.u1, self.s2, self.u2, self.d_source, self.d_image, self.ratio):
                s1, u1, s2, u2, ds, di, r = row
                w.writerow([repr(float(s1))] + [repr(float(v)) for v in u1] + [repr(float(s2))]
                           + [repr(float(v)) for v in u2] + [repr(float(ds)), repr(float(di)), repr(float(r))])
        finally:
            if own:
                fh.close()


def sample_pairs(m: MapHandle, n_pairs: int, seed: int, s_range=DEFAULT_S_RANGE,
                 same_height: bool = False, name: str = "lipschitz.scan") -> tuple[PairSample, int]:
    """Seeded pairs of points on H with their source and image distances.

    Returns the sample and the number of coincident pairs that were redrawn.
    """
    if n_pairs < 1:
        raise UsageError("n_pairs must be >= 1")
    lo, hi = (float(v) for v in s_range)
    if not (0.0 <= lo < hi <= TWO_PI):
        raise UsageError(f"s_range {s_range} must be a non-empty sub-interval of [0, 2π]")
    n = m.n
    rng = stream(seed, name)
    u1 = sample_sphere_arrays(rng, n, n_pairs)
    u2 = sample_sphere_arrays(rng, n, n_pairs)
    s1 = rng.uniform(lo, hi, n_pairs)
    s2 = s1.copy() if same_height else rng.uniform(lo, hi, n_pairs)
    P = geodesic_points(u1, s1)
    Q = geodesic_points(u2, s2)
    d = np.asarray(koranyi_distance(P, Q))
    redrawn = 0
    for _ in range(100):
        clash = np.flatnonzero(d <= 1e-12)
        if clash.size == 0:
            break
        redrawn += clash.size
        u2[clash] = sample_sphere_arrays(rng, n, clash.size)
        if not same_height:
            s2[clash] = rng.uniform(lo, hi, clash.size)
        Q[clash] = geodesic_points(u2[clash], s2[clash])
        d[clash] = koranyi_distance(P[clash], Q[clash])
    d_img = np.asarray(koranyi_distance(map_eval(m, P), map_eval(m, Q)))
    return PairSample(u1, s1, u2, s2, d, d_img), redrawn


def _report(sample: PairSample, values: np.ndarray, seed: int, notes: list[str]) -> ScanReport:
    i = int(np.argmax(values))
    pair = (GeodesicParam(SphereParam.from_vector(sample.u1[i]), sample.s1[i]),
            GeodesicParam(SphereParam.from_vector(sample.u2[i]), sample.s2[i]))
    return ScanReport(len(values), float(values[i]), float(np.percentile(values, 95)), pair, seed,
                      "koranyi", notes)


def lipschitz_scan(m: MapHandle, n_pairs: int, seed: int, s_range=DEFAULT_S_RANGE,
                   metric: str = "koranyi", same_height: bool = False) -> ScanReport:
    """Empirical Lipschitz constant of ``m`` on H: the largest sampled distance ratio.

    Pairs are independent uniform draws; with ``same_height`` both points share s.
    """
    if metric != "koranyi":
        raise UsageError("only the Korányi metric is available for off-foliation pairs")
    sample, redrawn = sample_pairs(m, n_pairs, seed, s_range, same_height)
    notes = [f"s_range=[{s_range[0]!r}, {s_range[1]!r}]", f"same_height={same_height}"]
    if redrawn:
        notes.append(f"{redrawn} coincident pairs redrawn")
    return _report(sample, sample.ratio, seed, notes)


def same_height_isometry_check(n_pairs: int, seed: int, n: int = 1, s_range=DEFAULT_S_RANGE) -> ScanReport:
    """Largest relative gap ``|d_K(f p, f q) - d_K(p, q)| / (1 + d_K(p, q))`` over same-height pairs.

    ``max_ratio`` holds the gap here, not a distance ratio.
    """
    sample, _ = sample_pairs(MapHandle.boundary_f(n), n_pairs, seed, s_range, same_height=True,
                             name="lipschitz.same_height")
    gap = np.abs(sample.d_image - sample.d_source) / (1.0 + sample.d_source)
    return _report(sample, gap, seed, ["max_ratio is the relative isometry gap"])


@dataclass
class TriangleBounds:
    d_fp_fpp: float
    d_fp_fq: float
    d_fq_fpp: float
    d_p_q: float
    d_p_pp: float
    d_q_pp: float

    @property
    def triangle_slack(self) -> float:
        """``d(fp, fq) + d(fq, fp') - d(fp, fp')``; nonnegative for any metric."""
        return self.d_fp_fq + self.d_fq_fpp - self.d_fp_fpp

    @property
    def isometry_gap(self) -> float:
        return abs(self.d_fp_fq - self.d_p_q)


def triangle_decomposition(p: GeodesicParam, p_prime: GeodesicParam) -> tuple[GeodesicParam, TriangleBounds]:
    """Split ``d(f p, f p')`` through ``q``, the point on p′'s geodesic at p's height."""
    for g in (p, p_prime):
        if g.is_pole or g.s < POLE_EPS or g.s > TWO_PI - POLE_EPS:
            raise DomainError("triangle_decomposition needs points away from the poles")
    q = GeodesicParam(p_prime.sphere, p.s)
    n = p.sphere.n
    f = MapHandle.boundary_f(n)
    Pp, Ppp, Pq = (geodesic_point(g).to_array() for g in (p, p_prime, q))
    fp, fpp, fq = (map_eval(f, X) for X in (Pp, Ppp, Pq))
    bounds = TriangleBounds(
        d_fp_fpp=koranyi_distance(fp, fpp),
        d_fp_fq=koranyi_distance(fp, fq),
        d_fq_fpp=koranyi_distance(fq, fpp),
        d_p_q=koranyi_distance(Pp, Pq),
        d_p_pp=koranyi_distance(Pp, Ppp),
        d_q_pp=koranyi_distance(Pq, Ppp),
    )
    return q, bounds
