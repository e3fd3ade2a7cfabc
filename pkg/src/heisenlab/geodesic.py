"""The geodesic-foliated sphere H = Φ(S^{2n-1} × [0, 2π]) and the domain Ω it bounds.

Φ sends ``((a, b), s)`` to the point at arc length ``s`` on the unit-speed
geodesic from the origin p0 to p1 = (0, 0, 4π) with initial direction (a, b).
All array helpers are vectorised over a leading batch axis.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import DomainError, Point, UsageError, as_coords, dim_to_n, split
from .rng import stream

TWO_PI = 2.0 * np.pi
FOUR_PI = 4.0 * np.pi
POLE_EPS = 1e-6


def _check_range(v, lo, hi, what):
    v = np.asarray(v, dtype=float)
    if np.any(~np.isfinite(v)) or np.any(v < lo) or np.any(v > hi):
        raise UsageError(f"{what} must lie in [{lo:.6g}, {hi:.6g}]")
    return v


def _scalar_or_array(v):
    return float(v) if np.ndim(v) == 0 else v


SERIES_CUT = 0.1


def _series_s_minus_sin(s):
    s2 = s * s
    return s * s2 / 6.0 * (1.0 - s2 / 20.0 * (1.0 - s2 / 42.0 * (1.0 - s2 / 72.0 * (1.0 - s2 / 110.0))))


def _plain_s_minus_sin(s):
    return s - np.sin(s)


def _s_minus_sin(s):
    # series below the cut, where s - sin s cancels to nothing
    s = np.asarray(s, dtype=float)
    return np.where(s < SERIES_CUT, _series_s_minus_sin(s), _plain_s_minus_sin(s))


def phi_height(s):
    """Height ``2(s - sin s)`` reached at arc length ``s``."""
    s = _check_range(s, 0.0, TWO_PI, "arc length s")
    return _scalar_or_array(2.0 * _s_minus_sin(s))


def _bisect(z, g, lo, hi, iterations):
    if z.size == 0:
        return z
    lo = np.full_like(z, lo)
    hi = np.full_like(z, hi)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if np.all((mid == lo) | (mid == hi)):
            break  # brackets are adjacent floats
        below = 2.0 * g(mid) < z
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def phi_height_inverse(z, iterations: int = 96):
    """Arc length whose height is ``z``, by vectorised bisection.

    Bisection rather than Newton: the derivative ``2(1 - cos s)`` vanishes at
    both ends of the interval.
    """
    z = np.asarray(_check_range(z, 0.0, FOUR_PI, "height t"), dtype=float)
    flat = z.reshape(-1)
    small = flat < 2.0 * _series_s_minus_sin(SERIES_CUT)
    s = np.empty_like(flat)
    s[small] = _bisect(flat[small], _series_s_minus_sin, 0.0, SERIES_CUT, iterations)
    s[~small] = _bisect(flat[~small], _plain_s_minus_sin, SERIES_CUT, TWO_PI, iterations)
    s = np.where(flat == 0.0, 0.0, np.where(flat == FOUR_PI, TWO_PI, s))
    return _scalar_or_array(s.reshape(z.shape))


def slice_radius(s):
    """``|(x, y)|`` of every point of H at arc length s: ``sqrt(2 - 2 cos s)``, computed as ``2 sin(s/2)``."""
    s = _check_range(s, 0.0, TWO_PI, "arc length s")
    return _scalar_or_array(2.0 * np.abs(np.sin(0.5 * s)))


def _slice_radius_at_height(t):
    return 2.0 * np.abs(np.sin(0.5 * np.asarray(phi_height_inverse(np.clip(t, 0.0, FOUR_PI)))))


@dataclass(frozen=True, eq=False)
class SphereParam:
    """A unit vector ``(a, b)`` of R^{2n}."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if a.ndim != 1 or a.shape != b.shape:
            raise UsageError("a and b must be vectors of equal length")
        norm2 = float(a @ a + b @ b)
        if abs(norm2 - 1.0) > 1e-12:
            raise UsageError(f"|a|^2 + |b|^2 = {norm2!r}, expected 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.size

    def vector(self) -> np.ndarray:
        return np.concatenate([self.a, self.b])

    @classmethod
    def from_vector(cls, u) -> "SphereParam":
        u = np.asarray(u, dtype=float)
        n = u.size // 2
        return cls(u[:n], u[n:])

    def reflected(self) -> "SphereParam":
        """Symplectic reflection ``(a, b) -> (-a, b)``."""
        return SphereParam(-self.a, self.b)


@dataclass(frozen=True, eq=False)
class GeodesicParam:
    """Parameters ``((a, b), s)`` of a point of H.

    ``sphere`` is None at the poles, where every direction gives the same point.
    ``ill_conditioned`` marks points recovered within ``POLE_EPS`` of a pole.
    """

    sphere: SphereParam | None
    s: float
    ill_conditioned: bool = False

    def __post_init__(self):
        s = float(self.s)
        if not 0.0 <= s <= TWO_PI:
            raise UsageError(f"arc length s = {s} outside [0, 2π]")
        object.__setattr__(self, "s", s)

    @property
    def is_pole(self) -> bool:
        return self.sphere is None

    @property
    def n(self) -> int:
        return self.sphere.n


def geodesic_points(u: np.ndarray, s) -> np.ndarray:
    """Vectorised Φ: ``u`` has shape (..., 2n) with rows on the unit sphere."""
    u = np.asarray(u, dtype=float)
    s = np.asarray(s, dtype=float)
    n = u.shape[-1] // 2
    a, b = u[..., :n], u[..., n:]
    sn = np.sin(s)[..., None]
    one_c = (2.0 * np.sin(0.5 * s) ** 2)[..., None]
    x = sn * a + one_c * b
    y = -one_c * a + sn * b
    t = 2.0 * _s_minus_sin(s)
    return np.concatenate([x, y, t[..., None]], axis=-1)


def geodesic_point(g: GeodesicParam, n: int | None = None) -> Point:
    if g.is_pole:
        if n is None:
            raise UsageError("dimension n is required to place a pole")
        return Point(np.zeros(n), np.zeros(n), 0.0 if g.s < np.pi else FOUR_PI)
    return Point.from_array(geodesic_points(g.sphere.vector(), g.s))


def arc_length_on_H(P: np.ndarray) -> np.ndarray:
    """Arc length of points of H, from the better conditioned of t and |w|.

    Near the poles ``dt/ds = 4 sin²(s/2)`` vanishes while ``d|w|/ds = cos(s/2)``
    does not, so there ``s = 2 arcsin(|w|/2)`` (mirrored above t = 2π) replaces
    the height inversion.
    """
    w, t = split(np.asarray(P, dtype=float))
    s_t = np.asarray(phi_height_inverse(np.clip(t, 0.0, FOUR_PI)))
    half = 0.5 * s_t
    use_w = 4.0 * np.sin(half) ** 2 < np.abs(np.cos(half))
    s_w = 2.0 * np.arcsin(np.clip(0.5 * np.linalg.norm(w, axis=-1), 0.0, 1.0))
    s_w = np.where(s_t > np.pi, TWO_PI - s_w, s_w)
    return np.where(use_w, s_w, s_t)


def invert_points(P: np.ndarray):
    """Vectorised Φ⁻¹ without domain checks.

    Returns ``(u, s)``; ``u`` is the raw solution of the blockwise 2x2 system,
    not renormalised, and is NaN at the exact poles.  Points are assumed to
    lie on H (see :func:`arc_length_on_H`).
    """
    P = np.asarray(P, dtype=float)
    n = dim_to_n(P.shape[-1])
    w, t = split(P)
    s = arc_length_on_H(P)
    x, y = w[..., :n], w[..., n:]
    sn = np.sin(s)[..., None]
    one_c = (2.0 * np.sin(0.5 * s) ** 2)[..., None]
    det = sn * sn + one_c * one_c
    with np.errstate(invalid="ignore", divide="ignore"):
        a = (sn * x - one_c * y) / det
        b = (one_c * x + sn * y) / det
    return np.concatenate([a, b], axis=-1), s


def _gaps(P: np.ndarray):
    """Radial gap ``|w| - R(t)`` and height gap to the nearest point of H with the same |w|.

    Each bounds the Euclidean distance to H from above.  Near the poles the
    radial gap is poorly conditioned in t, and the height gap is not.
    """
    w, t = split(np.asarray(P, dtype=float))
    r = np.linalg.norm(w, axis=-1)
    dr = r - _slice_radius_at_height(t)
    s_w = 2.0 * np.arcsin(np.clip(0.5 * r, 0.0, 1.0))
    low = 2.0 * _s_minus_sin(s_w)
    dt = np.minimum(np.abs(t - low), np.abs(t - (FOUR_PI - low)))
    return dr, np.where(r > 2.0, np.inf, dt)


def distance_to_H(P: np.ndarray) -> np.ndarray:
    """Upper bound on the Euclidean distance to H, sharp to first order."""
    dr, dt = _gaps(P)
    return np.minimum(np.abs(dr), dt)


def on_H(p, tol: float = 1e-8) -> bool:
    P = as_coords(p)
    t = P[-1]
    if t < -tol or t > FOUR_PI + tol:
        return False
    return bool(abs(distance_to_H(P[None, :])[0]) <= tol)


def geodesic_invert(p, tol: float = 1e-8) -> GeodesicParam:
    """Unique ``((a, b), s)`` with ``Φ((a, b), s) = p``.

    Poles give a :class:`GeodesicParam` with ``sphere=None``.  Within
    ``POLE_EPS`` of a pole the linear system is nearly singular, and the
    result carries ``ill_conditioned=True``.
    """
    P = as_coords(p)
    if P.ndim != 1:
        raise UsageError("geodesic_invert expects a single point; use invert_points for batches")
    if not on_H(P, tol):
        raise DomainError(f"point {P.tolist()} is not on H (tolerance {tol})")
    P = P.copy()
    P[-1] = min(max(P[-1], 0.0), FOUR_PI)
    w, t = split(P)
    if not np.any(w) and t in (0.0, FOUR_PI):
        return GeodesicParam(None, 0.0 if t == 0.0 else TWO_PI)
    u, s = invert_points(P)
    s = float(s)
    nrm = np.linalg.norm(u)
    if not np.isfinite(nrm) or nrm == 0.0:
        return GeodesicParam(None, 0.0 if s < np.pi else TWO_PI, ill_conditioned=True)
    pole_adjacent = s < POLE_EPS or s > TWO_PI - POLE_EPS
    return GeodesicParam(SphereParam.from_vector(u / nrm), s, ill_conditioned=pole_adjacent)


class Membership(enum.Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def omega_codes(P, band: float = 1e-9) -> np.ndarray:
    """Classify points against Ω: ``1`` inside, ``0`` on H (within ``band``), ``-1`` outside."""
    P = np.asarray(as_coords(P), dtype=float)
    t = P[..., -1]
    dr, dt = _gaps(P)
    in_height = (t >= -band) & (t <= FOUR_PI + band)
    boundary = in_height & (np.minimum(np.abs(dr), dt) <= band)
    inside = (t > 0.0) & (t < FOUR_PI) & (dr < 0.0)
    return np.where(boundary, 0, np.where(inside, 1, -1))


def omega_contains(p, band: float = 1e-9) -> Membership:
    code = int(np.atleast_1d(omega_codes(as_coords(p), band))[0])
    return {1: Membership.INSIDE, 0: Membership.BOUNDARY, -1: Membership.OUTSIDE}[code]


def cc_distance_from_origin_on_H(g: GeodesicParam) -> float:
    """Carnot–Carathéodory distance from p0, which is the arc length along the foliation."""
    return g.s


def cc_distance_same_geodesic(g1: GeodesicParam, g2: GeodesicParam) -> float:
    """``|s - s'|`` for two points on one leaf of the foliation."""
    if g1.sphere is not None and g2.sphere is not None:
        if not np.allclose(g1.sphere.vector(), g2.sphere.vector(), atol=1e-12):
            raise UsageError("points are not on the same geodesic")
    return abs(g1.s - g2.s)


def sample_sphere_arrays(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    u = rng.normal(size=(count, 2 * n))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def sample_H_arrays(seed: int, count: int, s_range=(0.0, TWO_PI), n: int = 1,
                    name: str = "geodesic.sample_H") -> tuple[np.ndarray, np.ndarray]:
    """Array form of :func:`sample_H`: ``(u, s)`` with u of shape (count, 2n)."""
    lo, hi = (float(v) for v in s_range)
    if count < 1:
        raise UsageError("count must be >= 1")
    if not (0.0 <= lo < hi <= TWO_PI):
        raise UsageError(f"s_range {s_range} must be a non-empty sub-interval of [0, 2π]")
    rng = stream(seed, name)
    u = sample_sphere_arrays(rng, n, count)
    s = rng.uniform(lo, hi, size=count)
    return u, s


def sample_H(seed: int, count: int, s_range=(0.0, TWO_PI), n: int = 1) -> list[GeodesicParam]:
    """Seeded samples: (a, b) uniform on S^{2n-1}, s uniform on ``s_range``."""
    u, s = sample_H_arrays(seed, count, s_range, n)
    return [GeodesicParam(SphereParam.from_vector(ui), si) for ui, si in zip(u, s)]


def sample_omega(seed: int, count: int, n: int = 1, t_margin: float = 1.0,
                 radius_fraction=(0.2, 0.8), name: str = "geodesic.sample_omega") -> np.ndarray:
    """Seeded interior points of Ω, kept away from the poles and the t-axis.

    Heights are uniform on ``[t_margin, 4π - t_margin]``; the horizontal part
    has a uniform direction and a radius uniform on the given fraction of the
    slice radius.
    """
    lo, hi = radius_fraction
    if not (0.0 <= lo < hi < 1.0) or not (0.0 < t_margin < TWO_PI):
        raise UsageError("invalid interior sampling window")
    rng = stream(seed, name)
    t = rng.uniform(t_margin, FOUR_PI - t_margin, count)
    u = sample_sphere_arrays(rng, n, count)
    frac = rng.uniform(lo, hi, count)
    R = _slice_radius_at_height(t)
    return np.column_stack([u * (frac * R)[:, None], t])
