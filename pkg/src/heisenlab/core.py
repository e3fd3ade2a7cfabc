"""Group algebra, gauge metric and contact-form primitives of the Heisenberg group.

Points of H^n are stored as flat float arrays ``(x_1..x_n, y_1..y_n, t)`` of
length ``2n+1``.  Every function here accepts either a :class:`Point` or an
array whose last axis has that length, and returns the same kind it was given,
so the same code serves single evaluations and vectorised scans.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm


class HeisenbergError(Exception):
    """Base class for errors raised by heisenlab."""


class UsageError(HeisenbergError, ValueError):
    """Bad arguments: dimension mismatch, out-of-range parameter."""


class DomainError(HeisenbergError, ValueError):
    """A point lies outside the domain of the requested map."""


class NumericalError(HeisenbergError, ArithmeticError):
    """Finite differences or a solver produced non-finite values."""


def dim_to_n(d: int) -> int:
    if d < 3 or d % 2 == 0:
        raise UsageError(f"coordinate length {d} is not 2n+1 for n >= 1")
    return (d - 1) // 2


@dataclass(frozen=True, eq=False)
class Point:
    """A point ``(x, y, t)`` of H^n."""

    x: np.ndarray
    y: np.ndarray
    t: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        if x.ndim != 1 or x.shape != y.shape or x.size == 0:
            raise UsageError(f"x and y must be vectors of equal length, got {x.shape} and {y.shape}")
        t = float(self.t)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and np.isfinite(t)):
            raise UsageError("point coordinates must be finite")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "t", t)

    @property
    def n(self) -> int:
        return self.x.size

    @classmethod
    def from_array(cls, arr) -> "Point":
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 1:
            raise UsageError(f"expected a single point, got array of shape {arr.shape}")
        n = dim_to_n(arr.size)
        return cls(arr[:n], arr[n:2 * n], arr[-1])

    @classmethod
    def origin(cls, n: int) -> "Point":
        return cls(np.zeros(n), np.zeros(n), 0.0)

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.x, self.y, [self.t]])

    def allclose(self, other: "Point", atol: float = 1e-12) -> bool:
        return np.allclose(self.to_array(), as_coords(other), rtol=0.0, atol=atol)

    def __repr__(self):
        return f"Point(x={self.x.tolist()}, y={self.y.tolist()}, t={self.t!r})"


def as_coords(p) -> np.ndarray:
    if isinstance(p, Point):
        return p.to_array()
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 0:
        raise UsageError("a point needs 2n+1 coordinates")
    dim_to_n(arr.shape[-1])
    return arr


def _like(ref, arr):
    return Point.from_array(arr) if isinstance(ref, Point) else arr


def split(P: np.ndarray):
    """Views ``(w, t)`` of an array of points; ``w`` holds the 2n horizontal coordinates."""
    return P[..., :-1], P[..., -1]


def _check_same_dim(P, Q):
    if P.shape[-1] != Q.shape[-1]:
        raise UsageError(f"dimension mismatch: {P.shape[-1]} vs {Q.shape[-1]} coordinates")


def symplectic_pairing(w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
    """``y·x' - x·y'`` for horizontal parts ``w = (x, y)``; the group law twists t by twice this."""
    n = w1.shape[-1] // 2
    return (np.sum(w1[..., n:] * w2[..., :n], axis=-1)
            - np.sum(w1[..., :n] * w2[..., n:], axis=-1))


def group_mul(p, q):
    """``(x,y,t) * (x',y',t') = (x+x', y+y', t+t' + 2(y·x' - x·y'))``."""
    P, Q = as_coords(p), as_coords(q)
    _check_same_dim(P, Q)
    wp, tp = split(P)
    wq, tq = split(Q)
    t = tp + tq + 2.0 * symplectic_pairing(wp, wq)
    out = np.concatenate([wp + wq, np.asarray(t)[..., None]], axis=-1)
    return _like(p, out)


def group_inv(p):
    return _like(p, -as_coords(p))


def dilate(s: float, p):
    """Homogeneous dilation ``(x, y, t) -> (s x, s y, s^2 t)``.

    ``s = 0`` is accepted and sends every point to the origin.
    """
    s = float(s)
    if s < 0 or not np.isfinite(s):
        raise UsageError(f"dilation factor must be a finite s >= 0, got {s}")
    P = as_coords(p)
    out = np.array(P, dtype=float, copy=True)
    out[..., :-1] *= s
    out[..., -1] *= s * s
    return _like(p, out)


def gauge(p) -> np.ndarray | float:
    """Korányi gauge ``(|w|^4 + t^2)^(1/4)``, the distance to the origin."""
    w, t = split(as_coords(p))
    val = (np.sum(w * w, axis=-1) ** 2 + t * t) ** 0.25
    return float(val) if np.ndim(val) == 0 else val


def koranyi_distance(p, q) -> np.ndarray | float:
    """Left-invariant Korányi distance ``gauge(q^-1 * p)``.

    Expanded, the vertical term is ``t - t' - 2(x·y' - y·x')``.  Note the sign:
    it is the one forced by the group law above.  See
    :func:`koranyi_distance_flipped` for the opposite-sign variant.
    """
    P, Q = as_coords(p), as_coords(q)
    _check_same_dim(P, Q)
    return gauge(group_mul(-Q, P))


def koranyi_distance_flipped(p, q) -> np.ndarray | float:
    """Gauge distance with vertical term ``t - t' + 2(x·y' - y·x')``.

    This is the left-invariant gauge of the mirror group law
    ``t + t' - 2(y·x' - x·y')``.  It is *not* invariant under :func:`group_mul`.
    It is kept so that the discrepancy can be tested.
    """
    P, Q = as_coords(p), as_coords(q)
    _check_same_dim(P, Q)
    wp, tp = split(P)
    wq, tq = split(Q)
    dw = wp - wq
    vert = tp - tq + 2.0 * symplectic_pairing(wq, wp)
    val = (np.sum(dw * dw, axis=-1) ** 2 + vert * vert) ** 0.25
    return float(val) if np.ndim(val) == 0 else val


def euclidean_distance(p, q):
    val = np.linalg.norm(as_coords(p) - as_coords(q), axis=-1)
    return float(val) if np.ndim(val) == 0 else val


# --- tangent vectors and the contact form -------------------------------------


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector ``dx ∂x + dy ∂y + dt ∂t`` based at ``base``."""

    base: Point
    dx: np.ndarray
    dy: np.ndarray
    dt: float

    def __post_init__(self):
        dx = np.atleast_1d(np.asarray(self.dx, dtype=float))
        dy = np.atleast_1d(np.asarray(self.dy, dtype=float))
        if dx.shape != (self.base.n,) or dy.shape != (self.base.n,):
            raise UsageError("tangent vector components must match the base point dimension")
        if not (np.all(np.isfinite(dx)) and np.all(np.isfinite(dy)) and np.isfinite(self.dt)):
            raise UsageError("tangent vector components must be finite")
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "dy", dy)
        object.__setattr__(self, "dt", float(self.dt))

    def components(self) -> np.ndarray:
        return np.concatenate([self.dx, self.dy, [self.dt]])

    @classmethod
    def from_components(cls, base: Point, v) -> "TangentVector":
        v = np.asarray(v, dtype=float)
        n = base.n
        return cls(base, v[:n], v[n:2 * n], v[-1])


def contact_form_arr(base, v) -> np.ndarray:
    """θ = dt - 2 Σ (y_i dx_i - x_i dy_i), evaluated on component arrays."""
    B = as_coords(base)
    V = np.asarray(v, dtype=float)
    wb, _ = split(B)
    wv, vt = split(V)
    return vt - 2.0 * symplectic_pairing(wb, wv)


def contact_form(v: TangentVector) -> float:
    return float(contact_form_arr(v.base.to_array(), v.components()))


def frame_matrix(p) -> np.ndarray:
    """Columns are X_1..X_n, Y_1..Y_n, T at ``p`` in coordinate components."""
    P = as_coords(p)
    if P.ndim != 1:
        raise UsageError("frame_matrix expects a single point")
    n = dim_to_n(P.size)
    x, y = P[:n], P[n:2 * n]
    F = np.eye(2 * n + 1)
    F[-1, :n] = 2.0 * y
    F[-1, n:2 * n] = -2.0 * x
    return F


def frame_vectors(p: Point) -> list[TangentVector]:
    F = frame_matrix(p)
    return [TangentVector.from_components(p, F[:, j]) for j in range(F.shape[1])]


# --- homogeneous homomorphisms -------------------------------------------------


def skew_form(n: int) -> np.ndarray:
    """Matrix J with ``w1 @ J @ w2 == symplectic_pairing(w1, w2)``."""
    J = np.zeros((2 * n, 2 * n))
    J[n:, :n] = np.eye(n)
    J[:n, n:] = -np.eye(n)
    return J


def hom_matrix_gap(M: np.ndarray, lam: float) -> float:
    """Max entry of ``MᵀJM - λJ``; zero exactly for homomorphisms."""
    n = M.shape[0] // 2
    J = skew_form(n)
    return float(np.max(np.abs(M.T @ J @ M - lam * J)))


def hom_property_gap(M: np.ndarray, lam: float, pairs: int = 32, seed: int = 0) -> float:
    """Randomised relative defect of ``A(p*q) = A(p)*A(q)``."""
    n = M.shape[0] // 2
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(pairs, 2 * n + 1))
    Q = rng.normal(size=(pairs, 2 * n + 1))
    lhs = _hom_apply_arr(M, lam, group_mul(P, Q))
    rhs = group_mul(_hom_apply_arr(M, lam, P), _hom_apply_arr(M, lam, Q))
    scale = 1.0 + np.max(np.abs(lhs)) + np.max(np.abs(rhs))
    return float(np.max(np.abs(lhs - rhs)) / scale)


def _hom_apply_arr(M, lam, P):
    w, t = split(P)
    return np.concatenate([w @ M.T, (lam * t)[..., None]], axis=-1)


@dataclass(frozen=True, eq=False)
class HomogeneousHom:
    """Homogeneous homomorphism ``(w, t) -> (M w, λ t)`` of H^n.

    Construction checks the homomorphism law on random pairs unless
    ``validate=False`` (used for least-squares fits that still need judging).
    """

    n: int
    M: np.ndarray
    lam: float
    validate: bool = field(default=True, repr=False)
    tol: float = field(default=1e-9, repr=False)

    def __post_init__(self):
        M = np.array(self.M, dtype=float)
        if M.shape != (2 * self.n, 2 * self.n):
            raise UsageError(f"M must be {2 * self.n}x{2 * self.n}, got {M.shape}")
        if not np.all(np.isfinite(M)) or not np.isfinite(self.lam):
            raise UsageError("homomorphism data must be finite")
        M.flags.writeable = False
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "lam", float(self.lam))
        if self.validate:
            gap = hom_property_gap(M, self.lam)
            if gap > self.tol:
                raise UsageError(f"(M, lambda) is not a group homomorphism (relative defect {gap:.3g})")

    @classmethod
    def identity(cls, n: int) -> "HomogeneousHom":
        return cls(n, np.eye(2 * n), 1.0)

    @classmethod
    def dilation(cls, n: int, r: float) -> "HomogeneousHom":
        return cls(n, r * np.eye(2 * n), r * r)

    def matrix(self) -> np.ndarray:
        """Full ``(2n+1)x(2n+1)`` coordinate matrix."""
        A = np.zeros((2 * self.n + 1, 2 * self.n + 1))
        A[:-1, :-1] = self.M
        A[-1, -1] = self.lam
        return A

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix()))

    def min_singular_value(self) -> float:
        return float(np.linalg.svd(self.M, compute_uv=False).min())

    @property
    def is_injective(self) -> bool:
        return self.min_singular_value() > 1e-12 and abs(self.lam) > 1e-12

    def __call__(self, p):
        return hom_apply(self, p)


def hom_apply(A: HomogeneousHom, p):
    P = as_coords(p)
    if P.shape[-1] != 2 * A.n + 1:
        raise UsageError(f"homomorphism acts on H^{A.n}, point has {P.shape[-1]} coordinates")
    return _like(p, _hom_apply_arr(A.M, A.lam, P))


def random_homomorphism(rng: np.random.Generator, n: int, scale: float | None = None,
                        reversing: bool = False) -> HomogeneousHom:
    """Random injective homogeneous homomorphism ``r·S`` (S symplectic, λ = r²).

    With ``reversing=True`` the horizontal part is composed with
    ``(x, y) -> (-x, y)``, which flips the multiplier to ``λ = -r²``.
    """
    J = skew_form(n)
    Hs = rng.normal(scale=0.4, size=(2 * n, 2 * n))
    Hs = 0.5 * (Hs + Hs.T)
    S = expm(J @ Hs)
    r = float(rng.uniform(0.5, 2.0)) if scale is None else float(scale)
    M = r * S
    lam = r * r
    if reversing:
        M = M @ np.diag(np.concatenate([-np.ones(n), np.ones(n)]))
        lam = -lam
    return HomogeneousHom(n, M, lam)


def sample_unit_sphere(rng: np.random.Generator, n: int, count: int, radius: float = 1.0) -> np.ndarray:
    """Points on the Korányi sphere ``gauge = radius``: Gaussian directions pushed out by dilation."""
    Q = rng.normal(size=(count, 2 * n + 1))
    g = gauge(Q)
    scale = radius / np.atleast_1d(g)
    out = Q.copy()
    out[:, :-1] *= scale[:, None]
    out[:, -1] *= scale * scale
    return out
