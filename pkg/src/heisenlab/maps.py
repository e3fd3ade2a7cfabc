"""Catalog of maps H^n -> H^n: the boundary reflection f, its extension F̃, and reference maps.

Every map is evaluated through :func:`map_eval`, which is vectorised over a
leading batch axis.  ``check=False`` skips domain validation: rows outside
the domain become NaN, which the solvers need.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DomainError,
    HomogeneousHom,
    Point,
    UsageError,
    _like,
    as_coords,
    dilate,
    group_mul,
    hom_apply,
    split,
)
from .geodesic import FOUR_PI, distance_to_H, geodesic_points, invert_points, omega_codes, phi_height_inverse

KINDS = (
    "identity",
    "boundary_f",
    "extension_F",
    "extension_F_alt_slice",
    "left_translation",
    "right_translation",
    "dilation",
    "homomorphism",
    "even_reflection",
    "linear",
    "composite",
)

ON_H_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class MapHandle:
    """A named map from the catalog.

    ``param`` holds the kind-specific parameter: a translation point, a
    dilation factor, a :class:`HomogeneousHom`, a raw ``(2n+1)``-square
    matrix for ``linear``, or a tuple of handles for ``composite``.
    """

    kind: str
    n: int
    param: object = field(default=None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown map kind {self.kind!r}")
        if self.n < 1:
            raise UsageError("n must be >= 1")
        if self.kind in ("left_translation", "right_translation"):
            g = as_coords(self.param)
            if g.shape != (2 * self.n + 1,):
                raise UsageError("translation point has the wrong dimension")
            object.__setattr__(self, "param", g)
        elif self.kind == "dilation":
            r = float(self.param)
            if not r >= 0:
                raise UsageError("dilation factor must be >= 0")
            object.__setattr__(self, "param", r)
        elif self.kind == "homomorphism":
            if not isinstance(self.param, HomogeneousHom) or self.param.n != self.n:
                raise UsageError("homomorphism handle needs a HomogeneousHom on H^n")
        elif self.kind == "linear":
            L = np.asarray(self.param, dtype=float)
            if L.shape != (2 * self.n + 1, 2 * self.n + 1):
                raise UsageError("linear map needs a (2n+1)x(2n+1) matrix")
            object.__setattr__(self, "param", L)
        elif self.kind == "composite":
            parts = tuple(self.param)
            if not parts or any(m.n != self.n for m in parts):
                raise UsageError("composite needs a non-empty list of maps on H^n")
            object.__setattr__(self, "param", parts)

    def __call__(self, p):
        return map_eval(self, p)

    @property
    def name(self) -> str:
        return self.kind

    # catalog constructors

    @classmethod
    def identity(cls, n: int) -> "MapHandle":
        return cls("identity", n)

    @classmethod
    def boundary_f(cls, n: int) -> "MapHandle":
        return cls("boundary_f", n)

    @classmethod
    def extension_F(cls, n: int, alt_slice: bool = False) -> "MapHandle":
        return cls("extension_F_alt_slice" if alt_slice else "extension_F", n)

    @classmethod
    def left_translation(cls, g) -> "MapHandle":
        g = as_coords(g)
        return cls("left_translation", (g.size - 1) // 2, g)

    @classmethod
    def right_translation(cls, g) -> "MapHandle":
        """``p -> p * g``; moves every point by exactly ``gauge(g)``."""
        g = as_coords(g)
        return cls("right_translation", (g.size - 1) // 2, g)

    @classmethod
    def dilation(cls, n: int, r: float) -> "MapHandle":
        return cls("dilation", n, r)

    @classmethod
    def homomorphism(cls, A: HomogeneousHom) -> "MapHandle":
        return cls("homomorphism", A.n, A)

    @classmethod
    def even_reflection(cls, n: int) -> "MapHandle":
        return cls("even_reflection", n)

    @classmethod
    def linear(cls, L) -> "MapHandle":
        L = np.asarray(L, dtype=float)
        return cls("linear", (L.shape[0] - 1) // 2, L)

    @classmethod
    def composite(cls, maps) -> "MapHandle":
        maps = tuple(maps)
        if not maps:
            raise UsageError("composite needs at least one map")
        return cls("composite", maps[0].n, maps)


def slice_matrix(s, alt_slice: bool = False) -> np.ndarray:
    """2x2 slice map acting on each pair ``(x_i, y_i)`` at arc length ``s``.

    Derived: ``M(s) R M(s)^-1 = [[-cos s, sin s], [sin s, cos s]]``.
    Alternative: ``[[cos s, sin s], [sin s, -cos s]]``.
    """
    c, sn = np.cos(s), np.sin(s)
    if alt_slice:
        return np.array([[c, sn], [sn, -c]])
    return np.array([[-c, sn], [sn, c]])


def _apply_slice(P, alt_slice):
    n = (P.shape[-1] - 1) // 2
    w, t = split(P)
    s = np.asarray(phi_height_inverse(np.clip(t, 0.0, FOUR_PI)))
    c, sn = np.cos(s)[..., None], np.sin(s)[..., None]
    x, y = w[..., :n], w[..., n:]
    if alt_slice:
        xn, yn = c * x + sn * y, sn * x - c * y
    else:
        xn, yn = -c * x + sn * y, sn * x + c * y
    return np.concatenate([xn, yn, t[..., None]], axis=-1)


def extension_F(p, alt_slice: bool = False, check: bool = True, band: float = 1e-9):
    """Slice-wise reflection F̃ on the closure of Ω; heights are preserved."""
    P = as_coords(p)
    codes = np.atleast_1d(omega_codes(P.reshape(-1, P.shape[-1]), band)).reshape(P.shape[:-1])
    bad = codes < 0
    if check and np.any(bad):
        raise DomainError("extension_F is defined on the closure of Ω only")
    out = _apply_slice(P, alt_slice)
    if np.any(bad):
        out = np.where(bad[..., None], np.nan, out)
    return _like(p, out)


def boundary_f(p, check: bool = True, tol: float = ON_H_TOL):
    """Reflection of H across the geodesic foliation: ``Φ((a, b), s) -> Φ((-a, b), s)``.

    The poles are fixed.  Points within ``tol`` of H are accepted.
    """
    P = as_coords(p)
    flat = P.reshape(-1, P.shape[-1])
    n = (flat.shape[-1] - 1) // 2
    t = flat[:, -1]
    in_height = (t >= -tol) & (t <= FOUR_PI + tol)
    gap = np.abs(distance_to_H(flat))
    bad = ~in_height | (gap > tol)
    if check and np.any(bad):
        raise DomainError("boundary_f is defined on H only")
    u, s = invert_points(flat)
    nrm = np.linalg.norm(u, axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        u = u / nrm
    u[:, :n] *= -1.0
    out = geodesic_points(u, s)
    # exact poles, and points so close to them that the direction is lost
    pole = ~np.all(np.isfinite(out), axis=-1) | (np.linalg.norm(flat[:, :-1], axis=-1) == 0.0)
    out[pole] = flat[pole]
    out[pole, -1] = np.clip(flat[pole, -1], 0.0, FOUR_PI)
    out[bad] = np.nan
    return _like(p, out.reshape(P.shape))


def even_reflection(p):
    """``(x, y, t) -> (-x, y, -t)``."""
    P = np.array(as_coords(p), dtype=float, copy=True)
    n = (P.shape[-1] - 1) // 2
    P[..., :n] *= -1.0
    P[..., -1] *= -1.0
    return _like(p, P)


def domain_mask(m: MapHandle, P: np.ndarray) -> np.ndarray:
    """True where the rows of ``P`` lie in the domain of ``m``."""
    P = np.asarray(P, dtype=float)
    if m.kind in ("extension_F", "extension_F_alt_slice"):
        return np.atleast_1d(omega_codes(P.reshape(-1, P.shape[-1]))).reshape(P.shape[:-1]) >= 0
    if m.kind == "boundary_f":
        flat = P.reshape(-1, P.shape[-1])
        t = flat[:, -1]
        ok = (t >= -ON_H_TOL) & (t <= FOUR_PI + ON_H_TOL) & (np.abs(distance_to_H(flat)) <= ON_H_TOL)
        return ok.reshape(P.shape[:-1])
    if m.kind == "composite":
        return domain_mask(m.param[0], P)
    return np.ones(P.shape[:-1], dtype=bool)


def _eval_arr(m: MapHandle, P: np.ndarray, check: bool) -> np.ndarray:
    kind = m.kind
    if kind == "identity":
        return np.array(P, dtype=float, copy=True)
    if kind == "boundary_f":
        return boundary_f(P, check=check)
    if kind == "extension_F":
        return extension_F(P, check=check)
    if kind == "extension_F_alt_slice":
        return extension_F(P, alt_slice=True, check=check)
    if kind == "left_translation":
        return group_mul(np.broadcast_to(m.param, P.shape), P)
    if kind == "right_translation":
        return group_mul(P, np.broadcast_to(m.param, P.shape))
    if kind == "dilation":
        return dilate(m.param, P)
    if kind == "homomorphism":
        return hom_apply(m.param, P)
    if kind == "even_reflection":
        return even_reflection(P)
    if kind == "linear":
        return P @ m.param.T
    if kind == "composite":
        out = P
        for part in m.param:
            out = _eval_arr(part, out, check)
        return out
    raise UsageError(f"unknown map kind {kind!r}")


def map_eval(m: MapHandle, p, check: bool = True):
    """Evaluate ``m`` at a Point or at an array of points."""
    P = as_coords(p)
    if P.shape[-1] != 2 * m.n + 1:
        raise UsageError(f"map acts on H^{m.n}, point has {P.shape[-1]} coordinates")
    return _like(p, _eval_arr(m, P, check))


def catalog_map(name: str, n: int, param=None) -> MapHandle:
    """Look up a catalog map by CLI name."""
    if name == "identity":
        return MapHandle.identity(n)
    if name in ("boundary_f", "f"):
        return MapHandle.boundary_f(n)
    if name in ("extension_F", "F"):
        return MapHandle.extension_F(n)
    if name == "extension_F_alt_slice":
        return MapHandle.extension_F(n, alt_slice=True)
    if name == "even_reflection":
        return MapHandle.even_reflection(n)
    if name == "dilation":
        return MapHandle.dilation(n, 2.0 if param is None else float(param))
    if name == "left_translation":
        g = np.zeros(2 * n + 1) if param is None else as_coords(param)
        return MapHandle.left_translation(g)
    if name == "right_translation":
        g = np.zeros(2 * n + 1) if param is None else as_coords(param)
        return MapHandle.right_translation(g)
    if name == "homomorphism":
        A = HomogeneousHom.identity(n) if param is None else param
        return MapHandle.homomorphism(A)
    raise UsageError(f"unknown map {name!r}; choose from identity, boundary_f, extension_F, "
                     "extension_F_alt_slice, even_reflection, dilation, left_translation, right_translation, "
                     "homomorphism")


__all__ = [
    "KINDS",
    "MapHandle",
    "Point",
    "boundary_f",
    "catalog_map",
    "domain_mask",
    "even_reflection",
    "extension_F",
    "map_eval",
    "slice_matrix",
]
