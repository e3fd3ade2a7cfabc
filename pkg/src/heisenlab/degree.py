"""Brouwer degree of smooth catalog maps at regular values.

The degree over a domain U at a target p is the sum of ``sign det Dm`` over the
preimages of p in U, as long as p stays away from ``m(∂U)``.  Preimages are
found by damped Newton iteration from a seed grid, run on all seeds at once.
The homotopy from a map to its linearisation lives here as well.
"""

from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import (
    HomogeneousHom,
    Point,
    UsageError,
    as_coords,
    dilate,
    gauge,
    group_inv,
    group_mul,
    hom_apply,
    koranyi_distance,
    sample_unit_sphere,
)
from .differential import fd_jacobian
from .geodesic import FOUR_PI, TWO_PI, geodesic_points, omega_codes, phi_height_inverse, sample_H_arrays, slice_radius
from .maps import MapHandle, domain_mask, map_eval
from .rng import stream

log = logging.getLogger(__name__)

DEFAULT_PER_AXIS = {1: 9, 2: 5, 3: 4}
DEDUPE_RADIUS = 1e-6
ROOT_TOL = 1e-9
DET_FLOOR = 1e-8


class PreconditionError(UsageError):
    """The target is too close to the image of the boundary for a stable degree."""


class OmegaDomain:
    """The domain Ω bounded by the geodesic sphere H."""

    def __init__(self, n: int):
        self.n = n

    def contains(self, P) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        return np.atleast_1d(omega_codes(P.reshape(-1, P.shape[-1]))).reshape(P.shape[:-1]) == 1

    def seeds(self, per_axis: int) -> np.ndarray:
        """Cylinder grid: ``per_axis`` heights × a ``per_axis^{2n}`` grid clipped to each slice disc."""
        n = self.n
        ts = np.linspace(0.0, FOUR_PI, per_axis + 2)[1:-1]
        axis = np.linspace(-1.0, 1.0, per_axis)
        cube = np.array(list(itertools.product(axis, repeat=2 * n)))
        disc = cube[np.linalg.norm(cube, axis=1) <= 1.0]
        out = []
        for t in ts:
            R = 0.95 * slice_radius(phi_height_inverse(t))
            out.append(np.column_stack([R * disc, np.full(len(disc), t)]))
        return np.vstack(out)

    def boundary_samples(self, seed: int, count: int) -> np.ndarray:
        u, s = sample_H_arrays(seed, count, (0.0, TWO_PI), self.n, name="degree.boundary")
        B = geodesic_points(u, s)
        poles = np.zeros((2, 2 * self.n + 1))
        poles[1, -1] = FOUR_PI
        return np.vstack([B, poles])


class KoranyiBall:
    """Open Korányi ball ``{p : d_K(p, center) < radius}``."""

    def __init__(self, center, radius: float):
        self.center = as_coords(center).astype(float)
        self.radius = float(radius)
        if not self.radius > 0:
            raise UsageError("ball radius must be positive")
        self.n = (self.center.size - 1) // 2

    def contains(self, P) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        return np.asarray(koranyi_distance(P, np.broadcast_to(self.center, P.shape))) < self.radius

    def seeds(self, per_axis: int) -> np.ndarray:
        axis = np.linspace(-1.0, 1.0, per_axis)
        cube = np.array(list(itertools.product(axis, repeat=2 * self.n + 1)))
        cube = cube[np.asarray(gauge(cube)) < 0.95]
        local = dilate(self.radius, cube)
        return group_mul(np.broadcast_to(self.center, local.shape), local)

    def boundary_samples(self, seed: int, count: int) -> np.ndarray:
        rng = stream(seed, "degree.ball_boundary")
        local = sample_unit_sphere(rng, self.n, count, self.radius)
        return group_mul(np.broadcast_to(self.center, local.shape), local)


@dataclass
class DegreeResult:
    value: int | None
    preimages: list[Point]
    jacobian_signs: list[int]
    regular: bool
    diagnostics: list[str] = field(default_factory=list)
    boundary_distance: float = np.inf


def _residual(m, X, target):
    F = map_eval(m, X, check=False) - target
    r = np.linalg.norm(F, axis=-1)
    return F, np.where(np.isfinite(r), r, np.inf)


def _solve_steps(J, F):
    try:
        return np.linalg.solve(J, F[..., None])[..., 0]
    except np.linalg.LinAlgError:
        steps = np.full_like(F, np.nan)
        for i in range(len(F)):
            try:
                steps[i] = np.linalg.solve(J[i], F[i])
            except np.linalg.LinAlgError:
                pass
        return steps


def newton_batch(m: MapHandle, target, X0, max_iter: int = 60, h: float = 1e-6,
                 tol: float = 1e-13, halvings: int = 40):
    """Damped Newton on ``m(x) = target`` from every row of ``X0``.

    Steps are halved until the residual drops and the iterate stays in the
    domain of ``m``.  Returns ``(X, residuals, alive)``; rows that stall are
    marked dead.
    """
    target = as_coords(target)
    X = np.array(X0, dtype=float, copy=True)
    F, res = _residual(m, X, target)
    alive = np.isfinite(res)
    finished = res <= tol
    for _ in range(max_iter):
        work = np.flatnonzero(alive & ~finished)
        if work.size == 0:
            break
        J = fd_jacobian(m, X[work], h)
        bad = ~np.all(np.isfinite(J), axis=(-1, -2))
        J[bad] = np.eye(J.shape[-1])
        step = _solve_steps(J, F[work])
        step[bad] = np.nan
        alpha = np.ones(work.size)
        pending = np.all(np.isfinite(step), axis=-1)
        alive[work[~pending]] = False
        for _ in range(halvings):
            idx = np.flatnonzero(pending)
            if idx.size == 0:
                break
            rows = work[idx]
            trial = X[rows] - alpha[idx, None] * step[idx]
            ok_dom = domain_mask(m, trial)
            Ft, rt = _residual(m, trial, target)
            ok = ok_dom & (rt < res[rows])
            acc = rows[ok]
            X[acc], F[acc], res[acc] = trial[ok], Ft[ok], rt[ok]
            pending[idx[ok]] = False
            alpha[idx[~ok]] *= 0.5
        stalled = work[pending]
        # a stalled row already at root tolerance has hit rounding, not failed
        finished[stalled[res[stalled] <= ROOT_TOL]] = True
        alive[stalled[res[stalled] > ROOT_TOL]] = False
        finished |= res <= tol
    return X, res, alive


def _dedupe(R: np.ndarray, radius: float) -> list[np.ndarray]:
    roots = []
    remaining = R
    while len(remaining):
        first = remaining[0]
        near = np.linalg.norm(remaining - first, axis=1) <= radius
        cluster = remaining[near]
        roots.append(cluster.mean(axis=0) if len(cluster) > 1 else first)
        remaining = remaining[~near]
    return roots


def _default_domain(m: MapHandle):
    return OmegaDomain(m.n)


def boundary_distance(m: MapHandle, target, domain, seed: int = 0, count: int = 10_000) -> float:
    """Min Euclidean distance from ``target`` to sampled images of ``∂domain``."""
    B = domain.boundary_samples(seed, count)
    img = map_eval(m, B, check=False)
    d = np.linalg.norm(img - as_coords(target), axis=-1)
    return float(np.nanmin(d))


def preimages(m: MapHandle, p_target, domain=None, per_axis: int | None = None,
              margin: float = 1e-3, boundary_count: int = 10_000, seed: int = 0,
              seeds: np.ndarray | None = None, _diag: list | None = None) -> list[Point]:
    """Roots of ``m(x) = p_target`` inside ``domain`` (default Ω)."""
    domain = domain or _default_domain(m)
    target = as_coords(p_target)
    gap = boundary_distance(m, target, domain, seed, boundary_count)
    if gap <= margin:
        raise PreconditionError(
            f"target is within {gap:.3g} of m(boundary) (margin {margin}); degree undefined or unstable")
    if seeds is None:
        per_axis = per_axis or DEFAULT_PER_AXIS.get(m.n, 3)
        seeds = domain.seeds(per_axis)
    X, res, alive = newton_batch(m, target, seeds)
    done = alive & (res <= ROOT_TOL)
    skipped = int(np.sum(~done))
    if skipped:
        log.debug("%d of %d Newton seeds did not converge", skipped, len(seeds))
    if _diag is not None:
        _diag.append(f"{len(seeds)} seeds, {len(seeds) - skipped} converged, boundary gap {gap:.6g}")
    X = X[done]
    X = X[domain.contains(X)] if len(X) else X
    roots = _dedupe(X, DEDUPE_RADIUS)
    _, r = _residual(m, np.array(roots).reshape(-1, target.size), target)
    return [Point.from_array(x) for x, ri in zip(roots, r) if ri <= ROOT_TOL]


def degree_smooth(m: MapHandle, p_target, domain=None, per_axis: int | None = None,
                  h: float = 1e-5, margin: float = 1e-3, boundary_count: int = 10_000,
                  seed: int = 0) -> DegreeResult:
    """``deg(m, U, p)`` as the sum of Jacobian signs over preimages."""
    domain = domain or _default_domain(m)
    diagnostics: list[str] = []
    roots = preimages(m, p_target, domain, per_axis, margin, boundary_count, seed, _diag=diagnostics)
    gap = boundary_distance(m, p_target, domain, seed, boundary_count)
    if not roots:
        diagnostics.append("no preimages: target not in m(U)")
        return DegreeResult(0, [], [], True, diagnostics, gap)
    dets = np.linalg.det(fd_jacobian(m, np.array([r.to_array() for r in roots]), h))
    if np.any(~np.isfinite(dets)) or np.any(np.abs(dets) <= DET_FLOOR):
        diagnostics.append(f"singular Jacobian at a preimage (dets {dets.tolist()})")
        return DegreeResult(None, roots, [], False, diagnostics, gap)
    signs = [int(np.sign(d)) for d in dets]
    diagnostics.append(f"jacobian determinants {dets.tolist()}")
    return DegreeResult(int(sum(signs)), roots, signs, True, diagnostics, gap)


# --- homotopy to the linearisation ---------------------------------------------


def homotopy_eval(A: HomogeneousHom, m: MapHandle, s: float, q):
    """``A(q) * δ_s(A(q)^{-1} * m(q))``: ``A`` at s = 0, ``m`` at s = 1."""
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise UsageError("homotopy parameter must lie in [0, 1]")
    Q = as_coords(q)
    Aq = hom_apply(A, Q)
    if s == 0.0:
        out = Aq
    else:
        out = group_mul(Aq, dilate(s, group_mul(group_inv(Aq), map_eval(m, Q))))
    return Point.from_array(out) if isinstance(q, Point) else out


def _require_injective(A: HomogeneousHom):
    if not A.is_injective:
        raise UsageError("A must be injective (M nonsingular, lambda nonzero)")


def boundary_gap(A: HomogeneousHom, m: MapHandle, r: float, n_samples: int = 1000, seed: int = 0) -> float:
    """Smallest sampled ``d_K(H(s, q), 0)`` over ``s ∈ [0, 1]`` and ``q ∈ ∂B(0, r)``.

    A positive value means the homotopy never hits the origin on the sphere,
    so the degree of m at 0 over the ball equals that of A.
    """
    _require_injective(A)
    if not r > 0:
        raise UsageError("radius must be positive")
    rng = stream(seed, "degree.boundary_gap")
    Q = sample_unit_sphere(rng, A.n, n_samples, r)
    S = rng.uniform(0.0, 1.0, size=n_samples)
    S[:2] = (0.0, 1.0)
    Aq = hom_apply(A, Q)
    diff = group_mul(group_inv(Aq), map_eval(m, Q))
    bent = diff.copy()
    bent[:, :-1] *= S[:, None]
    bent[:, -1] *= S * S
    return float(np.min(gauge(group_mul(Aq, bent))))


def min_injectivity_constant(A: HomogeneousHom, n_samples: int = 1000, seed: int = 0,
                             radius: float = 1.0) -> float:
    """Sampled ``min d_K(A(q), 0)`` over ``q`` on the Korányi sphere of ``radius``."""
    _require_injective(A)
    rng = stream(seed, "degree.injectivity")
    Q = sample_unit_sphere(rng, A.n, n_samples, radius)
    a = float(np.min(gauge(hom_apply(A, Q))))
    if a < 1e-10 * radius:
        warnings.warn(f"injectivity constant {a:.3g} is tiny; A is likely not injective", RuntimeWarning)
    return a
