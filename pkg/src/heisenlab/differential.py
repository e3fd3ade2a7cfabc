"""Pansu difference quotients, contact multipliers and finite-difference Jacobians.

For a map m, the Pansu quotient at p in direction q and scale s is

    δ_{1/s}( m(p)^{-1} * m(p * δ_s q) ),

which converges to a homogeneous homomorphism when m is Pansu differentiable
at p.  Smooth non-contact maps push the vertical coordinate of the quotient to
infinity like 1/s.  That blowup is what these tools detect.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    HomogeneousHom,
    NumericalError,
    Point,
    UsageError,
    as_coords,
    contact_form_arr,
    dilate,
    frame_matrix,
    group_inv,
    group_mul,
    hom_apply,
    hom_property_gap,
    koranyi_distance,
)
from .maps import MapHandle, domain_mask, map_eval


def pansu_quotient(m: MapHandle, p, q, s: float):
    """``δ_{1/s}(m(p)^{-1} * m(p * δ_s q))``; ``q`` may be a batch of directions."""
    if not s > 0:
        raise UsageError("scale s must be positive")
    P = as_coords(p)
    Q = as_coords(q)
    moved = group_mul(np.broadcast_to(P, Q.shape), dilate(s, Q))
    base = map_eval(m, P)
    image = map_eval(m, moved)
    out = dilate(1.0 / s, group_mul(np.broadcast_to(group_inv(base), image.shape), image))
    return Point.from_array(out) if isinstance(q, Point) else out


@dataclass
class PansuEstimate:
    hom: HomogeneousHom
    scales: list[float]
    residuals: list[float]
    converged: bool
    hom_defect: float = 0.0
    diagnostics: list[str] = field(default_factory=list)


def fit_homomorphism(Q: np.ndarray, D: np.ndarray) -> HomogeneousHom:
    """Least-squares ``(M, λ)`` with ``D ≈ (M q_w, λ q_t)`` over probe rows; not validated."""
    n = (Q.shape[-1] - 1) // 2
    Mt, *_ = np.linalg.lstsq(Q[:, :-1], D[:, :-1], rcond=None)
    qt = Q[:, -1]
    lam = float(qt @ D[:, -1] / (qt @ qt)) if qt @ qt > 0 else 0.0
    return HomogeneousHom(n, Mt.T, lam, validate=False)


def pansu_estimate(m: MapHandle, p, scales, probes, tol: float = 1e-6) -> PansuEstimate:
    """Fit the Pansu differential of ``m`` at ``p`` from quotients over ``probes``.

    The fit uses the smallest scale.  Residuals are the max coordinate
    deviation of each scale's quotients from the fitted map.  Coordinates,
    not the gauge, because the gauge's square root on the vertical part would
    turn rounding noise of 1e-12 into a residual of 1e-6.  Convergence requires
    non-increasing residuals, a final residual at most ``tol``, and a fitted
    ``(M, λ)`` that is a homomorphism to within ``tol``.
    """
    scales = [float(s) for s in scales]
    if not scales or any(s <= 0 for s in scales) or any(b >= a for a, b in zip(scales, scales[1:])):
        raise UsageError("scales must be positive and strictly decreasing")
    Q = as_coords(probes)
    quotients = [pansu_quotient(m, p, Q, s) for s in scales]
    diagnostics = []
    if not all(np.all(np.isfinite(D)) for D in quotients):
        diagnostics.append("non-finite quotient (probe left the domain)")
        return PansuEstimate(HomogeneousHom.identity(m.n), scales, [np.inf] * len(scales), False,
                             np.inf, diagnostics)
    hom = fit_homomorphism(Q, quotients[-1])
    fitted = hom_apply(hom, Q)
    residuals = [float(np.max(np.abs(D - fitted))) for D in quotients]
    defect = hom_property_gap(hom.M, hom.lam)
    monotone = all(b <= a + tol for a, b in zip(residuals, residuals[1:]))
    converged = monotone and residuals[-1] <= tol and defect <= tol
    if not monotone:
        diagnostics.append("residuals grow as the scale shrinks")
    vert = [float(np.max(np.abs(D[:, -1]))) for D in quotients]
    if len(scales) > 1 and vert[-1] > vert[0] * (scales[0] / scales[-1]) ** 0.5:
        diagnostics.append("vertical quotient grows faster than s^-1/2 (non-contact blowup)")
    if defect > tol:
        diagnostics.append(f"best fit is not a homomorphism (defect {defect:.3g})")
    return PansuEstimate(hom, scales, residuals, converged, defect, diagnostics)


def fd_jacobian(m: MapHandle, p, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian in coordinates; batches give shape (..., d, d)."""
    if not h > 0 or h < 1e-14:
        raise NumericalError(f"finite-difference step {h} underflows")
    P = as_coords(p)
    d = P.shape[-1]
    E = np.eye(d) * h
    plus = map_eval(m, P[..., None, :] + E, check=False)
    minus = map_eval(m, P[..., None, :] - E, check=False)
    # row j of the stencil is the derivative along e_j, so transpose
    return np.swapaxes((plus - minus) / (2.0 * h), -1, -2)


@dataclass
class ContactReport:
    lam: float
    residual: float
    jac_det: float
    det_identity_gap: float
    richardson_gap: float = 0.0

    @property
    def is_contact(self) -> bool:
        return self.residual <= 1e-8


def contact_report(m: MapHandle, p, h: float = 1e-5) -> ContactReport:
    """Finite-difference check of ``m*θ = λθ`` and ``det Dm = λ^{n+1}`` at ``p``.

    The horizontal frame is pushed forward and θ evaluated at ``m(p)``; the
    largest value is the residual.  λ is θ on the image of ∂t.
    ``richardson_gap`` compares Jacobians at steps h and h/2.
    """
    P = as_coords(p)
    if P.ndim != 1:
        raise UsageError("contact_report expects a single point")
    J = fd_jacobian(m, P, h)
    J2 = fd_jacobian(m, P, h / 2)
    if not (np.all(np.isfinite(J)) and np.all(np.isfinite(J2))):
        raise NumericalError("finite differences left the domain or overflowed")
    image = map_eval(m, P)
    pushed = J @ frame_matrix(P)
    theta = contact_form_arr(image, pushed.T)
    n = m.n
    lam = float(theta[-1])
    residual = float(np.max(np.abs(theta[:-1])))
    det = float(np.linalg.det(J))
    return ContactReport(lam, residual, det, abs(det - lam ** (n + 1)),
                         float(np.max(np.abs(J - J2))))


def contact_defect_direction(m: MapHandle, p, h: float = 1e-5) -> np.ndarray:
    """Unit horizontal direction ``q`` (t = 0) along which ``θ(Dm · q)`` is largest.

    Falls back to ``e_1`` when m is contact at p.
    """
    P = as_coords(p)
    J = fd_jacobian(m, P, h)
    theta = contact_form_arr(map_eval(m, P), (J @ frame_matrix(P)).T)[:-1]
    q = np.zeros_like(P)
    norm = np.linalg.norm(theta)
    if norm <= 1e-12:
        q[0] = 1.0
    else:
        q[:-1] = theta / norm
    return q


@dataclass
class ScalingTable:
    rows: list[tuple[float, float]]
    truncated: bool = False

    def slope(self) -> float:
        """Least-squares slope of log(ratio) against log(s)."""
        if len(self.rows) < 2:
            raise UsageError("need at least two rows to fit a slope")
        s, r = np.log(np.array(self.rows)).T
        return float(np.polyfit(s, r, 1)[0])


def scaling_diagnostic(m: MapHandle, p, q_horizontal, scales) -> ScalingTable:
    """Distance ratios ``d_K(m p, m(p δ_s q)) / d_K(p, p δ_s q)`` along a horizontal direction.

    Bounded ratios mean m is locally Lipschitz along q.  A non-contact map gives
    ratios growing like ``s^-1/2``.  The table stops at the first scale that
    leaves the domain of m.
    """
    P = as_coords(p)
    q = as_coords(q_horizontal)
    if abs(q[-1]) > 1e-12:
        raise UsageError("q_horizontal must have zero vertical component")
    rows = []
    truncated = False
    base = map_eval(m, P)
    for s in scales:
        moved = group_mul(P, dilate(float(s), q))
        if not bool(domain_mask(m, moved[None, :])[0]):
            truncated = True
            break
        num = koranyi_distance(base, map_eval(m, moved))
        den = koranyi_distance(P, moved)
        rows.append((float(s), float(num / den)))
    return ScalingTable(rows, truncated)
