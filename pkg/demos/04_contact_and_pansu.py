"""Why the slice-wise extension F̃ cannot be Lipschitz: it does not preserve the contact structure."""

import numpy as np

from heisenlab.core import sample_unit_sphere
from heisenlab.differential import contact_defect_direction, contact_report, pansu_estimate, scaling_diagnostic
from heisenlab.geodesic import sample_omega
from heisenlab.maps import MapHandle

p = np.array([0.3, -0.2, 1.0])

# contact maps pull θ back to a multiple of itself
for m in (MapHandle.even_reflection(1), MapHandle.dilation(1, 1.7)):
    c = contact_report(m, p)
    print(f"{m.kind:16s} λ = {c.lam:+.10f}  residual = {c.residual:.1e}  det = {c.jac_det:+.8f}")

F = MapHandle.extension_F(1)
interior = sample_omega(0, 5, 1)
for x in interior:
    c = contact_report(F, x)
    print(f"F̃ at {x.round(3)}: residual {c.residual:.3f}, det {c.jac_det:+.6f}")

# Pansu quotients: exact for a dilation, blowing up for F̃
probes = sample_unit_sphere(np.random.default_rng(0), 1, 16)
est = pansu_estimate(MapHandle.dilation(1, 2.0), p, [0.5, 0.1, 0.02], probes)
print("dilation:", est.converged, "λ =", est.hom.lam)
est = pansu_estimate(F, interior[0], [0.05, 0.005, 0.0005], probes)
print("F̃:", est.converged, [f"{r:.3g}" for r in est.residuals], est.diagnostics)

# distance ratios along the worst horizontal direction grow like s^(-1/2)
q = contact_defect_direction(F, interior[0])
tab = scaling_diagnostic(F, interior[0], q, np.logspace(-1, -4, 7))
for s, ratio in tab.rows:
    print(f"s = {s:.1e}  ratio = {ratio:9.3f}")
print("log-log slope:", round(tab.slope(), 4))
