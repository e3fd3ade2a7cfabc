"""The boundary map f: reflect each leaf's direction (a, b) -> (-a, b)."""

import numpy as np

from heisenlab.geodesic import TWO_PI, sample_H_arrays, geodesic_points
from heisenlab.lipschitz import lipschitz_scan, same_height_isometry_check
from heisenlab.maps import MapHandle

f = MapHandle.boundary_f(1)
F = MapHandle.extension_F(1)

u, s = sample_H_arrays(0, 5, (0.0, TWO_PI), 1)
P = geodesic_points(u, s)
print("points on H:\n", P.round(4))
print("f:\n", f(P).round(4))
print("extension agrees on H:", np.max(np.abs(F(P) - f(P))))
print("f∘f = id:", np.max(np.abs(f(f(P)) - P)))

# on each height slice f is an isometry of the gauge distance
rep = same_height_isometry_check(10_000, 0, 1)
print(f"largest relative gap between same-height distances: {rep.max_ratio:.2e}")

# across heights it stretches distances, but only by a bounded amount
for pairs in (1_000, 10_000, 100_000):
    rep = lipschitz_scan(f, pairs, 42)
    print(f"{pairs:>7d} pairs: max ratio {rep.max_ratio:.6f}, 95th percentile {rep.p95_ratio:.4f}")
