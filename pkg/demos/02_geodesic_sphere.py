"""The sphere H swept by the unit-speed geodesics from the origin to (0, 0, 4π)."""

import numpy as np

from heisenlab.geodesic import (
    FOUR_PI,
    TWO_PI,
    geodesic_invert,
    geodesic_points,
    omega_contains,
    phi_height,
    phi_height_inverse,
    slice_radius,
)

# height and slice radius as a function of arc length
s = np.linspace(0, TWO_PI, 9)
for si, t, r in zip(s, phi_height(s), slice_radius(s)):
    print(f"s = {si:5.3f}   t = {t:7.4f}   |(x,y)| = {r:.4f}")

# one leaf, sampled
u = np.array([1.0, 0.0])
leaf = geodesic_points(u, np.linspace(0, TWO_PI, 5))
print(leaf.round(6))

# inverting a point of H recovers its leaf and arc length, even near the poles
for si in (1e-6, 0.5, np.pi, TWO_PI - 1e-6):
    g = geodesic_invert(geodesic_points(u, si))
    print(f"s = {si:.8g} -> recovered {g.s:.8g}, direction {g.sphere.vector().round(10)}")

print("height inverse at 2π:", phi_height_inverse(TWO_PI))

# the domain Ω is the region inside H
for point in ([0, 0, TWO_PI], [0, -2, TWO_PI], [3, 0, TWO_PI], [0, 0, FOUR_PI + 1]):
    print(point, omega_contains(np.array(point, dtype=float)).value)
