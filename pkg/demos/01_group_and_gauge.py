"""The Heisenberg group H^1: products, dilations and the Korányi gauge."""

import numpy as np

from heisenlab.core import dilate, gauge, group_inv, group_mul, koranyi_distance, koranyi_distance_flipped

p = np.array([1.0, 0.0, 0.0])
q = np.array([0.0, 1.0, 0.0])

# the product is not commutative; the twist lands in t
print("p*q =", group_mul(p, q))
print("q*p =", group_mul(q, p))
print("p*p^-1 =", group_mul(p, group_inv(p)))

# dilations scale x, y linearly and t quadratically, and the gauge by s
r = np.array([0.3, -0.4, 1.2])
for s in (0.5, 2.0, 10.0):
    print(f"gauge(δ_{s} r) / gauge(r) = {gauge(dilate(s, r)) / gauge(r):.12f}")

# distance is gauge(q^-1 * p), so left translations are isometries
g = np.array([2.0, -1.0, 5.0])
print("d(p, q)     =", koranyi_distance(p, q))
print("d(g p, g q) =", koranyi_distance(group_mul(g, p), group_mul(g, q)))

# flipping the sign of the twist in the distance formula breaks that invariance
print("flipped-sign d(p, q)     =", koranyi_distance_flipped(p, q))
print("flipped-sign d(g p, g q) =", koranyi_distance_flipped(group_mul(g, p), group_mul(g, q)))
