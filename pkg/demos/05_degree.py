"""Mapping degree of F̃ at the centre of Ω, and of homomorphisms over a gauge ball."""

import time

import numpy as np

from heisenlab.core import random_homomorphism
from heisenlab.degree import KoranyiBall, boundary_gap, degree_smooth, min_injectivity_constant
from heisenlab.geodesic import TWO_PI
from heisenlab.maps import MapHandle

for n in (1, 2, 3):
    target = np.r_[np.zeros(2 * n), TWO_PI]
    t0 = time.perf_counter()
    res = degree_smooth(MapHandle.extension_F(n), target)
    alt = degree_smooth(MapHandle.extension_F(n, alt_slice=True), target)
    print(f"n = {n}: deg = {res.value:+d} (other slice matrix {alt.value:+d}), "
          f"{len(res.preimages)} preimage, {time.perf_counter() - t0:.2f}s")

# a homomorphism and a small perturbation of it have the same degree at 0
rng = np.random.default_rng(1)
A = random_homomorphism(rng, 1)
a = min_injectivity_constant(A)
g = np.array([0.3 * a * 0.5, 0.0, 0.0])
pert = MapHandle.composite([MapHandle.homomorphism(A), MapHandle.right_translation(g)])
ball = KoranyiBall(np.zeros(3), 0.5)
print("injectivity constant a =", round(a, 4))
print("boundary gap of the homotopy:", round(boundary_gap(A, pert, 0.5), 4))
print("deg A =", degree_smooth(MapHandle.homomorphism(A), np.zeros(3), ball).value,
      " deg perturbed =", degree_smooth(pert, np.zeros(3), ball).value)

# orientation: λ < 0 flips the sign of det = λ^(n+1) only when n is even
for n in (1, 2):
    B = random_homomorphism(rng, n, reversing=True)
    ball = KoranyiBall(np.zeros(2 * n + 1), 1.0)
    print(f"n = {n}, λ = {B.lam:+.3f}: deg = {degree_smooth(MapHandle.homomorphism(B), np.zeros(2 * n + 1), ball).value:+d}")
