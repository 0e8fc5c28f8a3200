"""Zeros seen through a moving window of length 2pi/n.

Averaging the window count over the window position recovers N/n, and the
law of the window count approaches that of the sinc process on [0, 2pi].
"""

import math

import numpy as np

from randtrig import count_zeros_grid, random_polynomial, stream
from randtrig.experiments import local_zero_distribution
from randtrig.zeros import window_identity_check

SEED = 2024
n = 2048

p = random_polynomial("gaussian", n, stream(SEED, 0))
lhs, rhs = window_identity_check(p, 2 * math.pi / n)
print(f"N/n = {count_zeros_grid(p).count / n:.5f}, mean window count = {rhs:.5f} (lhs {lhs:.5f})")

r = local_zero_distribution("gaussian", n, 4000, 2000, SEED)
print("\ncount   P(window)   P(sinc process)")
k = max(r.hist_local.size, r.hist_gp.size)
for i, (a, b) in enumerate(zip(np.pad(r.hist_local, (0, k - r.hist_local.size)),
                               np.pad(r.hist_gp, (0, k - r.hist_gp.size)))):
    print(f"{i:5d}   {a:9.4f}   {b:9.4f}")
print(f"total variation between the two histograms: {r.tv:.4f}")
