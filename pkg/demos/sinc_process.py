"""The stationary Gaussian process with covariance sin(t)/t.

Zoomed in around a uniform point, f_n looks like this process.  Its mean
number of zeros on [0, 2pi] is 2/sqrt(3) by the Kac-Rice formula; two
independent simulators reproduce it.
"""

import math

import numpy as np

from randtrig import random_polynomial, sinc_cov, stream
from randtrig.sincgp import mc_zero_mean
from randtrig.trigpoly import local_covariance_exact

SEED = 2024

for method in ("cholesky", "spectral"):
    zm = mc_zero_mean(2000, 256, SEED, method=method)
    print(f"{method:9s} mean zeros on [0, 2pi]: {zm.mean:.4f} +- {zm.stderr:.4f}")
print(f"Kac-Rice value: {2 / math.sqrt(3):.4f}")

# the rescaled polynomial's covariance against the sinc kernel
p = random_polynomial("gaussian", 4096, stream(SEED, 0))
tau = np.linspace(0, 2 * math.pi, 9)
print("\ntau      E_X g_n(0) g_n(tau)   sinc(tau)")
for t, c, s in zip(tau, local_covariance_exact(p, tau), sinc_cov(tau)):
    print(f"{t:5.2f}    {c:+.5f}            {s:+.5f}")
