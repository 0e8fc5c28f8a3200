"""Count the real zeros of one random trigonometric polynomial as n grows.

The zero count per unit degree settles near 2/sqrt(3) for any symmetric
coefficient law.  Small degrees are cross-checked against the eigenvalues
of the companion matrix.
"""

import math

from randtrig import count_zeros_companion, count_zeros_grid, random_polynomial, stream

SEED = 2024
target = 2 / math.sqrt(3)

print("small n: certified grid count vs companion-matrix count")
for n in (4, 16, 64):
    p = random_polynomial("rademacher", n, stream(SEED, 0))
    print(f"  n={n:4d}  grid={count_zeros_grid(p).count:4d}  companion={count_zeros_companion(p).count:4d}")

# one coefficient sequence, growing prefix: an almost-sure statement
print(f"\nN/n along one Gaussian sequence (limit {target:.5f})")
for n in (250, 1000, 4000, 16000):
    rep = count_zeros_grid(random_polynomial("gaussian", n, stream(SEED, 0)))
    print(f"  n={n:6d}  N={rep.count:6d}  N/n={rep.count / n:.5f}  flagged cells={len(rep.suspicious_intervals)}")

rep = count_zeros_grid(random_polynomial("uniform", 4000, stream(SEED, 1)), (0.0, math.pi / 2))
print(f"\nquarter period, uniform law: N/n={rep.count / 4000:.5f} (limit {target / 4:.5f})")
