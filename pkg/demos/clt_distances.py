"""How close is f_n(X), X uniform, to a standard Gaussian?

Four distances are computed on one FFT grid per polynomial, and the
Kolmogorov distance is regressed against n on log-log axes; its slope
sits near -1/2.
"""

from randtrig import distance_report, random_polynomial, stream
from randtrig.experiments import rate_regression

SEED = 2024

print(f"{'n':>6} {'kolmogorov':>11} {'cf_dev':>9} {'tv':>8} {'c3_proxy':>9}")
for n in (64, 256, 1024, 4096):
    r = distance_report(random_polynomial("rademacher", n, stream(SEED, 0)))
    print(f"{n:6d} {r.kolmogorov:11.5f} {r.cf_deviation:9.5f} {r.tv:8.5f} {r.c3_proxy:9.5f}")

fit = rate_regression("rademacher", [64, 256, 1024, 4096], 20, "kolmogorov", SEED)
print(f"\nlog-log slope of the mean Kolmogorov distance: {fit.slope:.3f} (r^2 = {fit.r2:.3f})")
