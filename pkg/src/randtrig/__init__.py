"""Random trigonometric polynomials: certified zero counts and CLT distances.

f_n(t) = n**-0.5 * sum_{k=1..n} (a_k cos kt + b_k sin kt) with i.i.d.
centered unit-variance coefficients.  The package evaluates f_n on FFT
grids, counts its real zeros with a certificate, measures how far the
law of f_n(X) (X uniform) is from N(0, 1), simulates the sinc-kernel
limit process, and runs the experiments that tie these together.
"""

from .coeffs import MODELS, CoefficientModel, MomentSet, get_model, stein_constant
from .errors import (
    ConfigurationError,
    DegeneratePolynomialError,
    DegenerateSampleError,
    NumericalError,
    OracleFailure,
)
from .rng import stream
from .trigpoly import (
    TWO_PI,
    TaylorGridEvaluator,
    TrigPolynomial,
    eval_direct,
    eval_grid,
    local_covariance_exact,
    local_eval,
    random_polynomial,
    read_csv,
    write_csv,
)
from .zeros import ZeroReport, count_zeros_companion, count_zeros_grid, window_count, window_counts
from .dists import (
    DistanceReport,
    c3_proxy_distance,
    cf_deviation,
    distance_report,
    empirical_cf,
    kolmogorov_to_gaussian,
    stein_bound_check,
    tv_to_gaussian,
)
from .sincgp import expected_zeros, mc_zero_mean, simulate_cholesky, simulate_spectral, sinc_cov

__version__ = "0.1.0"
