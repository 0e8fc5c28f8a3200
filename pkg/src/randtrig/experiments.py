"""Desk-scale experiments for the nodal and distributional limit laws.

Conventions
-----------
* Trial ``i`` of any experiment uses the coefficient sequence drawn from
  ``stream(master_seed, i)``; polynomials of different degree built from
  the same trial share their leading coefficients, so a sweep over n for
  one trial follows one realization of the coefficient sequence.
* Auxiliary randomness (random X, process samples) uses
  ``stream(master_seed, i, purpose)`` with the purpose keys below.
* Expectations over X use uniform-grid quadrature wherever the integrand
  is smooth; random X only where a sample cloud is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate, stats

from .coeffs import get_model
from .dists import default_grid_size, empirical_cf, kolmogorov_to_gaussian, c3_proxy_distance, cf_deviation
from .dists import tv_to_gaussian
from .errors import ConfigurationError
from .rng import stream
from .sincgp import expected_zeros, sinc_cov, zero_counts
from .trigpoly import TWO_PI, TaylorGridEvaluator, TrigPolynomial, eval_grid, local_covariance_exact
from .trigpoly import random_polynomial
from .zeros import count_zeros_companion, count_zeros_grid, window_counts, window_identity_check

__all__ = [
    "X_STREAM",
    "MAX_FLAGGED_FRACTION",
    "trial_polynomial",
    "oracle_equivalence",
    "nodal_convergence",
    "nodal_trend",
    "NodalAverage",
    "nodal_average",
    "universality",
    "window_identity_scan",
    "LocalZeroDistribution",
    "local_zero_distribution",
    "local_moment_boundedness",
    "gaussian_log_moment",
    "log_moment_scan",
    "NonUniformDensity",
    "nonuniform_clt",
    "empirical_measure_uniformity",
    "RateFit",
    "metric_value",
    "rate_regression",
    "covariance_sup_error",
    "tv_scan",
    "loglog_slope",
]

X_STREAM = 21
MAX_FLAGGED_FRACTION = 0.01


def trial_polynomial(model, n: int, master_seed: int, trial: int = 0) -> TrigPolynomial:
    return random_polynomial(model, n, stream(master_seed, trial))


def loglog_slope(x, y) -> tuple[float, float, float]:
    """Least-squares (slope, intercept, r^2) of log y against log x."""
    fit = stats.linregress(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)))
    return float(fit.slope), float(fit.intercept), float(fit.rvalue**2)


# -- zero counting -----------------------------------------------------------


def oracle_equivalence(models, n_list, per_model: int, master_seed: int) -> list[dict]:
    """Grid count vs companion count for ``per_model`` polynomials per law.

    Degrees cycle through ``n_list``.
    """
    rows = []
    for mi, name in enumerate(models):
        for i in range(per_model):
            n = int(n_list[i % len(n_list)])
            p = random_polynomial(name, n, stream(master_seed, i, mi))
            g = count_zeros_grid(p)
            c = count_zeros_companion(p)
            rows.append({
                "model": get_model(name).name, "trial": i, "n": n,
                "grid_count": g.count, "companion_count": c.count,
                "match": g.count == c.count, "flagged": g.flagged or c.flagged,
            })
    return rows


def nodal_convergence(model, n_list, master_seed: int, interval=(0.0, TWO_PI), trial: int = 0) -> list[dict]:
    """N(f_n, [a, b]) / n along one coefficient sequence."""
    model = get_model(model)
    limit = expected_zeros(interval)
    rows = []
    for n in n_list:
        p = trial_polynomial(model, int(n), master_seed, trial)
        rep = count_zeros_grid(p, interval)
        rows.append({
            "n": int(n), "N": rep.count, "N_over_n": rep.count / n,
            "limit": limit, "flagged_cells": len(rep.suspicious_intervals),
        })
    return rows


def nodal_trend(model, n_list, seeds: int, master_seed: int, interval=(0.0, TWO_PI)) -> list[dict]:
    """Median over ``seeds`` sequences of |N/n - limit| for each n."""
    limit = expected_zeros(interval)
    dev = np.array([
        [abs(r["N_over_n"] - limit) for r in nodal_convergence(model, n_list, master_seed, interval, trial=s)]
        for s in range(seeds)
    ])
    return [{"n": int(n), "median_abs_dev": float(m)} for n, m in zip(n_list, np.median(dev, axis=0))]


class NodalAverage(NamedTuple):
    mean: float
    stderr: float
    values: np.ndarray
    flagged: int


def nodal_average(model, n: int, trials: int, master_seed: int, interval=(0.0, TWO_PI)) -> NodalAverage:
    """Mean of N/n over independent polynomials; flagged trials are excluded."""
    if trials < 30:
        raise ValueError("nodal_average needs at least 30 trials")
    vals, flagged = [], 0
    for i in range(trials):
        rep = count_zeros_grid(trial_polynomial(model, n, master_seed, i), interval)
        if rep.flagged:
            flagged += 1
            continue
        vals.append(rep.count / n)
    v = np.array(vals)
    return NodalAverage(float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size)), v, flagged)


def universality(models, n: int, trials: int, master_seed: int, interval=(0.0, TWO_PI)) -> dict:
    """nodal_average for each law and the largest pairwise gap of the means."""
    res = {get_model(m).name: nodal_average(m, n, trials, master_seed, interval) for m in models}
    means = [r.mean for r in res.values()]
    return {"averages": res, "max_pairwise_gap": float(max(means) - min(means))}


def window_identity_scan(model, n: int, polys: int, h_list, master_seed: int, MX: int = 4096) -> list[dict]:
    rows = []
    for i in range(polys):
        p = trial_polynomial(model, n, master_seed, i)
        for h in h_list:
            lhs, rhs = window_identity_check(p, float(h), MX)
            rows.append({"trial": i, "h": float(h), "lhs": lhs, "rhs": rhs, "abs_err": abs(lhs - rhs)})
    return rows


# -- local process -----------------------------------------------------------


@dataclass
class LocalZeroDistribution:
    n: int
    hist_local: np.ndarray
    hist_gp: np.ndarray
    mean_local: float
    mean_gp: float
    var_local: float
    var_gp: float
    tv: float


def local_zero_distribution(model, n: int, X_samples: int, gp_trials: int, master_seed: int,
                            grid_size: int = 256) -> LocalZeroDistribution:
    """Law of N(g_n, [0, 2pi]) under random X for one polynomial vs the sinc process.

    N(g_n, [0, 2pi]) is the zero count of f_n on [X, X + 2pi/n].
    """
    p = trial_polynomial(model, n, master_seed, 0)
    X = stream(master_seed, 0, X_STREAM).uniform(0.0, TWO_PI, X_samples)
    local = window_counts(p, X, TWO_PI / n)
    gp = zero_counts(gp_trials, grid_size, master_seed)
    top = int(max(local.max(), gp.max())) + 1
    hl = np.bincount(local, minlength=top) / local.size
    hg = np.bincount(gp, minlength=top) / gp.size
    return LocalZeroDistribution(
        n=n, hist_local=hl, hist_gp=hg,
        mean_local=float(local.mean()), mean_gp=float(gp.mean()),
        var_local=float(local.var()), var_gp=float(gp.var()),
        tv=0.5 * float(np.abs(hl - hg).sum()),
    )


def local_moment_boundedness(model, n_list, p_list, master_seed: int, MX: int = 4096) -> list[dict]:
    """E_X[N(g_n, [0, 2pi])^p] by quadrature over an MX-point X grid."""
    if not set(p_list) <= {1, 2, 3, 4}:
        raise ValueError("moment orders must lie in {1, 2, 3, 4}")
    X = (np.arange(MX) + 0.5) * (TWO_PI / MX)
    rows = []
    for n in n_list:
        poly = trial_polynomial(model, int(n), master_seed, 0)
        counts = window_counts(poly, X, TWO_PI / n).astype(float)
        N = count_zeros_grid(poly).count
        for pw in p_list:
            rows.append({
                "n": int(n), "p": int(pw),
                "moment": math.fsum((counts**pw).tolist()) / MX,
                "N_over_n": N / n,
            })
    return rows


def gaussian_log_moment(p: float = 2.0) -> float:
    """E|log|G||^p for G standard normal, by adaptive quadrature."""
    fn = lambda x: abs(math.log(x)) ** p * math.exp(-0.5 * x * x)
    a, _ = integrate.quad(fn, 0.0, 1.0, limit=200)
    b, _ = integrate.quad(fn, 1.0, math.inf, limit=200)
    return 2.0 * (a + b) / math.sqrt(TWO_PI)


def log_moment_scan(model, n_list, p: float, master_seed: int, oversample: int = 16) -> list[dict]:
    """Grid quadrature of |log|f_n||^p; points with |f_n| < 1e-300 are excluded and counted."""
    rows = []
    for n in n_list:
        poly = trial_polynomial(model, int(n), master_seed, 0)
        M = default_grid_size(int(n), oversample)
        v = np.abs(eval_grid(poly, M).values)
        keep = v >= 1e-300
        val = math.fsum((np.abs(np.log(v[keep])) ** p).tolist()) / keep.sum()
        rows.append({"n": int(n), "value": val, "excluded": int((~keep).sum()), "M": M})
    return rows


# -- non-uniform X -----------------------------------------------------------


@dataclass(frozen=True)
class NonUniformDensity:
    """p(x) = (1 + sum_j c_j cos(j x)) / (2 pi) on [0, 2pi), with sum |c_j| < 1."""

    coeffs: tuple = ()

    def __post_init__(self):
        c = tuple(float(x) for x in self.coeffs)
        if sum(abs(x) for x in c) >= 1.0:
            raise ConfigurationError("cosine density needs sum |c_j| < 1 to stay positive")
        object.__setattr__(self, "coeffs", c)

    @property
    def lower_bound(self) -> float:
        return (1.0 - sum(abs(x) for x in self.coeffs)) / TWO_PI

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        for j, c in enumerate(self.coeffs, 1):
            out = out + c * np.cos(j * x)
        return out / TWO_PI

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = x / TWO_PI
        for j, c in enumerate(self.coeffs, 1):
            out = out + c * np.sin(j * x) / (TWO_PI * j)
        return out

    def fourier_coefficient(self, k: int) -> complex:
        """E[exp(-i k X)] = c_|k| / 2 for 1 <= |k| <= J, 1 at k = 0, else 0."""
        k = abs(int(k))
        if k == 0:
            return 1.0 + 0j
        return (self.coeffs[k - 1] / 2.0 if k <= len(self.coeffs) else 0.0) + 0j

    def sample(self, rng: np.random.Generator, size: int, table: int = 1 << 14) -> np.ndarray:
        """Inverse-CDF sampling through a monotone piecewise-linear table."""
        xs = np.linspace(0.0, TWO_PI, table)
        return np.interp(rng.random(size), self.cdf(xs), xs)


def nonuniform_clt(model, density: NonUniformDensity, n: int, samples: int, master_seed: int) -> float:
    """Kolmogorov distance of f_n(X), X ~ density, to N(0, 1)."""
    p = trial_polynomial(model, n, master_seed, 0)
    X = density.sample(stream(master_seed, 0, X_STREAM), samples)
    return kolmogorov_to_gaussian(TaylorGridEvaluator(p)(X))


def empirical_measure_uniformity(p: TrigPolynomial, bins: int) -> float:
    """sup_b |N_b / N - 1/bins| for the zeros of f_n over equal bins of [0, 2pi)."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    roots = count_zeros_grid(p).roots
    if roots.size == 0:
        raise ValueError("polynomial has no real zeros")
    counts = np.bincount(np.minimum((roots / TWO_PI * bins).astype(int), bins - 1), minlength=bins)
    return float(np.max(np.abs(counts / roots.size - 1.0 / bins)))


# -- convergence rates -------------------------------------------------------


def metric_value(p: TrigPolynomial, metric: str, M: int | None = None) -> float:
    M = M or default_grid_size(p.n)
    if metric == "kolmogorov":
        return kolmogorov_to_gaussian(eval_grid(p, M).values)
    if metric == "cf":
        return cf_deviation(p, M)
    if metric == "c3_proxy":
        return c3_proxy_distance(p, M=M)
    if metric == "tv":
        return tv_to_gaussian(eval_grid(p, M).values)
    raise ConfigurationError(f"unknown metric {metric!r}")


class RateFit(NamedTuple):
    slope: float
    intercept: float
    r2: float
    n_list: tuple
    means: tuple
    stderrs: tuple


def rate_regression(model, n_list, trials: int, metric: str, master_seed: int) -> RateFit:
    """Slope of log(mean metric) against log n."""
    n_list = [int(n) for n in n_list]
    if max(n_list) < 8 * min(n_list):
        raise ValueError("n_list must span at least three octaves")
    if trials < 20:
        raise ValueError("rate_regression needs at least 20 trials per n")
    means, ses = [], []
    for n in n_list:
        v = np.array([metric_value(trial_polynomial(model, n, master_seed, i), metric) for i in range(trials)])
        means.append(float(v.mean()))
        ses.append(float(v.std(ddof=1) / math.sqrt(trials)))
    slope, icpt, r2 = loglog_slope(n_list, means)
    return RateFit(slope, icpt, r2, tuple(n_list), tuple(means), tuple(ses))


def covariance_sup_error(model, n: int, master_seed: int, grid: int = 64) -> float:
    """sup over a grid x grid set of (t, s) in [0, 2pi]^2 of |E_X g_n(t) g_n(s) - sinc(t - s)|."""
    p = trial_polynomial(model, n, master_seed, 0)
    t = np.linspace(0.0, TWO_PI, grid)
    tau = t[:, None] - t[None, :]
    return float(np.max(np.abs(local_covariance_exact(p, tau) - sinc_cov(tau))))


def tv_scan(model, n_list, trials: int, master_seed: int) -> list[dict]:
    """Mean KDE total-variation distance per n."""
    rows = []
    for n in n_list:
        v = np.array([metric_value(trial_polynomial(model, int(n), master_seed, i), "tv") for i in range(trials)])
        rows.append({"n": int(n), "mean_tv": float(v.mean()),
                     "stderr": float(v.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0})
    return rows
