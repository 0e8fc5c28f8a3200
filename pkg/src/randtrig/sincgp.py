"""The stationary Gaussian process with covariance sin(tau)/tau.

Two independent simulators: a triangular (Cholesky) factorization of the
covariance matrix, and a spectral sum over the kernel's spectral measure
(uniform on [-1, 1]).  Zero statistics are compared with the Kac--Rice
intensity sqrt(-r''(0)) / pi = 1 / (pi sqrt(3)).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.linalg import cholesky, LinAlgError

from .errors import NumericalError
from .rng import stream
from .trigpoly import TWO_PI

__all__ = [
    "sinc_cov",
    "sinc_matrix",
    "ProcessSample",
    "cholesky_factor",
    "simulate_cholesky",
    "simulate_spectral",
    "spectral_covariance",
    "expected_zeros",
    "count_sign_changes",
    "zero_counts",
    "refinement_counts",
    "ZeroMean",
    "mc_zero_mean",
]

JITTER_LADDER = (1e-10, 1e-8, 1e-6)
# stream purposes, appended after the trial index
CHOLESKY_STREAM = 11
SPECTRAL_STREAM = 12


def sinc_cov(tau):
    """sin(tau)/tau, with the Taylor series below |tau| = 1e-4."""
    t = np.asarray(tau, dtype=float)
    small = np.abs(t) < 1e-4
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = np.sin(t) / t
    t2 = t * t
    series = 1.0 - t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0 * (1.0 - t2 / 72.0)))
    out = np.where(small, series, direct)
    return float(out) if out.ndim == 0 else out


def sinc_matrix(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    return sinc_cov(g[:, None] - g[None, :])


@lru_cache(maxsize=32)
def _factor_cached(grid: tuple) -> tuple[np.ndarray, float]:
    K = sinc_matrix(np.array(grid))
    eye = np.eye(len(grid))
    for jitter in JITTER_LADDER:
        try:
            L = cholesky(K + jitter * eye, lower=True)
        except LinAlgError:
            continue
        L.setflags(write=False)
        return L, jitter
    raise NumericalError(f"sinc covariance on {len(grid)} points is not factorizable with jitter <= 1e-6")


def cholesky_factor(grid) -> tuple[np.ndarray, float]:
    """Lower factor of sinc(t_i - t_j) + jitter I and the jitter used (cached per grid)."""
    g = np.asarray(grid, dtype=float)
    if g.size > 2048:
        raise ValueError("Cholesky simulation is limited to 2048 grid points")
    if g.size > 1 and np.min(np.abs(np.diff(np.sort(g)))) < 1e-3:
        raise ValueError("grid spacing must be >= 1e-3")
    return _factor_cached(tuple(g.tolist()))


@dataclass
class ProcessSample:
    grid: np.ndarray
    values: np.ndarray
    method: str
    seed: tuple | None = None

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(self.grid, self.values):
            w.writerow([repr(float(t)), repr(float(v))])
        if path is not None:
            Path(path).write_text(buf.getvalue())
        return buf.getvalue()


def simulate_cholesky(grid, rng: np.random.Generator, size: int | None = None) -> ProcessSample:
    """Sample(s) of the sinc process on ``grid`` via the Cholesky factor.

    With ``size`` the values have shape (size, len(grid)).
    """
    g = np.asarray(grid, dtype=float)
    L, _ = cholesky_factor(g)
    if size is None:
        vals = L @ rng.standard_normal(g.size)
    else:
        vals = rng.standard_normal((size, g.size)) @ L.T
    return ProcessSample(g, vals, "cholesky")


def _spectral_nodes(Q: int) -> np.ndarray:
    return (np.arange(Q) + 0.5) / Q


def simulate_spectral(grid, Q: int, rng: np.random.Generator, size: int | None = None) -> ProcessSample:
    """g(t) = sum_q sqrt(1/Q) (xi_q cos(l_q t) + eta_q sin(l_q t)), l_q midpoints of [0, 1].

    The surrogate's covariance is the midpoint rule for int_0^1 cos(l tau) dl,
    within tau^2 / (24 Q^2) of sinc(tau).
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    g = np.asarray(grid, dtype=float)
    lam = _spectral_nodes(Q)
    ph = np.multiply.outer(g, lam)
    basis = np.concatenate([np.cos(ph), np.sin(ph)], axis=1) / math.sqrt(Q)  # (len(g), 2Q)
    if size is None:
        vals = basis @ rng.standard_normal(2 * Q)
    else:
        vals = rng.standard_normal((size, 2 * Q)) @ basis.T
    return ProcessSample(g, vals, "spectral")


def spectral_covariance(tau, Q: int):
    """Exact covariance of the Q-node spectral surrogate at lag ``tau``."""
    t = np.asarray(tau, dtype=float)
    out = np.cos(np.multiply.outer(t, _spectral_nodes(Q))).mean(axis=-1)
    return float(out) if out.ndim == 0 else out


def expected_zeros(interval) -> float:
    """Kac--Rice mean zero count (b - a) sqrt(-r''(0)) / pi = (b - a) / (pi sqrt 3)."""
    a, b = map(float, interval)
    if not 0.0 <= b - a <= TWO_PI + 1e-12:
        raise ValueError("need 0 <= b - a <= 2pi")
    return (b - a) / (math.pi * math.sqrt(3.0))


def count_sign_changes(values, grid=None) -> np.ndarray:
    """Zero counts of sampled paths (rows of ``values``).

    Sign changes between neighbours, plus two zeros for every
    same-signed triple whose interpolating parabola dips through zero
    between its outer points (a pair missed by the sign test).
    """
    v = np.atleast_2d(np.asarray(values, dtype=float))
    pos = v >= 0
    counts = np.count_nonzero(pos[:, 1:] != pos[:, :-1], axis=1)
    if v.shape[1] < 3:
        return counts
    g = np.arange(v.shape[1], dtype=float) if grid is None else np.asarray(grid, dtype=float)
    y0, y1, y2 = v[:, :-2], v[:, 1:-1], v[:, 2:]
    same = (pos[:, :-2] == pos[:, 1:-1]) & (pos[:, 1:-1] == pos[:, 2:])
    local_min = (np.abs(y1) <= np.abs(y0)) & (np.abs(y1) <= np.abs(y2))
    h0, h1 = np.diff(g)[:-1], np.diff(g)[1:]
    # Newton form through (g0,y0),(g1,y1),(g2,y2)
    d01 = (y1 - y0) / h0
    d12 = (y2 - y1) / h1
    c2 = (d12 - d01) / (h0 + h1)
    with np.errstate(divide="ignore", invalid="ignore"):
        # vertex of y0 + d01 (t - g0) + c2 (t - g0)(t - g1), in local coordinates
        tv = 0.5 * (h0 - d01 / c2)
        yv = y0 + d01 * tv + c2 * tv * (tv - h0)
    dip = same & local_min & (c2 != 0) & (tv > 0) & (tv < h0 + h1) & ((yv >= 0) != pos[:, 1:-1])
    return counts + 2 * np.count_nonzero(dip, axis=1)


def zero_counts(trials: int, grid_size: int, master_seed: int, interval=(0.0, TWO_PI),
                method: str = "cholesky", Q: int = 256) -> np.ndarray:
    """Per-trial zero counts of the sinc process on ``interval``.

    Trial ``i`` draws from ``stream(master_seed, i, purpose)``; the purpose
    key differs between the two simulators so their samples are independent.
    """
    a, b = map(float, interval)
    if grid_size > 1 and (b - a) / (grid_size - 1) > 0.05 + 1e-12:
        raise ValueError("grid spacing must be <= 0.05")
    grid = np.linspace(a, b, grid_size)
    return np.array([count_sign_changes(v, grid)[0]
                     for v in _paths(trials, grid, master_seed, method, Q)], dtype=np.int64)


def _paths(trials, grid, master_seed, method, Q):
    if method == "cholesky":
        L, _ = cholesky_factor(grid)
        for i in range(trials):
            yield L @ stream(master_seed, i, CHOLESKY_STREAM).standard_normal(grid.size)
    elif method == "spectral":
        lam = _spectral_nodes(Q)
        ph = np.multiply.outer(grid, lam)
        basis = np.concatenate([np.cos(ph), np.sin(ph)], axis=1) / math.sqrt(Q)
        for i in range(trials):
            yield basis @ stream(master_seed, i, SPECTRAL_STREAM).standard_normal(2 * Q)
    else:
        raise ValueError(f"unknown method {method!r}")


def refinement_counts(trials: int, grid_size: int, master_seed: int, interval=(0.0, TWO_PI),
                      method: str = "cholesky", Q: int = 256) -> tuple[np.ndarray, np.ndarray]:
    """Zero counts of the same paths on a grid and on its halved-spacing refinement.

    Paths are drawn on ``2 * grid_size - 1`` points; the coarse counts use
    every other sample.
    """
    a, b = map(float, interval)
    fine = np.linspace(a, b, 2 * grid_size - 1)
    coarse, refined = [], []
    for v in _paths(trials, fine, master_seed, method, Q):
        coarse.append(count_sign_changes(v[::2], fine[::2])[0])
        refined.append(count_sign_changes(v, fine)[0])
    return np.array(coarse, dtype=np.int64), np.array(refined, dtype=np.int64)


class ZeroMean(NamedTuple):
    mean: float
    stderr: float


def mc_zero_mean(trials: int, grid_size: int, master_seed: int, interval=(0.0, TWO_PI),
                 method: str = "cholesky", Q: int = 256) -> ZeroMean:
    """Monte Carlo mean zero count and its standard error."""
    if trials < 500:
        raise ValueError("mc_zero_mean needs at least 500 trials")
    c = zero_counts(trials, grid_size, master_seed, interval, method, Q)
    return ZeroMean(float(c.mean()), float(c.std(ddof=1) / math.sqrt(trials)))
