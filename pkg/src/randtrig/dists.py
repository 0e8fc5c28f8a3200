"""Distances between the law of f_n(X), X uniform, and N(0, 1).

Every expectation over X is a uniform-grid quadrature; for smooth
periodic integrands it converges spectrally, so the only randomness left
is the coefficient draw.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.special import ndtr

from .coeffs import get_model, stein_constant
from .errors import DegeneratePolynomialError, DegenerateSampleError
from .rng import stream
from .trigpoly import TWO_PI, TrigPolynomial, eval_grid, random_polynomial

__all__ = [
    "DistanceReport",
    "TestFunctionFamily",
    "default_grid_size",
    "empirical_cf",
    "cf_deviation",
    "kolmogorov_to_gaussian",
    "tv_to_gaussian",
    "c3_proxy_distance",
    "distance_report",
    "append_distance_csv",
    "SteinCheck",
    "stein_bound_check",
    "epsilon_n_second_moment",
    "AntildeEstimate",
    "antilde_bound",
    "antilde_estimate",
]

CF_XI_GRID = np.linspace(0.25, 4.0, 16)
DISTANCE_COLUMNS = ("model", "n", "seed", "kolmogorov", "cf_dev", "tv", "c3_proxy", "M")


def default_grid_size(n: int, factor: int = 16) -> int:
    """Smallest power of two >= factor * n (and >= 2n + 2)."""
    need = max(factor * n, 2 * n + 2, 8)
    return 1 << math.ceil(math.log2(need))


def _fsum_mean(x: np.ndarray) -> float:
    return math.fsum(x.tolist()) / x.size


def _check_grid(p: TrigPolynomial, M: int):
    if M < 4 * p.n or M & (M - 1):
        raise ValueError(f"grid size must be a power of two >= 4n (got M={M}, n={p.n})")


def empirical_cf(p: TrigPolynomial, xi, M: int):
    """(1/M) sum_j exp(i xi f_n(t_j)): the characteristic function under X."""
    _check_grid(p, M)
    vals = eval_grid(p, M).values
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.empty(xi_arr.size, dtype=complex)
    for i, x in enumerate(xi_arr):
        ph = x * vals
        out[i] = complex(_fsum_mean(np.cos(ph)), _fsum_mean(np.sin(ph)))
    return complex(out[0]) if np.ndim(xi) == 0 else out


def cf_deviation(p: TrigPolynomial, M: int, xi_grid=CF_XI_GRID) -> float:
    """sup over ``xi_grid`` of |empirical_cf - exp(-xi^2/2)|."""
    xi_grid = np.asarray(xi_grid, dtype=float)
    cf = empirical_cf(p, xi_grid, M)
    return float(np.max(np.abs(cf - np.exp(-0.5 * xi_grid**2))))


def kolmogorov_to_gaussian(values) -> float:
    """sup_x |F_emp(x) - Phi(x)|, checked on both sides of every jump.

    Phi is ``scipy.special.ndtr`` (erfc based, absolute error ~1e-16).
    """
    x = np.sort(np.asarray(values, dtype=float).ravel())
    m = x.size
    if m == 0:
        raise ValueError("need at least one value")
    F = ndtr(x)
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - F), np.max(F - (i - 1) / m)))


def tv_to_gaussian(values, bandwidth="auto") -> float:
    """Half the L1 distance between a Gaussian KDE of ``values`` and phi.

    The auto bandwidth is Silverman's ``1.06 sd m**-0.2``.  The integral runs
    over [-8, 8] by the trapezoid rule with step <= bandwidth / 4; KDE mass
    that falls outside the window is added exactly via Phi.
    """
    x = np.asarray(values, dtype=float).ravel()
    m = x.size
    if m < 2:
        raise ValueError("need at least two values")
    sd = float(np.std(x, ddof=1))
    if bandwidth == "auto":
        if not sd > 0:
            raise DegenerateSampleError("zero-variance sample has no density estimate")
        bw = 1.06 * sd * m ** (-0.2)
    else:
        bw = float(bandwidth)
        if not bw > 0:
            raise ValueError("bandwidth must be positive")
    npts = int(math.ceil(16.0 / (bw / 4.0))) + 1
    grid = np.linspace(-8.0, 8.0, npts)
    dens = np.zeros(npts)
    chunk = max(1, (1 << 22) // npts)
    for s in range(0, m, chunk):
        z = (grid[None, :] - x[s : s + chunk, None]) / bw
        dens += np.exp(-0.5 * z * z).sum(axis=0)
    dens /= m * bw * math.sqrt(TWO_PI)
    phi = np.exp(-0.5 * grid**2) / math.sqrt(TWO_PI)
    inside = float(np.trapezoid(np.abs(dens - phi), grid))
    outside = float(np.mean(ndtr((-8.0 - x) / bw) + ndtr((x - 8.0) / bw)))
    tail_phi = 2.0 * float(ndtr(-8.0))
    return 0.5 * (inside + outside + tail_phi)


@dataclass(frozen=True)
class TestFunctionFamily:
    """Finite family phi(x) = trig(lam x) / max(1, lam^3).

    Each member has |phi^(k)| <= 1 for k = 0..3, so the family supremum is
    a lower bound of the C^3 distance.
    """

    members: tuple = tuple(
        (kind, lam) for lam in (0.5, 1.0, 1.5, 2.0, 3.0) for kind in ("cos", "sin")
    )

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not self.members:
            raise ValueError("test-function family must be non-empty")
        for kind, lam in self.members:
            if kind not in ("cos", "sin") or not lam > 0:
                raise ValueError(f"bad family member {(kind, lam)!r}")

    @staticmethod
    def norm(lam: float) -> float:
        return max(1.0, lam**3)

    def gaussian_expectation(self, kind: str, lam: float) -> float:
        return math.exp(-0.5 * lam * lam) / self.norm(lam) if kind == "cos" else 0.0


def c3_proxy_distance(p: TrigPolynomial, fam: TestFunctionFamily | None = None, M: int | None = None) -> float:
    """max over ``fam`` of |E_X phi(f_n(X)) - E phi(G)|: a lower bound of d_C3."""
    if p.is_zero:
        raise DegeneratePolynomialError("C3 proxy of the zero polynomial is undefined")
    fam = fam or TestFunctionFamily()
    M = M or default_grid_size(p.n)
    _check_grid(p, M)
    vals = eval_grid(p, M).values
    best = 0.0
    for kind, lam in fam.members:
        trig = np.cos if kind == "cos" else np.sin
        emp = _fsum_mean(trig(lam * vals)) / fam.norm(lam)
        best = max(best, abs(emp - fam.gaussian_expectation(kind, lam)))
    return best


@dataclass
class DistanceReport:
    n: int
    kolmogorov: float
    cf_deviation: float
    tv: float
    c3_proxy: float
    grid_M: int
    model: str = "custom"
    seed: int | None = None

    def row(self) -> dict:
        return {
            "model": self.model,
            "n": self.n,
            "seed": self.seed,
            "kolmogorov": self.kolmogorov,
            "cf_dev": self.cf_deviation,
            "tv": self.tv,
            "c3_proxy": self.c3_proxy,
            "M": self.grid_M,
        }


def distance_report(p: TrigPolynomial, M: int | None = None, seed=None) -> DistanceReport:
    M = M or default_grid_size(p.n)
    vals = eval_grid(p, M).values
    return DistanceReport(
        n=p.n,
        kolmogorov=kolmogorov_to_gaussian(vals),
        cf_deviation=cf_deviation(p, M),
        tv=tv_to_gaussian(vals),
        c3_proxy=c3_proxy_distance(p, M=M),
        grid_M=M,
        model=p.model,
        seed=seed,
    )


def _fmt(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else ("" if v is None else str(v))


def append_distance_csv(path, reports) -> None:
    """Append rows (model, n, seed, kolmogorov, cf_dev, tv, c3_proxy, M); header on creation."""
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with path.open("a", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if new:
            w.writerow(DISTANCE_COLUMNS)
        for r in reports:
            row = r.row()
            w.writerow([_fmt(row[c]) for c in DISTANCE_COLUMNS])


class SteinCheck(NamedTuple):
    mean_proxy: float
    bound: float
    passed: bool
    stderr: float


def stein_bound_check(model, n: int, trials: int, master_seed: int, M: int | None = None) -> SteinCheck:
    """Compare the trial mean of the C3 proxy with C(a1)/sqrt(n).

    Trial ``i`` uses the polynomial built from ``stream(master_seed, i)``.
    """
    if trials < 30:
        raise ValueError("stein_bound_check needs at least 30 trials")
    model = get_model(model)
    M = M or default_grid_size(n)
    vals = np.array(
        [c3_proxy_distance(random_polynomial(model, n, stream(master_seed, i)), M=M) for i in range(trials)]
    )
    mean = _fsum_mean(vals)
    se = float(np.std(vals, ddof=1) / math.sqrt(trials))
    bound = stein_constant(model.moments) / math.sqrt(n)
    return SteinCheck(mean, bound, bool(mean <= bound), se)


def epsilon_n_second_moment(n: int, MQ: int = 4096) -> float:
    """Quadrature of eps_n(u)^2, eps_n(u) = (1/n) sum_k cos(k u), u on an MQ-grid.

    eps_n(X, Y) depends on X - Y only, which is uniform when X, Y are, so
    the double expectation collapses to one integral; the rule is exact
    for MQ > 2n.
    """
    if MQ < 2048:
        raise ValueError("MQ must be >= 2048")
    ones = TrigPolynomial(np.ones(n), np.zeros(n))
    eps = eval_grid(ones, MQ).values / math.sqrt(n)
    return _fsum_mean(eps * eps)


class AntildeEstimate(NamedTuple):
    estimate: float
    bound: float
    stderr: float


def antilde_bound(m3: float, xi: float, n: int) -> float:
    ax = abs(xi)
    return (13.0 + abs(m3)) * (ax**4 + ax**3 + ax**2 + 1.0) / n


def _antilde_single(p: TrigPolynomial, xi: float, M: int) -> float:
    n = p.n
    j = np.arange(M)
    k = np.arange(1, n + 1)
    idx = np.multiply.outer(k, j) % M
    ang = TWO_PI * np.arange(M) / M
    R = p.a[:, None] * np.cos(ang)[idx] + p.b[:, None] * np.sin(ang)[idx]  # R_k(t_j)
    f = eval_grid(p, M).values
    rn = math.sqrt(n)
    inner = np.mean(R * np.exp(1j * xi * (f[None, :] - R / rn)), axis=1)
    return abs(inner.sum() / rn) ** 2


def antilde_estimate(model, n: int, xi: float, trials: int, M: int | None, master_seed: int) -> AntildeEstimate:
    """Monte Carlo estimate of E|n^-1/2 sum_k E_X[R_k(X) exp(i xi S_n^k(X)/sqrt(n))]|^2.

    R_k(X) = a_k cos(kX) + b_k sin(kX) and S_n^k = sqrt(n) f_n - R_k; the
    inner E_X is an M-point grid rule, the outer E a mean over ``trials``
    coefficient draws.
    """
    if n > 512:
        raise ValueError("antilde_estimate is limited to n <= 512")
    if trials < 100:
        raise ValueError("antilde_estimate needs at least 100 trials")
    model = get_model(model)
    M = M or default_grid_size(n, 4)
    if M < 4 * n:
        raise ValueError("M must be >= 4n")
    vals = np.array(
        [_antilde_single(random_polynomial(model, n, stream(master_seed, i)), xi, M) for i in range(trials)]
    )
    return AntildeEstimate(
        _fsum_mean(vals),
        antilde_bound(model.moments.m3, xi, n),
        float(np.std(vals, ddof=1) / math.sqrt(trials)),
    )
