"""Random trigonometric polynomials and their fast evaluation.

    f_n(t) = n**-0.5 * sum_{k=1}^n a_k cos(k t) + b_k sin(k t)

The ``1/sqrt(n)`` factor is applied at evaluation time; the stored
coefficients are the raw draws.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .coeffs import get_model, sample_pair_sequence
from .errors import ConfigurationError

__all__ = [
    "TWO_PI",
    "TrigPolynomial",
    "GridEvaluation",
    "random_polynomial",
    "eval_direct",
    "eval_grid",
    "TaylorGridEvaluator",
    "leave_one_out_eval",
    "local_eval",
    "local_covariance_exact",
    "write_csv",
    "read_csv",
]

TWO_PI = 2.0 * math.pi
# Chunk budget (entries of the k x t angle matrix) for direct summation.
_CHUNK = 1 << 21


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """One realization of f_n.  Immutable; arrays are read-only views."""

    a: np.ndarray
    b: np.ndarray
    model: str = "custom"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        a = np.array(self.a, dtype=float).ravel()
        b = np.array(self.b, dtype=float).ravel()
        if a.size == 0 or a.shape != b.shape:
            raise ValueError("a and b must be non-empty and of equal length")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("coefficients must be finite")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.size

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.a) or np.any(self.b))

    def derivatives(self, t, count: int = 2) -> list[np.ndarray]:
        """[f, f', ..., f^(count)] at ``t``."""
        t = np.asarray(t, dtype=float)
        x = np.mod(t, TWO_PI) / self.h
        j0 = np.rint(x)
        u = x - j0
        j = j0.astype(np.int64) % self.M
        out = []
        for r in range(count + 1):
            # d^r/du^r of sum_m T[m] u^m, Horner from the top
            acc = np.zeros_like(u)
            for m in range(self.order, r - 1, -1):
                acc = acc * u + math.perm(m, r) * self.table[m, j]
            out.append(acc / self.h**r)
        return out

    def __call__(self, t, derivative: bool = False):
        return eval_direct(self, t, derivative=derivative)

    def zeroed(self, k: int) -> "TrigPolynomial":
        """Copy with the k-th pair (1-based) set to zero."""
        a, b = self.a.copy(), self.b.copy()
        a[k - 1] = b[k - 1] = 0.0
        return TrigPolynomial(a, b, self.model)


def random_polynomial(model, n: int, rng: np.random.Generator) -> TrigPolynomial:
    model = get_model(model)
    a, b = sample_pair_sequence(model, n, rng)
    return TrigPolynomial(a, b, model.name)


@dataclass(frozen=True)
class GridEvaluation:
    M: int
    points: np.ndarray
    values: np.ndarray
    derivative_values: np.ndarray | None = None


def _reduced_angles(k: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.mod(np.multiply.outer(t, k), TWO_PI)


def eval_direct(p: TrigPolynomial, t, derivative: bool = False):
    """f_n(t) (or f_n'(t)) by direct summation, angles reduced mod 2*pi.

    Accepts a scalar or an array; returns the same shape.
    """
    t_arr = np.asarray(t, dtype=float)
    flat = t_arr.ravel()
    k = np.arange(1, p.n + 1, dtype=float)
    out = np.empty(flat.size)
    step = max(1, _CHUNK // p.n)
    for s in range(0, flat.size, step):
        ang = _reduced_angles(k, flat[s : s + step])
        c, sn = np.cos(ang), np.sin(ang)
        if derivative:
            out[s : s + step] = (c @ (k * p.b) - sn @ (k * p.a))
        else:
            out[s : s + step] = c @ p.a + sn @ p.b
    out /= math.sqrt(p.n)
    if t_arr.ndim == 0:
        return float(out[0])
    return out.reshape(t_arr.shape)


def _is_pow2(m: int) -> bool:
    return m > 0 and (m & (m - 1)) == 0


def eval_grid(p: TrigPolynomial, M: int, derivative: bool = False) -> GridEvaluation:
    """Values of f_n (and optionally f_n') at t_j = 2*pi*j/M.

    Power-of-two ``M`` uses an inverse real FFT of the embedded spectrum;
    any other ``M`` falls back to direct summation.  ``M >= 2n + 2`` is
    required so that no mode aliases onto another.
    """
    M = int(M)
    if M < 2 * p.n + 2:
        raise ValueError(f"grid size M={M} aliases a degree-{p.n} polynomial; need M >= {2 * p.n + 2}")
    points = TWO_PI * np.arange(M) / M
    if not _is_pow2(M):
        vals = eval_direct(p, points)
        der = eval_direct(p, points, derivative=True) if derivative else None
        return GridEvaluation(M, points, vals, der)
    # irfft(X)[j] = (1/M) * (X_0 + 2 Re sum_k X_k e^{2 pi i jk/M}) for k < M/2
    spectrum = np.zeros(M // 2 + 1, dtype=complex)
    c = p.a - 1j * p.b
    spectrum[1 : p.n + 1] = c
    scale = (M / 2.0) / math.sqrt(p.n)
    vals = np.fft.irfft(spectrum, n=M) * scale
    der = None
    if derivative:
        spectrum[1 : p.n + 1] = 1j * np.arange(1, p.n + 1) * c
        der = np.fft.irfft(spectrum, n=M) * scale
    return GridEvaluation(M, points, vals, der)


class TaylorGridEvaluator:
    """Evaluate f_n and f_n' anywhere at O(1) cost per point.

    Scaled derivatives ``h**m f^(m)(t_j) / m!`` on the FFT grid t_j = j h
    (one inverse FFT per order) give f(t_j + u h) = sum_m T[m, j] u**m
    with |u| <= 1/2.  The series is truncated once the Bernstein bound
    ``(n h / 2)**m / m!`` of the dropped terms falls below ``tol``, so the
    result matches direct summation up to floating-point roundoff.
    """

    def __init__(self, p: TrigPolynomial, oversample: int = 32, tol: float = 1e-17):
        n = p.n
        M = 1 << max(3, math.ceil(math.log2(max(oversample * n, 2 * n + 2))))
        h = TWO_PI / M
        r = n * h / 2.0
        order, term = 1, r
        while term > tol and order < 60:
            order += 1
            term *= r / order
        k = np.arange(1, n + 1)
        spectrum = np.zeros(M // 2 + 1, dtype=complex)
        spectrum[1 : n + 1] = (p.a - 1j * p.b) * ((M / 2.0) / math.sqrt(n))
        rows = []
        for m in range(order + 1):
            if m:
                spectrum[1 : n + 1] *= 1j * k * h / m
            rows.append(np.fft.irfft(spectrum, n=M))
        self.p = p
        self.M = M
        self.h = h
        self.order = order
        self.table = np.array(rows)  # (order + 1, M)

    def both(self, t) -> tuple[np.ndarray, np.ndarray]:
        t = np.asarray(t, dtype=float)
        x = np.mod(t, TWO_PI) / self.h
        j0 = np.rint(x)
        u = x - j0
        j = j0.astype(np.int64) % self.M
        T = self.table
        f = T[self.order, j]
        d = self.order * T[self.order, j]
        for m in range(self.order - 1, -1, -1):
            f = f * u + T[m, j]
            if m:
                d = d * u + m * T[m, j]
        return f, d / self.h

    def derivatives(self, t, count: int = 2) -> list[np.ndarray]:
        """[f, f', ..., f^(count)] at ``t``."""
        t = np.asarray(t, dtype=float)
        x = np.mod(t, TWO_PI) / self.h
        j0 = np.rint(x)
        u = x - j0
        j = j0.astype(np.int64) % self.M
        out = []
        for r in range(count + 1):
            # d^r/du^r of sum_m T[m] u^m, Horner from the top
            acc = np.zeros_like(u)
            for m in range(self.order, r - 1, -1):
                acc = acc * u + math.perm(m, r) * self.table[m, j]
            out.append(acc / self.h**r)
        return out

    def __call__(self, t, derivative: bool = False):
        f, d = self.both(t)
        return d if derivative else f


def leave_one_out_eval(p: TrigPolynomial, k: int, t):
    """S_n^k(t)/sqrt(n): f_n(t) with the k-th term R_k removed."""
    if not 1 <= k <= p.n:
        raise IndexError(f"k={k} outside 1..{p.n}")
    t_arr = np.asarray(t, dtype=float)
    ang = np.mod(k * t_arr, TWO_PI)
    rk = p.a[k - 1] * np.cos(ang) + p.b[k - 1] * np.sin(ang)
    out = eval_direct(p, t_arr) - rk / math.sqrt(p.n)
    return float(out) if np.ndim(out) == 0 else out


def local_eval(p: TrigPolynomial, X: float, tgrid, derivative: bool = False):
    """g_n(t) = f_n(X + t/n) on ``tgrid``; with ``derivative`` g_n'(t) = f_n'(X + t/n)/n."""
    t = X + np.asarray(tgrid, dtype=float) / p.n
    if derivative:
        return eval_direct(p, t, derivative=True) / p.n
    return eval_direct(p, t)


def local_covariance_exact(p: TrigPolynomial, tau):
    """E_X[g_n(t) g_n(t + tau)] = (1/2n) sum_k (a_k^2 + b_k^2) cos(k tau / n)."""
    tau_arr = np.asarray(tau, dtype=float)
    k = np.arange(1, p.n + 1, dtype=float)
    w = p.a**2 + p.b**2
    flat = tau_arr.ravel()
    out = np.cos(np.multiply.outer(flat / p.n, k)) @ w / (2.0 * p.n)
    if tau_arr.ndim == 0:
        return float(out[0])
    return out.reshape(tau_arr.shape)


# -- CSV round trip ---------------------------------------------------------
# Line 1: "# n=<n> model=<name>"; line 2: header "k,a_k,b_k"; then one row per k.


def write_csv(p: TrigPolynomial, path) -> None:
    buf = io.StringIO()
    buf.write(f"# n={p.n} model={p.model}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "a_k", "b_k"])
    for k in range(p.n):
        w.writerow([k + 1, repr(float(p.a[k])), repr(float(p.b[k]))])
    Path(path).write_text(buf.getvalue())


def read_csv(path) -> TrigPolynomial:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ConfigurationError(f"{path}: missing '# n=... model=...' header line")
    meta = dict(tok.split("=", 1) for tok in lines[0][1:].split())
    rows = list(csv.DictReader(lines[1:]))
    n = int(meta["n"])
    if len(rows) != n:
        raise ConfigurationError(f"{path}: header says n={n} but found {len(rows)} rows")
    a = np.zeros(n)
    b = np.zeros(n)
    for r in rows:
        k = int(r["k"])
        a[k - 1] = float(r["a_k"])
        b[k - 1] = float(r["b_k"])
    return TrigPolynomial(a, b, meta.get("model", "custom"))
