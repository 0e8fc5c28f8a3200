"""Certified real-zero counting for trigonometric polynomials.

The grid counter samples f_n and f_n' on an FFT grid and certifies every
cell with Bernstein's inequality (``sup|g'| <= n sup|g|`` for any
degree-n trigonometric polynomial g, applied to g = f and g = f'):

* a cell is zero-free if ``min |f(endpoint)| > (w/2) n sup|f|``, or if the
  concave Taylor lower bound built from f, f' at the endpoints and
  ``sup|f''| <= n sup|f'|`` stays away from zero on both half-cells;
* f is strictly monotone on a cell if ``min |f'(endpoint)| > (w/2) n sup|f'|``,
  or the same second-order test applied to f' (using f'' at the endpoints
  and ``sup|f'''| <= n**2 sup|f'|``) succeeds.  The cell then holds
  exactly one zero if f changes sign and none otherwise.

Cells meeting neither test are bisected (up to ``max_depth`` times) and
reported as suspicious if still unresolved.  Sup norms are bounded from
grid maxima by ``sup|g| <= max_grid|g| / (1 - (n pi / M)**2 / 2)``.

The companion-matrix counter lifts f_n to a degree-2n algebraic
polynomial and counts its eigenvalue roots on the unit circle; it is an
independent oracle for small n.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegeneratePolynomialError, OracleFailure
from .trigpoly import TWO_PI, TaylorGridEvaluator, TrigPolynomial

__all__ = [
    "ZeroReport",
    "find_roots",
    "count_zeros_grid",
    "count_zeros_companion",
    "window_count",
    "window_counts",
    "window_identity_check",
]

ROOT_TOL = 1e-12
RESIDUAL_TOL = 1e-8
UNIT_CIRCLE_TOL = 1e-6
COMPANION_MAX_N = 128


@dataclass
class ZeroReport:
    interval: tuple[float, float]
    count: int
    roots: np.ndarray
    tolerance: float
    suspicious_intervals: list[tuple[float, float]] = field(default_factory=list)
    method: str = "grid"
    n: int = 0
    grid_size: int = 0
    max_grid_abs: float = 0.0

    @property
    def flagged(self) -> bool:
        return bool(self.suspicious_intervals)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["roots"] = [float(r) for r in self.roots]
        d["interval"] = [float(x) for x in self.interval]
        d["suspicious_intervals"] = [[float(x), float(y)] for x, y in self.suspicious_intervals]
        d["flagged"] = self.flagged
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _grid_size(n: int, oversample: int) -> int:
    need = max(oversample * n, 2 * n + 2, 8)
    return 1 << math.ceil(math.log2(need))


def _bisect(fn, lo, hi, pos_lo, tol=ROOT_TOL):
    """Vectorized bisection; ``pos_lo`` is the sign class (>= 0) of fn at lo."""
    lo, hi = lo.copy(), hi.copy()
    while True:
        live = hi - lo > tol
        if not live.any():
            break
        mid = 0.5 * (lo + hi)
        same = (fn(mid) >= 0) == pos_lo
        lo = np.where(live & same, mid, lo)
        hi = np.where(live & ~same, mid, hi)
    return 0.5 * (lo + hi)


def _evaluator(p, oversample):
    key = ("taylor", int(oversample))
    if key not in p._cache:
        p._cache[key] = TaylorGridEvaluator(p, oversample)
    return p._cache[key]


def find_roots(p: TrigPolynomial, oversample: int = 32, max_depth: int = 8):
    """All zeros of f_n on [0, 2pi), certified on an FFT grid.

    Returns ``(roots, suspicious, M, max_grid_abs)``; cached per polynomial.
    ``suspicious`` lists cells left uncertified after ``max_depth``
    bisections.  Inside such a cell the extremum of f is located; a
    numerically tangent zero there (|f| at roundoff level) is counted once.
    """
    if oversample < 8:
        raise ValueError("oversample must be >= 8")
    key = ("roots", int(oversample), int(max_depth))
    if key in p._cache:
        return p._cache[key]
    if p.is_zero:
        raise DegeneratePolynomialError("all coefficients are zero; every point is a root")
    n = p.n
    ev = _evaluator(p, oversample)
    M = ev.M
    vals, ders = ev.table[0], ev.table[1] / ev.h
    inflate = 1.0 / (1.0 - 0.5 * (n * math.pi / M) ** 2)
    fmax = float(np.max(np.abs(vals)))
    fsup = fmax * inflate
    dsup = float(np.max(np.abs(ders))) * inflate
    f2sup = n * dsup  # Bernstein bound on |f''|
    f3sup = n * f2sup
    tangent_tol = 64 * np.finfo(float).eps * float(np.sum(np.abs(p.a) + np.abs(p.b))) / math.sqrt(n)

    lo = TWO_PI * np.arange(M) / M
    hi = np.append(lo[1:], TWO_PI)
    flo, fhi = vals, np.roll(vals, -1)
    dlo, dhi = ders, np.roll(ders, -1)

    br_lo, br_hi, br_pos = [], [], []
    extra = []
    suspicious = []
    for depth in range(max_depth + 1):
        if lo.size == 0:
            break
        hw = 0.5 * (hi - lo)
        pos = flo >= 0
        change = pos != (fhi >= 0)
        mono = np.minimum(np.abs(dlo), np.abs(dhi)) > hw * f2sup
        s = np.where(pos, 1.0, -1.0)
        curv = 0.5 * f2sup * hw * hw
        away = (
            (np.minimum(np.abs(flo), np.abs(fhi)) > hw * n * fsup)
            | ((s * (flo + dlo * hw) > curv) & (s * (fhi - dhi * hw) > curv))
        )
        weak = ~mono & ~(~change & away)
        if weak.any():
            # second order on each half-cell, sd = sign f':
            # sd f'(e + s) >= sd (f'(e) + f''(e) s) - f3sup s^2 / 2, linear part checked at both ends
            idx = np.flatnonzero(weak)
            h_ = hw[idx]
            slack = 0.5 * f3sup * h_ * h_
            d2lo = ev.derivatives(lo[idx], 2)[2]
            d2hi = ev.derivatives(hi[idx], 2)[2]
            sd = np.where(dlo[idx] >= 0, 1.0, -1.0)
            mono[idx] = (
                (sd * dlo[idx] > slack) & (sd * dhi[idx] > slack)
                & (sd * (dlo[idx] + d2lo * h_) > slack)
                & (sd * (dhi[idx] - d2hi * h_) > slack)
            )
        one = change & mono
        br_lo.append(lo[one])
        br_hi.append(hi[one])
        br_pos.append(pos[one])
        open_ = ~(one | (~change & (mono | away)))
        lo, hi, flo, fhi, dlo, dhi = (v[open_] for v in (lo, hi, flo, fhi, dlo, dhi))
        if depth == max_depth or lo.size == 0:
            break
        mid = 0.5 * (lo + hi)
        fm, dm = ev.both(mid)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        flo, fhi = np.concatenate([flo, fm]), np.concatenate([fm, fhi])
        dlo, dhi = np.concatenate([dlo, dm]), np.concatenate([dm, dhi])

    # unresolved cells: locate the extremum of f and decide from its value
    for c in range(lo.size):
        a, b = lo[c], hi[c]
        if (dlo[c] >= 0) != (dhi[c] >= 0):
            tx = float(_bisect(lambda t: ev(t, derivative=True),
                               np.array([a]), np.array([b]), np.array([dlo[c] >= 0]))[0])
        else:
            tx = a if abs(flo[c]) <= abs(fhi[c]) else b
        fx = float(ev(tx))
        pa, pb = flo[c] >= 0, fhi[c] >= 0
        if pa != pb:
            # odd number of zeros; keep the bracketed crossing
            br_lo.append(np.array([a]))
            br_hi.append(np.array([b]))
            br_pos.append(np.array([pa]))
            suspicious.append((float(a), float(b)))
        elif abs(fx) <= tangent_tol:
            extra.append(tx)
            suspicious.append((float(a), float(b)))
        elif (fx >= 0) != pa and a < tx < b:
            br_lo.append(np.array([a, tx]))
            br_hi.append(np.array([tx, b]))
            br_pos.append(np.array([pa, fx >= 0]))

    blo, bhi, bpos = (np.concatenate(v) for v in (br_lo, br_hi, br_pos))
    roots = _bisect(ev, blo, bhi, bpos) if blo.size else np.empty(0)
    roots = np.sort(np.mod(np.concatenate([roots, extra]), TWO_PI))
    if roots.size > 1:
        # a tangent zero on a shared cell edge is found from both sides
        gap = np.diff(np.append(roots, roots[0] + TWO_PI))
        dup = gap < 1e3 * ROOT_TOL
        if dup.any():
            suspicious.extend((float(r), float(r)) for r in roots[dup])
            roots = roots[:1] if dup.all() else roots[~dup]
    out = (roots, sorted(suspicious), M, fmax)
    p._cache[key] = out
    return out


def _in_window(x, lo, length):
    # closed window; a root is only known to ROOT_TOL, so endpoints get that slack
    if length >= TWO_PI:
        return np.ones(np.shape(x), dtype=bool)
    return np.mod(np.asarray(x) - lo + ROOT_TOL, TWO_PI) <= length + 2 * ROOT_TOL


def count_zeros_grid(p: TrigPolynomial, interval=(0.0, TWO_PI), oversample: int = 32) -> ZeroReport:
    """Certified zero count of f_n on ``interval`` (taken mod 2pi).

    ``interval = (lo, hi)`` with ``0 <= hi - lo <= 2pi``; windows that wrap
    past 2pi are allowed.
    """
    lo, hi = float(interval[0]), float(interval[1])
    length = hi - lo
    if not 0.0 <= length <= TWO_PI + 1e-15:
        raise ValueError("interval length must lie in [0, 2pi]")
    roots, susp, M, fmax = find_roots(p, oversample)
    inside = roots[_in_window(roots, lo, length)] if length > 0 else roots[:0]
    inside = np.sort(inside)
    sus = [
        (a, b) for a, b in susp
        if length >= TWO_PI or _in_window(a, lo, length) or _in_window(b, lo, length)
    ]
    return ZeroReport(
        interval=(lo, hi),
        count=int(inside.size),
        roots=inside,
        tolerance=RESIDUAL_TOL,
        suspicious_intervals=sus,
        method="grid",
        n=p.n,
        grid_size=M,
        max_grid_abs=fmax,
    )


def count_zeros_companion(p: TrigPolynomial) -> ZeroReport:
    """Zero count on [0, 2pi) from the unit-circle roots of the algebraic lift.

    With z = e^{it}, ``2 z^n sqrt(n) f_n(t) = P(z)`` where
    ``P(z) = sum_k (a_k - i b_k) z^{n+k} + (a_k + i b_k) z^{n-k}``.
    Roots with ``| |z| - 1 | < 1e-6`` are real zeros of f_n.  Roots just
    outside that band (within a factor 10) are flagged as ambiguous, and
    unit-circle roots closer than 1e-6 in angle are merged into one zero
    and flagged (a tangent zero splits into a pair of eigenvalues).
    """
    n = p.n
    if n > COMPANION_MAX_N:
        raise ValueError(f"companion oracle is limited to n <= {COMPANION_MAX_N}")
    if p.is_zero:
        raise DegeneratePolynomialError("all coefficients are zero")
    coef = np.zeros(2 * n + 1, dtype=complex)  # index = degree
    k = np.arange(1, n + 1)
    coef[n + k] = p.a - 1j * p.b
    coef[n - k] = p.a + 1j * p.b
    try:
        z = np.roots(coef[::-1])
    except np.linalg.LinAlgError as exc:
        raise OracleFailure(f"eigenvalue iteration failed: {exc}") from exc
    if not np.all(np.isfinite(z)):
        raise OracleFailure("non-finite eigenvalues")
    dist = np.abs(np.abs(z) - 1.0)
    on = dist < UNIT_CIRCLE_TOL
    t = np.sort(np.mod(np.angle(z[on]), TWO_PI))
    flags = [(float(x), float(x)) for x in np.mod(np.angle(z[(dist >= UNIT_CIRCLE_TOL / 10) & ~on
                                                              & (dist < UNIT_CIRCLE_TOL * 10)]), TWO_PI)]
    if t.size > 1:
        # a tangent zero shows up as a cluster of eigenvalues split by ~sqrt(eps)
        gap = np.diff(np.append(t, t[0] + TWO_PI))
        dup = gap < UNIT_CIRCLE_TOL
        for i in np.flatnonzero(dup):
            flags.append((float(t[i]), float(t[(i + 1) % t.size])))
        if dup.all():
            t = t[:1]
        else:
            t = t[~dup]
    if t.size:
        ev = _evaluator(p, 32)
        for _ in range(2):
            f, d = ev.both(t)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(d != 0, f / d, 0.0)
            t = np.mod(t - np.clip(step, -1e-6, 1e-6), TWO_PI)
    t = np.sort(t)
    return ZeroReport(
        interval=(0.0, TWO_PI),
        count=int(t.size),
        roots=t,
        tolerance=RESIDUAL_TOL,
        suspicious_intervals=sorted(flags),
        method="companion",
        n=n,
    )


def window_counts(p: TrigPolynomial, X, h: float, oversample: int = 32) -> np.ndarray:
    """Vectorized N(f_n, [X, X + h]) (mod 2pi) for an array of left ends."""
    if not 0.0 < h <= TWO_PI:
        raise ValueError("window length h must satisfy 0 < h <= 2pi")
    roots = find_roots(p, oversample)[0]
    if h == TWO_PI:
        return np.full(np.shape(X), roots.size, dtype=np.intp)
    ext = np.concatenate([roots, roots + TWO_PI])
    x0 = np.mod(np.asarray(X, dtype=float), TWO_PI)
    return np.searchsorted(ext, x0 + h, side="right") - np.searchsorted(ext, x0, side="left")


def window_count(p: TrigPolynomial, X: float, h: float, oversample: int = 32) -> int:
    """N(f_n, [X, X + h]) with wrap-around mod 2pi."""
    if not 0.0 < h <= TWO_PI:
        raise ValueError("window length h must satisfy 0 < h <= 2pi")
    return count_zeros_grid(p, (X, X + h), oversample).count


def window_identity_check(p: TrigPolynomial, h: float, MX: int = 4096, oversample: int = 32):
    """Both sides of ``(h/2pi) N(f,[0,2pi]) = E_X N(f,[X,X+h])``.

    The right side averages window counts over X_j = (j + 1/2) 2pi / MX.
    """
    if MX < 1024:
        raise ValueError("MX must be >= 1024")
    total = count_zeros_grid(p, (0.0, TWO_PI), oversample).count
    lhs = h / TWO_PI * total
    X = (np.arange(MX) + 0.5) * (TWO_PI / MX)
    counts = window_counts(p, X, h, oversample)
    rhs = math.fsum(counts.tolist()) / MX
    return lhs, rhs
