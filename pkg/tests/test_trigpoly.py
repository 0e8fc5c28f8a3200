import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from randtrig import (
    TWO_PI,
    ConfigurationError,
    TaylorGridEvaluator,
    TrigPolynomial,
    eval_direct,
    eval_grid,
    local_covariance_exact,
    local_eval,
    random_polynomial,
    read_csv,
    stream,
    write_csv,
)
from randtrig.trigpoly import leave_one_out_eval

from conftest import cos_poly


def mp_eval(p, t, dps=40, derivative=0):
    """Extended-precision reference value of f_n^(derivative)(t)."""
    with mp.workdps(dps):
        t = mp.mpf(t)
        s = mp.mpf(0)
        for k in range(1, p.n + 1):
            a, b = mp.mpf(float(p.a[k - 1])), mp.mpf(float(p.b[k - 1]))
            c, sn = mp.cos(k * t), mp.sin(k * t)
            if derivative == 0:
                s += a * c + b * sn
            else:
                s += k * (-a * sn + b * c)
        return float(s / mp.sqrt(p.n))


@pytest.mark.parametrize("n", [1, 7, 64])
def test_direct_matches_extended_precision(n):
    p = random_polynomial("gaussian", n, stream(4, n))
    t = np.array([0.0, 0.3, 1.7, 3.14159, 5.9])
    got = eval_direct(p, t)
    ref = np.array([mp_eval(p, x) for x in t])
    np.testing.assert_allclose(got, ref, atol=1e-13 * math.sqrt(n))
    gotd = eval_direct(p, t, derivative=True)
    refd = np.array([mp_eval(p, x, derivative=1) for x in t])
    np.testing.assert_allclose(gotd, refd, atol=1e-12 * n**1.5)


@pytest.mark.parametrize("n,M", [(5, 16), (100, 256), (100, 300), (1000, 4096)])
def test_grid_matches_direct(n, M):
    p = random_polynomial("rademacher", n, stream(5, n))
    g = eval_grid(p, M, derivative=True)
    assert g.points[0] == 0.0 and g.points.size == M
    np.testing.assert_allclose(g.values, eval_direct(p, g.points), atol=1e-11)
    np.testing.assert_allclose(g.derivative_values, eval_direct(p, g.points, derivative=True), atol=1e-9 * n)


def test_grid_rejects_aliasing_size():
    p = random_polynomial("gaussian", 10, stream(0, 0))
    with pytest.raises(ValueError):
        eval_grid(p, 20)


def test_cos_kt_on_grid():
    g = eval_grid(cos_poly(8), 64)
    np.testing.assert_allclose(g.values, np.cos(8 * g.points), atol=1e-13)


def test_taylor_evaluator_against_mpmath():
    p = random_polynomial("uniform", 300, stream(6, 0))
    ev = TaylorGridEvaluator(p)
    t = stream(6, 1).uniform(0, TWO_PI, 8)
    f, d = ev.both(t)
    np.testing.assert_allclose(f, [mp_eval(p, x) for x in t], atol=1e-12)
    np.testing.assert_allclose(d, [mp_eval(p, x, derivative=1) for x in t], atol=1e-9)


def test_taylor_second_derivative_by_finite_difference():
    p = random_polynomial("gaussian", 40, stream(6, 2))
    ev = TaylorGridEvaluator(p)
    t, h = 1.234, 1e-4
    d2 = ev.derivatives(np.array([t]), 2)[2][0]
    fd = (ev(np.array([t + h]), derivative=True) - ev(np.array([t - h]), derivative=True))[0] / (2 * h)
    assert d2 == pytest.approx(fd, rel=1e-5)


@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_parseval_on_grid(n, seed):
    p = random_polynomial("gaussian", n, stream(seed, 0))
    v = eval_grid(p, 4 * n + 8).values
    assert np.mean(v**2) == pytest.approx(np.sum(p.a**2 + p.b**2) / (2 * n), rel=1e-10)


@given(st.integers(1, 30), st.integers(0, 2**32 - 1), st.floats(-10, 10))
def test_periodicity_and_linearity(n, seed, t):
    p = random_polynomial("rademacher", n, stream(seed, 0))
    assert p(t) == pytest.approx(p(t + TWO_PI), abs=1e-11)
    q = TrigPolynomial(2 * p.a, 2 * p.b)
    assert q(t) == pytest.approx(2 * p(t), abs=1e-11)


def test_immutability():
    p = random_polynomial("gaussian", 4, stream(0, 0))
    with pytest.raises(ValueError):
        p.a[0] = 1.0


def test_leave_one_out():
    p = random_polynomial("gaussian", 12, stream(1, 1))
    t = np.linspace(0, 6, 7)
    np.testing.assert_allclose(leave_one_out_eval(p, 3, t), p.zeroed(3)(t), atol=1e-13)
    with pytest.raises(IndexError):
        leave_one_out_eval(p, 13, t)


def test_local_eval_scaling():
    p = random_polynomial("gaussian", 50, stream(2, 2))
    tg = np.linspace(0, TWO_PI, 9)
    np.testing.assert_allclose(local_eval(p, 0.4, tg), eval_direct(p, 0.4 + tg / 50), atol=1e-13)


def test_local_covariance_matches_quadrature():
    p = random_polynomial("gaussian", 20, stream(3, 3))
    X = (np.arange(512) + 0.5) * TWO_PI / 512
    for t, s in ((0.0, 0.0), (0.5, 2.0), (3.0, 1.0)):
        quad = np.mean(eval_direct(p, X + t / 20) * eval_direct(p, X + s / 20))
        assert local_covariance_exact(p, s - t) == pytest.approx(quad, abs=1e-12)


def test_csv_round_trip(tmp_path):
    p = random_polynomial("uniform", 17, stream(9, 9))
    path = tmp_path / "p.csv"
    write_csv(p, path)
    q = read_csv(path)
    assert np.array_equal(p.a, q.a) and np.array_equal(p.b, q.b) and q.model == p.model
    path.write_text("k,a_k,b_k\n1,0.5,0.5\n")
    with pytest.raises(ConfigurationError):
        read_csv(path)
