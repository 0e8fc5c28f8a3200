import math

import numpy as np
import pytest
from scipy import integrate

from randtrig import ConfigurationError, TWO_PI, count_zeros_grid, random_polynomial, stream
from randtrig import experiments as ex

from conftest import cos_poly


def test_density_invariants_by_quadrature():
    d = ex.NonUniformDensity((0.3, -0.2, 0.1))
    assert integrate.quad(d.pdf, 0, TWO_PI)[0] == pytest.approx(1.0, abs=1e-12)
    x = np.linspace(0, TWO_PI, 1001)
    assert np.all(d.pdf(x) >= d.lower_bound - 1e-15)
    for k in range(6):
        re = integrate.quad(lambda t: math.cos(k * t) * d.pdf(t), 0, TWO_PI, limit=200)[0]
        assert d.fourier_coefficient(k).real == pytest.approx(re, abs=1e-12)
    assert d.cdf(TWO_PI) == pytest.approx(1.0)


def test_density_closed_forms_and_errors():
    d = ex.NonUniformDensity((0.5,))
    assert abs(d.fourier_coefficient(1)) == 0.25 and abs(d.fourier_coefficient(-1)) == 0.25
    assert all(d.fourier_coefficient(k) == 0 for k in range(2, 6))
    with pytest.raises(ConfigurationError):
        ex.NonUniformDensity((0.6, 0.5))


def test_density_sampler_moments():
    d = ex.NonUniformDensity((0.5,))
    x = d.sample(stream(0, 0), 200_000)
    assert np.mean(np.cos(x)) == pytest.approx(0.25, abs=0.01)
    assert np.all((x >= 0) & (x <= TWO_PI))


def test_uniform_density_matches_uniform_pipeline():
    d = ex.NonUniformDensity(())
    got = ex.nonuniform_clt("gaussian", d, 512, 100_000, 1)
    grid = ex.metric_value(random_polynomial("gaussian", 512, stream(1, 0)), "kolmogorov")
    assert abs(got - grid) < 0.01  # sampling error of 1e5 draws


def test_uniformity_of_cosine_roots():
    for n, bins in ((4, 16), (64, 8), (100, 7)):
        rep = count_zeros_grid(cos_poly(n))
        assert ex.empirical_measure_uniformity(cos_poly(n), bins) <= 1 / rep.count + 1e-15
    assert ex.empirical_measure_uniformity(random_polynomial("gaussian", 50, stream(2, 0)), 1) == 0.0


def test_gaussian_log_moment_closed_form():
    # E (log|G|)^2 = (gamma + log 2)^2 / 4 + pi^2 / 8
    ref = (np.euler_gamma + math.log(2)) ** 2 / 4 + math.pi**2 / 8
    assert ex.gaussian_log_moment(2) == pytest.approx(ref, rel=1e-9)
    assert ref == pytest.approx(1.637, abs=1e-3)


def test_local_window_n1_is_full_count():
    # for n = 1 the window [X, X + 2pi] is a full period
    p = random_polynomial("gaussian", 1, stream(3, 0))
    rows = ex.local_moment_boundedness("gaussian", [1], [1, 2, 4], 3, MX=1024)
    N = count_zeros_grid(p).count
    assert N == 2
    for r in rows:
        assert r["moment"] == pytest.approx(N ** r["p"])


def test_local_moments_constant_count():
    # cos(nt): every window of length 2pi/n holds exactly 2 zeros (up to endpoint measure zero)
    from randtrig.zeros import window_counts
    n = 32
    X = (np.arange(4096) + 0.5) * TWO_PI / 4096
    c = window_counts(cos_poly(n), X, TWO_PI / n)
    assert set(c.tolist()) == {2}


def test_nodal_convergence_rows():
    rows = ex.nodal_convergence("rademacher", [100, 400], 1, (0.0, math.pi / 2))
    assert [r["n"] for r in rows] == [100, 400]
    assert rows[0]["limit"] == pytest.approx(1 / (2 * math.sqrt(3)))


def test_nodal_average_and_flags():
    res = ex.nodal_average("gaussian", 200, 30, 4)
    assert res.values.size + res.flagged == 30
    assert abs(res.mean - 2 / math.sqrt(3)) < 5 * res.stderr + 0.02
    with pytest.raises(ValueError):
        ex.nodal_average("gaussian", 200, 10, 4)


def test_rate_regression_preconditions():
    with pytest.raises(ValueError):
        ex.rate_regression("gaussian", [64, 128], 20, "kolmogorov", 0)
    with pytest.raises(ValueError):
        ex.rate_regression("gaussian", [16, 256], 5, "kolmogorov", 0)
    with pytest.raises(ConfigurationError):
        ex.metric_value(cos_poly(4), "hellinger")


def test_cf_rate_gaussian():
    fit = ex.rate_regression("gaussian", [64, 256, 1024, 4096], 20, "cf", 11)
    assert -0.65 <= fit.slope <= -0.35


def test_loglog_slope_exact():
    slope, icpt, r2 = ex.loglog_slope([1, 2, 4, 8], [3.0, 1.5, 0.75, 0.375])
    assert slope == pytest.approx(-1.0) and icpt == pytest.approx(math.log(3)) and r2 == pytest.approx(1.0)
