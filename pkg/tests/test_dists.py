import math

import numpy as np
import pytest
from scipy import special, stats

from randtrig import (
    DegeneratePolynomialError,
    TrigPolynomial,
    c3_proxy_distance,
    cf_deviation,
    distance_report,
    empirical_cf,
    kolmogorov_to_gaussian,
    random_polynomial,
    stein_bound_check,
    stream,
    tv_to_gaussian,
)
from randtrig.dists import (
    DISTANCE_COLUMNS,
    TestFunctionFamily,
    antilde_bound,
    antilde_estimate,
    append_distance_csv,
    epsilon_n_second_moment,
)
from randtrig.errors import DegenerateSampleError

from conftest import cos_poly


@pytest.mark.parametrize("n", [1, 3, 50])
@pytest.mark.parametrize("xi", [0.25, 1.0, 4.0])
def test_cf_of_cosine_is_bessel_j0(n, xi):
    # E exp(i xi cos(n X)) = J0(xi) for X uniform
    got = empirical_cf(cos_poly(n), xi, 1024)
    assert got.real == pytest.approx(special.j0(xi), abs=1e-13)
    assert abs(got.imag) < 1e-13


def test_kolmogorov_of_exact_quantiles():
    m = 1000
    x = special.ndtri((np.arange(m) + 0.5) / m)
    assert kolmogorov_to_gaussian(x) == pytest.approx(0.5 / m, abs=1e-12)


def test_kolmogorov_matches_scipy():
    x = stream(0, 0).standard_normal(500) * 1.1 + 0.05
    assert kolmogorov_to_gaussian(x) == pytest.approx(stats.kstest(x, "norm").statistic, abs=1e-14)


def test_tv_of_gaussian_quantiles_is_small():
    m = 1 << 16
    assert tv_to_gaussian(special.ndtri((np.arange(m) + 0.5) / m)) <= 0.01


def test_tv_of_shifted_gaussian():
    # KDE of a N(1, 1) sample with bandwidth h is about N(1, 1 + h^2); TV(N(0,1), N(1,1)) = 2 Phi(1/2) - 1
    m = 1 << 16
    x = 1.0 + special.ndtri((np.arange(m) + 0.5) / m)
    assert tv_to_gaussian(x) == pytest.approx(2 * special.ndtr(0.5) - 1, abs=0.02)


def test_tv_degenerate_sample():
    with pytest.raises(DegenerateSampleError):
        tv_to_gaussian(np.ones(10))


def test_c3_proxy_of_cosine():
    fam = TestFunctionFamily()
    ref = max(abs(special.j0(lam) - math.exp(-lam * lam / 2)) / max(1.0, lam**3)
              for kind, lam in fam.members if kind == "cos")
    assert c3_proxy_distance(cos_poly(1), M=256) == pytest.approx(ref, abs=1e-12)
    assert ref == pytest.approx(0.158667, abs=1e-6)


def test_c3_proxy_is_below_kolmogorov_scale_and_rejects_zero():
    with pytest.raises(DegeneratePolynomialError):
        c3_proxy_distance(TrigPolynomial(np.zeros(2), np.zeros(2)))


def test_cf_deviation_decreases():
    small = np.mean([cf_deviation(random_polynomial("rademacher", 16, stream(1, i)), 256) for i in range(20)])
    big = np.mean([cf_deviation(random_polynomial("rademacher", 1024, stream(1, i)), 16384) for i in range(20)])
    assert big < small


@pytest.mark.parametrize("n", [1, 10, 50, 500, 1000])
def test_epsilon_identity(n):
    assert epsilon_n_second_moment(n) == pytest.approx(1 / (2 * n), abs=1e-12)


def test_antilde_zero_frequency_and_bound():
    est = antilde_estimate("rademacher", 8, 0.0, 100, None, 3)
    assert est.estimate < 1e-25
    assert antilde_bound(0.0, 1.0, 16) == pytest.approx(13 * 4 / 16)
    assert antilde_bound(2.0, -2.0, 1) == pytest.approx(15 * (16 + 8 + 4 + 1))


def test_stein_check_small():
    sc = stein_bound_check("gaussian", 16, 30, 5)
    assert sc.passed and sc.mean_proxy < sc.bound and sc.stderr > 0


def test_distance_report_and_csv(tmp_path):
    rep = distance_report(random_polynomial("gaussian", 32, stream(2, 0)), seed=2)
    row = rep.row()
    assert tuple(row) == DISTANCE_COLUMNS
    path = tmp_path / "d.csv"
    append_distance_csv(path, [rep])
    append_distance_csv(path, [rep])
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(DISTANCE_COLUMNS) and len(lines) == 3
