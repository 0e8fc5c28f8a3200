import math

import numpy as np
import pytest
from scipy import integrate, stats

from randtrig import ConfigurationError, MODELS, get_model, random_polynomial, stein_constant, stream
from randtrig.coeffs import MomentSet, sample_pair_sequence


def test_stream_reproducible_and_keyed():
    a = stream(7, 1).standard_normal(5)
    assert np.array_equal(a, stream(7, 1).standard_normal(5))
    assert not np.array_equal(a, stream(7, 2).standard_normal(5))
    assert not np.array_equal(a, stream(8, 1).standard_normal(5))
    assert not np.array_equal(a, stream(7, 1, 11).standard_normal(5))


def test_coefficients_are_prefix_consistent():
    big = random_polynomial("gaussian", 64, stream(3, 0))
    small = random_polynomial("gaussian", 16, stream(3, 0))
    assert np.array_equal(big.a[:16], small.a) and np.array_equal(big.b[:16], small.b)


def _law_moments(name):
    """Exact moments by quadrature against each law's density / mass function."""
    if name == "rademacher":
        pts = np.array([-1.0, 1.0])
        return {k: float(np.mean(f(pts))) for k, f in _FUNCS.items()}
    dist = {"gaussian": stats.norm(), "uniform": stats.uniform(-math.sqrt(3), 2 * math.sqrt(3)),
            "centered_exponential": stats.expon(loc=-1.0)}[name]
    lo, hi = dist.support()
    out = {}
    for k, f in _FUNCS.items():
        g = lambda x: f(x) * dist.pdf(x)
        out[k] = integrate.quad(g, lo, 0.0, limit=200)[0] + integrate.quad(g, 0.0, hi, limit=200)[0]
    return out


_FUNCS = {
    "mean": lambda x: x, "variance": lambda x: x * x, "abs_m1": lambda x: np.abs(x),
    "m3": lambda x: x**3, "abs_m3": lambda x: np.abs(x) ** 3, "m4": lambda x: x**4,
}


@pytest.mark.parametrize("name", sorted(MODELS))
def test_moment_sets_match_quadrature(name):
    ref = _law_moments(name)
    ms = MODELS[name].moments
    for k, v in ref.items():
        assert getattr(ms, k) == pytest.approx(v, abs=1e-9), k


@pytest.mark.parametrize("name", sorted(MODELS))
def test_sampler_moments(name):
    a, b = sample_pair_sequence(name, 200_000, stream(1, 99))
    x = np.concatenate([a, b])
    ms = MODELS[name].moments
    se4 = math.sqrt(ms.m4 * 20 / x.size)  # generous
    assert abs(x.mean()) < 5 / math.sqrt(x.size)
    assert x.var() == pytest.approx(1.0, abs=5 * se4)
    assert np.mean(np.abs(x)) == pytest.approx(ms.abs_m1, abs=0.01)


def test_stein_constant_rademacher():
    # 81 sqrt(13) + 8 sqrt(1) + sqrt(2) + 8 + 24
    assert stein_constant(MODELS["rademacher"].moments) == pytest.approx(333.4639, abs=1e-3)


def test_stein_constant_is_monotone():
    base = MomentSet(0.0, 1.0, 0.5, 0.0, 1.0, 2.0)
    c0 = stein_constant(base)
    for field, v in (("m3", 0.5), ("m4", 3.0), ("abs_m3", 2.0), ("abs_m1", 0.9)):
        kw = dict(mean=0.0, variance=1.0, abs_m1=0.5, m3=0.0, abs_m3=1.0, m4=2.0)
        kw[field] = v
        assert stein_constant(MomentSet(**kw)) > c0


def test_unknown_model_is_configuration_error():
    with pytest.raises(ConfigurationError):
        get_model("cauchy")


def test_momentset_invariants():
    with pytest.raises(ConfigurationError):
        MomentSet(0.0, 1.0, 0.5, 2.0, 1.0, 2.0)  # |m3| > abs_m3
    with pytest.raises(ConfigurationError):
        MomentSet(0.0, 1.0, 0.5, 0.0, 1.0, 0.5)  # m4 < variance^2
