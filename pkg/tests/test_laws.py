import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from rig_lab.model import ModelParams, Tau
from rig_lab.theory import (
    degree_limit_pgf, degree_limit_pmf, gamma_linear, kappa_pmf, mixed_poisson_pmf, panjer_compound_poisson,
)
from rig_lab.theory.laws import Pmf
from rig_lab.weights import InfiniteMomentError, make_distribution, moment

ONE = make_distribution("constant", c=1.0)
TWO_POINT = make_distribution("discrete", values=[0.5, 2.0], probs=[0.6, 0.4])
PARETO = make_distribution("pareto", alpha=3.5, xmin=1.0)
LOGNORM = make_distribution("lognormal", mu=0.0, sigma=0.5)


def test_mixed_poisson_of_constant_is_poisson():
    got = mixed_poisson_pmf(make_distribution("constant", c=1.7), 30, scale=2.0)
    assert np.allclose(got.probs, stats.poisson.pmf(np.arange(31), 3.4), atol=1e-15)


def test_mixed_poisson_two_point():
    got = mixed_poisson_pmf(TWO_POINT, 20, scale=1.5)
    want = 0.6 * stats.poisson.pmf(np.arange(21), 0.75) + 0.4 * stats.poisson.pmf(np.arange(21), 3.0)
    assert np.allclose(got.probs, want, atol=1e-15)


def test_kappa_is_poisson_under_size_biased_mixing():
    p = ModelParams(1.0, 4.0)
    b1 = 1.3
    _, g2 = gamma_linear(1.0, 4.0)
    got = kappa_pmf(p, TWO_POINT, b1, 25)
    # size-biasing a mixed Poisson and shifting by one size-biases the mixing law
    a1 = moment(TWO_POINT, 1)
    want = sum(q * v / a1 * stats.poisson.pmf(np.arange(26), g2 * b1 * v)
               for v, q in zip(TWO_POINT.values, TWO_POINT.probs))
    assert np.allclose(got.probs, want, atol=1e-14)


def test_kappa_needs_positive_rate():
    with pytest.raises(ZeroDivisionError):
        kappa_pmf(ModelParams(1.0, 4.0), ONE, 0.0, 10)


def test_panjer_against_direct_convolution():
    sev = np.array([0.2, 0.5, 0.3])
    lam, r_max = 1.4, 12
    direct = np.zeros(r_max + 1)
    conv = np.zeros(r_max + 1)
    conv[0] = 1.0
    for n in range(60):
        direct += stats.poisson.pmf(n, lam) * conv
        conv = np.convolve(conv, sev)[: r_max + 1]
    assert np.allclose(panjer_compound_poisson(lam, sev, r_max), direct, atol=1e-14)


def test_constant_weights_limit_zero_mass():
    law = degree_limit_pmf(ModelParams(1.0, 4.0), ONE, ONE, r_max=40)
    assert law.pmf[0] == pytest.approx(math.exp(-2 * (1 - math.exp(-1))), abs=1e-14)
    assert law.regime == "linear" and law.rate == 2.0


@pytest.mark.parametrize("x,y", [(ONE, ONE), (PARETO, ONE), (ONE, LOGNORM), (TWO_POINT, LOGNORM)])
@pytest.mark.parametrize("z", [0.0, 0.5, -0.5])
def test_panjer_route_matches_generating_function(x, y, z):
    p = ModelParams(1.0, 4.0)
    law = degree_limit_pmf(p, x, y, r_max=120)
    assert law.pmf.pgf(z) == pytest.approx(degree_limit_pgf(p, x, y, z), abs=1e-9)


@pytest.mark.parametrize("z", [0.0, 0.5, -0.5])
def test_power_regime_matches_generating_function(z):
    p = ModelParams(1.0, 4.0, Tau("power", 2.0))
    law = degree_limit_pmf(p, PARETO, LOGNORM, r_max=80)
    assert law.regime == "power"
    assert law.pmf.pgf(z) == pytest.approx(degree_limit_pgf(p, PARETO, LOGNORM, z), abs=1e-10)


def test_linear_mean():
    p = ModelParams(1.0, 4.0)
    law = degree_limit_pmf(p, TWO_POINT, LOGNORM, r_max=200)
    g1, g2 = gamma_linear(1.0, 4.0)
    a1, a2, b1 = moment(TWO_POINT, 1), moment(TWO_POINT, 2), moment(LOGNORM, 1)
    # E Lambda1 = g1 a1 b1 and E kappa = E lambda2^2 / E lambda2 + 1 - 1 = g2 b1 a2 / a1
    assert law.pmf.mean() == pytest.approx(g1 * g2 * a2 * b1 * b1, rel=1e-9)


@given(st.floats(0.2, 2.0), st.floats(1.2, 6.0), st.floats(0.2, 2.0), st.floats(0.2, 2.0))
def test_linear_limit_is_normalized(a, ratio, cx, cy):
    p = ModelParams(a, a * ratio)
    law = degree_limit_pmf(p, make_distribution("constant", c=cx), make_distribution("constant", c=cy), r_max=60)
    assert law.pmf.total() == pytest.approx(1.0, abs=1e-12)
    assert np.all(law.pmf.probs >= 0)


def test_zero_actor_weight_gives_point_mass():
    law = degree_limit_pmf(ModelParams(1.0, 4.0), ONE, make_distribution("constant", c=0.0), r_max=5)
    assert law.pmf.probs.tolist() == [1.0, 0, 0, 0, 0, 0]


def test_infinite_moment_is_reported():
    heavy = make_distribution("pareto", alpha=1.8, xmin=1.0)
    with pytest.raises(InfiniteMomentError):
        degree_limit_pmf(ModelParams(1.0, 4.0), heavy, ONE)


def test_pmf_helpers():
    pm = Pmf.from_probs([0.5, 0.25])
    assert pm.tail == 0.25 and pm.total() == 1.0 and pm.mean() == 0.25
    assert pm.as_dict() == {"pmf": [0.5, 0.25], "tail_mass": 0.25}
