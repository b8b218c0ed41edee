import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rig_lab.weights import (
    InfiniteMomentError,
    expectation,
    has_moment,
    make_distribution,
    moment,
    parse_distribution,
    sample,
)


def test_parse_forms():
    assert parse_distribution("constant(1)").c == 1.0
    assert parse_distribution("2.5").c == 2.5
    d = parse_distribution("pareto(alpha=3, xmin=1)")
    assert (d.kind, d.alpha, d.xmin) == ("pareto", 3.0, 1.0)
    d = parse_distribution("discrete(1:0.25, 3:0.75)")
    assert d.values == (1.0, 3.0) and d.probs == (0.25, 0.75)
    assert parse_distribution("lognormal(mu=0, sigma=0.5)").sigma == 0.5


@pytest.mark.parametrize("text", ["pareto(alpha=3)", "uniform(0,1)", "discrete(1:0.5, 2:0.4)",
                                  "constant(-1)", "pareto(alpha=3, xmin=1, c=2)", "lognormal(0)"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        parse_distribution(text)


def test_discrete_sum_message():
    with pytest.raises(ValueError, match="probabilities sum != 1"):
        make_distribution("discrete", values=[1, 2], probs=[0.5, 0.6])


def test_closed_form_moments():
    assert moment(make_distribution("pareto", alpha=3.5, xmin=2.0), 2) == pytest.approx(3.5 * 4 / 1.5)
    assert moment(make_distribution("lognormal", mu=0.1, sigma=0.5), 3) == pytest.approx(math.exp(0.3 + 4.5 * 0.25))
    assert moment(make_distribution("discrete", values=[1, 2], probs=[0.5, 0.5]), 2) == 2.5
    with pytest.raises(InfiniteMomentError):
        moment(make_distribution("pareto", alpha=2.0, xmin=1.0), 2)
    assert not has_moment(make_distribution("pareto", alpha=2.0, xmin=1.0), 2)
    assert has_moment(make_distribution("pareto", alpha=2.0, xmin=1.0), 1)


@given(st.floats(2.2, 8.0), st.floats(0.2, 3.0))
def test_pareto_expectation_matches_moment(alpha, xmin):
    d = make_distribution("pareto", alpha=alpha, xmin=xmin)
    val, _ = expectation(d, lambda w: w)
    assert float(val) == pytest.approx(moment(d, 1), rel=1e-7)


@given(st.floats(-1.0, 1.0), st.floats(0.0, 1.2))
def test_lognormal_expectation_matches_moment(mu, sigma):
    d = make_distribution("lognormal", mu=mu, sigma=sigma)
    val, _ = expectation(d, lambda w: w * w)
    assert float(val) == pytest.approx(moment(d, 2), rel=1e-7)


def test_sampling_means():
    rng = np.random.default_rng(3)
    d = make_distribution("pareto", alpha=4.0, xmin=1.0)
    w = sample(d, 1, 200_000, rng)
    assert w.min() >= 1.0
    assert w.mean() == pytest.approx(4 / 3, rel=0.01)
    assert len(sample(d, 5, 9, rng)) == 5
    with pytest.raises(ValueError):
        sample(d, 0, 3, rng)
