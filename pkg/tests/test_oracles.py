import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from rig_lab.model import ModelParams, sample_local
from rig_lab.stats import wilson_ci
from rig_lab.stats.experiments import triangle_count
from rig_lab.theory import (
    exact_pair_prob, exact_path2_pmf, exact_triple_probs, le_cam_bound, path2_mean, poisson_binomial_pmf,
)

P12 = ModelParams(1.0, 2.0)


def test_two_path_law_by_enumeration():
    """a=1, b=2, t=2: items 2..4; x_4 = 0 and every other relevant edge has p = 1/2."""
    x = np.sqrt(np.arange(1, 9)) / 2
    x[3] = 0.0
    y = np.sqrt(np.arange(1, 5))
    # relevant edges: (2,1), (2,2), (3,2), (3,3); L = e22 e21 + e32 e33
    pmf = np.zeros(3)
    for e21, e22, e32, e33 in itertools.product((0, 1), repeat=4):
        pmf[e22 * e21 + e32 * e33] += 1 / 16
    got = exact_path2_pmf(P12, x, y, 2, r_max=5)
    assert np.allclose(got.probs[:3], pmf, atol=1e-15)
    assert got[0] == pytest.approx(9 / 16, abs=1e-15)
    assert got.total() == pytest.approx(1.0)


def test_two_path_mean(p14):
    ex = exact_path2_pmf(p14, 1.0, 1.0, 500, r_max=80)
    assert ex.mean() == pytest.approx(path2_mean(p14, 1.0, 1.0, 500), rel=1e-12)
    # E L_t -> gamma1 * gamma2 = 2
    assert ex.mean() == pytest.approx(2.0, abs=0.01)


def test_two_path_law_against_simulation_with_uneven_weights():
    """Paths v_t - w_i - v_j counted directly in local replicates."""
    p = ModelParams(1.0, 3.0)
    rng = np.random.default_rng(11)
    x = rng.choice([0.5, 1.0, 3.0], size=400)
    y = rng.choice([0.5, 1.0, 2.0], size=200)
    t, n = 40, 100_000
    ex = exact_path2_pmf(p, x, y, t, r_max=40)
    loc = sample_local(p, x, y, (t,), n, np.random.default_rng(12))
    key = loc.rep * 10_000 + loc.item
    own = np.unique(key[loc.actor == t])
    paths = np.bincount(loc.rep[np.isin(key, own) & (loc.actor != t)], minlength=n)
    counts = np.bincount(paths, minlength=41)[:41]
    expected = n * ex.probs
    keep = expected >= 5
    obs = np.append(counts[keep], n - counts[keep].sum())
    exp_ = np.append(expected[keep], n - expected[keep].sum())
    assert stats.chisquare(obs, exp_).pvalue > 1e-3


def test_pair_probability_single_shared_item():
    x = np.array([1.0, 1.0, 1.0, 1.0])
    y = np.array([math.sqrt(2) / 2, 1.0])
    # only item 2 is shared; p_21 = p_22 = 1/2
    assert exact_pair_prob(P12, x, y, 1, 2) == pytest.approx(0.25, abs=1e-15)
    assert exact_pair_prob(P12, x, y, 2, 1) == pytest.approx(0.25, abs=1e-15)


def test_pair_probability_disjoint_and_errors(p14):
    assert exact_pair_prob(p14, 1.0, 1.0, 100, 401) == 0.0
    with pytest.raises(ValueError):
        exact_pair_prob(p14, 1.0, 1.0, 5, 5)


def test_pair_probability_against_simulation(p14):
    s, t, n = 30, 36, 400_000
    exact = exact_pair_prob(p14, 1.0, 1.0, s, t)
    hits = 0
    for k in range(4):
        loc = sample_local(p14, 1.0, 1.0, (s, t), n // 4, np.random.default_rng(100 + k))
        hits += int(loc.adjacent(s, t).sum())
    lo, hi = wilson_ci(hits, n, 0.999)
    assert lo <= exact <= hi


def test_pair_probability_frozen(p14):
    assert exact_pair_prob(p14, 1.0, 1.0, 300, 360) == pytest.approx(0.0036624, rel=1e-4)


def test_triple_disjoint_windows(p14):
    tp = exact_triple_probs(p14, 1.0, 1.0, 100, 300, 401)
    assert tp.p_delta == 0.0 and tp.path_s == 0.0
    assert tp.alpha_t_su == 0.0
    assert tp.path_t > 0


def test_triple_forced_triangle(p14):
    tp = exact_triple_probs(p14, 1e6, 1e6, 100, 150, 200)
    assert tp.p_delta == 1.0 and tp.path_t == 1.0
    assert tp.alpha_t_su == 1.0


def test_triple_against_edge_level_simulation(p14):
    """Triangles counted in simulated edges, 10^8 raw replicates."""
    tp = exact_triple_probs(p14, 1.0, 1.0, 300, 360, 450)
    n = 100_000_000
    c = triangle_count(p14, 1.0, 1.0, 300, 360, 450, n, np.random.default_rng(2024))
    lo, hi = wilson_ci(c, n, 0.999)
    assert lo <= tp.p_delta <= hi


def test_triple_small_instance_by_enumeration():
    """a=1, b=2, actors 2 < 3 < 4 with weight on items 3 and 4 only: five potential edges."""
    x = np.full(8, 0.0)
    x[2:4] = [1.2, 1.5]  # only items 3 and 4 carry weight
    y = np.array([1.0, 1.1, 0.9, 1.3])
    acts = (2, 3, 4)
    items = [3, 4]
    # item 3 sits in T_2 = [2,4] and T_3 = [3,6] only; item 4 in all three windows
    cand = [(i, j) for i in items for j in acts if j <= i <= 2 * j]
    pr = {e: min(1.0, x[e[0] - 1] * y[e[1] - 1] / math.sqrt(e[0] * e[1])) for e in cand}
    p_tri = p_path_t = 0.0
    for bits in itertools.product((0, 1), repeat=len(cand)):
        w = math.prod(pr[e] if b else 1 - pr[e] for e, b in zip(cand, bits))
        on = {e for e, b in zip(cand, bits) if b}

        def adj(u, v):
            return any((i, u) in on and (i, v) in on for i in items)

        st_, tu, su = adj(2, 3), adj(3, 4), adj(2, 4)
        p_path_t += w * (st_ and tu)
        p_tri += w * (st_ and tu and su)
    tp = exact_triple_probs(P12, x, y, 2, 3, 4)
    assert tp.p_delta == pytest.approx(p_tri, abs=1e-14)
    assert tp.path_t == pytest.approx(p_path_t, abs=1e-14)


@settings(max_examples=30)
@given(st.lists(st.sampled_from([0.2, 0.5, 1.0, 2.5]), min_size=120, max_size=120),
       st.integers(20, 40), st.integers(1, 10), st.integers(1, 10))
def test_triple_ordering(weights, s, dt, du):
    p = ModelParams(1.0, 2.0)
    t, u = s + dt, s + dt + du
    tp = exact_triple_probs(p, np.array(weights), np.array(weights), s, t, u)
    for v in (tp.path_s, tp.path_t, tp.path_u):
        assert -1e-15 <= tp.p_delta <= v + 1e-15 <= 1 + 1e-12
    for a in (tp.alpha_t_su, tp.alpha_s_tu, tp.alpha_u_st):
        assert a is None or 0.0 <= a <= 1.0 + 1e-12


@given(st.lists(st.floats(0.0, 1.0), min_size=0, max_size=12))
def test_poisson_binomial_against_convolution(ps):
    direct = np.array([1.0])
    for q in ps:
        direct = np.convolve(direct, [1 - q, q])
    got = poisson_binomial_pmf(ps, len(ps))
    assert np.allclose(got, direct, atol=1e-12)


def test_le_cam_examples():
    assert le_cam_bound([0.1, 0.2]) == pytest.approx(0.05)
    assert le_cam_bound([]) == 0.0
    with pytest.raises(ValueError):
        le_cam_bound([1.2])
    with pytest.raises(ValueError):
        le_cam_bound([float("nan")])
