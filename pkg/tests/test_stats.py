import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rig_lab.model import ModelParams, sample_local
from rig_lab.stats import (
    ExperimentReport, empirical_pmf, gof_metrics, mc_assortativity, mc_clustering, mc_degree_distribution,
    mean_ci, pearson_ci, run_chunks, total_variation, wilson_ci,
)
from rig_lab.stats.experiments import chunk_rng, staged_pair_sample
from rig_lab.stats.gof import merge_small_cells
from rig_lab.theory import exact_pair_prob, exact_path2_pmf
from rig_lab.weights import make_distribution


# -- distances and intervals --------------------------------------------------

def test_total_variation_examples():
    assert total_variation([0.5, 0.5], [1.0]) == 0.5
    assert total_variation([1.0], [1.0]) == 0.0
    # tails count as one extra cell
    assert total_variation([0.5], [0.5], 0.5, 0.5) == 0.0
    with pytest.raises(ValueError):
        total_variation([], [1.0])


@given(st.lists(st.floats(0, 1), min_size=1, max_size=10), st.lists(st.floats(0, 1), min_size=1, max_size=10))
def test_total_variation_bounds(p, q):
    p = np.array(p) / max(sum(p), 1.0)
    q = np.array(q) / max(sum(q), 1.0)
    tv = total_variation(p, q)
    assert -1e-12 <= tv <= 1 + 1e-12
    assert tv == pytest.approx(total_variation(q, p))


def test_gof_chi_square_merges_cells():
    e, o = merge_small_cells(np.array([50.0, 30.0, 3.0, 1.0, 1.0]), np.array([48.0, 31.0, 4.0, 2.0, 0.0]))
    assert e.tolist() == [50.0, 30.0, 5.0]
    assert o.tolist() == [48.0, 31.0, 6.0]
    g = gof_metrics([0.5, 0.5], [0.5, 0.5], n=1000)
    assert g.tv == 0.0 and g.p_value == pytest.approx(1.0)
    assert gof_metrics([0.6, 0.4], [0.5, 0.5]).chi2 is None


def test_wilson_interval():
    lo, hi = wilson_ci(50, 100)
    assert lo == pytest.approx(0.4038, abs=1e-4) and hi == pytest.approx(0.5962, abs=1e-4)
    assert wilson_ci(0, 10)[0] == 0.0
    assert wilson_ci(10, 10)[1] == 1.0
    with pytest.raises(ValueError):
        wilson_ci(1, 0)


def test_mean_and_pearson_intervals():
    m, lo, hi = mean_ci([1.0, 2.0, 3.0])
    assert m == 2.0 and lo < 2.0 < hi
    lo, hi = pearson_ci(0.2, 10_000)
    assert lo < 0.2 < hi and hi - lo < 0.05
    assert pearson_ci(0.5, 3) == (-1.0, 1.0)


def test_empirical_pmf():
    probs, tail = empirical_pmf([0, 1, 1, 5], r_max=2)
    assert probs.tolist() == [0.25, 0.5, 0.0] and tail == 0.25


# -- reports ------------------------------------------------------------------

def test_report_serialization():
    rep = ExperimentReport("degree", {"a": 1.0}, 7, 10)
    rep.add("pmf", 0, np.float64(0.25), (0.1, 0.4), 0.3)
    rep.add("mean_degree", "", float("nan"))
    rep.duration_seconds = 12.0
    d = json.loads(rep.to_json())
    assert "duration_seconds" not in d
    assert d["estimates"][1]["estimate"] is None
    lines = rep.to_csv().splitlines()
    assert lines[0] == '# config={"a": 1.0}'
    assert lines[1] == "quantity,r_or_pair,estimate,ci_lo,ci_hi,theory,n_rep,seed"
    assert lines[2] == "pmf,0,0.25,0.1,0.4,0.3,10,7"
    assert rep.get("pmf", 0).estimate == 0.25


# -- chunked runs -------------------------------------------------------------

def _draws(rng, size, k):
    return rng.random(size)


def test_chunk_results_do_not_depend_on_threads():
    a = np.concatenate(run_chunks(_draws, 1000, 3, 64, threads=1).results)
    b = np.concatenate(run_chunks(_draws, 1000, 3, 64, threads=4).results)
    assert np.array_equal(a, b)
    assert np.array_equal(a[:64], chunk_rng(3, 0).random(64))


def test_budget_keeps_first_chunk():
    run = run_chunks(_draws, 1000, 3, 100, budget_seconds=0.0)
    assert run.n_done == 100 and run.truncated


# -- degree experiments -------------------------------------------------------

def test_degree_experiment_threads_agree(p14):
    a = mc_degree_distribution(p14, 1.0, 1.0, 300, 30_000, 5, threads=1, chunk_size=5000)
    b = mc_degree_distribution(p14, 1.0, 1.0, 300, 30_000, 5, threads=3, chunk_size=5000)
    assert a.to_json() == b.to_json()


def test_degree_zero_actor_weights(p14):
    rep = mc_degree_distribution(p14, 1.0, 0.0, 300, 1000, 1)
    assert rep.get("pmf", 0).estimate == 1.0
    assert rep.get("mean_degree").estimate == 0.0


def test_zero_degree_interval_coverage(p14):
    """Wilson intervals for P(d = 0) cover the exact P(L_t = 0) at about the nominal rate."""
    t = 100
    p0 = exact_path2_pmf(p14, 1.0, 1.0, t, r_max=30)[0]
    hits = 0
    for seed in range(200):
        e = mc_degree_distribution(p14, 1.0, 1.0, t, 2000, seed, exact=False).get("pmf", 0)
        hits += e.ci_lo <= p0 <= e.ci_hi
    assert hits >= 180


def test_degree_random_weights_reports_limit(p14):
    x = make_distribution("discrete", values=[0.5, 1.5], probs=[0.5, 0.5])
    rep = mc_degree_distribution(p14, x, 1.0, 80, 600, 2)
    assert "degree_limit" in rep.theory and "exact_path2" not in rep.theory
    assert rep.n_rep == 600


# -- clustering ---------------------------------------------------------------

def test_clustering_exact_and_withheld(p14):
    rep = mc_clustering(p14, 1.0, 1.0, 300, 360, 450)
    assert rep.extra["method"] == "exact" and rep.n_rep == 0
    assert rep.distances["relative_error"]["p_delta"] < 0.01
    rep = mc_clustering(p14, 1.0, 1.0, 100, 150, 401)
    assert rep.get("alpha_t_su", "100,150,401").estimate is None
    assert any("withheld" in d for d in rep.diagnostics)


def test_clustering_random_weights_against_edge_simulation():
    """Averaged exact probabilities against triangles in fully simulated edges.

    a=1, b=2, triple (2, 3, 4): items 2..8 and actors 2..4, fresh weights per replicate.
    """
    p = ModelParams(1.0, 2.0)
    xd = make_distribution("discrete", values=[0.6, 2.0], probs=[0.5, 0.5])
    rep = mc_clustering(p, xd, 1.0, 2, 3, 4, n_rep=4000, seed=3)
    est = rep.get("p_delta", "2,3,4")

    rng = np.random.default_rng(4)
    n = 400_000
    items = np.arange(2, 9)
    x = rng.choice([0.6, 2.0], size=(n, len(items)))
    linked = {}
    for j in (2, 3, 4):
        inside = (items >= j) & (items <= 2 * j)
        pr = np.minimum(1.0, x / np.sqrt(items * j)) * inside
        linked[j] = rng.random((n, len(items))) < pr
    adj = {(u, v): np.any(linked[u] & linked[v], axis=1) for u, v in ((2, 3), (3, 4), (2, 4))}
    tri = adj[(2, 3)] & adj[(3, 4)] & adj[(2, 4)]
    f = tri.mean()
    se_sim = math.sqrt(f * (1 - f) / n)
    se_est = (est.ci_hi - est.ci_lo) / (2 * 1.96)
    assert abs(f - est.estimate) < 4 * math.hypot(se_sim, se_est)


# -- assortativity ------------------------------------------------------------

def test_conditional_pair_sampler_matches_filtering(p14):
    """Staged conditional sampling against plain replicates filtered on adjacency."""
    s, t = 30, 36
    n_acc, ds, dt = staged_pair_sample(p14, 1.0, 1.0, s, t, 300_000, np.random.default_rng(1))
    loc = sample_local(p14, 1.0, 1.0, (s, t), 300_000, np.random.default_rng(2))
    keep = loc.adjacent(s, t)
    fs, ft = loc.degrees(s)[keep], loc.degrees(t)[keep]
    p = exact_pair_prob(p14, 1.0, 1.0, s, t)
    for n_ok in (n_acc, keep.sum()):
        assert abs(n_ok - 300_000 * p) < 4 * math.sqrt(300_000 * p)
    for a, b in ((ds, fs), (dt, ft), (ds * dt, fs * ft)):
        se = math.sqrt(a.var() / len(a) + b.var() / len(b))
        assert abs(a.mean() - b.mean()) < 4 * se


def test_assortativity_zero_weights(p14):
    rep = mc_assortativity(p14, 0.0, 1.0, 300, 360, 10_000, 1)
    assert rep.extra["accepted"] == 0
    assert any("no replicate" in d for d in rep.diagnostics)


def test_assortativity_threads_agree(p14):
    a = mc_assortativity(p14, 1.0, 1.0, 100, 120, 200_000, 9, threads=1, chunk_size=50_000)
    b = mc_assortativity(p14, 1.0, 1.0, 100, 120, 200_000, 9, threads=4, chunk_size=50_000)
    assert a.to_json() == b.to_json()
    acc = a.get("acceptance_rate", "100,120")
    assert acc.ci_lo <= acc.theory <= acc.ci_hi


def test_assortativity_random_weights_runs(p14):
    y = make_distribution("discrete", values=[0.5, 1.5], probs=[0.5, 0.5])
    rep = mc_assortativity(p14, 1.0, y, 50, 60, 20_000, 3, raw_per_draw=1000)
    assert rep.extra["accepted"] > 0
    assert "assortativity" in rep.theory
