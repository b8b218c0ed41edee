"""Monte Carlo experiments around a few focus actors, run in seeded chunks.

Replicates are grouped in fixed-size chunks. Chunk k draws from its own
stream, derived from (master seed, k), and chunk results are merged in
index order, so the output does not depend on the number of threads.
"""

from __future__ import annotations

import logging
import math
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..model.core import ModelParams, WindowTable, item_window, t_plus
from ..model.graph import LocalSample, _fill_items, sample_local
from ..model.sampling import flat_block_skip
from ..model.sequences import WeightSequence, as_weights, dyadic_blocks
from ..theory.asymptotics import assortativity_constants, asymptotic_triangle, weight_moments
from ..theory.laws import degree_limit_pmf
from ..theory.oracles import exact_pair_prob, exact_path2_pmf, exact_triple_probs
from ..weights import InfiniteMomentError, WeightDistribution, make_distribution, sample
from .gof import gof_metrics, mean_ci, pearson_ci, wilson_ci
from .report import ExperimentReport

log = logging.getLogger(__name__)

DEGREE_CHUNK = 10_000
RANDOM_WEIGHT_CHUNK = 500
ASSORT_CHUNK = 1 << 20
# exact two-path pmfs are skipped above this many items in the focus window
EXACT_MAX_ITEMS = 200_000


# ---------------------------------------------------------------------------
# chunked runner
# ---------------------------------------------------------------------------

def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


@dataclass
class ChunkRun:
    results: list
    n_done: int
    truncated: bool


def run_chunks(task, n: int, seed: int, chunk_size: int, threads: int = 1,
               budget_seconds: float | None = None) -> ChunkRun:
    """Call ``task(rng, size, index)`` on consecutive chunks covering n replicates.

    With a time budget no new chunk starts once it is spent; chunks already
    running finish, and the completed prefix is returned. The first chunk
    always runs, so there is something to report.
    """
    if n < 1:
        raise ValueError("need at least one replicate")
    if chunk_size < 1:
        raise ValueError("chunk size must be positive")
    sizes = [min(chunk_size, n - k) for k in range(0, n, chunk_size)]
    start = time.monotonic()

    def spent():
        return budget_seconds is not None and time.monotonic() - start > budget_seconds

    results, done, truncated = [], 0, False
    if threads <= 1:
        for k, size in enumerate(sizes):
            if k and spent():
                truncated = True
                break
            results.append(task(chunk_rng(seed, k), size, k))
            done += size
        return ChunkRun(results, done, truncated)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending = deque()
        for k, size in enumerate(sizes):
            if len(pending) >= threads:
                fut, sz = pending.popleft()
                results.append(fut.result())
                done += sz
            if k and spent():
                truncated = True
                break
            pending.append((pool.submit(task, chunk_rng(seed, k), size, k), size))
        for fut, sz in pending:
            results.append(fut.result())
            done += sz
    return ChunkRun(results, done, truncated)


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

def _is_dist(w) -> bool:
    return isinstance(w, WeightDistribution)


def _resolve(w, dist, name: str, diagnostics: list):
    """Weights used for sampling and the law used for theory on one side."""
    if dist is not None and not _is_dist(w):
        msg = f"both realized {name} weights and a {name} distribution given; realized weights are sampled"
        log.warning(msg)
        diagnostics.append(msg)
    if _is_dist(w):
        return w, w
    ws = as_weights(w)
    if dist is None and ws.is_constant:
        dist = make_distribution("constant", c=ws.const)
    return ws, dist


def _draw(w, lo: int, hi: int, rng) -> WeightSequence:
    if _is_dist(w):
        return WeightSequence.from_array(sample(w, lo, hi, rng), start=lo)
    return w


def _describe(w) -> str:
    return str(w) if _is_dist(w) else repr(w)


def _base_config(params: ModelParams, x, y, **kw) -> dict:
    cfg = dict(params.as_dict())
    cfg.update(x=_describe(x), y=_describe(y))
    cfg.update(kw)
    return cfg


# ---------------------------------------------------------------------------
# degree of one actor
# ---------------------------------------------------------------------------

def mc_degree_distribution(params: ModelParams, x, y, t: int, n_rep: int, seed: int, *,
                           x_dist=None, y_dist=None, r_max: int | None = None, regime: str | None = None,
                           exact: bool = True, threads: int = 1, chunk_size: int | None = None,
                           budget_seconds: float | None = None, level: float = 0.95,
                           config: dict | None = None) -> ExperimentReport:
    """Empirical law of d(v_t) over local replicates, against the limit law and the exact L_t law.

    ``x`` and ``y`` are realized weights or WeightDistribution objects; a
    distribution means fresh weights in every replicate.
    """
    if t < 1:
        raise ValueError("actor index must be >= 1")
    t0 = time.monotonic()
    diagnostics: list = []
    xs, tx = _resolve(x, x_dist, "x", diagnostics)
    ys, ty = _resolve(y, y_dist, "y", diagnostics)
    random_w = _is_dist(xs) or _is_dist(ys)
    lo, hi = (int(v) for v in item_window(params, t))
    chunk = chunk_size or (RANDOM_WEIGHT_CHUNK if random_w else DEGREE_CHUNK)

    if lo > hi:
        diagnostics.append(f"actor {t} has an empty window; its degree is 0")

        def task(rng, size, k):
            return np.zeros(size, dtype=np.int64)
    else:
        table = WindowTable(params, t_plus(params, t))
        j_lo, j_hi = int(table.actors(lo)[0]), int(table.actors(hi)[1])
        if random_w:
            def task(rng, size, k):
                out = np.empty(size, dtype=np.int64)
                for r in range(size):
                    xr = _draw(xs, lo, hi, rng)
                    yr = _draw(ys, j_lo, j_hi, rng)
                    out[r] = sample_local(params, xr, yr, (t,), 1, rng, table=table).degrees(t)[0]
                return out
        else:
            def task(rng, size, k):
                return sample_local(params, xs, ys, (t,), size, rng, table=table).degrees(t)

    run = run_chunks(task, n_rep, seed, chunk, threads, budget_seconds)
    deg = np.concatenate(run.results)
    n = len(deg)
    cfg = config or _base_config(params, x, y, t=t, n_rep=n_rep, seed=seed, regime=regime)
    rep = ExperimentReport("degree", cfg, seed, n, diagnostics=diagnostics, truncated=run.truncated)
    if run.truncated:
        rep.diagnostics.append(f"time budget reached after {n} of {n_rep} replicates")

    top = int(deg.max())
    r_max = max(r_max or 0, top + 10, 30)
    counts = np.bincount(deg, minlength=top + 1)
    emp = counts / n

    limit = None
    if tx is not None and ty is not None:
        try:
            limit = degree_limit_pmf(params, tx, ty, regime=regime, r_max=r_max)
            rep.theory["degree_limit"] = {**limit.as_dict(), "source": f"{limit.regime} degree limit law"}
        except InfiniteMomentError as e:
            msg = f"limit-law comparison skipped: {e}"
            log.warning(msg)
            rep.diagnostics.append(msg)
        except ValueError as e:
            rep.diagnostics.append(f"limit-law comparison skipped: {e}")
    else:
        rep.diagnostics.append("limit-law comparison skipped: weight laws unknown")

    exact_pmf = None
    if exact and not random_w and lo <= hi:
        if hi - lo + 1 <= EXACT_MAX_ITEMS:
            exact_pmf = exact_path2_pmf(params, xs, ys, t, r_max)
            rep.theory["exact_path2"] = {**exact_pmf.as_dict(), "source": "exact two-path count law"}
        else:
            rep.diagnostics.append(f"exact two-path law skipped: window of {hi - lo + 1} items")

    # E TV(empirical, truth) <= 0.5 * sum_r sqrt(p_r / n) <= 0.5 * sqrt(cells / n)
    allowance = 0.5 * math.sqrt((top + 1) / n)
    for r in range(top + 1):
        ci = wilson_ci(int(counts[r]), n, level)
        rep.add("pmf", r, emp[r], ci, None if limit is None else float(limit.pmf.probs[r]))
    if exact_pmf is not None:
        for r in range(top + 1):
            ci = wilson_ci(int(counts[r]), n, level)
            rep.add("pmf_vs_exact", r, emp[r], ci, float(exact_pmf.probs[r]))
    m, mlo, mhi = mean_ci(deg, level)
    mean_theory = limit.pmf.mean() if limit is not None else (exact_pmf.mean() if exact_pmf else None)
    rep.add("mean_degree", "", m, (mlo, mhi), mean_theory)

    if limit is not None:
        g = gof_metrics(emp, limit.pmf.probs, n=n, p_tail=0.0, q_tail=limit.pmf.tail)
        rep.distances["limit"] = {**g.as_dict(), "sampling_allowance": allowance}
    if exact_pmf is not None:
        g = gof_metrics(emp, exact_pmf.probs, n=n, p_tail=0.0, q_tail=exact_pmf.tail)
        rep.distances["exact"] = {**g.as_dict(), "sampling_allowance": allowance}
    rep.extra["degrees_summary"] = {"max": top, "n": n}
    rep.duration_seconds = time.monotonic() - t0
    return rep


# ---------------------------------------------------------------------------
# clustering of a triple
# ---------------------------------------------------------------------------

def _ratio_ci(num: np.ndarray, den: np.ndarray, level: float):
    """Ratio of means with a delta-method interval."""
    n = len(num)
    mn, md = float(num.mean()), float(den.mean())
    if md <= 0:
        return None, (None, None)
    r = mn / md
    if n < 2:
        return r, (r, r)
    z = stats.norm.ppf(0.5 + level / 2)
    se = float(np.std(num - r * den, ddof=1)) / (md * math.sqrt(n))
    return r, (r - z * se, r + z * se)


def mc_clustering(params: ModelParams, x, y, s: int, t: int, u: int, n_rep: int = 1, seed: int = 0, *,
                  x_dist=None, y_dist=None, threads: int = 1, chunk_size: int | None = None,
                  budget_seconds: float | None = None, level: float = 0.95,
                  config: dict | None = None) -> ExperimentReport:
    """Clustering coefficients of the triple s < t < u.

    Realized weights give the exact values directly. Random weights are
    handled by averaging the exact triangle and two-path probabilities over
    weight draws, and each coefficient is the ratio of those averages.
    """
    if not 0 < s < t < u:
        raise ValueError(f"triple requires 0 < s < t < u, got {(s, t, u)}")
    t0 = time.monotonic()
    diagnostics: list = []
    xs, tx = _resolve(x, x_dist, "x", diagnostics)
    ys, ty = _resolve(y, y_dist, "y", diagnostics)
    random_w = _is_dist(xs) or _is_dist(ys)
    cfg = config or _base_config(params, x, y, s=s, t=t, u=u, n_rep=n_rep if random_w else 0, seed=seed)

    names = ("p_delta", "path_s", "path_t", "path_u")
    if not random_w:
        tp = exact_triple_probs(params, xs, ys, s, t, u)
        rep = ExperimentReport("clustering", cfg, seed, 0, diagnostics=diagnostics)
        rep.extra["method"] = "exact"
        vals = {k: getattr(tp, k) for k in names}
        alphas = {"alpha_t_su": tp.alpha_t_su, "alpha_s_tu": tp.alpha_s_tu, "alpha_u_st": tp.alpha_u_st}
        cis = {k: (v, v) for k, v in {**vals, **alphas}.items()}
        if tp.p_delta == 0:
            alphas = dict.fromkeys(alphas)
    else:
        lo = min(int(item_window(params, j)[0]) for j in (s, t, u))
        hi = max(int(item_window(params, j)[1]) for j in (s, t, u))

        def task(rng, size, k):
            out = np.zeros((size, 4))
            if lo > hi:
                return out
            for r in range(size):
                xr = _draw(xs, lo, hi, rng)
                yr = _draw(ys, s, u, rng)
                tp = exact_triple_probs(params, xr, yr, s, t, u)
                out[r] = [getattr(tp, k) for k in names]
            return out

        run = run_chunks(task, n_rep, seed, chunk_size or RANDOM_WEIGHT_CHUNK, threads, budget_seconds)
        draws = np.concatenate(run.results)
        n = len(draws)
        rep = ExperimentReport("clustering", cfg, seed, n, diagnostics=diagnostics, truncated=run.truncated)
        rep.extra["method"] = "exact probabilities averaged over weight draws"
        vals, cis = {}, {}
        for k, col in zip(names, draws.T):
            m, a, b = mean_ci(col, level)
            vals[k], cis[k] = m, (a, b)
        alphas = {}
        for key, col in (("alpha_t_su", 2), ("alpha_s_tu", 1), ("alpha_u_st", 3)):
            alphas[key], cis[key] = _ratio_ci(draws[:, 0], draws[:, col], level)
        if vals["p_delta"] == 0:
            alphas = dict.fromkeys(alphas)

    if vals["p_delta"] == 0:
        rep.diagnostics.append("p_delta is 0 (lifetimes of the end actors do not meet); "
                               "conditional coefficients withheld")
    asym = None
    if tx is not None and ty is not None:
        try:
            mom = weight_moments(tx, ty, x_orders=(2, 3), y_orders=(1, 2))
            asym = asymptotic_triangle(params, mom, s, t, u)
            rep.theory["triangle"] = {**asym.as_dict(), "source": "leading-order triangle asymptotics"}
        except (InfiniteMomentError, ValueError) as e:
            rep.diagnostics.append(f"asymptotic comparison skipped: {e}")

    rep.add("p_delta", f"{s},{t},{u}", vals["p_delta"], cis["p_delta"], asym and asym.p_delta)
    for k in ("path_s", "path_t", "path_u"):
        rep.add(k, f"{s},{t},{u}", vals[k], cis[k])
    for k, v in alphas.items():
        ci = cis[k] if v is not None else (None, None)
        rep.add(k, f"{s},{t},{u}", v, ci, None if asym is None else getattr(asym, k))
    if asym is not None:
        rel = {}
        for k in ("p_delta", *alphas):
            est = vals["p_delta"] if k == "p_delta" else alphas[k]
            th = getattr(asym, k)
            rel[k] = None if est is None or th == 0 else abs(est - th) / th
        rep.distances["relative_error"] = rel
    rep.duration_seconds = time.monotonic() - t0
    return rep


# ---------------------------------------------------------------------------
# degree correlation of an adjacent pair
# ---------------------------------------------------------------------------

def _edge_prob_fn(xs, yv: float, v: int):
    return lambda i: np.minimum(1.0, np.asarray(xs[i], dtype=float) * yv / np.sqrt(i * float(v)))


def _blockwise(rng, n_rows: int, xs, lo: int, hi: int, env_of_block, prob):
    """flat_block_skip over the dyadic blocks of [lo, hi]."""
    if lo > hi or n_rows == 0:
        e = np.empty(0, dtype=np.int64)
        return e, e
    _, blo, bhi, bmax = dyadic_blocks(xs, lo, hi)
    rows, items = [], []
    for k in range(len(blo)):
        env = env_of_block(float(blo[k]), float(bmax[k]))
        r, i = flat_block_skip(rng, n_rows, int(blo[k]), int(bhi[k]), env, prob)
        rows.append(r)
        items.append(i)
    return np.concatenate(rows), np.concatenate(items)


def _drop(rows, items, drop_keys, width):
    keys = rows * width + items
    keep = ~np.isin(keys, drop_keys)
    return rows[keep], items[keep]


def _actor_edges(xs, ys, v: int):
    """Edge probability and envelope functions of actor v."""
    yv = float(ys[v])

    def env(blo, bmax):
        return min(1.0, bmax * yv / math.sqrt(blo * v))

    return _edge_prob_fn(xs, yv, v), env


def conditional_pair_edges(params: ModelParams, xs, ys, s: int, t: int, n_raw: int, rng):
    """Edges of v_s and v_t in those of n_raw raw replicates where v_s ~ v_t.

    Stage one draws only the witnesses, items linked to both actors, over
    all raw replicates. Replicates with a witness are kept and completed:
    the remaining shared items get their edges from the law conditional on
    not being a witness, and the other window items get independent edges.
    Returns ``(n_accepted, (rows_s, items_s), (rows_t, items_t))`` with rows
    numbered 0..n_accepted-1.
    """
    xs, ys = as_weights(xs), as_weights(ys)
    ls, hs = (int(v) for v in item_window(params, s))
    lt, ht = (int(v) for v in item_window(params, t))
    il, ih = max(ls, lt), min(hs, ht)
    e = np.empty(0, dtype=np.int64)
    if il > ih or n_raw == 0:
        return 0, (e, e), (e, e)
    ps, env_s = _actor_edges(xs, ys, s)
    pt, env_t = _actor_edges(xs, ys, t)

    w_row, w_item = _blockwise(rng, n_raw, xs, il, ih, lambda lo_, m: env_s(lo_, m) * env_t(lo_, m),
                               lambda i: ps(i) * pt(i))
    acc = np.unique(w_row)
    n_acc = len(acc)
    if n_acc == 0:
        return 0, (e, e), (e, e)
    w_row = np.searchsorted(acc, w_row)
    width = max(hs, ht) + 1
    w_keys = w_row * width + w_item

    def p_s_given_no_witness(i):
        a, b = ps(i), pt(i)
        q = a * b
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(q < 1.0, a * (1.0 - b) / (1.0 - q), 0.0)

    # on a shared item that is not a witness: s-edge with probability
    # p_s(1 - p_t)/(1 - p_s p_t), otherwise a t-edge with probability p_t
    s_row, s_item = _drop(*_blockwise(rng, n_acc, xs, il, ih, env_s, p_s_given_no_witness), w_keys, width)
    t_row, t_item = _blockwise(rng, n_acc, xs, il, ih, env_t, pt)
    t_row, t_item = _drop(t_row, t_item, np.concatenate([w_keys, s_row * width + s_item]), width)

    parts_s = [(w_row, w_item), (s_row, s_item)]
    parts_t = [(w_row, w_item), (t_row, t_item)]
    for lo_, hi_, env, prob, parts in ((ls, il - 1, env_s, ps, parts_s), (ih + 1, hs, env_s, ps, parts_s),
                                       (lt, il - 1, env_t, pt, parts_t), (ih + 1, ht, env_t, pt, parts_t)):
        parts.append(_blockwise(rng, n_acc, xs, lo_, hi_, env, prob))
    edges_s = tuple(np.concatenate([p[k] for p in parts_s]) for k in (0, 1))
    edges_t = tuple(np.concatenate([p[k] for p in parts_t]) for k in (0, 1))
    return n_acc, edges_s, edges_t


def staged_pair_sample(params: ModelParams, xs, ys, s: int, t: int, n_raw: int, rng,
                       table: WindowTable | None = None):
    """Degrees (d(v_s), d(v_t)) in the replicates, out of n_raw, where v_s ~ v_t.

    The edges of v_s and v_t come from ``conditional_pair_edges``; then the
    actor lists of every item touched by s or t are drawn. Returns
    ``(n_accepted, d_s, d_t)``.
    """
    xs, ys = as_weights(xs), as_weights(ys)
    n_acc, (rs, is_), (rt, it) = conditional_pair_edges(params, xs, ys, s, t, n_raw, rng)
    e = np.empty(0, dtype=np.int64)
    if n_acc == 0:
        return 0, e, e
    table = table or WindowTable(params, max(t_plus(params, s), t_plus(params, t)))
    width = int(max(is_.max(initial=0), it.max(initial=0))) + 1
    keys = np.unique(np.concatenate([rs * width + is_, rt * width + it]))
    rep2, item2, act2 = _fill_items(xs, ys, table, keys // width, keys % width, (s, t), rng)
    rep = np.concatenate([rs, rt, rep2])
    item = np.concatenate([is_, it, item2])
    actor = np.concatenate([np.full(len(rs), s), np.full(len(rt), t), act2]).astype(np.int64)
    order = np.lexsort((actor, item, rep))
    local = LocalSample((s, t), n_acc, rep[order], item[order], actor[order])
    return n_acc, local.degrees(s), local.degrees(t)


def _rows_sharing(r1, i1, r2, i2, width):
    common = np.intersect1d(r1 * width + i1, r2 * width + i2)
    return np.unique(common // width)


def triangle_count(params: ModelParams, xs, ys, s: int, t: int, u: int, n_raw: int, rng) -> int:
    """Edge-level simulation: in how many of n_raw replicates v_s, v_t, v_u form a triangle.

    Replicates are first conditioned on v_s ~ v_u, the rarest of the three
    adjacencies; the edges of v_t are independent of that event and are
    drawn only for the kept replicates.
    """
    if not s < t < u:
        raise ValueError(f"triple requires s < t < u, got {(s, t, u)}")
    xs, ys = as_weights(xs), as_weights(ys)
    n_acc, (rs, is_), (ru, iu) = conditional_pair_edges(params, xs, ys, s, u, n_raw, rng)
    if n_acc == 0:
        return 0
    lt, ht = (int(v) for v in item_window(params, t))
    pt, env_t = _actor_edges(xs, ys, t)
    rt, it = _blockwise(rng, n_acc, xs, lt, ht, env_t, pt)
    width = int(max(is_.max(initial=0), iu.max(initial=0), it.max(initial=0))) + 1
    st = _rows_sharing(rs, is_, rt, it, width)
    tu = _rows_sharing(rt, it, ru, iu, width)
    return int(len(np.intersect1d(st, tu)))


def mc_assortativity(params: ModelParams, x, y, s: int, t: int, n_rep: int, seed: int, *,
                     x_dist=None, y_dist=None, raw_per_draw: int = 1000, threads: int = 1,
                     chunk_size: int | None = None, budget_seconds: float | None = None,
                     level: float = 0.95, config: dict | None = None) -> ExperimentReport:
    """Degree correlation of v_s and v_t given that they are adjacent.

    ``n_rep`` counts raw replicates; only those where v_s ~ v_t are kept.
    With random weights each weight draw serves ``raw_per_draw`` raw
    replicates, so the kept replicates follow the conditional joint law of
    weights and graph.
    """
    if not 0 < s < t:
        raise ValueError(f"pair requires 0 < s < t, got {(s, t)}")
    t0 = time.monotonic()
    diagnostics: list = []
    xs, tx = _resolve(x, x_dist, "x", diagnostics)
    ys, ty = _resolve(y, y_dist, "y", diagnostics)
    random_w = _is_dist(xs) or _is_dist(ys)
    cfg = config or _base_config(params, x, y, s=s, t=t, n_rep=n_rep, seed=seed)
    ls, _ = (int(v) for v in item_window(params, s))
    _, ht = (int(v) for v in item_window(params, t))
    try:
        table = WindowTable(params, max(t_plus(params, s), t_plus(params, t)))
    except ValueError:
        table = None

    if not random_w:
        pair_exact = exact_pair_prob(params, xs, ys, s, t)

        def task(rng, size, k):
            n_acc, ds, dt = staged_pair_sample(params, xs, ys, s, t, size, rng, table)
            return n_acc, ds, dt, size * pair_exact

        chunk = chunk_size or ASSORT_CHUNK
    else:
        j_hi = table.horizon if table is not None else t

        def task(rng, size, k):
            acc, dss, dts, pair_sum = 0, [], [], 0.0
            for start in range(0, size, raw_per_draw):
                m = min(raw_per_draw, size - start)
                xr = _draw(xs, ls, max(ls, ht), rng)
                yr = _draw(ys, 1, j_hi, rng)
                pair_sum += m * exact_pair_prob(params, xr, yr, s, t)
                n_acc, ds, dt = staged_pair_sample(params, xr, yr, s, t, m, rng, table)
                acc += n_acc
                dss.append(ds)
                dts.append(dt)
            return acc, np.concatenate(dss), np.concatenate(dts), pair_sum

        chunk = chunk_size or 100 * raw_per_draw

    run = run_chunks(task, n_rep, seed, chunk, threads, budget_seconds)
    n_raw = run.n_done
    n_acc = sum(r[0] for r in run.results)
    ds = np.concatenate([r[1] for r in run.results])
    dt = np.concatenate([r[2] for r in run.results])
    pair_theory = sum(r[3] for r in run.results) / n_raw
    rep = ExperimentReport("assortativity", cfg, seed, n_raw, diagnostics=diagnostics, truncated=run.truncated)
    if run.truncated:
        rep.diagnostics.append(f"time budget reached after {n_raw} of {n_rep} raw replicates")
    rep.extra["accepted"] = int(n_acc)
    rep.theory["pair_probability"] = {"value": pair_theory, "source": "exact pair adjacency probability"}
    rep.add("acceptance_rate", f"{s},{t}", n_acc / n_raw, wilson_ci(int(n_acc), n_raw, level), pair_theory)

    consts = None
    if tx is not None and ty is not None and params.tau.kind == "linear":
        try:
            mom = weight_moments(tx, ty, x_orders=(2, 3, 4), y_orders=(1, 2, 3))
            consts = assortativity_constants(mom, params.a, params.b)
            rep.theory["assortativity"] = {**consts.as_dict(), "theta": consts.theta(s, t),
                                           "source": "limit of conditional degree moments"}
        except InfiniteMomentError as e:
            rep.diagnostics.append(f"assortativity constants skipped: {e}")
    elif params.tau.kind != "linear":
        rep.diagnostics.append("assortativity constants apply to tau(t) = t only")

    if n_acc == 0:
        rep.diagnostics.append("no replicate had v_s ~ v_t; no conditional estimates")
        rep.duration_seconds = time.monotonic() - t0
        return rep

    key = f"{s},{t}"
    th = consts if consts is not None and consts.r_st is not None else None
    for name, vals, theory in (("E_st d_s", ds, th and th.delta1), ("E_st d_t", dt, th and th.delta1),
                               ("E_st d_s^2", ds ** 2, th and th.delta2),
                               ("E_st d_t^2", dt ** 2, th and th.delta2),
                               ("E_st d_s d_t", ds * dt, th and th.delta2 - th.cap_delta)):
        m, a, b = mean_ci(vals.astype(float), level)
        rep.add(name, key, m, (a, b), theory, n_acc)
    if n_acc > 2 and ds.std() > 0 and dt.std() > 0:
        r = float(np.corrcoef(ds, dt)[0, 1])
        rep.add("r_st", key, r, pearson_ci(r, n_acc, level), th and th.r_st, n_acc)
        if th is not None:
            rep.distances["r_st_abs_error"] = abs(r - th.r_st)
    else:
        rep.diagnostics.append("degrees are constant across accepted replicates; r_st undefined")
    rep.duration_seconds = time.monotonic() - t0
    return rep
