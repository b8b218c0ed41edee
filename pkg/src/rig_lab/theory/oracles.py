"""Exact finite-size probabilities for fixed (realized) weights.

All edge indicators are independent, so the path count L_t, pair adjacency
and triangles have closed forms as products over items. Weights are
anything ``as_weights`` accepts: a scalar for constant weights, an array
whose first entry belongs to index 1, or a WeightSequence.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..model.core import ModelParams, actor_window, item_window
from ..model.sequences import as_weights
from .laws import Pmf

# factors with p above this are multiplied in directly; below it the
# log-series of (1 - p + p z) converges fast enough
_LOG_SERIES_MAX_P = 1.0 / 3.0


def _series_exp(g: np.ndarray) -> np.ndarray:
    """Coefficients of exp(sum_k g_k z^k) via n f_n = sum_k k g_k f_{n-k}."""
    n = len(g)
    f = np.zeros(n)
    f[0] = math.exp(g[0])
    kg = np.arange(n) * g
    for m in range(1, n):
        f[m] = np.dot(kg[1:m + 1], f[m - 1::-1][:m]) / m
    return f


def poisson_binomial_pmf(p, r_max: int) -> np.ndarray:
    """P(sum of independent Bernoulli(p_k) = r) for r = 0..r_max."""
    if r_max < 0:
        raise ValueError("r_max must be >= 0")
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("Bernoulli probabilities must lie in [0, 1]")
    small = p[(p > 0) & (p <= _LOG_SERIES_MAX_P)]
    g = np.zeros(r_max + 1)
    if len(small):
        q = small / (1.0 - small)
        g[0] = np.sum(np.log1p(-small))
        qk = np.ones_like(q)
        for k in range(1, r_max + 1):
            qk = qk * q
            g[k] = (-1) ** (k + 1) * qk.sum() / k
    f = _series_exp(g)
    for pk in p[p > _LOG_SERIES_MAX_P]:
        nxt = (1.0 - pk) * f
        nxt[1:] += pk * f[:-1]
        f = nxt
    return np.clip(f, 0.0, None)


def le_cam_bound(probs) -> float:
    """Sum of p_k^2, which bounds d_TV(sum of Bernoulli(p_k), Poisson(sum p_k))."""
    p = np.asarray(probs, dtype=float)
    if np.any(~np.isfinite(p)) or np.any((p < 0) | (p > 1)):
        raise ValueError("le_cam_bound needs probabilities in [0, 1]")
    return float(np.sum(p * p))


def _window(params, j):
    lo, hi = item_window(params, j)
    return int(lo), int(hi)


def _probs(x, y, items: np.ndarray, j: int) -> np.ndarray:
    """min(1, x_i y_j / sqrt(i j)) for items assumed inside the window of j."""
    xi = np.asarray(x[items], dtype=float)
    return np.minimum(1.0, xi * float(y[j]) / np.sqrt(items.astype(float) * j))


def _actor_bounds(params, lo_items: int, hi_items: int):
    """Actor interval covering every item in [lo_items, hi_items]."""
    return actor_window(params, lo_items)[0], actor_window(params, hi_items)[1]


def _other_actors(actors, a_lo, a_hi, y_act, i, t):
    """Actors other than t whose window holds item i; they form a contiguous run."""
    k0 = np.searchsorted(a_hi, i, side="left")
    k1 = np.searchsorted(a_lo, i, side="right")
    js, yj = actors[k0:k1], y_act[k0:k1]
    keep = js != t
    return js[keep], yj[keep]


def exact_path2_pmf(params: ModelParams, x, y, t: int, r_max: int = 60) -> Pmf:
    """Exact pmf of L_t, the number of two-step paths v_t - w_i - v_j (j != t).

    The generating function is the product over items i in T_t of
    (1 - p_it) + p_it U_i(z), with U_i the Poisson-binomial law of the other
    actors linked to item i. Polynomials are truncated at degree r_max; the
    dropped mass is reported as the tail.
    """
    if r_max < 0:
        raise ValueError("r_max must be >= 0")
    if t < 1:
        raise ValueError("actor index must be >= 1")
    x, y = as_weights(x), as_weights(y)
    lo, hi = _window(params, t)
    f = np.zeros(r_max + 1)
    f[0] = 1.0
    if lo > hi or float(y[t]) == 0.0:
        return Pmf.from_probs(f)
    items = np.arange(lo, hi + 1)
    p_it = _probs(x, y, items, t)
    j_lo, j_hi = _actor_bounds(params, lo, hi)
    actors = np.arange(j_lo, j_hi + 1)
    a_lo, a_hi = item_window(params, actors)
    y_act = np.asarray(y[actors], dtype=float)
    for i, pit in zip(items, p_it):
        if pit == 0.0:
            continue
        js, yj = _other_actors(actors, a_lo, a_hi, y_act, i, t)
        pij = np.minimum(1.0, float(x[i]) * yj / np.sqrt(float(i) * js))
        u = poisson_binomial_pmf(pij, r_max)
        f = (1.0 - pit) * f + pit * np.convolve(f, u)[: r_max + 1]
    return Pmf.from_probs(f)


def path2_mean(params: ModelParams, x, y, t: int) -> float:
    """E L_t = sum over i in T_t of p_it times the sum of p_ij over the other actors."""
    x, y = as_weights(x), as_weights(y)
    lo, hi = _window(params, t)
    if lo > hi:
        return 0.0
    total = 0.0
    j_lo, j_hi = _actor_bounds(params, lo, hi)
    actors = np.arange(j_lo, j_hi + 1)
    a_lo, a_hi = item_window(params, actors)
    y_act = np.asarray(y[actors], dtype=float)
    for i in range(lo, hi + 1):
        js, yj = _other_actors(actors, a_lo, a_hi, y_act, i, t)
        pij = np.minimum(1.0, float(x[i]) * yj / np.sqrt(float(i) * js))
        total += min(1.0, float(x[i]) * float(y[t]) / math.sqrt(i * t)) * math.fsum(pij)
    return total


def _shared_probs(params, x, y, actors):
    """Items where at least two of ``actors`` can connect, with each actor's edge probabilities."""
    wins = [_window(params, j) for j in actors]
    lo = min(w[0] for w in wins)
    hi = max(w[1] for w in wins)
    if lo > hi:
        return np.empty(0, dtype=np.int64), np.zeros((len(actors), 0))
    k = np.arange(lo, hi + 1)
    probs = np.zeros((len(actors), len(k)))
    for row, (j, (l, h)) in enumerate(zip(actors, wins)):
        inside = (k >= l) & (k <= h)
        if inside.any():
            probs[row, inside] = _probs(x, y, k[inside], j)
    keep = np.count_nonzero(probs > 0, axis=0) >= 2
    return k[keep], probs[:, keep]


def exact_pair_prob(params: ModelParams, x, y, s: int, t: int) -> float:
    """P(v_s ~ v_t) = 1 - prod over shared items of (1 - p_ks p_kt)."""
    if s == t:
        raise ValueError("pair probability needs two distinct actors")
    x, y = as_weights(x), as_weights(y)
    _, probs = _shared_probs(params, x, y, (s, t))
    q = probs[0] * probs[1]
    if np.any(q >= 1.0):
        return 1.0
    return max(0.0, float(-math.expm1(np.sum(np.log1p(-q)))))


@dataclass(frozen=True)
class TripleProbs:
    """Exact triangle and two-path probabilities for actors s < t < u.

    ``path_s`` is P(v_s ~ v_t, v_s ~ v_u), the two-path centred at s; the
    others likewise. ``alpha_t_su`` = p_delta / path_t is the probability
    that s ~ u given both edges at t, and is None when path_t is 0.
    """

    p_delta: float
    path_s: float
    path_t: float
    path_u: float

    @staticmethod
    def _ratio(num, den):
        return None if den <= 0 else min(1.0, num / den)

    @property
    def alpha_t_su(self):
        return self._ratio(self.p_delta, self.path_t)

    @property
    def alpha_s_tu(self):
        return self._ratio(self.p_delta, self.path_s)

    @property
    def alpha_u_st(self):
        return self._ratio(self.p_delta, self.path_u)

    def as_dict(self) -> dict:
        return {"p_delta": self.p_delta, "path_s": self.path_s, "path_t": self.path_t,
                "path_u": self.path_u, "alpha_t_su": self.alpha_t_su,
                "alpha_s_tu": self.alpha_s_tu, "alpha_u_st": self.alpha_u_st}


# pair events by actor positions: st, su, tu
_PAIRS = ((0, 1), (0, 2), (1, 2))


def _log_no_pairs(probs: np.ndarray) -> dict:
    """log P(no pair event in S) for every subset S of the three pair events.

    Within one item the three incidences are independent, so the chance
    that the item completes none of the pairs in S is a sum over the eight
    incidence patterns. Items are independent, so the logs add up.
    """
    n = probs.shape[1]
    out = {}
    for r in range(4):
        for subset in itertools.combinations(range(3), r):
            bad = np.zeros(n)
            for pattern in itertools.product((0, 1), repeat=3):
                if not any(pattern[a] and pattern[b] for a, b in (_PAIRS[e] for e in subset)):
                    continue
                w = np.ones(n)
                for v in range(3):
                    w = w * (probs[v] if pattern[v] else 1.0 - probs[v])
                bad += w
            with np.errstate(divide="ignore"):
                out[subset] = float(np.sum(np.log1p(-np.minimum(bad, 1.0))))
    return out


def _prob_all(logs: dict, events: tuple) -> float:
    """P(all events in ``events`` occur) by inclusion-exclusion over their complements."""
    total = 0.0
    for r in range(1, len(events) + 1):
        for sub in itertools.combinations(events, r):
            # (-1)^r (P(none of sub) - 1) summed; the constant terms cancel exactly
            total += (-1) ** r * math.expm1(logs[tuple(sorted(sub))])
    return min(1.0, max(0.0, total))


def exact_triple_probs(params: ModelParams, x, y, s: int, t: int, u: int) -> TripleProbs:
    """Exact p_delta and two-path probabilities for actors s < t < u."""
    if not s < t < u:
        raise ValueError(f"triple requires s < t < u, got {(s, t, u)}")
    x, y = as_weights(x), as_weights(y)
    _, probs = _shared_probs(params, x, y, (s, t, u))
    if probs.shape[1] == 0:
        return TripleProbs(0.0, 0.0, 0.0, 0.0)
    logs = _log_no_pairs(probs)
    st, su, tu = 0, 1, 2
    paths = _prob_all(logs, (st, su)), _prob_all(logs, (st, tu)), _prob_all(logs, (su, tu))
    # a triangle implies every two-path; clamp away rounding that breaks this
    p_delta = min(_prob_all(logs, (st, su, tu)), *paths)
    return TripleProbs(p_delta, *paths)
