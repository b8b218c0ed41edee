"""Independent Bernoulli sampling by geometric skips under an envelope.

Instead of one uniform per potential edge, candidates are visited by
geometric jumps with a dominating probability ``env`` and then thinned with
ratio ``p / env``. Each index is therefore included independently with
probability exactly ``p``, at a cost proportional to the envelope mass.
"""

from __future__ import annotations

import math

import numpy as np

_EMPTY = np.empty(0, dtype=np.int64)


def thinning_ratio(p, env):
    """Acceptance probability of a candidate proposed under envelope ``env``."""
    p, env = np.asarray(p, dtype=float), np.asarray(env, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(env > 0, p / env, 0.0)
    return np.clip(r, 0.0, 1.0)


def geometric_positions(rng: np.random.Generator, length: int, p: float) -> np.ndarray:
    """Sorted positions in [0, length), each present independently with probability p."""
    if length <= 0 or p <= 0:
        return _EMPTY
    if p >= 1:
        return np.arange(length, dtype=np.int64)
    out = []
    last = -1
    while True:
        m = (length - 1 - last) * p
        size = int(m + 6.0 * math.sqrt(m) + 16)
        pos = last + np.cumsum(rng.geometric(p, size=size))
        if pos[-1] >= length:
            out.append(pos[pos < length])
            break
        out.append(pos)
        last = int(pos[-1])
    return np.concatenate(out).astype(np.int64)


def envelope_skip(rng: np.random.Generator, lo, hi, env, prob):
    """Bernoulli sampling over many blocks at once.

    Block ``k`` covers indices ``lo[k]..hi[k]`` where every true probability
    is at most ``env[k]``. ``prob(blocks, positions)`` returns the true
    probabilities for candidate positions. All blocks advance in lockstep,
    so the draw order depends only on the inputs. Returns accepted
    ``(block, position)`` arrays sorted by block then position.
    """
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    env = np.minimum(np.asarray(env, dtype=float), 1.0)
    pos = lo - 1
    active = np.flatnonzero((env > 0) & (lo <= hi))
    acc_b, acc_p = [], []
    while len(active):
        pos[active] += rng.geometric(env[active])
        active = active[pos[active] <= hi[active]]
        if not len(active):
            break
        cand = pos[active]
        p = np.asarray(prob(active, cand), dtype=float)
        ok = rng.random(len(active)) < thinning_ratio(p, env[active])
        acc_b.append(active[ok])
        acc_p.append(cand[ok])
    if not acc_b:
        return _EMPTY, _EMPTY
    b = np.concatenate(acc_b)
    q = np.concatenate(acc_p)
    order = np.lexsort((q, b))
    return b[order], q[order]


def flat_block_skip(rng: np.random.Generator, n_rows: int, lo: int, hi: int, env: float, prob_of_index):
    """The same block [lo, hi] repeated for ``n_rows`` independent rows.

    The ``n_rows * (hi - lo + 1)`` trials are treated as one long sequence,
    so the cost is one geometric draw per candidate regardless of how many
    rows there are. ``prob_of_index(i)`` gives true probabilities, identical
    across rows. Returns ``(row, index)`` of successes, sorted.
    """
    length = hi - lo + 1
    if n_rows <= 0 or length <= 0:
        return _EMPTY, _EMPTY
    pos = geometric_positions(rng, n_rows * length, min(env, 1.0))
    if not len(pos):
        return _EMPTY, _EMPTY
    row, off = np.divmod(pos, length)
    idx = lo + off
    p = np.asarray(prob_of_index(idx), dtype=float)
    ok = rng.random(len(pos)) < thinning_ratio(p, env)
    return row[ok], idx[ok]
