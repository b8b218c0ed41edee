"""Bipartite actor-item graphs: generation, local replicates and queries."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ModelParams, Tau, WindowTable, item_window, t_minus, t_plus
from .sampling import envelope_skip, flat_block_skip
from .sequences import WeightSequence, as_weights, dyadic_blocks

BACKENDS = ("naive", "envelope-skip")

# potential edges handled per vectorized step of the naive backend
_NAIVE_CHUNK = 1 << 21


class BipartiteGraph:
    """Realized edges w_i -> v_j, stored sorted by item and by actor.

    ``focus`` is set for partial graphs produced by ``local_subgraph``;
    queries are then only meaningful for the focus actors.
    """

    def __init__(self, params: ModelParams, t_max: int, item_horizon: int,
                 x: WeightSequence, y: WeightSequence, items, actors, focus=None):
        self.params = params
        self.t_max = int(t_max)
        self.item_horizon = int(item_horizon)
        self.x, self.y = x, y
        items = np.asarray(items, dtype=np.int64)
        actors = np.asarray(actors, dtype=np.int64)
        order = np.lexsort((actors, items))
        self.items, self.actors = items[order], actors[order]
        by_actor = np.lexsort((self.items, self.actors))
        self._actor_sorted = self.actors[by_actor]
        self._items_by_actor = self.items[by_actor]
        self.focus = None if focus is None else tuple(sorted(focus))
        self.items.flags.writeable = False
        self.actors.flags.writeable = False

    @property
    def n_edges(self) -> int:
        return len(self.items)

    def actors_of(self, i: int) -> np.ndarray:
        a, b = np.searchsorted(self.items, [i, i + 1])
        return self.actors[a:b]

    def items_of(self, j: int) -> np.ndarray:
        a, b = np.searchsorted(self._actor_sorted, [j, j + 1])
        return self._items_by_actor[a:b]

    def edges(self) -> np.ndarray:
        return np.column_stack([self.items, self.actors])

    def _check_actor(self, t):
        if not 1 <= t <= self.t_max:
            raise IndexError(f"actor {t} outside horizon 1..{self.t_max}")


def intersection_degree(g: BipartiteGraph, t: int) -> int:
    """Number of distinct actors other than t sharing at least one item with t."""
    g._check_actor(t)
    nbrs = [g.actors_of(i) for i in g.items_of(t)]
    if not nbrs:
        return 0
    u = np.unique(np.concatenate(nbrs))
    return int(len(u) - np.count_nonzero(u == t))


def are_adjacent(g: BipartiteGraph, s: int, t: int) -> bool:
    g._check_actor(s)
    g._check_actor(t)
    if s == t:
        return False
    return bool(len(np.intersect1d(g.items_of(s), g.items_of(t))))


def is_triangle(g: BipartiteGraph, s: int, t: int, u: int) -> bool:
    return are_adjacent(g, s, t) and are_adjacent(g, s, u) and are_adjacent(g, t, u)


def check_windows(g: BipartiteGraph) -> bool:
    """True when every stored edge lies inside its actor's window."""
    if not g.n_edges:
        return True
    lo, hi = item_window(g.params, g.actors)
    return bool(np.all((g.items >= lo) & (g.items <= hi)))


def _required_item_horizon(table: WindowTable) -> int:
    nonempty = table.lo <= table.hi
    return int(table.hi[nonempty].max()) if nonempty.any() else 0


def generate_bipartite(params: ModelParams, x, y, t_max: int, rng: np.random.Generator,
                       backend: str = "envelope-skip") -> BipartiteGraph:
    """Sample every potential edge of actors 1..t_max independently.

    Both backends draw from the same product law; ``naive`` spends one
    uniform per potential edge, ``envelope-skip`` one geometric jump per
    envelope candidate.
    """
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    x, y = as_weights(x), as_weights(y)
    table = WindowTable(params, t_max)
    item_horizon = _required_item_horizon(table)
    if not y.covers(1, t_max):
        raise ValueError(f"actor weights must cover 1..{t_max}")
    if item_horizon and not x.covers(1, item_horizon):
        raise ValueError(f"item weights must cover 1..{item_horizon}")
    j = np.arange(1, t_max + 1, dtype=np.int64)
    lo, hi = table.lo, table.hi
    if backend == "naive":
        items, actors = _naive(params, x, y, j, lo, hi, rng)
    else:
        items, actors = _skip_windows(x, y, j, lo, hi, rng)
    return BipartiteGraph(params, t_max, item_horizon, x, y, items, actors)


def _naive(params, x, y, j, lo, hi, rng):
    sizes = np.maximum(hi - lo + 1, 0)
    out_i, out_j = [], []
    start = 0
    while start < len(j):
        cum = np.cumsum(sizes[start:])
        stop = start + max(1, int(np.searchsorted(cum, _NAIVE_CHUNK, side="right")))
        rows = np.arange(start, stop)
        n = sizes[rows]
        jj = np.repeat(j[rows], n)
        offs = np.arange(n.sum()) - np.repeat(np.cumsum(n) - n, n)
        ii = np.repeat(lo[rows], n) + offs
        p = np.minimum(1.0, x[ii] * y[jj] / np.sqrt(ii * jj.astype(float)))
        keep = rng.random(len(ii)) < p
        out_i.append(ii[keep])
        out_j.append(jj[keep])
        start = stop
    return np.concatenate(out_i), np.concatenate(out_j)


def _skip_windows(x, y, j, lo, hi, rng):
    """Envelope-skip sampling of actor rows j over item ranges [lo, hi]."""
    row, blo, bhi, bmax = dyadic_blocks(x, lo, hi)
    jr = j[row]
    yr = np.asarray(y[jr], dtype=float)
    env = np.minimum(1.0, bmax * yr / np.sqrt(blo * jr.astype(float)))

    def prob(blocks, i):
        jb = jr[blocks]
        return np.minimum(1.0, x[i] * yr[blocks] / np.sqrt(i * jb.astype(float)))

    b, i = envelope_skip(rng, blo, bhi, env, prob)
    return i, jr[b]


@dataclass
class LocalSample:
    """Edges of ``n`` independent local replicates around the focus actors.

    ``rep``, ``item``, ``actor`` are parallel arrays sorted by
    (rep, item, actor).
    """

    focus: tuple
    n: int
    rep: np.ndarray
    item: np.ndarray
    actor: np.ndarray

    def _group_keys(self):
        k = int(self.item.max()) + 1 if len(self.item) else 1
        return self.rep * k + self.item, k

    def degrees(self, t: int) -> np.ndarray:
        """d(v_t) in each replicate."""
        if t not in self.focus:
            raise ValueError(f"actor {t} is not a focus actor of this sample")
        out = np.zeros(self.n, dtype=np.int64)
        if not len(self.rep):
            return out
        g, _ = self._group_keys()
        own = np.unique(g[self.actor == t])
        m = np.isin(g, own) & (self.actor != t)
        jmax = int(self.actor.max()) + 1
        pairs = np.unique(self.rep[m] * jmax + self.actor[m])
        return np.bincount(pairs // jmax, minlength=self.n).astype(np.int64)

    def adjacent(self, s: int, t: int) -> np.ndarray:
        """Whether v_s ~ v_t in each replicate."""
        out = np.zeros(self.n, dtype=bool)
        if not len(self.rep):
            return out
        g, k = self._group_keys()
        common = np.intersect1d(g[self.actor == s], g[self.actor == t])
        out[np.unique(common // k)] = True
        return out


def _local_tables(params, focus):
    horizon = max(t_plus(params, f) for f in focus)
    return WindowTable(params, horizon)


def sample_local(params: ModelParams, x, y, focus, n: int, rng: np.random.Generator,
                 prune: bool = True, table: WindowTable | None = None) -> LocalSample:
    """Edges relevant to the focus actors, for ``n`` independent replicates.

    First the edges between focus actors and the items of their windows are
    drawn. Then every actor window of the relevant items is filled in.
    With ``prune`` the relevant items are only those linked to some focus
    actor; otherwise they are all items of the focus windows. Degrees and
    adjacency of focus actors have the same law either way, and the same
    law as under full generation.
    """
    focus = tuple(sorted(set(int(f) for f in focus)))
    if not focus:
        raise ValueError("focus set must be non-empty")
    if n < 1:
        raise ValueError("need at least one replicate")
    x, y = as_weights(x), as_weights(y)
    table = table or _local_tables(params, focus)
    windows = [table.items(f) for f in focus]
    for f, (lo, hi) in zip(focus, windows):
        if lo <= hi and not x.covers(int(lo), int(hi)):
            raise ValueError(f"item weights must cover window [{lo}, {hi}] of actor {f}")
        if not y.covers(f, f):
            raise ValueError(f"actor weights must cover focus actor {f}")

    reps, items, actors = [], [], []
    for f, (lo, hi) in zip(focus, windows):
        if lo > hi:
            continue
        yf = float(y[f])
        row, blo, bhi, bmax = dyadic_blocks(x, lo, hi)
        for k in range(len(row)):
            env = min(1.0, bmax[k] * yf / np.sqrt(blo[k] * float(f)))
            r, i = flat_block_skip(rng, n, int(blo[k]), int(bhi[k]), env,
                                   lambda i: np.minimum(1.0, x[i] * yf / np.sqrt(i * float(f))))
            reps.append(r)
            items.append(i)
            actors.append(np.full(len(r), f, dtype=np.int64))
    rep1 = np.concatenate(reps) if reps else np.empty(0, dtype=np.int64)
    item1 = np.concatenate(items) if items else np.empty(0, dtype=np.int64)
    act1 = np.concatenate(actors) if actors else np.empty(0, dtype=np.int64)

    if prune:
        k = int(item1.max()) + 1 if len(item1) else 1
        keys = np.unique(rep1 * k + item1)
        hit_rep, hit_item = keys // k, keys % k
    else:
        all_items = np.unique(np.concatenate(
            [np.arange(lo, hi + 1) for lo, hi in windows if lo <= hi] or [np.empty(0, dtype=np.int64)]))
        hit_rep = np.repeat(np.arange(n), len(all_items))
        hit_item = np.tile(all_items, n)

    rep2, item2, act2 = _fill_items(x, y, table, hit_rep, hit_item, focus, rng)
    rep = np.concatenate([rep1, rep2])
    item = np.concatenate([item1, item2])
    actor = np.concatenate([act1, act2])
    order = np.lexsort((actor, item, rep))
    return LocalSample(focus, n, rep[order], item[order], actor[order])


def _fill_items(x, y, table, hit_rep, hit_item, exclude, rng):
    """Edges between the given (replicate, item) pairs and their non-excluded actors."""
    if not len(hit_item):
        e = np.empty(0, dtype=np.int64)
        return e, e, e
    jlo, jhi = table.actors(hit_item)
    if not y.covers(int(jlo.min()), int(jhi.max())):
        raise ValueError(f"actor weights must cover [{jlo.min()}, {jhi.max()}]")
    xi = np.asarray(x[hit_item], dtype=float)
    row, blo, bhi, bmax = dyadic_blocks(y, jlo, jhi)
    ir = hit_item[row]
    xr = xi[row]
    env = np.minimum(1.0, xr * bmax / np.sqrt(ir * blo.astype(float)))
    excl = np.asarray(exclude, dtype=np.int64)

    def prob(blocks, j):
        p = np.minimum(1.0, xr[blocks] * y[j] / np.sqrt(ir[blocks] * j.astype(float)))
        return np.where(np.isin(j, excl), 0.0, p)

    b, j = envelope_skip(rng, blo, bhi, env, prob)
    hits = row[b]
    return hit_rep[hits], hit_item[hits], j


def local_subgraph(params: ModelParams, x, y, focus, rng: np.random.Generator,
                   prune: bool = False) -> BipartiteGraph:
    """One local replicate as a partial BipartiteGraph.

    By default every edge incident to an item of the focus windows is drawn.
    """
    focus = tuple(sorted(set(int(f) for f in focus)))
    if not focus:
        raise ValueError("focus set must be non-empty")
    table = _local_tables(params, focus)
    s = sample_local(params, x, y, focus, 1, rng, prune=prune, table=table)
    return BipartiteGraph(params, table.horizon, table.item_horizon, as_weights(x), as_weights(y),
                          s.item, s.actor, focus=focus)


def local_actor_range(params: ModelParams, focus) -> tuple[int, int]:
    """Actors that can share an item with some focus actor."""
    return min(t_minus(params, f) for f in focus), max(t_plus(params, f) for f in focus)


# ---------------------------------------------------------------------------
# edge-list files
# ---------------------------------------------------------------------------

def write_edge_list(g: BipartiteGraph, path, *, seed: int, backend: str, extra: dict | None = None):
    """Write ``# key=value`` header lines, then ``i<TAB>j`` sorted by i then j."""
    header = {
        "a": repr(g.params.a),
        "b": repr(g.params.b),
        "tau": g.params.tau.kind,
        "nu": repr(g.params.tau.nu),
        "seed": str(seed),
        "t_max": str(g.t_max),
        "backend": backend,
    }
    for k, v in (extra or {}).items():
        header[k] = str(v)
    lines = [f"# {k}={v}" for k, v in header.items()]
    body = "\n".join(f"{i}\t{j}" for i, j in zip(g.items.tolist(), g.actors.tolist()))
    text = "\n".join(lines) + "\n" + (body + "\n" if body else "")
    Path(path).write_text(text)


def read_edge_list(path):
    """Return ``(header, items, actors)`` from an edge-list file."""
    header, items, actors = {}, [], []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            header[key.strip()] = val.strip()
        elif line.strip():
            i, j = line.split("\t")
            items.append(int(i))
            actors.append(int(j))
    return header, np.asarray(items, dtype=np.int64), np.asarray(actors, dtype=np.int64)


def params_from_header(header: dict) -> ModelParams:
    return ModelParams(float(header["a"]), float(header["b"]),
                       Tau(header["tau"], float(header.get("nu", 1.0))))
