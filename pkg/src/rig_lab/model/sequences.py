"""Realized weight vectors and range-maximum queries over them."""

from __future__ import annotations

from functools import cached_property

import numpy as np


class SparseTableMax:
    """Range-maximum queries in O(1) after O(n log n) preprocessing.

    ``query(lo, hi)`` takes inclusive 0-based bounds and broadcasts over arrays.
    """

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or len(values) == 0:
            raise ValueError("sparse table needs a non-empty 1-d array")
        self.n = len(values)
        levels = [values]
        width = 1
        while 2 * width <= self.n:
            prev = levels[-1]
            levels.append(np.maximum(prev[:-width], prev[width:]))
            width *= 2
        self.levels = levels

    def query(self, lo, hi):
        lo, hi = np.asarray(lo, dtype=np.int64), np.asarray(hi, dtype=np.int64)
        if np.any(lo > hi) or np.any(lo < 0) or np.any(hi >= self.n):
            raise IndexError("range-maximum query out of bounds or empty")
        length = hi - lo + 1
        # exact floor(log2(length)) for integer lengths
        depth = (np.frexp(length.astype(float))[1] - 1).astype(np.int64)
        if depth.ndim == 0:
            d = int(depth)
            lvl = self.levels[d]
            return float(max(lvl[lo], lvl[hi - (1 << d) + 1]))
        out = np.empty(depth.shape)
        for d in np.unique(depth):
            m = depth == d
            lvl = self.levels[d]
            out[m] = np.maximum(lvl[lo[m]], lvl[hi[m] - (1 << int(d)) + 1])
        return out


class WeightSequence:
    """Weights w_k for indices k in [start, stop], or one constant for every k >= 1.

    Constant sequences need no storage, which matters for lifetime windows
    with tens of millions of items.
    """

    def __init__(self, values=None, *, start: int = 1, const: float | None = None):
        if (values is None) == (const is None):
            raise ValueError("give exactly one of values or const")
        if const is not None:
            if not const >= 0:
                raise ValueError("weights must be non-negative")
            self.const = float(const)
            self.values = None
            self.start, self.stop = 1, None
        else:
            values = np.asarray(values, dtype=float)
            if values.ndim != 1 or len(values) == 0:
                raise ValueError("weight vector must be a non-empty 1-d array")
            if np.any(values < 0) or not np.all(np.isfinite(values)):
                raise ValueError("weights must be finite and non-negative")
            if start < 1:
                raise ValueError("weight indices start at 1")
            self.const = None
            self.values = values
            self.start, self.stop = int(start), int(start) + len(values) - 1

    @classmethod
    def constant(cls, c: float) -> "WeightSequence":
        return cls(const=c)

    @classmethod
    def from_array(cls, values, start: int = 1) -> "WeightSequence":
        return cls(values, start=start)

    @property
    def is_constant(self) -> bool:
        return self.const is not None

    def covers(self, lo: int, hi: int) -> bool:
        if self.is_constant or hi < lo:
            return True
        return self.start <= lo and hi <= self.stop

    def _check(self, lo, hi):
        if not self.is_constant and (np.any(np.asarray(lo) < self.start) or np.any(np.asarray(hi) > self.stop)):
            raise IndexError(f"weights cover indices [{self.start}, {self.stop}] only")

    def __getitem__(self, idx):
        if self.is_constant:
            return np.full(np.shape(idx), self.const) if np.ndim(idx) else self.const
        idx = np.asarray(idx)
        self._check(idx, idx)
        out = self.values[idx - self.start]
        return out if out.ndim else float(out)

    @cached_property
    def _table(self) -> SparseTableMax:
        return SparseTableMax(self.values)

    @cached_property
    def _prefix(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.values)])

    def range_max(self, lo, hi):
        """Maximum weight over inclusive index ranges [lo, hi]."""
        if self.is_constant:
            return np.full(np.shape(lo), self.const) if np.ndim(lo) else self.const
        self._check(lo, hi)
        return self._table.query(np.asarray(lo) - self.start, np.asarray(hi) - self.start)

    def range_sum(self, lo, hi):
        if self.is_constant:
            return self.const * (np.asarray(hi) - np.asarray(lo) + 1)
        self._check(lo, hi)
        p = self._prefix
        return p[np.asarray(hi) - self.start + 1] - p[np.asarray(lo) - self.start]

    def as_dict(self) -> dict:
        if self.is_constant:
            return {"constant": self.const}
        return {"start": self.start, "stop": self.stop}

    def __repr__(self):
        if self.is_constant:
            return f"WeightSequence(const={self.const:g})"
        return f"WeightSequence([{self.start}..{self.stop}])"


def as_weights(obj) -> WeightSequence:
    """Coerce a scalar (constant weights) or 1-based array to a WeightSequence."""
    if isinstance(obj, WeightSequence):
        return obj
    if np.ndim(obj) == 0:
        return WeightSequence.constant(float(obj))
    return WeightSequence.from_array(obj)


def dyadic_blocks(seq: WeightSequence, lo, hi, *, max_ratio: float = 4.0, min_len: int = 16):
    """Split index ranges into blocks for envelope sampling.

    Each range [lo_r, hi_r] is first cut where the index doubles, so that
    1/sqrt(index) varies by at most sqrt(2) inside a block. Blocks of a
    non-constant sequence are halved further while their maximum weight
    exceeds ``max_ratio`` times their mean and they are longer than
    ``min_len``. Returns ``(row, block_lo, block_hi, block_max)`` arrays,
    sorted by row then position; empty ranges contribute nothing.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=np.int64))
    hi = np.atleast_1d(np.asarray(hi, dtype=np.int64))
    rows = np.flatnonzero(lo <= hi)
    cur = lo[rows].copy()
    end = hi[rows]
    out_r, out_lo, out_hi = [], [], []
    while len(rows):
        bhi = np.minimum(end, 2 * cur - 1)
        out_r.append(rows)
        out_lo.append(cur)
        out_hi.append(bhi)
        keep = bhi < end
        rows, cur, end = rows[keep], bhi[keep] + 1, end[keep]
    if not out_r:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, empty, np.empty(0)
    r = np.concatenate(out_r)
    blo = np.concatenate(out_lo)
    bhi = np.concatenate(out_hi)
    bmax = np.asarray(seq.range_max(blo, bhi), dtype=float)
    if not seq.is_constant:
        done_r, done_lo, done_hi, done_max = [], [], [], []
        while len(r):
            length = bhi - blo + 1
            split = (length > min_len) & (bmax * length > max_ratio * seq.range_sum(blo, bhi))
            done_r.append(r[~split])
            done_lo.append(blo[~split])
            done_hi.append(bhi[~split])
            done_max.append(bmax[~split])
            r, blo, bhi = r[split], blo[split], bhi[split]
            mid = (blo + bhi) // 2
            r = np.concatenate([r, r])
            blo, bhi = np.concatenate([blo, mid + 1]), np.concatenate([mid, bhi])
            bmax = np.asarray(seq.range_max(blo, bhi), dtype=float) if len(r) else np.empty(0)
        r = np.concatenate(done_r)
        blo = np.concatenate(done_lo)
        bhi = np.concatenate(done_hi)
        bmax = np.concatenate(done_max)
    order = np.lexsort((blo, r))
    return r[order], blo[order], bhi[order], bmax[order]
