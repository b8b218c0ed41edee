"""Lifetime functions, integer windows and the edge probability.

Indices start at 1 for actors (v_1, v_2, ...) and items (w_1, w_2, ...).
An actor j may link to item i only when ceil(a*tau(j)) <= i <= floor(b*tau(j)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

TAU_KINDS = ("linear", "power", "t-log-t", "exp-log-squared", "exp")

# boundary values within this relative distance of an integer count as that integer
SNAP_RTOL = 1e-9
INT_LIMIT = 2 ** 62


@dataclass(frozen=True)
class Tau:
    """Nondecreasing lifetime scale tau(t) on t = 1, 2, ..."""

    kind: str = "linear"
    nu: float = 1.0

    def __post_init__(self):
        if self.kind not in TAU_KINDS:
            raise ValueError(f"unknown tau kind {self.kind!r}; expected one of {TAU_KINDS}")
        if self.kind == "power" and not self.nu > 1:
            raise ValueError(f"power tau requires nu > 1, got {self.nu}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            if self.kind == "linear":
                out = t
            elif self.kind == "power":
                out = t ** self.nu
            elif self.kind == "t-log-t":
                out = t * np.log(t)
            elif self.kind == "exp-log-squared":
                out = np.exp(np.log(t) ** 2)
            else:
                out = np.exp(t)
        return out if out.ndim else float(out)

    def __str__(self):
        return f"power(nu={self.nu:g})" if self.kind == "power" else self.kind


def tau_eval(tau: Tau, t: int) -> float:
    if t < 1:
        raise ValueError(f"tau is defined on t >= 1, got {t}")
    return tau(t)


def tau_floor_inverse(tau: Tau, v: float) -> int:
    """Largest integer t >= 1 with tau(t) <= v."""
    if v < tau(1):
        raise ValueError(f"tau_floor_inverse needs v >= tau(1) = {tau(1)}, got {v}")
    if tau.kind == "linear":
        return int(math.floor(_snap(v)))
    if tau.kind == "power":
        r = max(1, int(math.floor(v ** (1.0 / tau.nu))))
        while tau(r + 1) <= v:
            r += 1
        while r > 1 and tau(r) > v:
            r -= 1
        return r
    lo, hi = 1, 2
    while tau(hi) <= v:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tau(mid) <= v:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class ModelParams:
    a: float
    b: float
    tau: Tau = Tau()

    def __post_init__(self):
        if not (self.a > 0 and self.b > self.a):
            raise ValueError(f"model requires 0 < a < b, got a={self.a}, b={self.b}")

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "tau": self.tau.kind, "nu": self.tau.nu}


def _snap(x):
    with np.errstate(invalid="ignore"):
        r = np.rint(x)
        close = np.abs(x - r) <= SNAP_RTOL * np.maximum(1.0, np.abs(x))
    return np.where(close, r, x)


def _to_int(x):
    if np.ndim(x) == 0:
        # an overflowing tau yields an infinite boundary, which still compares correctly
        return int(x) if math.isfinite(x) else float(x)
    if np.any(np.abs(x) > INT_LIMIT):
        raise OverflowError("window boundary exceeds the integer index range")
    return x.astype(np.int64)


def item_window(params: ModelParams, j):
    """Item window T_j = [ceil(a tau(j)), floor(b tau(j))]; empty when lo > hi.

    Works elementwise on arrays of actor indices. Items start at 1, so the
    lower end is never below 1.
    """
    tj = params.tau(j)
    lo = np.maximum(np.ceil(_snap(params.a * np.asarray(tj))), 1.0)
    hi = np.floor(_snap(params.b * np.asarray(tj)))
    return _to_int(lo), _to_int(hi)


def _first_true(pred, lo: int, hi: int | None) -> int:
    """Smallest j in [lo, hi] with monotone pred(j) true; hi + 1 when none."""
    if hi is None:
        hi = lo
        while not pred(hi):
            hi *= 2
    elif not pred(hi):
        return hi + 1
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def actor_window(params: ModelParams, i: int, actor_horizon: int | None = None):
    """Actors whose window contains item i, as an interval (lo, hi) of j.

    Both window ends are nondecreasing in j, so the set is an interval found
    by bisection. ``actor_horizon`` caps j; None means no cap.
    """
    if i < 1:
        raise ValueError(f"item index must be >= 1, got {i}")
    jlo = _first_true(lambda j: item_window(params, j)[1] >= i, 1, actor_horizon)
    # last j with lo(j) <= i, i.e. first j with lo(j) > i, minus one
    jhi = _first_true(lambda j: item_window(params, j)[0] > i, 1, actor_horizon) - 1
    if actor_horizon is not None:
        jhi = min(jhi, actor_horizon)
    return jlo, jhi


def _nonempty(params, j):
    lo, hi = item_window(params, j)
    return lo <= hi


def t_minus(params: ModelParams, t: int) -> int:
    """Oldest actor whose window meets T_t."""
    lo_t, hi_t = item_window(params, t)
    if lo_t > hi_t:
        raise ValueError(f"actor {t} has an empty window")
    j = _first_true(lambda j: item_window(params, j)[1] >= lo_t, 1, t)
    while not _nonempty(params, j):
        j += 1
    return j


def t_plus(params: ModelParams, t: int) -> int:
    """Youngest actor whose window meets T_t."""
    lo_t, hi_t = item_window(params, t)
    if lo_t > hi_t:
        raise ValueError(f"actor {t} has an empty window")
    j = _first_true(lambda j: item_window(params, j)[0] > hi_t, t, None) - 1
    while not _nonempty(params, j):
        j -= 1
    return j


class WindowTable:
    """Precomputed item windows for actors 1..horizon, with vectorized lookups."""

    def __init__(self, params: ModelParams, horizon: int):
        if horizon < 1:
            raise ValueError("window table horizon must be >= 1")
        self.params = params
        self.horizon = int(horizon)
        j = np.arange(1, self.horizon + 1)
        self.lo, self.hi = item_window(params, j)

    def items(self, j):
        j = np.asarray(j)
        return self.lo[j - 1], self.hi[j - 1]

    def actors(self, i):
        """Interval of actors (within the horizon) whose windows contain item(s) i."""
        i = np.asarray(i)
        jlo = np.searchsorted(self.hi, i, side="left") + 1
        jhi = np.searchsorted(self.lo, i, side="right")
        return jlo, jhi

    @cached_property
    def item_horizon(self) -> int:
        return int(self.hi.max())


def edge_prob(x_i, y_j, i, j, params: ModelParams):
    """min{1, x_i y_j / sqrt(i j)} inside the window of actor j, 0 outside."""
    x_i, y_j = np.asarray(x_i, dtype=float), np.asarray(y_j, dtype=float)
    i, j = np.asarray(i), np.asarray(j)
    lo, hi = item_window(params, j)
    inside = (i >= lo) & (i <= hi)
    p = np.minimum(1.0, x_i * y_j / np.sqrt(i.astype(float) * j))
    out = np.where(inside, p, 0.0)
    return out if out.ndim else float(out)
