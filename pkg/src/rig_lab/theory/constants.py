"""Limit constants of the degree laws."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import digamma

from ..model.core import ModelParams, _snap, t_minus, t_plus


def gamma_linear(a: float, b: float) -> tuple[float, float]:
    """(gamma1, gamma2) for tau(t) = t."""
    return 2 * (math.sqrt(b) - math.sqrt(a)), 2 * (a ** -0.5 - b ** -0.5)


def gamma_power(a: float, b: float, nu: float) -> float:
    """Degree-limit constant for tau(t) = t**nu; nu = 1 gives gamma1 * gamma2."""
    e = 1.0 / (2.0 * nu)
    return 4 * nu * (b ** e - a ** e) * (a ** -e - b ** -e)


def gamma_tilde(a: float, b: float) -> float:
    return 2 * (a ** -0.5 - b ** -0.5)


# correction variable and default horizons used to extrapolate the path-sum limit
EXTRAPOLATION = {
    "linear": ("inv_sqrt", (10_000, 20_000, 40_000)),
    "power": ("inv_sqrt", (10_000, 20_000, 40_000)),
    "t-log-t": ("inv_log", (10_000, 100_000, 1_000_000)),
    "exp-log-squared": ("inv_log", (1_000, 10_000, 100_000, 1_000_000)),
    "exp": ("inv_t", (170, 340, 680)),
}

_VARIABLES = {
    "inv_sqrt": lambda t: t ** -0.5,
    "inv_log": lambda t: 1.0 / math.log(t),
    "inv_t": lambda t: 1.0 / t,
}


def path_sum(params: ModelParams, t: int, chunk: int = 4_000_000) -> float:
    """t^{-1/2} * sum over items i in T_t of i^{-1} * sum over actors j in T*_i of j^{-1/2}.

    Evaluated with the order of summation swapped: each actor j contributes
    j^{-1/2} times the harmonic sum over the items its window shares with
    T_t, taken exactly through the digamma function. The cost is linear in
    the number of actors meeting T_t, whatever the size of the windows.
    Windows are handled in floating point so that fast-growing tau works.
    """
    tau = params.tau
    tt = tau(float(t))
    lo_t = math.ceil(_snap(params.a * tt))
    hi_t = math.floor(_snap(params.b * tt))
    if lo_t > hi_t:
        return 0.0
    j0, j1 = t_minus(params, t), t_plus(params, t)
    total = 0.0
    for start in range(j0, j1 + 1, chunk):
        j = np.arange(start, min(j1 + 1, start + chunk), dtype=float)
        tj = np.asarray(tau(j))
        lo = np.maximum(np.maximum(np.ceil(_snap(params.a * tj)), 1.0), lo_t)
        hi = np.minimum(np.floor(_snap(params.b * tj)), hi_t)
        m = hi >= lo
        harmonic = digamma(hi[m] + 1.0) - digamma(lo[m])
        total += math.fsum(harmonic * j[m] ** -0.5)
    return total / math.sqrt(t)


@dataclass(frozen=True)
class GammaStar:
    value: float
    horizons: tuple
    raw: tuple
    variable: str

    @property
    def spread(self) -> float:
        """Distance between the extrapolated value and the last raw value."""
        return abs(self.value - self.raw[-1])


def extrapolate_to_zero(xs, ys) -> float:
    """Value at x = 0 of the interpolating polynomial (Neville's scheme)."""
    xs, p = list(map(float, xs)), list(map(float, ys))
    n = len(xs)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i])
    return p[0]


def gamma_star(params: ModelParams, horizons=None, variable: str | None = None) -> GammaStar:
    """Limit of ``path_sum`` as t grows, by polynomial extrapolation.

    The correction variable depends on how fast tau grows: 1/sqrt(t) for
    polynomial tau, 1/ln t for tau = t ln t and exp(ln^2 t), whose
    corrections are logarithmic, and 1/t for exp(t).
    """
    default_var, default_h = EXTRAPOLATION[params.tau.kind]
    variable = variable or default_var
    horizons = tuple(int(h) for h in (horizons or default_h))
    if len(horizons) < 2 or len(set(horizons)) != len(horizons):
        raise ValueError("need at least two distinct horizons")
    raw = tuple(path_sum(params, h) for h in horizons)
    xs = [_VARIABLES[variable](h) for h in horizons]
    return GammaStar(extrapolate_to_zero(xs, raw), horizons, raw, variable)


@dataclass(frozen=True)
class LimitConstants:
    gamma1: float
    gamma2: float
    gamma_tilde: float
    gamma: float | None = None
    gamma_star: float | None = None
    gamma_star_detail: GammaStar | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        d = {"gamma1": self.gamma1, "gamma2": self.gamma2, "gamma_tilde": self.gamma_tilde,
             "gamma": self.gamma, "gamma_star": self.gamma_star}
        if self.gamma_star_detail is not None:
            g = self.gamma_star_detail
            d["gamma_star_horizons"] = list(g.horizons)
            d["gamma_star_raw"] = list(g.raw)
            d["gamma_star_variable"] = g.variable
        return d


def limit_constants(params: ModelParams, with_gamma_star: bool = True, horizons=None) -> LimitConstants:
    """All closed-form constants, plus the extrapolated path-sum limit for
    non-linear tau (it is not used for tau(t) = t)."""
    a, b = params.a, params.b
    g1, g2 = gamma_linear(a, b)
    gamma = gamma_power(a, b, params.tau.nu) if params.tau.kind == "power" else None
    gs = None
    if with_gamma_star and params.tau.kind != "linear":
        gs = gamma_star(params, horizons)
    return LimitConstants(g1, g2, gamma_tilde(a, b), gamma,
                          None if gs is None else gs.value, gs)
