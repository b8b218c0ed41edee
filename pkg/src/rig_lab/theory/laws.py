"""Limit laws of the degree d(v_t): mixed Poisson and compound Poisson.

For tau(t) = t the limit is a Poisson(lambda1)-indexed sum of iid kappa
variables, where lambda1 = gamma1 a1 Y and kappa is the size-biased shift of
a Poisson mixture with rate lambda2 = gamma2 b1 X. For faster growing tau
it is a Poisson mixture with rate gamma a2 b1 Y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ..model.core import ModelParams
from ..weights import InfiniteMomentError, WeightDistribution, expectation, has_moment, moment
from .constants import gamma_linear, gamma_power, gamma_star

PANJER_TOL = 1e-12


@dataclass(frozen=True)
class Pmf:
    """Probabilities of 0..len(probs)-1 plus the mass ``tail`` beyond."""

    probs: np.ndarray
    tail: float = 0.0

    @classmethod
    def from_probs(cls, probs) -> "Pmf":
        probs = np.clip(np.asarray(probs, dtype=float), 0.0, None)
        return cls(probs, max(0.0, 1.0 - math.fsum(probs)))

    @property
    def r_max(self) -> int:
        return len(self.probs) - 1

    def total(self) -> float:
        return math.fsum(self.probs) + self.tail

    def mean(self) -> float:
        return float(np.dot(np.arange(len(self.probs)), self.probs))

    def pgf(self, z: float) -> float:
        return float(np.polynomial.polynomial.polyval(z, self.probs))

    def __getitem__(self, r):
        return self.probs[r]

    def as_dict(self) -> dict:
        return {"pmf": self.probs.tolist(), "tail_mass": self.tail}


def poisson_pmf(lam: float, r_max: int) -> np.ndarray:
    if lam == 0:
        out = np.zeros(r_max + 1)
        out[0] = 1.0
        return out
    return stats.poisson.pmf(np.arange(r_max + 1), lam)


def mixed_poisson_pmf(law: WeightDistribution, r_max: int, scale: float = 1.0) -> Pmf:
    """P(Lambda = r) = E exp(-lambda) lambda^r / r! with lambda = scale * W, W ~ law."""
    if r_max < 0:
        raise ValueError("r_max must be >= 0")
    moment(law, 1)  # the mixing law needs a finite mean
    probs, _ = expectation(law, lambda w: poisson_pmf(scale * w, r_max))
    return Pmf.from_probs(probs)


def panjer_compound_poisson(lam: float, severity, r_max: int, tol: float = PANJER_TOL) -> np.ndarray:
    """Compound Poisson pmf by Panjer's recursion.

    ``severity`` holds the summand pmf on 0, 1, ...; it only needs entries up
    to ``r_max``. The recursion stops once the accumulated mass reaches
    ``1 - tol``; later entries are left at zero.
    """
    g = np.zeros(r_max + 1)
    sev = np.asarray(severity, dtype=float)[: r_max + 1]
    g[: len(sev)] = sev
    f = np.zeros(r_max + 1)
    f[0] = math.exp(lam * (g[0] - 1.0))
    k = np.arange(r_max + 1, dtype=float)
    kg = k * g
    acc = f[0]
    for n in range(1, r_max + 1):
        if acc >= 1.0 - tol:
            break
        f[n] = lam / n * np.dot(kg[1:n + 1], f[n - 1::-1][:n])
        acc += f[n]
    return f


def kappa_pmf(params: ModelParams, x_dist: WeightDistribution, b1: float, r_max: int) -> Pmf:
    """Size-biased shift of the Poisson mixture with rate gamma2 * b1 * X."""
    _, g2 = gamma_linear(params.a, params.b)
    a1 = moment(x_dist, 1)
    mean_l2 = g2 * b1 * a1
    if mean_l2 == 0:
        raise ZeroDivisionError("size-biasing needs E lambda2 > 0 (X or b1 is zero)")
    lam2 = mixed_poisson_pmf(x_dist, r_max + 1, scale=g2 * b1)
    r = np.arange(r_max + 1)
    probs = (r + 1) * lam2.probs[1:] / mean_l2
    return Pmf.from_probs(probs)


def default_regime(params: ModelParams) -> str:
    kind = params.tau.kind
    return {"linear": "linear", "power": "power"}.get(kind, "general")


@dataclass(frozen=True)
class DegreeLimitLaw:
    regime: str
    pmf: Pmf
    rate: float
    components: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"regime": self.regime, "rate_constant": self.rate, **self.pmf.as_dict(),
                "components": {k: v.as_dict() for k, v in self.components.items()}}


def _require(dist, k, name):
    if not has_moment(dist, k):
        raise InfiniteMomentError(f"{name} needs a finite moment of order {k} ({dist})")


def _power_rate(params: ModelParams, regime: str) -> float:
    if regime == "power":
        if params.tau.kind != "power":
            raise ValueError("power regime needs tau(t) = t**nu")
        return gamma_power(params.a, params.b, params.tau.nu)
    return gamma_star(params).value


def degree_limit_pmf(params: ModelParams, x_dist: WeightDistribution, y_dist: WeightDistribution,
                     regime: str | None = None, r_max: int = 60) -> DegreeLimitLaw:
    """Limit pmf of d(v_t) on 0..r_max with the remaining mass as tail.

    ``regime`` is ``linear`` (compound Poisson), ``power`` (Poisson mixture
    with the closed-form constant) or ``general`` (Poisson mixture with the
    extrapolated path-sum constant); by default it follows the tau kind.
    """
    regime = regime or default_regime(params)
    _require(x_dist, 2, "the degree limit")
    _require(y_dist, 1, "the degree limit")
    b1 = moment(y_dist, 1)
    if regime == "linear":
        if params.tau.kind != "linear":
            raise ValueError("linear regime needs tau(t) = t")
        g1, g2 = gamma_linear(params.a, params.b)
        a1 = moment(x_dist, 1)
        if a1 * b1 == 0:
            return DegreeLimitLaw(regime, Pmf.from_probs(poisson_pmf(0.0, r_max)), g1 * a1)
        kappa = kappa_pmf(params, x_dist, b1, r_max)
        lam1 = mixed_poisson_pmf(y_dist, r_max, scale=g1 * a1)
        probs, _ = expectation(y_dist, lambda y: panjer_compound_poisson(g1 * a1 * y, kappa.probs, r_max))
        return DegreeLimitLaw(regime, Pmf.from_probs(probs), g1 * a1,
                              {"lambda1": lam1, "kappa": kappa})
    if regime not in ("power", "general"):
        raise ValueError(f"unknown regime {regime!r}")
    a2 = moment(x_dist, 2)
    scale = _power_rate(params, regime) * a2 * b1
    lam3 = mixed_poisson_pmf(y_dist, r_max, scale=scale)
    return DegreeLimitLaw(regime, lam3, scale, {"lambda3": lam3})


def degree_limit_pgf(params: ModelParams, x_dist: WeightDistribution, y_dist: WeightDistribution,
                     z: float, regime: str | None = None) -> float:
    """Generating function of the degree limit, computed without any pmf.

    Linear regime: E_Y exp(lambda1(Y) (G_kappa(z) - 1)) with
    G_kappa(z) = E[lambda2 exp(lambda2 (z - 1))] / E[lambda2].
    """
    regime = regime or default_regime(params)
    b1 = moment(y_dist, 1)
    if regime == "linear":
        g1, g2 = gamma_linear(params.a, params.b)
        a1 = moment(x_dist, 1)
        if a1 * b1 == 0:
            return 1.0
        num, _ = expectation(x_dist, lambda x: g2 * b1 * x * math.exp(g2 * b1 * x * (z - 1.0)))
        g_kappa = float(num) / (g2 * b1 * a1)
        val, _ = expectation(y_dist, lambda y: math.exp(g1 * a1 * y * (g_kappa - 1.0)))
        return float(val)
    scale = _power_rate(params, regime) * moment(x_dist, 2) * b1
    val, _ = expectation(y_dist, lambda y: math.exp(scale * y * (z - 1.0)))
    return float(val)
