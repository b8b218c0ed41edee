"""Weight laws for items (X) and actors (Y).

Moments are closed form per kind; they are never estimated by sampling.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

KINDS = ("constant", "pareto", "lognormal", "discrete")


class InfiniteMomentError(ArithmeticError):
    """Raised when a requested moment of a weight law diverges."""


@dataclass(frozen=True)
class WeightDistribution:
    kind: str
    c: float = 0.0
    alpha: float = 0.0
    xmin: float = 0.0
    mu: float = 0.0
    sigma: float = 0.0
    values: tuple = ()
    probs: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "constant":
            if not self.c >= 0:
                raise ValueError(f"constant weight must be >= 0, got {self.c}")
        elif self.kind == "pareto":
            if not (self.alpha > 0 and self.xmin > 0):
                raise ValueError("pareto requires alpha > 0 and xmin > 0")
        elif self.kind == "lognormal":
            if not self.sigma >= 0:
                raise ValueError("lognormal requires sigma >= 0")
        else:
            if len(self.values) == 0 or len(self.values) != len(self.probs):
                raise ValueError("discrete table needs matching non-empty values and probs")
            if any(v < 0 for v in self.values):
                raise ValueError("negative value in support of discrete table")
            if any(p < 0 for p in self.probs):
                raise ValueError("negative probability in discrete table")
            total = math.fsum(self.probs)
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"discrete probabilities sum to {total!r}, not 1 (probabilities sum != 1)")

    @property
    def is_degenerate(self) -> bool:
        return self.kind == "constant" or (self.kind == "lognormal" and self.sigma == 0)

    def __str__(self):
        if self.kind == "constant":
            return f"constant(c={self.c:g})"
        if self.kind == "pareto":
            return f"pareto(alpha={self.alpha:g}, xmin={self.xmin:g})"
        if self.kind == "lognormal":
            return f"lognormal(mu={self.mu:g}, sigma={self.sigma:g})"
        pairs = ", ".join(f"{v:g}:{p:g}" for v, p in zip(self.values, self.probs))
        return f"discrete({pairs})"


def make_distribution(kind: str, **params) -> WeightDistribution:
    """Build and validate a weight law from a kind name and its parameters.

    ``discrete`` accepts either ``table=[(value, prob), ...]`` or separate
    ``values=`` / ``probs=`` sequences.
    """
    kind = kind.strip().lower()
    if kind == "discrete-table":
        kind = "discrete"
    if kind == "discrete" and "table" in params:
        table = params.pop("table")
        params["values"] = tuple(float(v) for v, _ in table)
        params["probs"] = tuple(float(p) for _, p in table)
    if kind == "constant" and "value" in params:
        params["c"] = params.pop("value")
    allowed = {
        "constant": {"c"},
        "pareto": {"alpha", "xmin"},
        "lognormal": {"mu", "sigma"},
        "discrete": {"values", "probs"},
    }
    if kind not in allowed:
        raise ValueError(f"unknown weight kind {kind!r}; expected one of {KINDS}")
    extra = set(params) - allowed[kind]
    if extra:
        raise ValueError(f"unexpected parameters for {kind}: {sorted(extra)}")
    missing = allowed[kind] - set(params)
    if missing:
        raise ValueError(f"missing parameters for {kind}: {sorted(missing)}")
    if kind == "discrete":
        params = {"values": tuple(float(v) for v in params["values"]),
                  "probs": tuple(float(p) for p in params["probs"])}
    else:
        params = {k: float(v) for k, v in params.items()}
    return WeightDistribution(kind=kind, **params)


_SPEC_RE = re.compile(r"^\s*([A-Za-z\-]+)\s*(?:\((.*)\))?\s*$")


def parse_distribution(text: str) -> WeightDistribution:
    """Parse config syntax such as ``pareto(alpha=3, xmin=1)``.

    Also accepted: ``constant(1)``, a bare number (constant law), and
    ``discrete(1:0.5, 2:0.5)``.
    """
    text = text.strip()
    try:
        return make_distribution("constant", c=float(text))
    except ValueError:
        pass
    m = _SPEC_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse weight distribution {text!r}")
    kind, body = m.group(1).lower(), (m.group(2) or "").strip()
    if kind in ("discrete", "discrete-table"):
        table = []
        for part in filter(None, (p.strip() for p in body.split(","))):
            v, _, p = part.partition(":")
            if not _:
                raise ValueError(f"discrete entries must be value:prob, got {part!r}")
            table.append((float(v), float(p)))
        return make_distribution("discrete", table=table)
    params = {}
    for part in filter(None, (p.strip() for p in body.split(","))):
        key, eq, val = part.partition("=")
        if not eq:
            if kind == "constant" and not params:
                params["c"] = float(part)
                continue
            raise ValueError(f"expected key=value in {text!r}, got {part!r}")
        params[key.strip()] = float(val)
    return make_distribution(kind, **params)


def moment(dist: WeightDistribution, k: int) -> float:
    """Exact raw moment E W^k; diverging moments raise InfiniteMomentError."""
    if int(k) != k or k < 1:
        raise ValueError(f"moment order must be a positive integer, got {k}")
    k = int(k)
    if dist.kind == "constant":
        return dist.c ** k
    if dist.kind == "pareto":
        if dist.alpha <= k:
            raise InfiniteMomentError(f"pareto(alpha={dist.alpha:g}) has no finite moment of order {k}")
        return dist.alpha * dist.xmin ** k / (dist.alpha - k)
    if dist.kind == "lognormal":
        return math.exp(k * dist.mu + 0.5 * k * k * dist.sigma ** 2)
    return math.fsum(p * v ** k for v, p in zip(dist.values, dist.probs))


def has_moment(dist: WeightDistribution, k: int) -> bool:
    try:
        moment(dist, k)
    except InfiniteMomentError:
        return False
    return True


def sample(dist: WeightDistribution, lo: int, hi: int, rng: np.random.Generator) -> np.ndarray:
    """One iid draw per index in ``[lo, hi]``; entry ``m`` belongs to index ``lo + m``."""
    if hi < lo or lo < 1:
        raise ValueError(f"invalid index range [{lo}, {hi}]")
    n = hi - lo + 1
    if dist.kind == "constant":
        return np.full(n, dist.c)
    if dist.kind == "pareto":
        # numpy's pareto is the Lomax law; shift by one for the classical form
        return dist.xmin * (1.0 + rng.pareto(dist.alpha, size=n))
    if dist.kind == "lognormal":
        return rng.lognormal(dist.mu, dist.sigma, size=n)
    return rng.choice(np.asarray(dist.values), size=n, p=np.asarray(dist.probs))


def expectation(dist: WeightDistribution, f: Callable[[float], np.ndarray], *,
                rtol: float = 1e-9, atol: float = 1e-15):
    """E f(W) for a (possibly vector-valued) function f.

    Continuous laws are integrated adaptively over a finite transformed
    domain: pareto through its quantile function on (0, 1), lognormal
    through the standard normal variable. Returns ``(value, abs_error)``.
    """
    if dist.kind == "constant":
        return np.asarray(f(dist.c), dtype=float), 0.0
    if dist.kind == "discrete":
        total = sum(p * np.asarray(f(v), dtype=float) for v, p in zip(dist.values, dist.probs) if p > 0)
        return np.asarray(total, dtype=float), 0.0
    if dist.kind == "lognormal":
        if dist.sigma == 0:
            return np.asarray(f(math.exp(dist.mu)), dtype=float), 0.0

        def integrand(z):
            return np.asarray(f(math.exp(dist.mu + dist.sigma * z)), dtype=float) * math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)

        lim = 12.0 + abs(dist.sigma)  # tails beyond this are far below rtol
        val, err, info = integrate.quad_vec(integrand, -lim, lim, epsrel=rtol, epsabs=atol,
                                           limit=2000, full_output=True)
    else:
        # W = xmin * u^(-1/alpha), u uniform on (0, 1]
        def integrand(u):
            if u <= 0:
                return np.zeros_like(np.asarray(f(dist.xmin), dtype=float))
            return np.asarray(f(dist.xmin * u ** (-1.0 / dist.alpha)), dtype=float)

        val, err, info = integrate.quad_vec(integrand, 0.0, 1.0, epsrel=rtol, epsabs=atol,
                                           limit=2000, full_output=True)
    if not info.success:
        raise ArithmeticError(f"quadrature over {dist} did not converge (error estimate {err:.3g})")
    return np.asarray(val, dtype=float), float(err)
