"""Leading-order triangle and degree-correlation formulas (linear tau)."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from ..model.core import ModelParams, item_window
from ..weights import WeightDistribution, moment
from .constants import gamma_tilde

log = logging.getLogger(__name__)


def weight_moments(x_dist: WeightDistribution, y_dist: WeightDistribution,
                   x_orders=(1, 2, 3, 4), y_orders=(1, 2, 3)) -> dict:
    """{'a1': E X, 'a2': E X^2, ..., 'b1': E Y, ...}; raises on an infinite moment."""
    out = {f"a{k}": moment(x_dist, k) for k in x_orders}
    out.update({f"b{k}": moment(y_dist, k) for k in y_orders})
    return out


@dataclass(frozen=True)
class TriangleAsymptotics:
    """Leading-order terms; the vanishing corrections are dropped."""

    p_delta: float
    delta_t_su: float
    delta_s_tu: float
    delta_u_st: float
    alpha_t_su: float
    alpha_s_tu: float
    alpha_u_st: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__} | {"order": "leading"}


def _check_triple(params: ModelParams, s, t, u):
    if params.tau.kind != "linear":
        raise ValueError("triangle asymptotics are available for tau(t) = t only")
    if not 0 < s < t < u:
        raise ValueError(f"triple requires 0 < s < t < u, got {(s, t, u)}")
    lo_u, _ = item_window(params, u)
    _, hi_s = item_window(params, s)
    if lo_u > hi_s:
        raise ValueError(f"window condition ceil(a*u) <= floor(b*s) fails: {lo_u} > {hi_s}")


def asymptotic_triangle(params: ModelParams, moments: dict, s: int, t: int, u: int) -> TriangleAsymptotics:
    """Triangle probability and the three conditional clustering coefficients.

    ``moments`` needs a2, a3, b1, b2. Only the oldest and youngest actor
    enter p_delta; the middle one matters through the two-path terms.
    """
    _check_triple(params, s, t, u)
    a, b = params.a, params.b
    a2, a3, b1, b2 = (moments[k] for k in ("a2", "a3", "b1", "b2"))
    p_delta = a3 * b1 ** 3 / math.sqrt(s * t * u) * (2 / math.sqrt(a * u) - 2 / math.sqrt(b * s))

    lut, lts = math.log(u / t), math.log(t / s)
    # ceil(a u) <= floor(b s) forces a u <= b s, so lw >= 0
    lw = math.log(b * s / (a * u))
    d_t = lut * lts + lut * lw + lts * lw + lw * lw
    d_s_tu = lut * lw + lw * lw
    d_u_st = lts * lw + lw * lw
    c = a2 * a2 * b1 * b1 * b2

    def alpha(delta, weight):
        den = p_delta + c * weight * delta
        return p_delta / den if den > 0 else 0.0

    w_t = 1.0 / (t * math.sqrt(s * u))
    w_s = 1.0 / (s * math.sqrt(t * u))
    w_u = 1.0 / (u * math.sqrt(s * t))
    return TriangleAsymptotics(p_delta, d_t, d_s_tu, d_u_st,
                               alpha(d_t, w_t), alpha(d_s_tu, w_s), alpha(d_u_st, w_u))


@dataclass(frozen=True)
class AssortativityConstants:
    """Limits of the conditional degree moments given v_s ~ v_t, and r_st.

    ``r_st`` is None when delta2 - delta1^2 is not positive; ``diagnostic``
    then says why.
    """

    h: tuple
    delta1: float
    delta2: float
    cap_delta: float
    r_st: float | None
    a: float
    b: float
    diagnostic: str | None = None

    def theta(self, s: float, t: float) -> float:
        """(st)^{-1/2} ln(bs/(at)), the order of P(v_s ~ v_t) for s < t."""
        return math.log(self.b * s / (self.a * t)) / math.sqrt(s * t)

    def as_dict(self) -> dict:
        d = {f"h{k + 1}": v for k, v in enumerate(self.h)}
        d.update(delta1=self.delta1, delta2=self.delta2, cap_delta=self.cap_delta, r_st=self.r_st)
        if self.diagnostic:
            d["diagnostic"] = self.diagnostic
        return d


def assortativity_constants(moments: dict, a: float, b: float) -> AssortativityConstants:
    """h1..h7, the moment limits delta1, delta2, Delta and the correlation r_st.

    ``moments`` needs a2, a3, a4, b1, b2, b3.
    """
    if not 0 < a < b:
        raise ValueError(f"requires 0 < a < b, got a={a}, b={b}")
    a2, a3, a4, b1, b2, b3 = (moments[k] for k in ("a2", "a3", "a4", "b1", "b2", "b3"))
    g = gamma_tilde(a, b)
    w = math.sqrt(b) - math.sqrt(a)
    h = (
        a2 * b1 ** 2,
        a3 * b1 ** 3 * g,
        a2 ** 2 * b1 ** 2 * b2 * g * w,
        a4 * b1 ** 4 * g ** 2,
        a2 * a3 * b1 ** 3 * b2 * g ** 2 * w,
        a2 ** 3 * b1 ** 3 * b3 * g ** 2 * w ** 2,
        a2 ** 3 * b1 ** 2 * b2 ** 2 * g ** 2 * w ** 2,
    )
    h1, h2, h3, h4, h5, h6, h7 = h
    if h1 <= 0:
        return AssortativityConstants(h, math.nan, math.nan, math.nan, None, a, b,
                                      "h1 = a2 b1^2 is zero; degrees vanish")
    cap = (2 * h3 + 2 * h5 + 4 * (h6 - h7)) / h1
    d1 = 1 + (h2 + 2 * h3) / h1
    d2 = 1 + (3 * h2 + 6 * h3 + h4 + 6 * h5 + 4 * h6) / h1
    var = d2 - d1 * d1
    if var <= 0:
        msg = f"delta2 - delta1^2 = {var:.3g} is not positive; r_st withheld"
        log.warning(msg)
        return AssortativityConstants(h, d1, d2, cap, None, a, b, msg)
    # (var - Delta) / var equals 1 - Delta / var and rounds better
    return AssortativityConstants(h, d1, d2, cap, (var - cap) / var, a, b)
