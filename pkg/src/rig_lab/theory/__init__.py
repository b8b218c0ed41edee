"""Closed-form limits, exact finite-size oracles and leading-order asymptotics."""

from .asymptotics import (
    AssortativityConstants,
    TriangleAsymptotics,
    assortativity_constants,
    asymptotic_triangle,
    weight_moments,
)
from .constants import (
    GammaStar,
    LimitConstants,
    extrapolate_to_zero,
    gamma_linear,
    gamma_power,
    gamma_star,
    gamma_tilde,
    limit_constants,
    path_sum,
)
from .laws import (
    DegreeLimitLaw,
    Pmf,
    degree_limit_pgf,
    degree_limit_pmf,
    kappa_pmf,
    mixed_poisson_pmf,
    panjer_compound_poisson,
    poisson_pmf,
)
from .oracles import (
    TripleProbs,
    exact_pair_prob,
    exact_path2_pmf,
    exact_triple_probs,
    le_cam_bound,
    path2_mean,
    poisson_binomial_pmf,
)

__all__ = [
    "AssortativityConstants", "TriangleAsymptotics", "assortativity_constants", "asymptotic_triangle",
    "weight_moments", "GammaStar", "LimitConstants", "extrapolate_to_zero", "gamma_linear",
    "gamma_power", "gamma_star", "gamma_tilde", "limit_constants", "path_sum", "DegreeLimitLaw", "Pmf",
    "degree_limit_pgf", "degree_limit_pmf", "kappa_pmf", "mixed_poisson_pmf", "panjer_compound_poisson",
    "poisson_pmf", "TripleProbs", "exact_pair_prob", "exact_path2_pmf", "exact_triple_probs",
    "le_cam_bound", "path2_mean", "poisson_binomial_pmf",
]
