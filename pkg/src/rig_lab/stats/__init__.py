"""Monte Carlo estimators, goodness-of-fit metrics and reports."""

from .experiments import (
    chunk_rng,
    mc_assortativity,
    mc_clustering,
    mc_degree_distribution,
    run_chunks,
    staged_pair_sample,
)
from .gof import GofResult, empirical_pmf, gof_metrics, mean_ci, pearson_ci, total_variation, wilson_ci
from .report import CSV_COLUMNS, ExperimentReport

__all__ = [
    "chunk_rng", "mc_assortativity", "mc_clustering", "mc_degree_distribution", "run_chunks",
    "staged_pair_sample", "GofResult", "empirical_pmf", "gof_metrics", "mean_ci", "pearson_ci",
    "total_variation", "wilson_ci", "CSV_COLUMNS", "ExperimentReport",
]
