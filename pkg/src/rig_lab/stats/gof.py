"""Distances between pmfs and binomial confidence intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class GofResult:
    tv: float
    chi2: float | None
    p_value: float | None
    dof: int = 0

    def as_dict(self) -> dict:
        return {"tv": self.tv, "chi_square": self.chi2, "p_value": self.p_value, "dof": self.dof}


def _with_tail(p, tail, size):
    """Pad ``p`` to ``size`` entries and append its tail bucket."""
    out = np.zeros(size + 1)
    p = np.asarray(p, dtype=float)
    out[: len(p)] = p
    out[size] = tail if tail is not None else max(0.0, 1.0 - p.sum())
    return out


def align(p, q, p_tail=None, q_tail=None):
    """Both pmfs on a common support 0..m-1 plus one shared tail bucket."""
    if len(p) == 0 or len(q) == 0:
        raise ValueError("gof needs non-empty pmfs")
    m = max(len(p), len(q))
    return _with_tail(p, p_tail, m), _with_tail(q, q_tail, m)


def total_variation(p, q, p_tail=None, q_tail=None) -> float:
    """Half the L1 distance, with the tail masses merged into one extra cell."""
    pp, qq = align(p, q, p_tail, q_tail)
    return 0.5 * float(np.abs(pp - qq).sum())


def merge_small_cells(expected: np.ndarray, observed: np.ndarray, min_expected: float = MIN_EXPECTED):
    """Pool the upper cells (and any other thin cell) until each expects at least ``min_expected``."""
    e_out, o_out = [], []
    e_acc = o_acc = 0.0
    for e, o in zip(expected, observed):
        e_acc += e
        o_acc += o
        if e_acc >= min_expected:
            e_out.append(e_acc)
            o_out.append(o_acc)
            e_acc = o_acc = 0.0
    if e_acc > 0 or o_acc > 0:
        if e_out:
            e_out[-1] += e_acc
            o_out[-1] += o_acc
        else:
            e_out.append(e_acc)
            o_out.append(o_acc)
    return np.array(e_out), np.array(o_out)


def gof_metrics(p, q, n: int | None = None, p_tail=None, q_tail=None) -> GofResult:
    """TV between empirical ``p`` and reference ``q``; chi-square when n is given.

    ``p`` holds frequencies from n samples. Cells whose expected count falls
    below five are pooled with their neighbours before the chi-square test.
    """
    pp, qq = align(p, q, p_tail, q_tail)
    tv = 0.5 * float(np.abs(pp - qq).sum())
    if n is None:
        return GofResult(tv, None, None)
    if n <= 0:
        raise ValueError("chi-square needs n > 0 samples")
    expected, observed = merge_small_cells(n * qq, n * pp)
    dof = len(expected) - 1
    if dof < 1:
        return GofResult(tv, 0.0, 1.0, 0)
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    return GofResult(tv, chi2, float(stats.chi2.sf(chi2, dof)), dof)


def empirical_pmf(samples, r_max: int | None = None):
    """Frequencies of 0..r_max and the fraction above r_max."""
    samples = np.asarray(samples, dtype=np.int64)
    if not len(samples):
        raise ValueError("empirical pmf of an empty sample")
    top = int(samples.max()) if r_max is None else r_max
    counts = np.bincount(np.minimum(samples, top + 1), minlength=top + 2)
    n = len(samples)
    return counts[: top + 1] / n, counts[top + 1] / n


def wilson_ci(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("wilson_ci needs trials > 0")
    if not 0 <= successes <= trials:
        raise ValueError("need 0 <= successes <= trials")
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    z = stats.norm.ppf(0.5 + level / 2)
    ph = successes / trials
    den = 1 + z * z / trials
    centre = (ph + z * z / (2 * trials)) / den
    half = z * math.sqrt(ph * (1 - ph) / trials + z * z / (4 * trials * trials)) / den
    lo, hi = centre - half, centre + half
    if successes == 0:
        lo = 0.0
    if successes == trials:
        hi = 1.0
    return max(0.0, lo), min(1.0, hi)


def mean_ci(values, level: float = 0.95) -> tuple[float, float, float]:
    """(mean, lo, hi) by the normal approximation."""
    v = np.asarray(values, dtype=float)
    m = float(v.mean())
    if len(v) < 2:
        return m, m, m
    z = stats.norm.ppf(0.5 + level / 2)
    se = float(v.std(ddof=1)) / math.sqrt(len(v))
    return m, m - z * se, m + z * se


def pearson_ci(r: float, n: int, level: float = 0.95) -> tuple[float, float]:
    """Fisher z interval for a correlation from n pairs."""
    if n <= 3 or not math.isfinite(r):
        return -1.0, 1.0
    z = math.atanh(max(-0.999999999, min(0.999999999, r)))
    half = stats.norm.ppf(0.5 + level / 2) / math.sqrt(n - 3)
    return math.tanh(z - half), math.tanh(z + half)
