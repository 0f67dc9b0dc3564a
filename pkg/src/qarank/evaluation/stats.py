"""Paired comparisons: DeLong's test for correlated AUCs, Wilcoxon
signed-rank and Cohen's d."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, rankdata

log = logging.getLogger(__name__)


class DegenerateTestError(ValueError):
    pass


@dataclass(frozen=True)
class DeLongResult:
    z: float
    p: float
    auc_a: float
    auc_b: float
    var: float


def placement_values(scores, labels) -> tuple[np.ndarray, np.ndarray, float]:
    """Structural components V10 (per positive) and V01 (per negative).

    V10[i] is the fraction of negatives that positive i outranks, ties
    counting one half; V01[j] likewise for negative j.  AUC is their mean.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=bool)
    pos, neg = s[y], s[~y]
    m, n = len(pos), len(neg)
    r_all = rankdata(s, method="average")
    r_pos = rankdata(pos, method="average")
    r_neg = rankdata(neg, method="average")
    # number of negatives below positive i (ties half) = overall rank - within-positive rank
    v10 = (r_all[y] - r_pos) / n
    v01 = 1.0 - (r_all[~y] - r_neg) / m
    return v10, v01, float(v10.mean())


def delong_test(scores_a, scores_b, labels) -> DeLongResult:
    """Two-sided paired test of AUC(a) = AUC(b) on the same instances."""
    y = np.asarray(labels, dtype=bool)
    m, n = int(y.sum()), int((~y).sum())
    if m < 2 or n < 2:
        raise ValueError(f"DeLong needs >= 2 positives and >= 2 negatives, got {m} and {n}")
    a10, a01, auc_a = placement_values(scores_a, y)
    b10, b01, auc_b = placement_values(scores_b, y)
    s10 = np.cov(np.vstack((a10, b10)))
    s01 = np.cov(np.vstack((a01, b01)))
    cov = s10 / m + s01 / n
    var = float(cov[0, 0] + cov[1, 1] - 2 * cov[0, 1])
    diff = auc_a - auc_b
    if var <= 0 or np.array_equal(a10, b10) and np.array_equal(a01, b01):
        if diff == 0:
            return DeLongResult(0.0, 1.0, auc_a, auc_b, 0.0)
        raise DegenerateTestError(f"zero variance with unequal AUCs ({auc_a} vs {auc_b})")
    z = diff / math.sqrt(var)
    return DeLongResult(z, float(2 * norm.sf(abs(z))), auc_a, auc_b, var)


@dataclass(frozen=True)
class WilcoxonResult:
    w: float
    p: float
    n: int
    exact: bool


def _exact_upper_tail(ranks: np.ndarray, w: float) -> tuple[float, float]:
    """P(W+ <= w) and P(W+ >= w) under random signs, by dynamic programming.

    Mid-ranks are multiples of 1/2, so doubled ranks index an integer table.
    """
    r2 = np.rint(2 * ranks).astype(np.int64)
    total = int(r2.sum())
    dist = np.zeros(total + 1)
    dist[0] = 1.0
    for r in r2:
        shifted = np.zeros_like(dist)
        shifted[r:] = dist[: total + 1 - r]
        dist = (dist + shifted) / 2
    w2 = int(round(2 * w))
    return float(dist[: w2 + 1].sum()), float(dist[w2:].sum())


def wilcoxon_signed_rank(paired_a, paired_b, exact_max_n: int = 20) -> WilcoxonResult:
    """Two-sided signed-rank test; zero differences are dropped.

    W is the sum of ranks of the positive differences.  Up to ``exact_max_n``
    non-zero differences the null distribution is enumerated exactly (ties
    use mid-ranks); beyond that a tie-corrected normal approximation is used.
    """
    d = np.asarray(paired_a, dtype=float) - np.asarray(paired_b, dtype=float)
    d = d[d != 0]
    if d.size == 0:
        raise DegenerateTestError("all paired differences are zero")
    n = d.size
    ranks = rankdata(np.abs(d), method="average")
    w = float(ranks[d > 0].sum())
    if n <= exact_max_n:
        lo, hi = _exact_upper_tail(ranks, w)
        return WilcoxonResult(w, min(1.0, 2 * min(lo, hi)), n, True)
    mean = n * (n + 1) / 4
    _, counts = np.unique(np.abs(d), return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24 - np.sum(counts**3 - counts) / 48
    z = (w - mean) / math.sqrt(var)
    return WilcoxonResult(w, float(min(1.0, 2 * norm.sf(abs(z)))), n, False)


def cohens_d(differences) -> float:
    """Paired effect size mean(diff) / sd(diff); +/-inf when sd is zero."""
    d = np.asarray(differences, dtype=float)
    if d.size < 2:
        raise ValueError("cohens_d needs at least two differences")
    mean, sd = float(d.mean()), float(d.std(ddof=1))
    if sd == 0:
        if mean == 0:
            raise DegenerateTestError("all differences are zero")
        log.warning("cohens_d: zero standard deviation, returning infinite effect")
        return math.copysign(math.inf, mean)
    return mean / sd


def cohens_d_groups(a, b) -> float:
    """Two-sample Cohen's d with pooled standard deviation (a minus b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = a.size, b.size
    diff = float(a.mean() - b.mean())
    dof = na + nb - 2
    pooled = 0.0
    if dof > 0:
        pooled = math.sqrt(((na - 1) * a.var(ddof=1 if na > 1 else 0)
                            + (nb - 1) * b.var(ddof=1 if nb > 1 else 0)) / dof)
    if pooled == 0:
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return diff / pooled
