"""Scott-Knott clustering of treatment means with an effect-size merge step."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import chi2

from qarank.evaluation.stats import cohens_d_groups


@dataclass(frozen=True)
class Cluster:
    rank: int
    models: tuple[str, ...]
    mean: float


def _best_split(means: np.ndarray) -> tuple[int, float]:
    """Split point of a sorted mean sequence maximizing between-group SS."""
    k = len(means)
    total = means.sum()
    best_i, best_b0 = 1, -1.0
    for i in range(1, k):
        t1 = means[:i].sum()
        t2 = total - t1
        b0 = t1**2 / i + t2**2 / (k - i) - total**2 / k
        if b0 > best_b0 + 1e-15:
            best_i, best_b0 = i, b0
    return best_i, best_b0


def scott_knott(means: np.ndarray, mse_of_mean: float, dfr: int, alpha: float) -> list[list[int]]:
    """Recursive Scott-Knott partition of ``means`` (already sorted).

    ``mse_of_mean`` is the pooled within-treatment variance divided by the
    number of replicates, ``dfr`` its residual degrees of freedom.
    Returns index groups in input order.
    """

    def recurse(lo: int, hi: int) -> list[list[int]]:
        k = hi - lo
        if k < 2:
            return [list(range(lo, hi))]
        m = means[lo:hi]
        split, b0 = _best_split(m)
        s0 = (np.sum((m - m.mean()) ** 2) + dfr * mse_of_mean) / (k + dfr)
        if s0 <= 0 or b0 <= 0:
            return [list(range(lo, hi))]
        lam = math.pi / (2 * (math.pi - 2)) * b0 / s0
        if lam > chi2.ppf(1 - alpha, k / (math.pi - 2)):
            return recurse(lo, lo + split) + recurse(lo + split, hi)
        return [list(range(lo, hi))]

    return recurse(0, len(means))


def scott_knott_esd(
    samples: Mapping[str, Sequence[float]],
    alpha: float = 0.01,
    negligible_d: float = 0.2,
    esd: bool = True,
) -> list[Cluster]:
    """Cluster models by mean performance; cluster 1 holds the best models.

    After the Scott-Knott partition, adjacent clusters whose pooled-sd
    Cohen's d is below ``negligible_d`` are merged (smallest first) until
    every adjacent pair differs non-negligibly.
    """
    if len(samples) < 2:
        raise ValueError("Scott-Knott needs at least two models")
    names = list(samples)
    data = {k: np.asarray(v, dtype=float) for k, v in samples.items()}
    for k, v in data.items():
        if v.size < 2:
            raise ValueError(f"model {k!r} has fewer than two samples")
    # stable descending order by mean, names break exact ties
    order = sorted(names, key=lambda k: (-float(data[k].mean()), k))
    means = np.array([data[k].mean() for k in order])
    n_total = sum(v.size for v in data.values())
    dfr = n_total - len(order)
    ss_within = sum(float(np.sum((v - v.mean()) ** 2)) for v in data.values())
    mse = ss_within / dfr if dfr > 0 else 0.0
    n_harm = len(order) / sum(1.0 / data[k].size for k in order)
    groups = [[order[i] for i in g] for g in scott_knott(means, mse / n_harm, dfr, alpha)]

    if esd:
        while len(groups) > 1:
            ds = [
                abs(cohens_d_groups(np.concatenate([data[k] for k in groups[i]]),
                                    np.concatenate([data[k] for k in groups[i + 1]])))
                for i in range(len(groups) - 1)
            ]
            i = int(np.argmin(ds))
            if ds[i] >= negligible_d:
                break
            groups[i : i + 2] = [groups[i] + groups[i + 1]]

    return [
        Cluster(rank, tuple(g), float(np.mean(np.concatenate([data[k] for k in g]))))
        for rank, g in enumerate(groups, 1)
    ]


def cluster_of(clusters: Sequence[Cluster]) -> dict[str, int]:
    return {m: c.rank for c in clusters for m in c.models}
