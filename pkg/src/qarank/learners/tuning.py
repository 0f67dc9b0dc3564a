"""Budgeted grid search scored by mean AUC over repeated stratified CV."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit

from qarank.evaluation.metrics import auc_score
from qarank.model import stratified_folds

FoldFn = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class TuningResult:
    best: dict
    best_mean_auc: float
    trace: list[dict]


def candidate_grid(family: str, budget: int, base: dict | None = None) -> list[dict]:
    """Configurations to evaluate; budget 1 is the untuned default alone."""
    from qarank.learners import DEFAULTS, LADDERS

    if budget < 1:
        raise ValueError("tuning budget must be >= 1")
    start = dict(DEFAULTS[family])
    start.update(base or {})
    ladder = {k: v[:budget] for k, v in LADDERS[family].items() if k not in (base or {})}
    if budget == 1 or not ladder:
        return [start]
    keys = sorted(ladder)
    grid = []
    for combo in itertools.product(*(ladder[k] for k in keys)):
        cfg = dict(start)
        cfg.update(zip(keys, combo))
        grid.append(cfg)
    return grid


def cv_splits(y: np.ndarray, k: int, repeats: int, seed: int, groups=None) -> list[tuple[np.ndarray, np.ndarray]]:
    """(train, test) index pairs for ``repeats`` rounds of stratified k-fold."""
    from qarank.model import grouped_stratified_folds

    out = []
    for r in range(repeats):
        rseed = int(np.random.SeedSequence([seed, r]).generate_state(1)[0])
        folds = (stratified_folds(y, k, rseed) if groups is None
                 else grouped_stratified_folds(y, groups, k, rseed))
        for f in range(k):
            test = folds[f]
            train = np.sort(np.concatenate([folds[j] for j in range(k) if j != f]))
            out.append((train, test))
    return out


def _slice_fn(X: np.ndarray) -> FoldFn:
    return lambda tr, te: (X[tr], X[te])


def tune(spec_or_family, X, y, budget: int = 5, cv: tuple[int, int] = (10, 1), seed: int = 0,
         feature_names: Sequence[str] | None = None, fold_fn: FoldFn | None = None,
         splits: list | None = None) -> TuningResult:
    """Evaluate every grid configuration on the same folds; keep the best mean AUC.

    ``fold_fn(train_idx, test_idx)`` may rebuild fold-dependent features
    (e.g. the vocabulary model); by default rows of ``X`` are sliced.
    Ties keep the earlier grid entry.
    """
    from qarank.learners import LearnerSpec, train

    base = spec_or_family if isinstance(spec_or_family, LearnerSpec) else LearnerSpec(spec_or_family)
    y = np.asarray(y, dtype=bool)
    X = None if X is None else np.asarray(X, dtype=float)
    fold_fn = fold_fn or _slice_fn(X)
    splits = splits if splits is not None else cv_splits(y, cv[0], cv[1], seed)
    grid = candidate_grid(base.family, budget, {k: v for k, v in base.hyperparameters.items()
                                                 if k not in _tuned(base.family)})
    scores: dict[int, list[float]] = {i: [] for i in range(len(grid))}

    staged = base.family == "gbt" and len(grid) > 1
    groups = _stage_groups(grid) if staged else {i: [i] for i in range(len(grid))}
    for tr, te in splits:
        Xtr, Xte = fold_fn(tr, te)
        for lead, members in groups.items():
            cfg = grid[lead]
            if staged:
                top = max(grid[i]["n_trees"] for i in members)
                m = train(base.with_params(**{**cfg, "n_trees": top}), Xtr, y[tr], feature_names)
                dec = m.estimator.staged_decision(Xte, [grid[i]["n_trees"] for i in members])
                for i in members:
                    scores[i].append(auc_score(expit(dec[grid[i]["n_trees"]]), y[te]))
            else:
                m = train(base.with_params(**cfg), Xtr, y[tr], feature_names)
                scores[lead].append(auc_score(m.score(Xte), y[te]))

    trace = []
    for i, cfg in enumerate(grid):
        s = np.array(scores[i])
        trace.append({"params": cfg, "mean_auc": float(s.mean()),
                      "sd_auc": float(s.std(ddof=1)) if len(s) > 1 else 0.0})
    best = max(range(len(grid)), key=lambda i: (trace[i]["mean_auc"], -i))
    return TuningResult(grid[best], trace[best]["mean_auc"], trace)


def _tuned(family: str) -> set[str]:
    from qarank.learners import LADDERS

    return set(LADDERS[family])


def _stage_groups(grid: list[dict]) -> dict[int, list[int]]:
    """Group gbt configs that differ only in n_trees (one fit serves all)."""
    groups: dict[tuple, list[int]] = {}
    for i, cfg in enumerate(grid):
        key = tuple(sorted((k, v) for k, v in cfg.items() if k != "n_trees"))
        groups.setdefault(key, []).append(i)
    return {members[0]: members for members in groups.values()}
