"""Shadow-feature wrapper selection with permutation AUC-drop importance.

Each repetition appends a row-shuffled copy ("shadow") of every feature,
trains on a stratified training part and permutes one column at a time on
the held-out part.  A feature's Z is mean(drop) / sd(drop) over
repetitions.  Features beating the best shadow are confirmed; those at or
below the median shadow are rejected; the rest stay tentative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from qarank.evaluation import auc_score
from qarank.features import FeatureTable
from qarank.learners import LearnerSpec, train
from qarank.model import Dataset, stratified_folds

FoldFn = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class FeatureImportance:
    feature: str
    position: int
    z: float
    mean_drop: float
    sd_drop: float
    status: str
    delta_position: int | None = None
    delta_z: float | None = None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class SelectionResult:
    ranking: list[FeatureImportance]
    shadow_max_z: float
    shadow_median_z: float
    drops: dict

    def by_feature(self) -> dict[str, FeatureImportance]:
        return {f.feature: f for f in self.ranking}

    def confirmed(self) -> list[str]:
        return [f.feature for f in self.ranking if f.status == "confirmed"]


def _z(drops: np.ndarray) -> np.ndarray:
    mean = drops.mean(axis=0)
    sd = drops.std(axis=0, ddof=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = mean / sd
        # no spread: an exactly zero effect scores 0, a constant effect is unbounded
        return np.where(sd > 0, z, np.where(mean == 0, 0.0, np.sign(mean) * np.inf))


def select_features(data, y=None, feature_names: Sequence[str] | None = None,
                    learner: LearnerSpec | None = None, repetitions: int = 10, seed: int = 0,
                    holdout_folds: int = 3, fold_fn: FoldFn | None = None) -> SelectionResult:
    """Rank features by permutation importance against shadow features.

    ``data`` is a Dataset, a FeatureTable or a plain matrix (then ``y`` and
    ``feature_names`` are required).  With a Dataset the vocabulary feature
    is rebuilt from each repetition's training part.
    """
    if repetitions < 5:
        raise ValueError(f"need at least 5 repetitions to estimate an sd, got {repetitions}")
    learner = learner or LearnerSpec("gbt")
    if isinstance(data, Dataset):
        from qarank.harness.data import FoldFeatures

        ff = FoldFeatures(data)
        y, names, fold_fn, X = ff.y, ff.names, ff.fold, None
    elif isinstance(data, FeatureTable):
        X, y, names = data.X, data.labels, data.feature_names
    elif data is None:
        if fold_fn is None or feature_names is None or y is None:
            raise ValueError("without data, pass y, feature_names and fold_fn")
        X, names = None, feature_names
    else:
        X = np.asarray(data, dtype=float)
        names = tuple(feature_names) if feature_names is not None else tuple(f"x{i}" for i in range(X.shape[1]))
    y = np.asarray(y, dtype=bool)
    names = tuple(names)
    if fold_fn is None:
        fold_fn = lambda tr, te: (X[tr], X[te])  # noqa: E731
    F = len(names)
    drops = np.zeros((repetitions, 2 * F))
    for r in range(repetitions):
        rng = np.random.default_rng([seed, r])
        hold = stratified_folds(y, holdout_folds, int(rng.integers(2**32)))[0]
        mask = np.zeros(len(y), dtype=bool)
        mask[hold] = True
        tr, te = np.flatnonzero(~mask), hold
        Xtr, Xte = fold_fn(tr, te)
        # shadows shuffle each column independently over the whole sample
        perm = np.argsort(rng.random((len(y), F)), axis=0)
        full = np.empty((len(y), F))
        full[tr], full[te] = Xtr, Xte
        shadow = np.take_along_axis(full, perm, axis=0)
        A_tr = np.hstack([Xtr, shadow[tr]])
        A_te = np.hstack([Xte, shadow[te]])
        spec = LearnerSpec(learner.family, learner.hyperparameters, int(rng.integers(2**31)), learner.name)
        m = train(spec, A_tr, y[tr], names + tuple(f"shadow_{n}" for n in names))
        base = auc_score(m.score(A_te), y[te])
        for j in range(2 * F):
            col = A_te[:, j].copy()
            A_te[:, j] = col[rng.permutation(len(col))]
            drops[r, j] = base - auc_score(m.score(A_te), y[te])
            A_te[:, j] = col
    z = _z(drops)
    z_real, z_shadow = z[:F], z[F:]
    shadow_max = float(np.max(z_shadow))
    shadow_median = float(np.median(z_shadow))
    order = sorted(range(F), key=lambda j: (-z_real[j], names[j]))
    position = {names[j]: p for p, j in enumerate(order, 1)}
    zmap = dict(zip(names, z_real))
    ranking = []
    for j in order:
        n = names[j]
        status = ("confirmed" if z_real[j] > shadow_max
                  else "rejected" if z_real[j] <= shadow_median else "tentative")
        dp = dz = None
        if n.endswith("_ranked") and n[: -len("_ranked")] in position:
            b = n[: -len("_ranked")]
            dp = position[b] - position[n]
            dz = float(zmap[n] - zmap[b])
        ranking.append(FeatureImportance(n, position[n], float(z_real[j]), float(drops[:, j].mean()),
                                         float(drops[:, j].std(ddof=1)), status, dp, dz))
    return SelectionResult(ranking, shadow_max, shadow_median,
                           {n: drops[:, j].tolist() for j, n in enumerate(names)})
