"""Learner specifications, training, scoring, persistence and tuning."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from qarank.learners.gbt import GradientBoostedTrees
from qarank.learners.linear import LogisticRegression
from qarank.learners.simple import (
    FastestRule,
    GaussianNaiveBayes,
    KNearestNeighbours,
    TopVotedRule,
    TrivialRejector,
)

MODEL_FORMAT_VERSION = 1

FAMILIES = {
    "gbt": GradientBoostedTrees,
    "logistic_regression": LogisticRegression,
    "naive_bayes": GaussianNaiveBayes,
    "knn": KNearestNeighbours,
    "trivial_rejector": TrivialRejector,
    "rule_top_voted": TopVotedRule,
    "rule_fastest": FastestRule,
}

# Untuned configurations; the gbt default mirrors gbm's out-of-the-box settings.
DEFAULTS: dict[str, dict] = {
    "gbt": {"n_trees": 100, "max_depth": 1, "shrinkage": 0.1, "min_obs_in_node": 10,
            "second_order": False},
    "logistic_regression": {"l2_penalty": 1e-4, "epochs": 300, "learning_rate": 0.5},
    "naive_bayes": {},
    "knn": {"k": 5},
    "trivial_rejector": {},
    "rule_top_voted": {},
    "rule_fastest": {},
}

# Candidate ladders for tuning; a budget b keeps the first b entries of each.
LADDERS: dict[str, dict[str, list]] = {
    "gbt": {"n_trees": [50, 100, 150, 200, 250], "max_depth": [1, 2, 3, 4, 5]},
    "logistic_regression": {"l2_penalty": [1e-4, 1e-3, 1e-2, 1e-1, 1.0]},
    "naive_bayes": {},
    "knn": {"k": [5, 7, 9, 11, 13]},
    "trivial_rejector": {},
    "rule_top_voted": {},
    "rule_fastest": {},
}


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class LearnerSpec:
    family: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0
    name: str | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown learner family {self.family!r}")
        unknown = set(self.hyperparameters) - set(_legal_params(self.family))
        if unknown:
            raise ValueError(f"{self.family}: unknown hyperparameters {sorted(unknown)}")
        # constructing validates ranges
        self.build()

    @property
    def label(self) -> str:
        return self.name or self.family

    @property
    def params(self) -> dict:
        p = dict(DEFAULTS[self.family])
        p.update(self.hyperparameters)
        return p

    def build(self):
        return FAMILIES[self.family](seed=self.seed, **self.params)

    def with_params(self, **params) -> LearnerSpec:
        hp = dict(self.hyperparameters)
        hp.update(params)
        return LearnerSpec(self.family, hp, self.seed, self.name)

    def as_dict(self) -> dict:
        return {"family": self.family, "hyperparameters": dict(sorted(self.params.items())),
                "seed": self.seed, "name": self.label}

    @classmethod
    def from_dict(cls, d: dict) -> LearnerSpec:
        return cls(d["family"], dict(d.get("hyperparameters", {})), int(d.get("seed", 0)), d.get("name"))


def _legal_params(family: str) -> tuple[str, ...]:
    extra = {
        "gbt": ("l2", "subsample", "max_bins"),
        "naive_bayes": ("var_smoothing",),
    }
    return tuple(DEFAULTS[family]) + extra.get(family, ())


@dataclass
class TrainedModel:
    spec: LearnerSpec
    estimator: object
    feature_names: tuple[str, ...]
    training_meta: dict = field(default_factory=dict)

    def score(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != len(self.feature_names):
            raise ValueError(f"expected {len(self.feature_names)} features, got {X.shape[1]}")
        return np.clip(self.estimator.predict_proba(X), 0.0, 1.0)

    def to_json(self) -> str:
        return json.dumps({
            "format": MODEL_FORMAT_VERSION,
            "spec": self.spec.as_dict(),
            "feature_names": list(self.feature_names),
            "training_meta": self.training_meta,
            "state": self.estimator.state(),
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> TrainedModel:
        d = json.loads(text)
        if d.get("format") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format {d.get('format')}")
        spec = LearnerSpec.from_dict(d["spec"])
        est = spec.build()
        est.load_state(d["state"])
        return cls(spec, est, tuple(d["feature_names"]), d.get("training_meta", {}))


def _validate(X: np.ndarray, y: np.ndarray, feature_names: Sequence[str]) -> None:
    if X.ndim != 2 or len(X) != len(y):
        raise TrainingError(f"feature matrix {X.shape} does not match {len(y)} labels")
    if len(feature_names) != X.shape[1]:
        raise TrainingError(f"{len(feature_names)} names for {X.shape[1]} columns")
    bad = ~np.isfinite(X).all(axis=0)
    if bad.any():
        cols = [feature_names[i] for i in np.flatnonzero(bad)]
        raise TrainingError(f"non-finite values in column(s): {', '.join(cols)}")
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == len(y):
        raise TrainingError("training labels contain a single class")


def train(spec: LearnerSpec, X, y, feature_names: Sequence[str] | None = None,
          meta: dict | None = None) -> TrainedModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=bool)
    names = tuple(feature_names) if feature_names is not None else tuple(f"x{i}" for i in range(X.shape[1]))
    _validate(X, y, names)
    est = spec.build()
    if hasattr(est, "bind"):
        est.bind(names)
    t0 = time.perf_counter()
    est.fit(X, y)
    info = dict(meta or {})
    info["wall_time"] = time.perf_counter() - t0
    return TrainedModel(spec, est, names, info)


def score(m: TrainedModel, row) -> float | np.ndarray:
    """Acceptance probability for one row (scalar) or a matrix (vector)."""
    arr = np.asarray(row, dtype=float)
    out = m.score(arr)
    return float(out[0]) if arr.ndim == 1 else out


from qarank.learners.tuning import TuningResult, candidate_grid, tune  # noqa: E402

__all__ = [
    "FAMILIES", "DEFAULTS", "LADDERS", "LearnerSpec", "TrainedModel", "TrainingError",
    "train", "score", "tune", "candidate_grid", "TuningResult", "GradientBoostedTrees",
    "LogisticRegression",
]
