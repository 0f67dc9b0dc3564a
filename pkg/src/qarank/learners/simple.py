"""Gaussian naive Bayes, k-nearest neighbours and the reference scorers."""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from qarank.learners.linear import standardizer


class GaussianNaiveBayes:
    def __init__(self, var_smoothing=1e-9, seed=0):
        self.var_smoothing = float(var_smoothing)
        self.seed = seed

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=bool)
        eps = self.var_smoothing * max(float(X.var(axis=0).max(initial=0.0)), 1.0)
        self.mu = np.vstack([X[~y].mean(axis=0), X[y].mean(axis=0)])
        self.var = np.vstack([X[~y].var(axis=0), X[y].var(axis=0)]) + eps
        self.log_prior = np.log(np.array([(~y).mean(), y.mean()]))
        return self

    def _joint(self, X):
        X = np.asarray(X, dtype=float)
        out = []
        for c in (0, 1):
            ll = -0.5 * np.sum(np.log(2 * np.pi * self.var[c]) + (X - self.mu[c]) ** 2 / self.var[c], axis=1)
            out.append(ll + self.log_prior[c])
        return np.column_stack(out)

    def predict_proba(self, X):
        j = self._joint(X)
        return np.exp(j[:, 1] - logsumexp(j, axis=1))

    def state(self):
        return {"mu": self.mu.tolist(), "var": self.var.tolist(), "log_prior": self.log_prior.tolist()}

    def load_state(self, s):
        self.mu = np.array(s["mu"])
        self.var = np.array(s["var"])
        self.log_prior = np.array(s["log_prior"])


class KNearestNeighbours:
    """Score = share of positives among the k nearest training rows.

    Distances are Euclidean on z-scored features; equal distances are
    resolved by training-row order.
    """

    def __init__(self, k=5, seed=0, chunk=512):
        k = int(k)
        if k < 1 or k % 2 == 0:
            raise ValueError(f"k must be a positive odd integer, got {k}")
        self.k = k
        self.seed = seed
        self.chunk = chunk

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        self.mean, self.sd = standardizer(X)
        self.Z = (X - self.mean) / self.sd
        self.y = np.asarray(y, dtype=bool)
        return self

    def predict_proba(self, X):
        Q = (np.asarray(X, dtype=float) - self.mean) / self.sd
        k = min(self.k, len(self.Z))
        sq = np.sum(self.Z**2, axis=1)
        out = np.empty(len(Q))
        for start in range(0, len(Q), self.chunk):
            q = Q[start : start + self.chunk]
            d = sq[None, :] - 2 * q @ self.Z.T + np.sum(q**2, axis=1)[:, None]
            nn = np.argsort(d, axis=1, kind="stable")[:, :k]
            out[start : start + len(q)] = self.y[nn].mean(axis=1)
        return out

    def state(self):
        return {"mean": self.mean.tolist(), "sd": self.sd.tolist(),
                "Z": self.Z.tolist(), "y": self.y.astype(int).tolist()}

    def load_state(self, s):
        self.mean = np.array(s["mean"])
        self.sd = np.array(s["sd"])
        self.Z = np.array(s["Z"])
        self.y = np.array(s["y"], dtype=bool)


class TrivialRejector:
    """Always predicts the majority (not accepted) class."""

    def __init__(self, seed=0):
        self.seed = seed

    def fit(self, X, y):
        return self

    def predict_proba(self, X):
        return np.zeros(len(X))

    def state(self):
        return {}

    def load_state(self, s):
        pass


class RankRule:
    """Scores an answer by its within-thread rank on one ranked feature.

    score = (answer_count - rank + 1) / answer_count, so rank 1 scores 1.0.
    """

    rank_feature = ""

    def __init__(self, seed=0):
        self.seed = seed
        self.columns = None

    def bind(self, feature_names):
        missing = [f for f in (self.rank_feature, "answer_count") if f not in feature_names]
        if missing:
            raise ValueError(f"{type(self).__name__} needs features {missing}")
        self.columns = (list(feature_names).index(self.rank_feature),
                        list(feature_names).index("answer_count"))

    def fit(self, X, y):
        return self

    def predict_proba(self, X):
        X = np.asarray(X, dtype=float)
        rank, n = X[:, self.columns[0]], X[:, self.columns[1]]
        return np.clip((n - rank + 1) / np.maximum(n, 1), 0.0, 1.0)

    def state(self):
        return {"columns": list(self.columns)}

    def load_state(self, s):
        self.columns = tuple(s["columns"])


class TopVotedRule(RankRule):
    rank_feature = "rating_score_ranked"


class FastestRule(RankRule):
    rank_feature = "age_ranked"


__all__ = ["GaussianNaiveBayes", "KNearestNeighbours", "TrivialRejector",
           "TopVotedRule", "FastestRule"]
