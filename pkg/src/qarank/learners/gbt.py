"""Binomial-deviance gradient boosting over depth-limited regression trees.

Features are pre-binned into at most ``max_bins`` ordered buckets; split
search works on per-bucket gradient histograms.  Two leaf/split rules are
available:

* first order (gbm style): trees fit the residuals y - p by least squares,
  leaves take the Newton value sum(r) / sum(p(1-p));
* second order (xgboost style): gain G^2/(H+lambda), leaves G/(H+lambda).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit


@dataclass
class Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            f = self.feature[node]
            inner = f >= 0
            if not inner.any():
                return self.value[node]
            idx = rows[inner]
            go_left = X[idx, f[inner]] <= self.threshold[node[inner]]
            node[idx] = np.where(go_left, self.left[node[inner]], self.right[node[inner]])

    def state(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_state(cls, s: dict) -> Tree:
        return cls(
            np.array(s["feature"], dtype=np.int64),
            np.array(s["threshold"], dtype=float),
            np.array(s["left"], dtype=np.int64),
            np.array(s["right"], dtype=np.int64),
            np.array(s["value"], dtype=float),
        )


def bin_thresholds(col: np.ndarray, max_bins: int) -> np.ndarray:
    """Split candidates ``x <= t`` with t drawn from the observed values
    (all distinct values, or quantiles when there are too many).

    Using observed values rather than midpoints makes the fitted partition
    invariant under any strictly increasing transform of a feature.
    """
    u = np.unique(col)
    if len(u) > max_bins:
        q = np.quantile(col, np.linspace(0, 1, max_bins + 1)[1:-1], method="lower")
        u = np.unique(np.concatenate((q, u[-1:])))
    return u[:-1]


class _Grower:
    def __init__(self, codes, n_thr, thresholds, max_bins, max_depth, min_obs, second_order, l2):
        self.codes = codes
        self.n, self.F = codes.shape
        self.B = max_bins
        self.offsets = (np.arange(self.F) * self.B).astype(np.int64)
        self.flat_codes = codes.astype(np.int64) + self.offsets
        self.thresholds = thresholds
        self.max_depth = max_depth
        self.min_obs = min_obs
        self.second_order = second_order
        self.l2 = l2
        valid = np.arange(self.B)[None, :] < n_thr[:, None]
        self.valid = valid

    def _histograms(self, idx, g, h):
        flat = self.flat_codes[idx].ravel()
        size = self.F * self.B
        cnt = np.bincount(flat, minlength=size).reshape(self.F, self.B)
        gs = np.bincount(flat, weights=np.repeat(g[idx], self.F), minlength=size).reshape(self.F, self.B)
        if self.second_order:
            hs = np.bincount(flat, weights=np.repeat(h[idx], self.F), minlength=size).reshape(self.F, self.B)
        else:
            hs = None
        return cnt, gs, hs

    def _find_split(self, idx, g, h):
        cnt, gs, hs = self._histograms(idx, g, h)
        n_l = np.cumsum(cnt, axis=1)
        g_l = np.cumsum(gs, axis=1)
        n_tot = len(idx)
        g_tot = g_l[0, -1]
        n_r = n_tot - n_l
        g_r = g_tot - g_l
        ok = self.valid & (n_l >= self.min_obs) & (n_r >= self.min_obs)
        if not ok.any():
            return None
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.second_order:
                h_l = np.cumsum(hs, axis=1)
                h_tot = h_l[0, -1]
                h_r = h_tot - h_l
                gain = g_l**2 / (h_l + self.l2) + g_r**2 / (h_r + self.l2) - g_tot**2 / (h_tot + self.l2)
            else:
                gain = g_l**2 / n_l + g_r**2 / n_r - g_tot**2 / n_tot
        gain = np.where(ok, gain, -np.inf)
        best = int(np.argmax(gain))
        if not gain.flat[best] > 1e-12:
            return None
        return divmod(best, self.B)

    def _leaf(self, idx, g, h) -> float:
        G, H = g[idx].sum(), h[idx].sum()
        if self.second_order:
            return G / (H + self.l2)
        return G / max(H, 1e-12)

    def grow(self, g, h) -> Tree:
        feature, threshold, left, right, value = [], [], [], [], []

        def new_node() -> int:
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(0.0)
            return len(feature) - 1

        stack = [(new_node(), np.arange(self.n), 0)]
        while stack:
            node, idx, depth = stack.pop()
            split = None
            if depth < self.max_depth and len(idx) >= 2 * self.min_obs:
                split = self._find_split(idx, g, h)
            if split is None:
                value[node] = self._leaf(idx, g, h)
                continue
            f, b = split
            mask = self.codes[idx, f] <= b
            l, r = new_node(), new_node()
            feature[node], threshold[node] = f, float(self.thresholds[f][b])
            left[node], right[node] = l, r
            stack.append((r, idx[~mask], depth + 1))
            stack.append((l, idx[mask], depth + 1))
        return Tree(np.array(feature, dtype=np.int64), np.array(threshold), np.array(left, dtype=np.int64),
                    np.array(right, dtype=np.int64), np.array(value))


class GradientBoostedTrees:
    def __init__(self, n_trees=100, max_depth=1, shrinkage=0.1, min_obs_in_node=10,
                 second_order=False, l2=1.0, subsample=1.0, max_bins=64, seed=0):
        if n_trees < 1 or max_depth < 1 or min_obs_in_node < 1:
            raise ValueError("n_trees, max_depth and min_obs_in_node must be >= 1")
        if not 0 < shrinkage <= 1:
            raise ValueError("shrinkage must be in (0, 1]")
        if not 0 < subsample <= 1:
            raise ValueError("subsample must be in (0, 1]")
        if not 2 <= max_bins <= 256:
            raise ValueError("max_bins must be in [2, 256]")
        self.n_trees = int(n_trees)
        self.max_depth = int(max_depth)
        self.shrinkage = float(shrinkage)
        self.min_obs_in_node = int(min_obs_in_node)
        self.second_order = bool(second_order)
        self.l2 = float(l2)
        self.subsample = float(subsample)
        self.max_bins = int(max_bins)
        self.seed = int(seed)
        self.init_score = 0.0
        self.trees: list[Tree] = []

    def fit(self, X: np.ndarray, y: np.ndarray) -> GradientBoostedTrees:
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        n, F = X.shape
        thresholds = [bin_thresholds(X[:, j], self.max_bins) for j in range(F)]
        n_thr = np.array([len(t) for t in thresholds])
        codes = np.column_stack(
            [np.searchsorted(thresholds[j], X[:, j], side="left") for j in range(F)]
        ).astype(np.uint8) if F else np.zeros((n, 0), dtype=np.uint8)
        grower = _Grower(codes, n_thr, thresholds, self.max_bins, self.max_depth,
                         self.min_obs_in_node, self.second_order, self.l2)
        p0 = y.mean()
        self.init_score = float(np.log(p0 / (1 - p0)))
        F_score = np.full(n, self.init_score)
        self.trees = []
        for stage in range(self.n_trees):
            p = expit(F_score)
            g = y - p
            h = p * (1 - p)
            if self.subsample < 1.0:
                # per-stage stream keeps the fit stage-wise reproducible
                rng = np.random.default_rng([self.seed, stage])
                keep = rng.random(n) < self.subsample
                g_fit, h_fit = np.where(keep, g, 0.0), np.where(keep, h, 0.0)
                tree = _SubsampleGrower(grower, keep).grow(g_fit, h_fit)
            else:
                tree = grower.grow(g, h)
            self.trees.append(tree)
            F_score = F_score + self.shrinkage * tree.predict(X)
        return self

    def decision_function(self, X: np.ndarray, n_trees: int | None = None) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.full(len(X), self.init_score)
        for tree in self.trees[: n_trees or len(self.trees)]:
            out = out + self.shrinkage * tree.predict(X)
        return out

    def staged_decision(self, X: np.ndarray, stages) -> dict[int, np.ndarray]:
        """Decision values after each requested number of trees."""
        X = np.asarray(X, dtype=float)
        wanted = set(int(s) for s in stages)
        out = np.full(len(X), self.init_score)
        res = {}
        for t, tree in enumerate(self.trees, 1):
            out = out + self.shrinkage * tree.predict(X)
            if t in wanted:
                res[t] = out.copy()
        return res

    def predict_proba(self, X: np.ndarray, n_trees: int | None = None) -> np.ndarray:
        return expit(self.decision_function(X, n_trees))

    def truncated(self, n_trees: int) -> GradientBoostedTrees:
        m = GradientBoostedTrees(n_trees, self.max_depth, self.shrinkage, self.min_obs_in_node,
                                 self.second_order, self.l2, self.subsample, self.max_bins, self.seed)
        m.init_score = self.init_score
        m.trees = self.trees[:n_trees]
        return m

    def state(self) -> dict:
        return {"init_score": self.init_score, "trees": [t.state() for t in self.trees]}

    def load_state(self, s: dict) -> None:
        self.init_score = float(s["init_score"])
        self.trees = [Tree.from_state(t) for t in s["trees"]]


class _SubsampleGrower:
    """Grows on the sampled rows only; leaves still predict for all rows."""

    def __init__(self, grower: _Grower, keep: np.ndarray):
        self.grower = grower
        self.keep = np.flatnonzero(keep)

    def grow(self, g, h) -> Tree:
        gr = self.grower
        sub = _Grower(gr.codes[self.keep], gr.valid.sum(axis=1), gr.thresholds, gr.B, gr.max_depth,
                      gr.min_obs, gr.second_order, gr.l2)
        return sub.grow(g[self.keep], h[self.keep])
