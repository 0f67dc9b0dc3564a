"""L2-penalized logistic regression fit by full-batch gradient descent on
z-scored features."""

from __future__ import annotations

import numpy as np
from scipy.special import expit, log_expit


def standardizer(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    sd = X.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    return mean, sd


def log_loss_and_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray,
                      l2: float) -> tuple[float, np.ndarray, float]:
    """Mean log-loss plus (l2/2)|w|^2, with its gradient in (w, b)."""
    z = X @ w + b
    loss = -np.mean(y * log_expit(z) + (1 - y) * log_expit(-z)) + 0.5 * l2 * w @ w
    r = expit(z) - y
    return float(loss), X.T @ r / len(y) + l2 * w, float(r.mean())


class LogisticRegression:
    def __init__(self, l2_penalty=1e-4, epochs=300, learning_rate=0.5, seed=0):
        if l2_penalty < 0 or epochs < 1 or learning_rate <= 0:
            raise ValueError("need l2_penalty >= 0, epochs >= 1, learning_rate > 0")
        self.l2_penalty = float(l2_penalty)
        self.epochs = int(epochs)
        self.learning_rate = float(learning_rate)
        self.seed = seed
        self.mean = self.sd = None
        self.w = None
        self.b = 0.0

    def fit(self, X: np.ndarray, y: np.ndarray) -> LogisticRegression:
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        self.mean, self.sd = standardizer(X)
        Z = (X - self.mean) / self.sd
        w = np.zeros(Z.shape[1])
        b = 0.0
        for _ in range(self.epochs):
            _, gw, gb = log_loss_and_grad(w, b, Z, y, self.l2_penalty)
            w -= self.learning_rate * gw
            b -= self.learning_rate * gb
        self.w, self.b = w, b
        return self

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return ((np.asarray(X, dtype=float) - self.mean) / self.sd) @ self.w + self.b

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return expit(self.decision_function(X))

    def state(self) -> dict:
        return {"mean": self.mean.tolist(), "sd": self.sd.tolist(), "w": self.w.tolist(), "b": self.b}

    def load_state(self, s: dict) -> None:
        self.mean = np.array(s["mean"], dtype=float)
        self.sd = np.array(s["sd"], dtype=float)
        self.w = np.array(s["w"], dtype=float)
        self.b = float(s["b"])
