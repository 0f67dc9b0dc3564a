"""Confusion-matrix metrics, ROC construction, AUC and Balance."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np

METRIC_NAMES = ("accuracy", "error_rate", "precision", "recall", "f_measure",
                "tn_rate", "g_mean", "fp_rate", "auc", "balance")


class SingleClassError(ValueError):
    """Raised when a threshold-free metric needs both classes."""


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    @property
    def negatives(self) -> int:
        return self.fp + self.tn


@dataclass(frozen=True)
class MetricReport:
    """Threshold metrics; ``None`` marks a value whose formula is 0/0."""

    accuracy: float
    error_rate: float
    precision: float | None
    recall: float | None
    f_measure: float | None
    tn_rate: float | None
    g_mean: float | None
    fp_rate: float | None
    auc: float | None
    balance: float | None

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RocCurve:
    fp_rate: np.ndarray
    tp_rate: np.ndarray
    thresholds: np.ndarray

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fp_rate.tolist(), self.tp_rate.tolist()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("threshold", "fp_rate", "tp_rate"))
        for t, x, y in zip(self.thresholds, self.fp_rate, self.tp_rate):
            w.writerow((repr(float(t)), repr(float(x)), repr(float(y))))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> RocCurve:
        rows = list(csv.reader(io.StringIO(text)))[1:]
        arr = np.array([[float(v) for v in r] for r in rows], dtype=float)
        return cls(arr[:, 1], arr[:, 2], arr[:, 0])

    def to_svg(self, size: int = 300, title: str = "") -> str:
        pts = " ".join(f"{x * size:.2f},{(1 - y) * size:.2f}" for x, y in self.points)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
            f'viewBox="0 0 {size} {size}">\n'
            f"<title>{title}</title>\n"
            f'<rect width="{size}" height="{size}" fill="white" stroke="black"/>\n'
            f'<line x1="0" y1="{size}" x2="{size}" y2="0" stroke="grey" stroke-dasharray="4"/>\n'
            f'<polyline fill="none" stroke="blue" points="{pts}"/>\n</svg>\n'
        )


def _check(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels, dtype=bool).ravel()
    if s.size == 0:
        raise ValueError("empty score vector")
    if s.shape != y.shape:
        raise ValueError(f"{s.size} scores for {y.size} labels")
    return s, y


def _div(a: float, b: float) -> float | None:
    return a / b if b else None


def balance(fp_rate: float, recall: float) -> float:
    return 1 - math.sqrt((0 - fp_rate) ** 2 + (1 - recall) ** 2) / math.sqrt(2)


def confusion(scores, labels, threshold: float = 0.5) -> ConfusionMatrix:
    """Positive prediction iff score > threshold."""
    s, y = _check(scores, labels)
    pred = s > threshold
    return ConfusionMatrix(
        tp=int(np.sum(pred & y)),
        fp=int(np.sum(pred & ~y)),
        fn=int(np.sum(~pred & y)),
        tn=int(np.sum(~pred & ~y)),
    )


def threshold_metrics(cm: ConfusionMatrix, auc: float | None = None) -> MetricReport:
    total = cm.tp + cm.fp + cm.fn + cm.tn
    acc = (cm.tp + cm.tn) / total
    p = _div(cm.tp, cm.tp + cm.fp)
    r = _div(cm.tp, cm.tp + cm.fn)
    tnr = _div(cm.tn, cm.tn + cm.fp)
    fpr = _div(cm.fp, cm.fp + cm.tn)
    f = 2 * p * r / (p + r) if p is not None and r is not None and p + r > 0 else None
    g = math.sqrt(r * tnr) if r is not None and tnr is not None else None
    bal = balance(fpr, r) if fpr is not None and r is not None else None
    return MetricReport(acc, 1 - acc, p, r, f, tnr, g, fpr, auc, bal)


def roc_curve(scores, labels) -> RocCurve:
    """Sweep every distinct score from the highest down; anchors at (0,0), (1,1)."""
    s, y = _check(scores, labels)
    n_pos, n_neg = int(y.sum()), int((~y).sum())
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("ROC needs at least one positive and one negative")
    order = np.argsort(-s, kind="mergesort")
    s_sorted, y_sorted = s[order], y[order]
    # last index of each run of equal scores
    last = np.flatnonzero(np.diff(s_sorted) != 0)
    last = np.concatenate((last, [len(s_sorted) - 1]))
    tps = np.cumsum(y_sorted)[last]
    fps = (last + 1) - tps
    fpr = np.concatenate(([0.0], fps / n_neg, [1.0]))
    tpr = np.concatenate(([0.0], tps / n_pos, [1.0]))
    thr = np.concatenate(([np.inf], s_sorted[last], [-np.inf]))
    return RocCurve(fpr, tpr, thr)


def auc_trapezoid(curve: RocCurve) -> float:
    x, y = curve.fp_rate, curve.tp_rate
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2))


def roc_and_auc(scores, labels) -> tuple[RocCurve, float]:
    curve = roc_curve(scores, labels)
    return curve, auc_trapezoid(curve)


def auc_score(scores, labels) -> float:
    return roc_and_auc(scores, labels)[1]


def metric_report(scores, labels, threshold: float = 0.5) -> MetricReport:
    """All threshold metrics plus AUC (absent when labels are single-class)."""
    s, y = _check(scores, labels)
    auc = auc_score(s, y) if 0 < y.sum() < y.size else None
    return threshold_metrics(confusion(s, y, threshold), auc)
