"""Chronological train/test batches with a sliding test window."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from qarank.model import Dataset

DAY = 86400.0


@dataclass(frozen=True)
class TimeBatch:
    index: int
    start: datetime
    end: datetime
    train_idx: np.ndarray
    test_idx: np.ndarray
    skip_reason: str | None = None

    def as_dict(self) -> dict:
        from qarank.ingestion import format_timestamp

        return {"batch": self.index, "test_start": format_timestamp(self.start),
                "test_end": format_timestamp(self.end), "n_train": int(len(self.train_idx)),
                "n_test": int(len(self.test_idx)), "skip_reason": self.skip_reason}


def answer_times(dataset: Dataset) -> np.ndarray:
    """Epoch seconds per answer, in feature-row order (answered threads)."""
    return np.array([a.created_at.timestamp() for t in dataset.answered_threads for a in t.answers],
                    dtype=float)


def timewise_batches(dataset: Dataset, window_days: float = 21.0, shift_days: float = 14.0,
                     base_days: float = 30.0) -> list[TimeBatch]:
    """Batch i tests on answers in [b_i, b_i + window) and trains on all answers
    before b_i, where b_i = origin + base + i * shift.  Only windows that end
    by the last post are kept.  Single-class batches carry a skip reason."""
    if window_days <= 0 or shift_days <= 0 or base_days <= 0:
        raise ValueError("window, shift and base period must be positive")
    times = answer_times(dataset)
    posts = [t.question.created_at.timestamp() for t in dataset.threads]
    posts += [a.created_at.timestamp() for t in dataset.threads for a in t.answers]
    if not posts:
        raise ValueError("dataset has no posts")
    origin, last = min(posts), max(posts)
    if origin + (base_days + window_days) * DAY > last:
        raise ValueError(
            f"timestamps span {(last - origin) / DAY:.1f} days, need at least "
            f"base {base_days} + window {window_days}"
        )
    y = np.array([a.is_accepted for t in dataset.answered_threads for a in t.answers], dtype=bool)
    tz = min((a.created_at for t in dataset.threads for a in t.answers), default=None)
    tzinfo = tz.tzinfo if tz is not None else None
    out = []
    i = 0
    while True:
        b = origin + (base_days + i * shift_days) * DAY
        e = b + window_days * DAY
        if e > last:
            break
        train = np.flatnonzero(times < b)
        test = np.flatnonzero((times >= b) & (times < e))
        reason = None
        if len(test) == 0 or y[test].all() or not y[test].any():
            reason = "test window has a single class; AUC undefined"
        elif len(train) == 0 or y[train].all() or not y[train].any():
            reason = "training set has a single class"
        out.append(TimeBatch(i, datetime.fromtimestamp(b, tzinfo), datetime.fromtimestamp(e, tzinfo),
                             train, test, reason))
        i += 1
    return out


def batch_window_days(batches: list[TimeBatch], origin: datetime) -> list[tuple[float, float]]:
    """[start, end) of each batch in days since ``origin`` (for reporting)."""
    return [((b.start - origin) / timedelta(days=1), (b.end - origin) / timedelta(days=1)) for b in batches]
