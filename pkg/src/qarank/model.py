"""Normalized Q&A records, dataset statistics and fold generation."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterator, Sequence

import numpy as np

PROVENANCES = ("stackexchange_xml", "normalized_jsonl", "synthetic")


def id_sort_key(ident: str) -> tuple:
    """Numeric ids sort numerically, everything else lexically after them."""
    return (0, int(ident), "") if ident.isdigit() else (1, 0, ident)


def to_utc(ts: datetime) -> datetime:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


@dataclass(frozen=True)
class Question:
    id: str
    title: str
    body_html: str
    created_at: datetime
    accepted_answer_id: str | None = None


@dataclass(frozen=True)
class Answer:
    id: str
    question_id: str
    body_html: str
    created_at: datetime
    rating_score: int = 0
    is_accepted: bool = False


@dataclass(frozen=True)
class Thread:
    question: Question
    answers: tuple[Answer, ...] = ()

    def __post_init__(self) -> None:
        if sum(a.is_accepted for a in self.answers) > 1:
            raise ValueError(f"thread {self.question.id} has more than one accepted answer")
        for a in self.answers:
            if a.question_id != self.question.id:
                raise ValueError(f"answer {a.id} does not belong to question {self.question.id}")
        acc = self.question.accepted_answer_id
        if acc is not None and acc not in {a.id for a in self.answers}:
            raise ValueError(f"question {self.question.id} accepts unknown answer {acc}")

    @property
    def resolved(self) -> bool:
        return any(a.is_accepted for a in self.answers)


@dataclass(frozen=True)
class IngestReport:
    """Counts of records dropped or patched while parsing a dump."""

    orphan_answers: int = 0
    answers_before_question: int = 0
    ignored_posts: int = 0
    dangling_accepted: int = 0

    def as_dict(self) -> dict:
        return {
            "orphan_answers": self.orphan_answers,
            "answers_before_question": self.answers_before_question,
            "ignored_posts": self.ignored_posts,
            "dangling_accepted": self.dangling_accepted,
        }


@dataclass(frozen=True)
class Dataset:
    name: str
    threads: tuple[Thread, ...]
    provenance: str = "normalized_jsonl"
    scores_absent: bool = False
    meta: dict = field(default_factory=dict, compare=False)
    report: IngestReport = field(default_factory=IngestReport, compare=False)

    def __post_init__(self) -> None:
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        seen: set[str] = set()
        for t in self.threads:
            if t.question.id in seen:
                raise ValueError(f"duplicate question id {t.question.id}")
            seen.add(t.question.id)

    @property
    def answered_threads(self) -> tuple[Thread, ...]:
        """Threads eligible for learning and evaluation."""
        return tuple(t for t in self.threads if t.answers)

    def answers(self) -> Iterator[tuple[Thread, Answer]]:
        for t in self.answered_threads:
            for a in t.answers:
                yield t, a

    def labels(self) -> np.ndarray:
        return np.array([a.is_accepted for _, a in self.answers()], dtype=bool)

    def thread_index(self) -> np.ndarray:
        """Position of each flat answer's thread within answered_threads."""
        out: list[int] = []
        for i, t in enumerate(self.answered_threads):
            out.extend([i] * len(t.answers))
        return np.array(out, dtype=np.int64)

    def with_threads(self, threads: Sequence[Thread], name: str | None = None) -> Dataset:
        return Dataset(
            name=self.name if name is None else name,
            threads=tuple(threads),
            provenance=self.provenance,
            scores_absent=self.scores_absent,
            meta=dict(self.meta),
            report=self.report,
        )


@dataclass(frozen=True)
class StatsSummary:
    threads: int
    answered_threads: int
    answers: int
    accepted: int
    resolved_pct: float
    neg_per_pos: float | None

    @property
    def ratio(self) -> str:
        if self.neg_per_pos is None:
            return "n/a"
        r = self.neg_per_pos
        return f"1:{int(r)}" if r == int(r) else f"1:{r:.2f}"

    def as_dict(self) -> dict:
        return {
            "threads": self.threads,
            "answered_threads": self.answered_threads,
            "answers": self.answers,
            "accepted": self.accepted,
            "resolved_pct": self.resolved_pct,
            "pos_neg_ratio": self.ratio,
        }

    def render(self) -> str:
        return (
            f"threads:          {self.threads}\n"
            f"answered threads: {self.answered_threads}\n"
            f"answers:          {self.answers}\n"
            f"accepted:         {self.accepted}\n"
            f"resolved:         {self.resolved_pct:.2f}%\n"
            f"pos/neg ratio:    {self.ratio}\n"
        )


def dataset_stats(d: Dataset) -> StatsSummary:
    n_threads = len(d.threads)
    n_answers = sum(len(t.answers) for t in d.threads)
    accepted = sum(1 for t in d.threads for a in t.answers if a.is_accepted)
    resolved = sum(1 for t in d.threads if t.resolved)
    neg = n_answers - accepted
    return StatsSummary(
        threads=n_threads,
        answered_threads=sum(1 for t in d.threads if t.answers),
        answers=n_answers,
        accepted=accepted,
        resolved_pct=100.0 * resolved / n_threads if n_threads else 0.0,
        neg_per_pos=round(neg / accepted, 2) if accepted else None,
    )


class FoldError(ValueError):
    pass


def _check_fold_counts(n_pos: int, n_neg: int, k: int) -> None:
    if k < 2:
        raise FoldError(f"k must be >= 2, got {k}")
    if n_pos < k or n_neg < k:
        raise FoldError(
            f"need at least {k} positives and {k} negatives for {k} folds, "
            f"got {n_pos} positives and {n_neg} negatives"
        )


def stratified_folds(labels: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """Assign shuffled positives, then negatives, round-robin to k folds."""
    labels = np.asarray(labels, dtype=bool)
    pos = np.flatnonzero(labels)
    neg = np.flatnonzero(~labels)
    _check_fold_counts(len(pos), len(neg), k)
    rng = np.random.default_rng(seed)
    pos = rng.permutation(pos)
    neg = rng.permutation(neg)
    fold_of = np.empty(len(labels), dtype=np.int64)
    fold_of[pos] = np.arange(len(pos)) % k
    # continue the cycle so that fold sizes stay balanced too
    fold_of[neg] = (np.arange(len(neg)) + len(pos)) % k
    return [np.flatnonzero(fold_of == f) for f in range(k)]


def grouped_stratified_folds(
    labels: np.ndarray, groups: np.ndarray, k: int, seed: int
) -> list[np.ndarray]:
    """Folds that keep every group (thread) whole, stratified on resolved groups."""
    labels = np.asarray(labels, dtype=bool)
    groups = np.asarray(groups)
    _check_fold_counts(int(labels.sum()), int((~labels).sum()), k)
    uniq = np.unique(groups)
    has_pos = np.array([labels[groups == g].any() for g in uniq])
    if has_pos.sum() < k:
        raise FoldError(f"need at least {k} resolved threads, got {int(has_pos.sum())}")
    rng = np.random.default_rng(seed)
    pos_g = rng.permutation(uniq[has_pos])
    neg_g = rng.permutation(uniq[~has_pos])
    fold_of_group = {}
    for i, g in enumerate(pos_g):
        fold_of_group[g] = i % k
    for i, g in enumerate(neg_g):
        fold_of_group[g] = (i + len(pos_g)) % k
    fold_of = np.array([fold_of_group[g] for g in groups])
    return [np.flatnonzero(fold_of == f) for f in range(k)]


def stratified_split(
    d: Dataset, k: int, seed: int, by_thread: bool = False
) -> list[np.ndarray]:
    """k folds of flat answer indices (order of ``Dataset.answers``)."""
    labels = d.labels()
    if by_thread:
        return grouped_stratified_folds(labels, d.thread_index(), k, seed)
    return stratified_folds(labels, k, seed)
