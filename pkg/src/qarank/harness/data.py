"""Dataset references, training caps and fold-aware feature matrices."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from qarank.features import FEATURE_NAMES, TextCache, rank_within, read_feature_csv
from qarank.ingestion import load_dataset, serialize_normalized_jsonl
from qarank.model import Dataset
from qarank.synth import SynthConfig, generate


class SchemaError(ValueError):
    """A test table lacks feature columns the trained models need."""

    def __init__(self, source: str, missing: Sequence[str]):
        self.missing = list(missing)
        super().__init__(f"{source}: missing feature column(s): {', '.join(self.missing)}")


@dataclass(frozen=True)
class FeatureCsv:
    """A pre-featurized test set (ids, matrix, labels, column names)."""

    name: str
    answer_ids: list
    X: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    sha256: str

    def matrix(self, names: Sequence[str]) -> np.ndarray:
        missing = [n for n in names if n not in self.feature_names]
        if missing:
            raise SchemaError(self.name, missing)
        return self.X[:, [self.feature_names.index(n) for n in names]]


def resolve(ref, base_dir: Path | str = ".") -> Dataset | FeatureCsv:
    if isinstance(ref, Dataset):
        return ref
    if isinstance(ref, (str, Path)):
        ref = {"path": str(ref)}
    if "synthetic" in ref:
        return generate(SynthConfig(**(ref["synthetic"] or {})))
    path = Path(ref["path"])
    path = path if path.is_absolute() else Path(base_dir) / path
    fmt = ref.get("format") or path.suffix.lstrip(".").lower()
    if fmt == "csv":
        raw = path.read_bytes()
        ids, X, y, names = read_feature_csv(raw.decode("utf-8"))
        return FeatureCsv(path.stem, ids, X, y, names, hashlib.sha256(raw).hexdigest())
    return load_dataset(path, fmt)


def content_hash(d: Dataset | FeatureCsv) -> str:
    if isinstance(d, FeatureCsv):
        return d.sha256
    return hashlib.sha256(serialize_normalized_jsonl(d)).hexdigest()


def cap_threads(d: Dataset, cap: int | None, seed: int) -> Dataset:
    """Keep whole threads, in a seeded random order, while answers fit under ``cap``."""
    if cap is None or sum(len(t.answers) for t in d.threads) <= cap:
        return d
    order = np.random.default_rng([seed, 7]).permutation(len(d.threads))
    keep, total = [], 0
    for i in order:
        n = len(d.threads[i].answers)
        if total + n > cap:
            continue
        keep.append(int(i))
        total += n
    return d.with_threads([d.threads[i] for i in sorted(keep)], f"{d.name}[cap={cap}]")


class FoldFeatures:
    """Feature matrices whose vocabulary feature is rebuilt from training rows.

    Only ``ll_n`` and its ranked twin depend on the vocabulary; every other
    column is computed once.  Ranks use whole threads, which carry no label
    information.
    """

    def __init__(self, dataset: Dataset, directions: dict | None = None,
                 disabled: Sequence[str] = (), cache: TextCache | None = None):
        self.cache = cache or TextCache(dataset)
        self.dataset = dataset
        table = self.cache.table(np.zeros(len(self.cache)), directions)
        self.directions = table.directions
        self.base = table.X
        self.y = table.labels
        self.thread_idx = table.thread_idx
        self.answer_ids = table.answer_ids
        self.names = tuple(n for n in FEATURE_NAMES if n not in set(disabled))
        self._cols = np.array([FEATURE_NAMES.index(n) for n in self.names], dtype=np.int64)
        self._ll = FEATURE_NAMES.index("ll_n")
        self._llr = FEATURE_NAMES.index("ll_n_ranked")
        self._needs_ll = "ll_n" in self.names or "ll_n_ranked" in self.names
        self._memo: tuple[bytes, np.ndarray] | None = None

    def __len__(self) -> int:
        return len(self.y)

    def restrict(self, names: Sequence[str]) -> FoldFeatures:
        """Same cache, a different column subset (for paired ablations)."""
        other = object.__new__(FoldFeatures)
        other.__dict__.update(self.__dict__)
        other.names = tuple(names)
        other._cols = np.array([FEATURE_NAMES.index(n) for n in names], dtype=np.int64)
        other._needs_ll = "ll_n" in names or "ll_n_ranked" in names
        other._memo = None
        return other

    def full_matrix(self, vocab_rows) -> np.ndarray:
        """All rows, all 22 columns, vocabulary from ``vocab_rows``."""
        vocab_rows = np.asarray(vocab_rows, dtype=np.int64)
        key = hashlib.blake2b(vocab_rows.tobytes(), digest_size=16).digest()
        if self._memo is not None and self._memo[0] == key:
            return self._memo[1]
        X = self.base.copy()
        if self._needs_ll:
            ll = self.cache.ll_n_from_rows(vocab_rows)
            X[:, self._ll] = ll
            X[:, self._llr] = rank_within(ll, self.thread_idx, self.directions["ll_n"])
        self._memo = (key, X)
        return X

    def matrix(self, vocab_rows, rows=None) -> np.ndarray:
        X = self.full_matrix(vocab_rows)
        X = X if rows is None else X[np.asarray(rows)]
        return X[:, self._cols]

    def fold(self, train_idx, test_idx) -> tuple[np.ndarray, np.ndarray]:
        X = self.full_matrix(train_idx)[:, self._cols]
        return X[np.asarray(train_idx)], X[np.asarray(test_idx)]


def external_matrix(train: FoldFeatures, target: Dataset, names: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    """Features of ``target`` with the vocabulary taken from all of ``train``."""
    cache = TextCache(target)
    voc = train.cache.vocabulary()
    table = cache.table(cache.ll_n(voc), train.directions)
    return table.select(list(names)).X, table.labels

