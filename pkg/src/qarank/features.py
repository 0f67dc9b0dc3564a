"""The 22 answer features: linguistic, vocabulary, meta and thread, with
per-thread ranked counterparts."""

from __future__ import annotations

import csv
import io
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.stats import rankdata

from qarank.ingestion import CleanText, clean_body
from qarank.model import Answer, Dataset, Question, Thread

BASE_FEATURES = (
    "length",
    "word_count",
    "n_sentences",
    "longest_sentence",
    "avg_words_per_sentence",
    "avg_chars_per_word",
    "contains_hyperlinks",
    "ll_n",
    "fk",
    "age",
    "rating_score",
    "answer_count",
)

# rank 1 goes to the largest value unless listed as ascending
DEFAULT_DIRECTIONS = {
    "length": "descending",
    "word_count": "descending",
    "n_sentences": "descending",
    "longest_sentence": "descending",
    "avg_words_per_sentence": "descending",
    "avg_chars_per_word": "descending",
    "ll_n": "descending",
    "fk": "descending",
    "age": "ascending",
    "rating_score": "descending",
}

RANKED_BASES = tuple(DEFAULT_DIRECTIONS)
RANKED_FEATURES = tuple(f"{name}_ranked" for name in RANKED_BASES)
FEATURE_NAMES = BASE_FEATURES + RANKED_FEATURES
CSV_HEADER = ("answer_id",) + FEATURE_NAMES + ("label",)

INT_FEATURES = {"length", "word_count", "n_sentences", "longest_sentence",
                "contains_hyperlinks", "age", "rating_score", "answer_count"}

_WORD = re.compile(r"(?:[^\W_]|')+")
_SENTENCE_END = re.compile(r"[.!?](?=\s|$)")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")


def tokenize(text: str) -> list[str]:
    """Lowercased runs of letters, digits and apostrophes (at least one alnum)."""
    return [t for t in _WORD.findall(text.lower()) if t.strip("'")]


def split_sentences(text: str) -> list[str]:
    """Sentences end at . ! ? followed by whitespace or end of text.

    Segments without any word are dropped; trailing text without a
    terminator is a sentence of its own.
    """
    out, start = [], 0
    for m in _SENTENCE_END.finditer(text):
        out.append(text[start : m.end()])
        start = m.end()
    out.append(text[start:])
    return [s.strip() for s in out if tokenize(s)]


def count_syllables(word: str) -> int:
    w = word.lower().strip("'")
    n = len(_VOWEL_GROUP.findall(w))
    if w.endswith("e") and not (len(w) > 2 and w.endswith("le") and w[-3] not in "aeiouy"):
        n -= 1
    return max(n, 1)


@dataclass(frozen=True)
class Linguistics:
    length: int
    word_count: int
    n_sentences: int
    longest_sentence: int
    avg_words_per_sentence: float
    avg_chars_per_word: float

    def as_tuple(self) -> tuple:
        return (self.length, self.word_count, self.n_sentences, self.longest_sentence,
                self.avg_words_per_sentence, self.avg_chars_per_word)


def shallow_linguistics(t: CleanText | str) -> Linguistics:
    text = t.plain_text if isinstance(t, CleanText) else t
    words = tokenize(text)
    sentences = split_sentences(text)
    n_words, n_sent = len(words), len(sentences)
    return Linguistics(
        length=len(text),
        word_count=n_words,
        n_sentences=n_sent,
        longest_sentence=max((len(s) for s in sentences), default=0),
        avg_words_per_sentence=n_words / n_sent if n_sent else 0.0,
        avg_chars_per_word=sum(map(len, words)) / n_words if n_words else 0.0,
    )


def avg_syllables_per_word(words: Sequence[str]) -> float:
    return sum(map(count_syllables, words)) / len(words) if words else 0.0


def flesch_kincaid(awps: float, asps: float) -> float:
    # 0.39 awps + 11.8 asps - 15.59, scaled to integer coefficients so that
    # whole-number inputs give the correctly rounded decimal result
    return (39 * awps + 1180 * asps - 1559) / 100


@dataclass(frozen=True)
class VocabularyModel:
    """Unigram background model with add-``smoothing`` estimates.

    One extra pseudo-type is reserved for unseen words, so with the default
    add-one smoothing P(w) = (count(w) + 1) / (total + unique + 1).
    """

    token_counts: Mapping[str, int]
    total_tokens: int
    unique_tokens: int
    smoothing: float = 1.0

    @classmethod
    def from_texts(cls, texts: Iterable[str], smoothing: float = 1.0) -> VocabularyModel:
        counts: Counter = Counter()
        for text in texts:
            counts.update(tokenize(text))
        return cls.from_counts(counts, smoothing)

    @classmethod
    def from_counts(cls, counts: Mapping[str, int], smoothing: float = 1.0) -> VocabularyModel:
        counts = {w: c for w, c in counts.items() if c > 0}
        return cls(dict(counts), sum(counts.values()), len(counts), smoothing)

    @property
    def denominator(self) -> float:
        return self.total_tokens + self.smoothing * (self.unique_tokens + 1)

    def prob(self, token: str) -> float:
        return (self.token_counts.get(token, 0) + self.smoothing) / self.denominator

    def log_prob(self, token: str) -> float:
        return math.log(self.prob(token))


def normalized_log_likelihood(answer_tokens: Iterable[str] | Mapping[str, int],
                              voc: VocabularyModel) -> float:
    counts = answer_tokens if isinstance(answer_tokens, Mapping) else Counter(answer_tokens)
    if not counts:
        return 0.0
    ll = sum(c * voc.log_prob(w) for w, c in counts.items())
    return ll / len(counts)


def meta_and_thread(ans: Answer, q: Question, thread: Thread) -> tuple[int, int, int]:
    age = int((ans.created_at - q.created_at).total_seconds())
    if age < 0:
        raise ValueError(f"answer {ans.id} predates question {q.id}")
    return age, ans.rating_score, len(thread.answers)


def rank_transform(values: Sequence[float], direction: str = "descending") -> np.ndarray:
    """Per-thread ranks, 1 = best; ties share the mean of their ranks."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("cannot rank an empty thread")
    if direction == "descending":
        return rankdata(-v, method="average")
    if direction == "ascending":
        return rankdata(v, method="average")
    raise ValueError(f"unknown rank direction {direction!r}")


def rank_within(values: np.ndarray, thread_idx: np.ndarray, direction: str) -> np.ndarray:
    """``rank_transform`` applied to every thread at once (average ties)."""
    v = np.asarray(values, dtype=float)
    g = np.asarray(thread_idx)
    n = len(v)
    if n == 0:
        return np.zeros(0)
    if direction not in ("ascending", "descending"):
        raise ValueError(f"unknown rank direction {direction!r}")
    key = -v if direction == "descending" else v
    order = np.lexsort((key, g))
    gs, ks = g[order], key[order]
    new_group = np.concatenate(([True], gs[1:] != gs[:-1]))
    new_tie = new_group | np.concatenate(([True], ks[1:] != ks[:-1]))
    group_start = np.maximum.accumulate(np.where(new_group, np.arange(n), 0))
    pos = np.arange(n) - group_start + 1  # 1-based position inside the thread
    tie_id = np.cumsum(new_tie) - 1
    starts = np.flatnonzero(new_tie)
    first = pos[starts]
    last = pos[np.append(starts[1:], n) - 1]
    out = np.empty(n)
    out[order] = (first[tie_id] + last[tie_id]) / 2
    return out


@dataclass(frozen=True)
class FeatureVector:
    answer_id: str
    values: dict
    label: bool


@dataclass
class FeatureTable:
    """One row per answer of the answered threads, in dataset order."""

    answer_ids: list[str]
    question_ids: list[str]
    thread_idx: np.ndarray
    X: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = FEATURE_NAMES
    directions: dict = field(default_factory=lambda: dict(DEFAULT_DIRECTIONS))

    def __len__(self) -> int:
        return len(self.answer_ids)

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.feature_names.index(name)]

    def vector(self, i: int) -> FeatureVector:
        return FeatureVector(
            self.answer_ids[i],
            dict(zip(self.feature_names, self.X[i].tolist())),
            bool(self.labels[i]),
        )

    def select(self, names: Sequence[str]) -> FeatureTable:
        missing = [n for n in names if n not in self.feature_names]
        if missing:
            raise KeyError(f"unknown features: {', '.join(missing)}")
        cols = [self.feature_names.index(n) for n in names]
        return FeatureTable(self.answer_ids, self.question_ids, self.thread_idx,
                            self.X[:, cols], self.labels, tuple(names), dict(self.directions))

    def drop(self, names: Iterable[str]) -> FeatureTable:
        names = set(names)
        missing = names - set(self.feature_names)
        if missing:
            raise KeyError(f"unknown features: {', '.join(sorted(missing))}")
        return self.select([n for n in self.feature_names if n not in names])

    def rows(self, idx) -> FeatureTable:
        idx = np.asarray(idx)
        return FeatureTable([self.answer_ids[i] for i in idx], [self.question_ids[i] for i in idx],
                            self.thread_idx[idx], self.X[idx], self.labels[idx],
                            self.feature_names, dict(self.directions))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("answer_id",) + tuple(self.feature_names) + ("label",))
        for i, aid in enumerate(self.answer_ids):
            w.writerow([aid] + [_fmt(self.X[i, j], n) for j, n in enumerate(self.feature_names)]
                       + [int(self.labels[i])])
        return buf.getvalue()


def _fmt(x: float, name: str) -> str:
    if name in INT_FEATURES and float(x).is_integer():
        return str(int(x))
    return format(float(x), ".10g")


def read_feature_csv(text: str) -> tuple[list[str], np.ndarray, np.ndarray, tuple[str, ...]]:
    rows = list(csv.reader(io.StringIO(text)))
    header = rows[0]
    if header[0] != "answer_id" or header[-1] != "label":
        raise ValueError("feature CSV must start with answer_id and end with label")
    names = tuple(header[1:-1])
    ids = [r[0] for r in rows[1:]]
    X = np.array([[float(v) for v in r[1:-1]] for r in rows[1:]], dtype=float).reshape(len(ids), len(names))
    y = np.array([r[-1] == "1" for r in rows[1:]], dtype=bool)
    return ids, X, y, names


class TextCache:
    """Cleaned text, token counts and vocabulary-free features per answer.

    Building it once lets cross-validation swap vocabulary models per fold
    without re-parsing any text.
    """

    def __init__(self, dataset: Dataset):
        self.dataset = dataset
        self.threads = dataset.answered_threads
        answer_ids, question_ids, thread_idx, base, labels, tokens = [], [], [], [], [], []
        for ti, t in enumerate(self.threads):
            for a in t.answers:
                clean = clean_body(a.body_html)
                words = tokenize(clean.plain_text)
                ling = shallow_linguistics(clean)
                fk = flesch_kincaid(ling.avg_words_per_sentence, avg_syllables_per_word(words))
                age, score, n_ans = meta_and_thread(a, t.question, t)
                if dataset.scores_absent:
                    score = 0
                base.append(ling.as_tuple() + (int(clean.contained_hyperlink), fk, age, score, n_ans))
                tokens.append(Counter(words))
                answer_ids.append(a.id)
                question_ids.append(t.question.id)
                thread_idx.append(ti)
                labels.append(a.is_accepted)
        self.answer_ids = answer_ids
        self.question_ids = question_ids
        self.thread_idx = np.array(thread_idx, dtype=np.int64)
        self.labels = np.array(labels, dtype=bool)
        # columns: 6 linguistics, contains_hyperlinks, fk, age, rating_score, answer_count
        self.base = np.array(base, dtype=float).reshape(len(answer_ids), 11)
        self.tokens = tokens
        self._matrix: sp.csr_matrix | None = None
        self._vocab_index: dict[str, int] | None = None

    def __len__(self) -> int:
        return len(self.answer_ids)

    def texts(self, idx=None) -> Iterable[Counter]:
        idx = range(len(self)) if idx is None else idx
        for i in idx:
            yield self.tokens[i]

    def vocabulary(self, idx=None, smoothing: float = 1.0) -> VocabularyModel:
        counts: Counter = Counter()
        for c in self.texts(idx):
            counts.update(c)
        return VocabularyModel.from_counts(counts, smoothing)

    def token_matrix(self) -> tuple[sp.csr_matrix, dict[str, int]]:
        if self._matrix is None:
            index: dict[str, int] = {}
            rows, cols, vals = [], [], []
            for i, c in enumerate(self.tokens):
                for w in sorted(c):
                    rows.append(i)
                    cols.append(index.setdefault(w, len(index)))
                    vals.append(c[w])
            self._matrix = sp.csr_matrix((vals, (rows, cols)), shape=(len(self), len(index)), dtype=float)
            self._vocab_index = index
        return self._matrix, self._vocab_index

    def ll_n(self, voc: VocabularyModel) -> np.ndarray:
        return np.array([normalized_log_likelihood(c, voc) for c in self.tokens], dtype=float)

    def ll_n_from_rows(self, train_idx, smoothing: float = 1.0) -> np.ndarray:
        """LL_n of every answer under a vocabulary built from ``train_idx`` rows."""
        M, _ = self.token_matrix()
        counts = np.asarray(M[np.asarray(train_idx)].sum(axis=0)).ravel()
        total, unique = counts.sum(), np.count_nonzero(counts)
        logp = np.log((counts + smoothing) / (total + smoothing * (unique + 1)))
        ll = M @ logp
        uc = np.diff(M.indptr)
        return np.divide(ll, uc, out=np.zeros_like(ll), where=uc > 0)

    def table(self, ll_n: np.ndarray, directions: Mapping[str, str] | None = None) -> FeatureTable:
        dirs = dict(DEFAULT_DIRECTIONS)
        dirs.update(directions or {})
        b = self.base
        base_cols = {
            "length": b[:, 0], "word_count": b[:, 1], "n_sentences": b[:, 2],
            "longest_sentence": b[:, 3], "avg_words_per_sentence": b[:, 4],
            "avg_chars_per_word": b[:, 5], "contains_hyperlinks": b[:, 6],
            "ll_n": np.asarray(ll_n, dtype=float), "fk": b[:, 7], "age": b[:, 8],
            "rating_score": b[:, 9], "answer_count": b[:, 10],
        }
        cols = [base_cols[n] for n in BASE_FEATURES]
        for name in RANKED_BASES:
            cols.append(rank_within(base_cols[name], self.thread_idx, dirs[name]))
        X = np.column_stack(cols) if cols and len(self) else np.zeros((len(self), len(FEATURE_NAMES)))
        return FeatureTable(list(self.answer_ids), list(self.question_ids), self.thread_idx.copy(),
                            X, self.labels.copy(), FEATURE_NAMES, dirs)


def build_vocabulary(dataset: Dataset, smoothing: float = 1.0) -> VocabularyModel:
    """Background model from the cleaned answer texts of ``dataset``."""
    return VocabularyModel.from_texts(
        (clean_body(a.body_html).plain_text for _, a in dataset.answers()), smoothing
    )


def featurize(dataset: Dataset, voc: VocabularyModel,
              directions: Mapping[str, str] | None = None) -> FeatureTable:
    cache = TextCache(dataset)
    return cache.table(cache.ll_n(voc), directions)
