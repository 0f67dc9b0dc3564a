import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import rankdata

from qarank.features import (
    CSV_HEADER,
    FEATURE_NAMES,
    TextCache,
    VocabularyModel,
    count_syllables,
    featurize,
    build_vocabulary,
    flesch_kincaid,
    normalized_log_likelihood,
    rank_transform,
    rank_within,
    read_feature_csv,
    shallow_linguistics,
    split_sentences,
    tokenize,
)
from qarank.ingestion import load_dataset


def test_feature_layout():
    assert len(FEATURE_NAMES) == 22
    assert CSV_HEADER[0] == "answer_id" and CSV_HEADER[-1] == "label"


def test_thread_fixture_matches_golden_csv(fixtures):
    d = load_dataset(fixtures / "thread.jsonl")
    got = featurize(d, build_vocabulary(d))
    ids, X, y, names = read_feature_csv((fixtures / "thread.golden.csv").read_text())
    assert names == FEATURE_NAMES
    assert got.answer_ids == ids
    assert got.labels.tolist() == y.tolist()
    np.testing.assert_allclose(got.X, X, rtol=0, atol=5e-9)


def test_ll_n_by_hand():
    # corpus "a a b" -> counts a:2 b:1, N=3, V=2; add-one: p(w) = (c+1)/(N+V+1)
    voc = VocabularyModel.from_texts(["a a b"])
    assert voc.prob("a") == pytest.approx(3 / 6)
    assert voc.prob("zzz") == pytest.approx(1 / 6)
    # "a a zzz": (2 log 1/2 + log 1/6) over 2 unique tokens
    want = (2 * math.log(0.5) + math.log(1 / 6)) / 2
    assert normalized_log_likelihood(["a", "a", "zzz"], voc) == pytest.approx(want)
    assert normalized_log_likelihood([], voc) == 0.0


@pytest.mark.parametrize("awps, asps, grade", [(10, 1.5, 6.01), (0, 0, -15.59), (1, 1, -3.40)])
def test_flesch_kincaid(awps, asps, grade):
    assert flesch_kincaid(awps, asps) == grade


@pytest.mark.parametrize("word, n", [
    ("hello", 2), ("the", 1), ("table", 2), ("make", 1), ("rhythm", 1), ("queue", 1),
    ("a", 1), ("beautiful", 3), ("don't", 1), ("x", 1),
])
def test_syllables(word, n):
    assert count_syllables(word) == n


def test_tokenize_and_sentences():
    assert tokenize("Don't stop_me, 3.5 times!") == ["don't", "stop", "me", "3", "5", "times"]
    assert split_sentences("One. Two? v1.2 three! tail") == ["One.", "Two?", "v1.2 three!", "tail"]
    assert split_sentences("... !") == []


def test_shallow_linguistics_counts():
    ling = shallow_linguistics("Yes. It works fine.")
    assert ling.as_tuple() == (19, 4, 2, 14, 2.0, 3.5)
    empty = shallow_linguistics("")
    assert empty.as_tuple() == (0, 0, 0, 0, 0.0, 0.0)


def test_rank_transform_ties_and_direction():
    assert rank_transform([5, 1, 5]).tolist() == [1.5, 3, 1.5]
    assert rank_transform([5, 1, 5], "ascending").tolist() == [2.5, 1, 2.5]
    with pytest.raises(ValueError):
        rank_transform([])
    with pytest.raises(ValueError):
        rank_transform([1], "sideways")


groups_st = st.lists(st.lists(st.integers(-3, 3), min_size=1, max_size=6), min_size=1, max_size=8)


@given(groups_st, st.sampled_from(["ascending", "descending"]), st.randoms(use_true_random=False))
def test_rank_within_matches_per_thread_rankdata(groups, direction, rnd):
    vals = np.concatenate([np.array(g, float) for g in groups])
    tidx = np.repeat(np.arange(len(groups)), [len(g) for g in groups])
    perm = np.array(rnd.sample(range(len(vals)), len(vals)))
    got = rank_within(vals[perm], tidx[perm], direction)
    for t in range(len(groups)):
        m = tidx[perm] == t
        v = vals[perm][m]
        assert got[m].tolist() == rankdata(-v if direction == "descending" else v).tolist()


@given(groups_st, st.lists(st.floats(0.01, 100), min_size=8, max_size=8))
def test_ranks_ignore_per_thread_positive_scaling(groups, scales):
    vals = np.concatenate([np.array(g, float) for g in groups])
    tidx = np.repeat(np.arange(len(groups)), [len(g) for g in groups])
    scaled = vals * np.array(scales)[tidx]
    np.testing.assert_array_equal(rank_within(vals, tidx, "descending"),
                                  rank_within(scaled, tidx, "descending"))


def test_sparse_ll_n_matches_reference(small_corpus):
    cache = TextCache(small_corpus)
    rows = np.arange(0, len(cache), 3)
    fast = cache.ll_n_from_rows(rows)
    slow = cache.ll_n(cache.vocabulary(rows))
    np.testing.assert_allclose(fast, slow, rtol=1e-10)


def test_csv_round_trip(small_corpus):
    t = featurize(small_corpus, build_vocabulary(small_corpus))
    ids, X, y, names = read_feature_csv(t.to_csv())
    assert ids == t.answer_ids and names == t.feature_names
    np.testing.assert_allclose(X, t.X, rtol=1e-9)
    assert (y == t.labels).all()


def test_cache_vocabulary_matches_text_vocabulary(small_corpus):
    a = TextCache(small_corpus).vocabulary()
    b = build_vocabulary(small_corpus)
    assert a == b


def test_table_select_drop_and_rows(fixtures):
    d = load_dataset(fixtures / "thread.jsonl")
    t = featurize(d, build_vocabulary(d))
    assert t.select(["fk", "age"]).X.shape == (3, 2)
    assert "fk" not in t.drop(["fk"]).feature_names
    with pytest.raises(KeyError):
        t.select(["nope"])
    assert t.rows([2]).vector(0).answer_id == "a2"


def test_scores_absent_zeroes_rating(fixtures):
    from dataclasses import replace

    d = replace(load_dataset(fixtures / "thread.jsonl"), scores_absent=True)
    t = featurize(d, build_vocabulary(d))
    assert (t.column("rating_score") == 0).all()
    assert (t.column("rating_score_ranked") == 2).all()


def test_tokens_are_counted_once_per_unique_word():
    voc = VocabularyModel.from_counts(Counter({"a": 1}))
    assert normalized_log_likelihood(Counter({"a": 4}), voc) == pytest.approx(4 * voc.log_prob("a"))
