import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from qarank.evaluation import (
    ConfusionMatrix,
    DegenerateTestError,
    SingleClassError,
    auc_score,
    balance,
    cluster_of,
    cohens_d,
    cohens_d_groups,
    confusion,
    delong_test,
    metric_report,
    roc_curve,
    scott_knott_esd,
    threshold_metrics,
    wilcoxon_signed_rank,
)
from qarank.evaluation.metrics import RocCurve


def mann_whitney_auc(s, y):
    pos, neg = s[y], s[~y]
    gt = (pos[:, None] > neg[None, :]).sum()
    eq = (pos[:, None] == neg[None, :]).sum()
    return (gt + 0.5 * eq) / (len(pos) * len(neg))


scores_labels = st.integers(2, 40).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 6).map(float), min_size=n, max_size=n),
    st.lists(st.booleans(), min_size=n, max_size=n))).filter(lambda t: 0 < sum(t[1]) < len(t[1]))


@given(scores_labels)
def test_auc_equals_pair_count(sl):
    s, y = np.array(sl[0]), np.array(sl[1])
    assert abs(auc_score(s, y) - mann_whitney_auc(s, y)) < 1e-12


@given(scores_labels)
def test_roc_is_monotone_and_anchored(sl):
    c = roc_curve(*sl)
    assert c.points[0] == (0.0, 0.0) and c.points[-1] == (1.0, 1.0)
    assert np.all(np.diff(c.fp_rate) >= 0) and np.all(np.diff(c.tp_rate) >= 0)


def test_roc_csv_round_trip():
    c = roc_curve([0.9, 0.1, 0.4, 0.4], [1, 0, 1, 0])
    back = RocCurve.from_csv(c.to_csv())
    np.testing.assert_array_equal(back.fp_rate, c.fp_rate)
    np.testing.assert_array_equal(back.thresholds, c.thresholds)
    assert c.to_svg().startswith("<svg")


def test_single_class_roc_raises():
    with pytest.raises(SingleClassError):
        roc_curve([0.1, 0.2], [1, 1])
    assert metric_report([0.1, 0.9], [1, 1]).auc is None


def test_balance_formula():
    assert balance(0, 0) == 1 - 1 / math.sqrt(2)
    assert balance(0, 1) == 1.0
    assert balance(1, 0) == 0.0


def test_confusion_fixture_by_hand():
    # threshold 0.5, strictly greater counts as positive
    s = [0.9, 0.8, 0.5, 0.3, 0.6, 0.1, 0.2, 0.7]
    y = [1, 1, 1, 1, 0, 0, 0, 0]
    cm = confusion(s, y)
    assert cm == ConfusionMatrix(tp=2, fp=2, fn=2, tn=2)
    r = threshold_metrics(ConfusionMatrix(tp=3, fp=1, fn=2, tn=4))
    assert r.accuracy == 7 / 10 and r.error_rate == 1 - 7 / 10
    assert r.precision == 3 / 4 and r.recall == 3 / 5
    assert r.f_measure == 2 * (3 / 4) * (3 / 5) / (3 / 4 + 3 / 5)
    assert r.tn_rate == 4 / 5 and r.fp_rate == 1 / 5
    assert r.g_mean == math.sqrt(3 / 5 * 4 / 5)
    assert r.balance == 1 - math.sqrt((1 / 5) ** 2 + (2 / 5) ** 2) / math.sqrt(2)


def test_undefined_ratios_are_none():
    r = threshold_metrics(ConfusionMatrix(tp=0, fp=0, fn=3, tn=7))
    assert r.precision is None and r.f_measure is None
    assert r.recall == 0.0 and r.accuracy == 0.7


# -- paired statistics ---------------------------------------------------------------------


def enumerate_wilcoxon_p(d):
    d = d[d != 0]
    ranks = sps.rankdata(np.abs(d))
    w = ranks[d > 0].sum()
    sums = [sum(r for r, s in zip(ranks, signs) if s) for signs in itertools.product([0, 1], repeat=len(d))]
    sums = np.array(sums)
    return min(1.0, 2 * min(np.mean(sums <= w + 1e-9), np.mean(sums >= w - 1e-9)))


@given(st.lists(st.integers(-4, 4), min_size=1, max_size=10).filter(lambda v: any(v)))
def test_wilcoxon_exact_matches_enumeration(diffs):
    d = np.array(diffs, dtype=float)
    res = wilcoxon_signed_rank(d, np.zeros_like(d))
    assert res.exact
    assert res.p == pytest.approx(enumerate_wilcoxon_p(d), abs=1e-12)


def test_wilcoxon_normal_branch_matches_scipy():
    rng = np.random.default_rng(4)
    a, b = rng.normal(size=60), rng.normal(0.3, size=60)
    res = wilcoxon_signed_rank(a, b, exact_max_n=0)
    ref = sps.wilcoxon(a, b, correction=False, method="approx")
    assert not res.exact
    assert res.p == pytest.approx(ref.pvalue, rel=1e-9)


def test_wilcoxon_all_zero_is_degenerate():
    with pytest.raises(DegenerateTestError):
        wilcoxon_signed_rank([1, 2], [1, 2])


def test_cohens_d():
    assert cohens_d([1, 2, 3]) == pytest.approx(2.0)
    assert cohens_d([0.5, 0.5]) == math.inf
    with pytest.raises(DegenerateTestError):
        cohens_d([0, 0])
    assert cohens_d_groups([1, 2, 3], [0, 1, 2]) == pytest.approx(1.0)


def test_delong_identical_scores():
    rng = np.random.default_rng(0)
    y = rng.random(100) < 0.3
    s = rng.random(100)
    r = delong_test(s, s, y)
    assert (r.z, r.p) == (0.0, 1.0)


def test_delong_variance_matches_pairwise_formula():
    rng = np.random.default_rng(1)
    y = np.array([True] * 12 + [False] * 15)
    a = rng.normal(size=27) + y
    b = rng.normal(size=27) + 0.5 * y
    r = delong_test(a, b, y)

    def psi(p, n):
        return 1.0 if p > n else 0.5 if p == n else 0.0

    def comps(s):
        pos, neg = s[y], s[~y]
        v10 = np.array([np.mean([psi(p, n) for n in neg]) for p in pos])
        v01 = np.array([np.mean([psi(p, n) for p in pos]) for n in neg])
        return v10, v01

    a10, a01 = comps(a)
    b10, b01 = comps(b)
    var = (np.var(a10, ddof=1) + np.var(b10, ddof=1) - 2 * np.cov(a10, b10)[0, 1]) / 12 + \
          (np.var(a01, ddof=1) + np.var(b01, ddof=1) - 2 * np.cov(a01, b01)[0, 1]) / 15
    assert r.var == pytest.approx(var, rel=1e-10)
    assert r.auc_a == pytest.approx(mann_whitney_auc(a, y))


def test_delong_needs_two_of_each_class():
    with pytest.raises(ValueError):
        delong_test([0.1, 0.2, 0.3], [0.3, 0.2, 0.1], [1, 0, 0])


# -- Scott-Knott ---------------------------------------------------------------------------


def test_scott_knott_three_planted_groups():
    rng = np.random.default_rng(0)
    samples = {f"m{i}": rng.normal(mu, 0.01, 10) for i, mu in enumerate([0.9, 0.9, 0.7, 0.5, 0.5])}
    ranks = cluster_of(scott_knott_esd(samples))
    assert ranks == {"m0": 1, "m1": 1, "m2": 2, "m3": 3, "m4": 3}


def test_negligible_difference_is_merged():
    rng = np.random.default_rng(2)
    base = rng.normal(0, 1, 2000)
    samples = {"a": base + 0.05, "b": rng.permutation(base)}
    clusters = scott_knott_esd(samples, alpha=0.5)
    assert len(clusters) == 1
    assert len(scott_knott_esd(samples, alpha=0.5, esd=False)) == 2


def test_scott_knott_input_checks():
    with pytest.raises(ValueError):
        scott_knott_esd({"a": [1, 2]})
    with pytest.raises(ValueError):
        scott_knott_esd({"a": [1, 2], "b": [1]})


@given(st.dictionaries(st.sampled_from("abcdef"), st.lists(st.floats(0, 1), min_size=2, max_size=6),
                       min_size=2))
def test_scott_knott_partitions_in_mean_order(samples):
    clusters = scott_knott_esd(samples)
    seen = [m for c in clusters for m in c.models]
    assert sorted(seen) == sorted(samples)
    means = [np.mean(samples[m]) for m in seen]
    assert all(x >= y - 1e-12 for x, y in zip(means, means[1:]))
