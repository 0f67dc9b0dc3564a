"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py`` (lines printed as they finish).
"""

from __future__ import annotations

import itertools
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import norm, rankdata

from qarank.cli import main as cli_main
from qarank.evaluation import (
    cluster_of,
    delong_test,
    metric_report,
    scott_knott_esd,
    wilcoxon_signed_rank,
)
from qarank.evaluation.metrics import auc_score, balance, confusion, threshold_metrics
from qarank.features import build_vocabulary, featurize, flesch_kincaid
from qarank.harness import (
    CVConfig,
    ExperimentConfig,
    ExperimentResult,
    FeatureSelectionConfig,
    LearnerEntry,
    TimewiseConfig,
    TuningConfig,
    run_ablation,
    run_corner_cases,
    run_experiment,
    run_timewise,
    run_within_cv,
    select_features,
)
from qarank.harness.timewise import answer_times, timewise_batches
from qarank.ingestion import clean_body, load_dataset, serialize_normalized_jsonl
from qarank.learners import LearnerSpec, train
from qarank.model import Answer, Dataset, Question, Thread, dataset_stats
from qarank.synth import generate

sys.path.insert(0, str(Path(__file__).parent))
from conftest import ACCEPTANCE_LINES, FIXTURES  # noqa: E402


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line, flush=True)
    assert ok, line


def _within(data, entries, k, repeats, seed=0, **kw):
    return ExperimentConfig(design="within_cv", train_dataset=data, learners=tuple(entries),
                            cv=CVConfig(k, repeats), seed=seed, **kw)


def mann_whitney(s, y):
    pos, neg = s[y], s[~y]
    return ((pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()) / (
        len(pos) * len(neg))


# 1 -------------------------------------------------------------------------------------------


def test_c01_auc_oracle():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 200))
        y = rng.random(n) < rng.uniform(0.05, 0.95)
        if y.all() or not y.any():
            y[0] = not y[0]
        # a coarse grid forces ties in about half the vectors
        s = rng.integers(0, 10, n).astype(float) if rng.random() < 0.5 else rng.random(n)
        worst = max(worst, abs(auc_score(s, y) - mann_whitney(s, y)))
    dt = time.perf_counter() - t0
    report(1, worst <= 1e-12 and dt < 5, f"max |trapezoid - pair count| = {worst:.2e} over 1000 vectors, {dt:.2f}s")


# 2 -------------------------------------------------------------------------------------------


def test_c02_formula_fidelity():
    checks = {
        "balance(0,0)": balance(0, 0) == 1 - 1 / math.sqrt(2),
        "fk(10,1.5)": flesch_kincaid(10, 1.5) == 6.01
        and Fraction("0.39") * 10 + Fraction("11.8") * Fraction("1.5") - Fraction("15.59") == Fraction("6.01"),
        "fk(0,0)": flesch_kincaid(0, 0) == -15.59,
        "fk(1,1)": flesch_kincaid(1, 1) == -3.40,
    }
    # confusion fixture: 8 instances, threshold 0.5, hand counts tp=2 fp=1 fn=2 tn=3
    s = [0.9, 0.7, 0.4, 0.2, 0.6, 0.3, 0.1, 0.5]
    y = [1, 1, 1, 1, 0, 0, 0, 0]
    cm = confusion(s, y)
    r = threshold_metrics(cm)
    checks["confusion"] = (cm.tp, cm.fp, cm.fn, cm.tn) == (2, 1, 2, 3)
    checks["metrics"] = (
        r.accuracy == 5 / 8 and r.error_rate == 1 - 5 / 8 and r.precision == 2 / 3 and r.recall == 2 / 4
        and r.tn_rate == 3 / 4 and r.fp_rate == 1 / 4 and r.f_measure == 2 * (2 / 3) * (1 / 2) / (2 / 3 + 1 / 2)
        and r.g_mean == math.sqrt(1 / 2 * 3 / 4)
        and r.balance == 1 - math.sqrt((1 / 4) ** 2 + (1 / 2) ** 2) / math.sqrt(2)
    )
    bad = [k for k, v in checks.items() if not v]
    report(2, not bad, "all formula fixtures exact" if not bad else f"mismatch: {bad}")


# 3 -------------------------------------------------------------------------------------------


def _one_to_nine() -> Dataset:
    from datetime import datetime, timedelta, timezone

    t0 = datetime(2020, 1, 1, tzinfo=timezone.utc)
    threads, nid = [], 1
    for t in range(10):
        qid = str(nid)
        answers = tuple(Answer(str(nid + 1 + j), qid, f"Answer {j} text.", t0 + timedelta(minutes=j + 1),
                               j, j == 3) for j in range(10))
        threads.append(Thread(Question(qid, "q", "q", t0, answers[3].id), answers))
        nid += 11
    return Dataset("one-to-nine", tuple(threads))


def test_c03_trivial_rejector_paradox():
    d = _one_to_nine()
    assert dataset_stats(d).ratio == "1:9"
    t = featurize(d, build_vocabulary(d))
    m = train(LearnerSpec("trivial_rejector"), t.X, t.labels, t.feature_names)
    r = metric_report(m.score(t.X), t.labels)
    ok = r.accuracy == 0.9 and r.auc == 0.5 and r.recall == 0.0
    report(3, ok, f"accuracy={r.accuracy}, auc={r.auc}, recall={r.recall}")


# 4 -------------------------------------------------------------------------------------------


def test_c04_scott_knott_esd():
    planted_ok = merged_ok = 0
    slowest = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        samples = {name: rng.normal(mu, 0.01, 10) for name, mu in (("hi", 0.9), ("mid", 0.7), ("lo", 0.5))}
        t0 = time.perf_counter()
        ranks = cluster_of(scott_knott_esd(samples))
        slowest = max(slowest, time.perf_counter() - t0)
        planted_ok += ranks == {"hi": 1, "mid": 2, "lo": 3}
        # two groups 0.1 sd apart: a real but negligible difference
        neg = {"a": rng.normal(0.05, 1.0, 2000), "b": rng.normal(0.0, 1.0, 2000),
               "c": rng.normal(0.1, 1.0, 2000)}
        t0 = time.perf_counter()
        merged_ok += len(scott_knott_esd(neg, alpha=0.05)) == 1
        slowest = max(slowest, time.perf_counter() - t0)
    ok = planted_ok == 100 and merged_ok == 100 and slowest < 1
    report(4, ok, f"planted recovered {planted_ok}/100, negligible merged {merged_ok}/100, "
                  f"slowest call {slowest * 1000:.1f} ms")


# 5 -------------------------------------------------------------------------------------------


def _enumerated_p(d: np.ndarray) -> float:
    d = d[d != 0]
    ranks = rankdata(np.abs(d))
    w = ranks[d > 0].sum()
    sums = np.array([ranks[np.array(sign, bool)].sum() for sign in itertools.product([0, 1], repeat=len(d))])
    return min(1.0, 2 * min(np.mean(sums <= w + 1e-9), np.mean(sums >= w - 1e-9)))


def test_c05_wilcoxon_exact_oracle():
    rng = np.random.default_rng(55)
    worst, count = 0.0, 0
    while count < 200:
        n = int(rng.integers(1, 11))
        a = rng.integers(0, 6, n).astype(float)  # small integers give ties
        b = rng.integers(0, 6, n).astype(float)
        if np.all(a == b):
            continue
        res = wilcoxon_signed_rank(a, b)
        worst = max(worst, abs(res.p - _enumerated_p(a - b)))
        count += 1
    report(5, worst < 1e-12, f"max |exact p - enumeration p| = {worst:.1e} over 200 fixtures (n <= 10)")


# 6 -------------------------------------------------------------------------------------------


def _boot_weights(rng, m, size):
    idx = rng.integers(0, m, size=(size, m)) + m * np.arange(size)[:, None]
    return np.bincount(idx.ravel(), minlength=size * m).reshape(size, m).astype(float)


def _weighted_auc(s, y, wpos, wneg):
    """AUC of each bootstrap replicate from resampling multiplicities (no ties in s)."""
    order = np.argsort(s)
    pos_at = np.empty(len(s), dtype=np.int64)
    pos_at[order] = np.arange(len(s))
    W_pos = np.zeros((len(wpos), len(s)))
    W_neg = np.zeros_like(W_pos)
    W_pos[:, pos_at[np.flatnonzero(y)]] = wpos
    W_neg[:, pos_at[np.flatnonzero(~y)]] = wneg
    below = np.cumsum(W_neg, axis=1)
    return (W_pos * below).sum(axis=1) / (wpos.sum(axis=1) * wneg.sum(axis=1))


def test_c06_delong_sanity():
    rng = np.random.default_rng(0)
    y0 = rng.random(200) < 0.4
    s0 = rng.random(200)
    same = delong_test(s0, s0, y0)
    agree, rejections, delong_time = 0, 0, 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = 500
        y = rng.random(n) < 0.3
        shared = rng.normal(size=n)
        a = 1.0 * y + shared + 0.7 * rng.normal(size=n)
        b = 0.7 * y + shared + 0.7 * rng.normal(size=n)
        t0 = time.perf_counter()
        r = delong_test(a, b, y)
        delong_time += time.perf_counter() - t0
        m, k = int(y.sum()), int((~y).sum())
        wp, wn = _boot_weights(rng, m, 10_000), _boot_weights(rng, k, 10_000)
        diff = _weighted_auc(a, y, wp, wn) - _weighted_auc(b, y, wp, wn)
        p_boot = 2 * norm.sf(abs(r.auc_a - r.auc_b) / diff.std(ddof=1))
        agree += (r.p < 0.05) == (p_boot < 0.05)
        rejections += r.p < 0.05
    ok = same.z == 0 and same.p == 1 and agree >= 95 and delong_time < 30
    report(6, ok, f"identical: z={same.z}, p={same.p}; decisions agree with bootstrap in {agree}/100 "
                  f"({rejections} DeLong rejections); DeLong time {delong_time:.2f}s")


# 7 -------------------------------------------------------------------------------------------


@pytest.mark.slow
def test_c07_end_to_end_signal_recovery(tmp_path):
    t0 = time.perf_counter()
    data = tmp_path / "synth.jsonl"
    assert cli_main(["synth", "--signal", "rating+speed", "--threads", "2000", "--seed", "0",
                     "--out", str(data)]) == 0
    cfg = tmp_path / "exp.yaml"
    cfg.write_text(
        "schema: 1\ndesign: within_cv\n"
        f"train_dataset: {data.name}\n"
        "learners:\n  - {family: gbt, tune: true}\n  - {family: trivial_rejector}\n"
        "cv: {k: 10, repeats: 10}\ntuning: {budget: 5, k: 10, repeats: 1}\nseed: 0\n")
    assert cli_main(["experiment", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    res = ExperimentResult.from_json((tmp_path / "out" / "result.json").read_text())
    dt = time.perf_counter() - t0
    gbt = float(np.mean(res.models["gbt"]["samples"]["auc"]))
    triv = float(np.mean(res.models["trivial_rejector"]["samples"]["auc"]))
    ranks = {m: c["rank"] for c in res.clusters for m in c["models"]}
    ok = gbt >= 0.90 and abs(triv - 0.5) <= 0.02 and ranks["gbt"] < ranks["trivial_rejector"] and dt < 600
    report(7, ok, f"tuned gbt mean AUC {gbt:.4f}, trivial {triv:.4f}, clusters gbt={ranks['gbt']} "
                  f"trivial={ranks['trivial_rejector']}, {dt:.0f}s")


# 8 -------------------------------------------------------------------------------------------


@pytest.mark.slow
def test_c08_tuning_effect():
    wins, gaps = 0, []
    for seed in range(100):
        d = generate(n_threads=200, profile="interaction", seed=seed)
        entries = (LearnerEntry(LearnerSpec("gbt", name="tuned"), tune=True),
                   LearnerEntry(LearnerSpec("gbt", name="default")))
        cfg = _within(d, entries, 5, 1, seed, tuning=TuningConfig(3, 3, 1))
        res = run_within_cv(cfg)
        tuned = np.array(res.models["tuned"]["samples"]["auc"])
        default = np.array(res.models["default"]["samples"]["auc"])
        gaps.append(float(np.mean(tuned - default)))
        wins += tuned.mean() >= default.mean()
    report(8, wins >= 95, f"tuned >= default (same folds) in {wins}/100 seeds, mean gap {np.mean(gaps):.3f}")


# 9 -------------------------------------------------------------------------------------------


@pytest.mark.slow
def test_c09_upvote_ablation():
    hits, rel = 0, []
    for seed in range(100):
        d = generate(n_threads=200, profile="rating+speed", seed=seed)
        cfg = ExperimentConfig(design="ablation", train_dataset=d, learners=(LearnerEntry(LearnerSpec("gbt")),),
                               cv=CVConfig(5, 1), seed=seed,
                               ablation_disable=("rating_score", "rating_score_ranked"))
        row = run_ablation(cfg).tables["ablation"][0]
        rel.append(-row["relative_change"])
        hits += -row["relative_change"] >= 0.05
    report(9, hits >= 95, f"relative AUC drop >= 5% in {hits}/100 seeds "
                          f"(median {np.median(rel):.1%}, min {np.min(rel):.1%})")


# 10 ------------------------------------------------------------------------------------------


def test_c10_corner_cases():
    d = generate(n_threads=400, profile="rating+speed", seed=10)
    cfg = ExperimentConfig(design="corner_case", train_dataset=d, learners=(LearnerEntry(LearnerSpec("gbt")),),
                           cv=CVConfig(10, 1), seed=0)
    res = run_corner_cases(cfg)
    by = {r["variant"]: r["mean_auc"] for r in res.tables["corner_cases"]}
    gap = abs(by["A_zero"] - by["B_median"])
    single = ("auc" if "C_single_answer" in by else
              f"skipped ({res.details['skipped'].get('C_single_answer')})")
    ok = gap < 0.01 and ("C_single_answer" in by or "C_single_answer" in res.details["skipped"])
    report(10, ok, f"|AUC(zero) - AUC(median)| = {gap:.4f}; single-answer variant: {single}")


# 11 ------------------------------------------------------------------------------------------


@pytest.mark.slow
def test_c11_ranked_feature_value():
    d = generate(n_threads=1500, profile="scaled", seed=0)
    res = select_features(d, learner=LearnerSpec("gbt", {"max_depth": 1, "n_trees": 300}),
                          repetitions=15, seed=0)
    pairs = [(f.feature[: -len("_ranked")], f.delta_z) for f in res.ranking if f.delta_z is not None]
    better = sum(dz >= 0 for _, dz in pairs)
    losers = ", ".join(f"{b} ({dz:+.2f})" for b, dz in pairs if dz < 0) or "none"
    report(11, len(pairs) == 10 and better >= 8, f"ranked Z >= raw Z for {better}/10 pairs; below: {losers}")


# 12 ------------------------------------------------------------------------------------------


@pytest.mark.slow
def test_c12_timewise_stability():
    d = generate(n_threads=1500, profile="rating+speed", seed=12, span_days=365)
    spec = LearnerEntry(LearnerSpec("gbt"))
    tw = ExperimentConfig(design="timewise", train_dataset=d, learners=(spec,), seed=0,
                          timewise=TimewiseConfig(21, 14, 30))
    res_t = run_timewise(tw)
    batch_auc = res_t.models["gbt"]["samples"]["auc"]
    cv_auc = run_within_cv(_within(d, (spec,), 10, 2)).models["gbt"]["summary"]["mean_auc"]
    times = answer_times(d)
    batches = timewise_batches(d, 21, 14, 30)
    growth = all(len(a.train_idx) <= len(b.train_idx) for a, b in zip(batches, batches[1:]))
    no_leak = all(times[b.train_idx].max() < b.start.timestamp() <= times[b.test_idx].min()
                  for b in batches if len(b.test_idx))
    gap = abs(float(np.mean(batch_auc)) - cv_auc)
    report(12, gap < 0.05 and growth and no_leak,
           f"mean batch AUC {np.mean(batch_auc):.4f} over {len(batch_auc)} batches vs CV {cv_auc:.4f} "
           f"(|diff| {gap:.4f}); monotone growth {growth}, no leakage {no_leak}")


# 13 ------------------------------------------------------------------------------------------


def test_c13_ingestion_goldens():
    xml = load_dataset(FIXTURES / "posts.xml")
    golden = (FIXTURES / "posts.golden.jsonl").read_bytes()
    checks = {
        "xml golden": serialize_normalized_jsonl(xml) == golden,
        "jsonl golden": serialize_normalized_jsonl(load_dataset(FIXTURES / "posts.golden.jsonl")) == golden,
        "xml stats": dataset_stats(xml).render() == (FIXTURES / "posts.stats.txt").read_text(),
    }
    for case in json.loads((FIXTURES / "clean_body.json").read_text()):
        c = clean_body(case["html"])
        if (c.plain_text, c.contained_hyperlink, c.stripped_code_blocks) != (
                case["text"], case["hyperlink"], case["code_blocks"]):
            checks[f"clean_body {case['html'][:20]!r}"] = False
    s = dataset_stats(load_dataset(FIXTURES / "stats_1to4.jsonl"))
    checks["1:4 fixture"] = (s.answers, s.accepted, s.ratio, round(s.resolved_pct, 2)) == (30, 6, "1:4", 60.0)
    bad = [k for k, v in checks.items() if not v]
    report(13, not bad, "goldens, clean_body fixtures and hand counts match" if not bad else f"failed: {bad}")


# 14 ------------------------------------------------------------------------------------------


@pytest.mark.slow
def test_c14_determinism(tmp_path):
    d = generate(n_threads=150, seed=14, span_days=120)
    other = generate(n_threads=80, seed=15)
    gbt = LearnerEntry(LearnerSpec("gbt"), tune=True)
    lr = LearnerEntry(LearnerSpec("logistic_regression"))
    common = dict(train_dataset=d, learners=(gbt, lr), cv=CVConfig(3, 2), tuning=TuningConfig(2, 3, 1), seed=7)
    configs = [
        ExperimentConfig(design="within_cv", **common),
        ExperimentConfig(design="cross_platform", test_datasets=(other,), **common),
        ExperimentConfig(design="ablation", ablation_disable=("age", "age_ranked"), **common),
        ExperimentConfig(design="corner_case", **common),
        ExperimentConfig(design="timewise", timewise=TimewiseConfig(21, 14, 30), **common),
        ExperimentConfig(design="feature_selection",
                         feature_selection=FeatureSelectionConfig(5, 3, LearnerSpec("gbt", {"n_trees": 30})),
                         **common),
    ]
    same = []
    for cfg in configs:
        a, b = run_experiment(cfg).to_json(), run_experiment(cfg).to_json()
        same.append((cfg.design, a == b))
    # the CLI path as well: two runs, byte-identical result.json
    cfgfile = tmp_path / "c.yaml"
    cfgfile.write_text("schema: 1\ndesign: within_cv\ntrain_dataset: {synthetic: {n_threads: 80, seed: 3}}\n"
                       "learners: [{family: gbt}]\ncv: {k: 3, repeats: 2}\nseed: 4\n")
    for out in ("r1", "r2"):
        assert cli_main(["experiment", "--config", str(cfgfile), "--out", str(tmp_path / out)]) == 0
    same.append(("cli", (tmp_path / "r1" / "result.json").read_bytes()
                 == (tmp_path / "r2" / "result.json").read_bytes()))
    bad = [k for k, v in same if not v]
    report(14, not bad, f"byte-identical re-runs for {len(same)} experiments" if not bad
           else f"differs: {bad}")


if __name__ == "__main__":
    import tempfile

    wanted = {int(a) for a in sys.argv[1:]}
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c") and callable(fn) and (not wanted or int(name[6:8]) in wanted):
            args = [Path(tempfile.mkdtemp())] if fn.__code__.co_argcount else []
            try:
                fn(*args)
            except AssertionError:
                failed += 1
            except Exception as e:  # report and continue with the next criterion
                failed += 1
                print(f"{name}: ERROR {type(e).__name__}: {e}")
    sys.exit(1 if failed else 0)
