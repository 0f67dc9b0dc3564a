"""Experimental designs: within-platform CV, cross-platform, ablation,
corner cases, timewise batches and feature selection."""

from __future__ import annotations

import dataclasses
import logging
import time
from typing import Callable

import numpy as np

import qarank
from qarank.evaluation import (
    DegenerateTestError,
    cohens_d,
    delong_test,
    metric_report,
    roc_curve,
    scott_knott_esd,
    wilcoxon_signed_rank,
)
from qarank.harness.config import ExperimentConfig, LearnerEntry
from qarank.harness.data import FeatureCsv, FoldFeatures, cap_threads, content_hash, external_matrix, resolve
from qarank.harness.result import ExperimentResult
from qarank.harness.selection import select_features
from qarank.harness.timewise import timewise_batches
from qarank.learners import LADDERS, LearnerSpec, TrainedModel, train, tune
from qarank.learners.tuning import cv_splits
from qarank.model import Dataset, FoldError

log = logging.getLogger("qarank.harness")

FoldFn = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]


def derive_seed(seed: int, *tags: int) -> int:
    return int(np.random.SeedSequence([seed, *tags]).generate_state(1)[0])


# -- shared building blocks ---------------------------------------------------------------


def _splits(y, cv, seed, groups=None, rows=None):
    """Repeated stratified k-fold splits, optionally over a subset of ``rows``."""
    if rows is None:
        return cv_splits(y, cv.k, cv.repeats, seed, groups if cv.by_thread else None)
    rows = np.asarray(rows)
    g = None if groups is None or not cv.by_thread else groups[rows]
    return [(rows[a], rows[b]) for a, b in cv_splits(y[rows], cv.k, cv.repeats, seed, g)]


def tune_entries(entries, fold_fn: FoldFn, y, names, cfg: ExperimentConfig, seed: int,
                 groups=None, rows=None) -> tuple[dict[str, LearnerSpec], dict, dict]:
    """Resolve each entry to a concrete spec, tuning those that ask for it."""
    specs, traces, failures = {}, {}, {}
    tcv = dataclasses.replace(cfg.cv, k=cfg.tuning.k, repeats=cfg.tuning.repeats)
    splits = None
    for e in entries:
        label = e.spec.label
        if not (e.tune and LADDERS[e.spec.family] and cfg.tuning.budget > 1):
            specs[label] = e.spec
            continue
        if splits is None:
            splits = _splits(y, tcv, derive_seed(seed, 1), groups, rows)
        try:
            res = tune(e.spec, None, y, budget=cfg.tuning.budget, splits=splits, fold_fn=fold_fn,
                       feature_names=names)
        except Exception as ex:  # recorded, learner excluded downstream
            log.warning("tuning %s failed: %s", label, ex)
            failures[label] = f"tuning: {type(ex).__name__}: {ex}"
            continue
        specs[label] = e.spec.with_params(**res.best)
        traces[label] = {"best": res.best, "best_mean_auc": res.best_mean_auc, "trace": res.trace}
    return specs, traces, failures


def evaluate_cv(specs: dict[str, LearnerSpec], fold_fn: FoldFn, y, names, splits, k: int,
                failures: dict | None = None):
    """Train/score every learner on every split (splits outer, learners inner).

    Returns per-learner AUC/Balance samples, per-fold reports and the pooled
    out-of-fold scores of the first repeat (for ROC curves).
    """
    failures = {} if failures is None else failures
    live = [lab for lab in specs if lab not in failures]
    acc = {lab: {"auc": [], "balance": [], "reports": []} for lab in live}
    oof = {lab: np.full(len(y), np.nan) for lab in live}
    first = np.zeros(len(y), dtype=bool)
    for s, (tr, te) in enumerate(splits):
        Xtr, Xte = fold_fn(tr, te)
        if s < k:
            first[te] = True
        for lab in live:
            if lab in failures:
                continue
            try:
                m = train(specs[lab], Xtr, y[tr], names)
                sc = m.score(Xte)
                rep = metric_report(sc, y[te])
            except Exception as ex:
                log.warning("learner %s failed on fold %d: %s", lab, s, ex)
                failures[lab] = f"{type(ex).__name__}: {ex}"
                continue
            acc[lab]["auc"].append(rep.auc)
            acc[lab]["balance"].append(rep.balance)
            acc[lab]["reports"].append(rep.as_dict())
            if s < k:
                oof[lab][te] = sc
    ok = [lab for lab in live if lab not in failures]
    rocs = {lab: roc_curve(oof[lab][first], y[first]) for lab in ok}
    return {lab: acc[lab] for lab in ok}, rocs


def summarize(samples: dict) -> dict:
    a = np.asarray(samples["auc"], dtype=float)
    b = np.asarray([x for x in samples["balance"] if x is not None], dtype=float)
    return {
        "n": int(a.size),
        "mean_auc": float(a.mean()),
        "sd_auc": float(a.std(ddof=1)) if a.size > 1 else 0.0,
        "min_auc": float(a.min()),
        "max_auc": float(a.max()),
        "mean_balance": float(b.mean()) if b.size else None,
    }


def cluster(samples: dict[str, list], cfg: ExperimentConfig) -> list[dict]:
    if len(samples) < 2:
        return []
    cl = scott_knott_esd(samples, cfg.alpha, cfg.negligible_d)
    return [{"rank": c.rank, "models": list(c.models), "mean_auc": c.mean} for c in cl]


def _rank_of(clusters: list[dict]) -> dict[str, int]:
    return {m: c["rank"] for c in clusters for m in c["models"]}


def _provenance(cfg: ExperimentConfig, datasets: dict) -> dict:
    return {
        "config_sha256": cfg.config_hash(),
        "seed": cfg.seed,
        "train_cap": cfg.train_cap,
        "datasets": {k: {"name": d.name, "sha256": content_hash(d)} for k, d in datasets.items()},
        "qarank_version": qarank.__version__,
    }


def _train_dataset(cfg: ExperimentConfig) -> tuple[Dataset, Dataset]:
    raw = resolve(cfg.train_dataset, cfg.base_dir)
    if isinstance(raw, FeatureCsv):
        raise ValueError("train_dataset must be a dataset, not a feature CSV")
    return raw, cap_threads(raw, cfg.train_cap, cfg.seed)


def _model_block(spec: LearnerSpec, samples: dict, trace) -> dict:
    return {"family": spec.family, "params": dict(sorted(spec.params.items())), "seed": spec.seed,
            "tuning": trace, "samples": {"auc": samples["auc"], "balance": samples["balance"]},
            "summary": summarize(samples), "reports": samples["reports"]}


def _paired_tests(a, b) -> dict:
    out = {}
    try:
        w = wilcoxon_signed_rank(a, b)
        out.update(w=w.w, p=w.p, n=w.n, exact=w.exact)
    except DegenerateTestError as ex:
        out.update(w=None, p=None, n=0, exact=None, note=str(ex))
    try:
        out["cohens_d"] = cohens_d(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    except (DegenerateTestError, ValueError) as ex:
        out["cohens_d"] = None
        out.setdefault("note", str(ex))
    return out


# -- designs ------------------------------------------------------------------------------


def run_within_cv(cfg: ExperimentConfig, dataset: Dataset | None = None) -> ExperimentResult:
    t0 = time.perf_counter()
    raw, d = (dataset, dataset) if dataset is not None else _train_dataset(cfg)
    ff = FoldFeatures(d, cfg.directions, cfg.disabled_features)
    y = ff.y
    specs, traces, failures = tune_entries(cfg.learners, ff.fold, y, ff.names, cfg, cfg.seed, ff.thread_idx)
    splits = _splits(y, cfg.cv, cfg.seed, ff.thread_idx)
    samples, rocs = evaluate_cv(specs, ff.fold, y, ff.names, splits, cfg.cv.k, failures)
    expected = cfg.cv.k * cfg.cv.repeats
    for lab, s in samples.items():
        assert len(s["auc"]) == expected, f"{lab}: {len(s['auc'])} samples, expected {expected}"
    clusters = cluster({k: v["auc"] for k, v in samples.items()}, cfg)
    ranks = _rank_of(clusters)
    models = {lab: _model_block(specs[lab], s, traces.get(lab)) for lab, s in samples.items()}
    table = sorted(
        ({"cluster": ranks.get(lab), "model": lab, **{k: v for k, v in m["summary"].items() if k != "n"}}
         for lab, m in models.items()),
        key=lambda r: (r["cluster"] or 0, -r["mean_auc"], r["model"]),
    )
    tables = {"within_cv": table,
              "scott_knott": [{"rank": c["rank"], "model": m, "cluster_mean_auc": c["mean_auc"]}
                              for c in clusters for m in c["models"]]}
    return ExperimentResult("within_cv", cfg.to_dict(), _provenance(cfg, {"train": d}), models, clusters,
                            {}, tables, {"n_answers": len(y), "n_positive": int(y.sum())}, failures,
                            rocs, time.perf_counter() - t0)


def _test_inputs(cfg: ExperimentConfig) -> list:
    return [resolve(r, cfg.base_dir) for r in cfg.test_datasets]


def _ratio(y) -> str:
    pos, neg = int(np.sum(y)), int(len(y) - np.sum(y))
    if pos == 0:
        return "n/a"
    r = round(neg / pos, 2)
    return f"1:{int(r)}" if float(r).is_integer() else f"1:{r}"


def run_cross_platform(cfg: ExperimentConfig, train_set: Dataset | None = None,
                       test_sets: list | None = None) -> ExperimentResult:
    t0 = time.perf_counter()
    if train_set is None:
        _, train_set = _train_dataset(cfg)
    else:
        train_set = cap_threads(train_set, cfg.train_cap, cfg.seed)
    tests = test_sets if test_sets is not None else _test_inputs(cfg)
    ff = FoldFeatures(train_set, cfg.directions, cfg.disabled_features)
    names = ff.names

    # schema check up front so a bad test set fails before any training
    test_data = []
    for t in tests:
        if isinstance(t, FeatureCsv):
            X, y = t.matrix(names), t.labels
        else:
            X, y = external_matrix(ff, t, names)
        test_data.append((t.name, X, np.asarray(y, dtype=bool), t))
    if len({n for n, *_ in test_data}) != len(test_data):
        raise ValueError("test datasets must have distinct names")

    specs, traces, failures = tune_entries(cfg.learners, ff.fold, ff.y, names, cfg, cfg.seed, ff.thread_idx)
    Xtrain = ff.matrix(np.arange(len(ff)))
    fitted: dict[str, TrainedModel] = {}
    for lab, spec in specs.items():
        try:
            fitted[lab] = train(spec, Xtrain, ff.y, names, {"train": train_set.name})
        except Exception as ex:
            log.warning("training %s failed: %s", lab, ex)
            failures[lab] = f"{type(ex).__name__}: {ex}"
    labels = [lab for lab in specs if lab in fitted]

    cross, baseline, upper, delong, rocs, skipped = {}, {}, {}, {}, {}, {}
    for name, X, y, src in test_data:
        if y.all() or not y.any():
            skipped[name] = "test set has a single class"
            continue
        baseline[name] = metric_report(np.zeros(len(y)), y).as_dict()
        scores = {}
        for lab in labels:
            scores[lab] = fitted[lab].score(X)
            cross[(lab, name)] = metric_report(scores[lab], y).as_dict()
            rocs[f"{lab}__{name}"] = roc_curve(scores[lab], y)
        compared = [lab for lab in labels if specs[lab].family != "trivial_rejector"]
        if len(compared) >= 2:
            a, b = compared[:2]
            try:
                r = delong_test(scores[a], scores[b], y)
                delong[name] = {"model_a": a, "model_b": b, "auc_a": r.auc_a, "auc_b": r.auc_b, "z": r.z, "p": r.p}
            except DegenerateTestError as ex:
                delong[name] = {"model_a": a, "model_b": b, "error": str(ex)}
        upper[name] = _upper_bound(cfg, src, X, y, names)

    tables = {"cross_platform": [], "benchmark": [], "wilcoxon": [], "delong": []}
    for name, X, y, _ in test_data:
        if name in skipped:
            continue
        for lab in labels:
            c = cross[(lab, name)]
            tables["cross_platform"].append({"test_set": name, "ratio": _ratio(y), "model": lab,
                                             "auc": c["auc"], "balance": c["balance"]})
            u = upper[name].get(lab, {})
            tables["benchmark"].append({
                "test_set": name, "model": lab,
                "baseline_auc": baseline[name]["auc"], "baseline_balance": baseline[name]["balance"],
                "cross_auc": c["auc"], "cross_balance": c["balance"],
                "upper_auc": u.get("mean_auc"), "upper_balance": u.get("mean_balance"),
            })
        if name in delong:
            tables["delong"].append({"test_set": name, **delong[name]})

    evaluated = [n for n, *_ in test_data if n not in skipped]
    tests_out = {"delong": delong, "wilcoxon": {}}
    for lab in labels:
        for metric in ("auc", "balance"):
            crs = [cross[(lab, n)][metric] for n in evaluated]
            comps = {"baseline": [baseline[n][metric] for n in evaluated],
                     "upper_bound": [upper[n].get(lab, {}).get(f"mean_{metric}") for n in evaluated]}
            for comp, ref in comps.items():
                pairs = [(c, r) for c, r in zip(crs, ref) if c is not None and r is not None]
                res = _paired_tests([p[0] for p in pairs], [p[1] for p in pairs]) if pairs else {"note": "no data"}
                tests_out["wilcoxon"][f"{lab}:{metric}:{comp}"] = res
                tables["wilcoxon"].append({"model": lab, "metric": metric, "comparison": comp, **res})

    models = {lab: {"family": specs[lab].family, "params": dict(sorted(specs[lab].params.items())),
                    "seed": specs[lab].seed, "tuning": traces.get(lab),
                    "cross": {n: cross[(lab, n)] for n in evaluated}} for lab in labels}
    details = {"baseline": baseline, "upper_bound": upper, "skipped": skipped,
               "n_train_answers": len(ff)}
    ds = {"train": train_set, **{f"test:{t.name}": t for t in tests}}
    return ExperimentResult("cross_platform", cfg.to_dict(), _provenance(cfg, ds), models, [], tests_out,
                            tables, details, failures, rocs, time.perf_counter() - t0)


def _upper_bound(cfg: ExperimentConfig, src, X, y, names) -> dict:
    """Tuned repeated CV on the test platform itself."""
    if isinstance(src, Dataset):
        ff = FoldFeatures(src, cfg.directions, cfg.disabled_features)
        fold_fn, groups = ff.fold, ff.thread_idx
    else:
        fold_fn, groups = (lambda tr, te: (X[tr], X[te])), None
    try:
        specs, _, failures = tune_entries(cfg.learners, fold_fn, y, names, cfg, cfg.seed, groups)
        splits = _splits(y, cfg.cv, cfg.seed, groups)
    except FoldError as ex:
        return {"skipped": str(ex)}
    samples, _ = evaluate_cv(specs, fold_fn, y, names, splits, cfg.cv.k, failures)
    return {lab: {**summarize(s), "params": dict(sorted(specs[lab].params.items()))} for lab, s in samples.items()}


def run_ablation(cfg: ExperimentConfig, dataset: Dataset | None = None) -> ExperimentResult:
    """Full vs ablated feature sets on byte-identical folds."""
    t0 = time.perf_counter()
    if dataset is None:
        _, dataset = _train_dataset(cfg)
    full = FoldFeatures(dataset, cfg.directions, cfg.disabled_features)
    kept = [n for n in full.names if n not in set(cfg.ablation_disable)]
    if not kept:
        raise ValueError("ablation would disable every feature")
    missing = [n for n in cfg.ablation_disable if n not in full.names]
    if missing:
        raise ValueError(f"ablation names features that are not in use: {', '.join(missing)}")
    ablated = full.restrict(kept)
    y = full.y
    specs, traces, failures = tune_entries(cfg.learners, full.fold, y, full.names, cfg, cfg.seed, full.thread_idx)
    splits = _splits(y, cfg.cv, cfg.seed, full.thread_idx)
    s_full, r_full = evaluate_cv(specs, full.fold, y, full.names, splits, cfg.cv.k, dict(failures))
    s_abl, r_abl = evaluate_cv(specs, ablated.fold, y, ablated.names, splits, cfg.cv.k, dict(failures))
    models, rocs, rows, tests = {}, {}, [], {}
    for lab in specs:
        if lab not in s_full or lab not in s_abl:
            failures.setdefault(lab, "failed in one arm")
            continue
        models[f"full:{lab}"] = _model_block(specs[lab], s_full[lab], traces.get(lab))
        models[f"ablated:{lab}"] = _model_block(specs[lab], s_abl[lab], traces.get(lab))
        rocs[f"full_{lab}"], rocs[f"ablated_{lab}"] = r_full[lab], r_abl[lab]
        mf, ma = np.mean(s_full[lab]["auc"]), np.mean(s_abl[lab]["auc"])
        tests[lab] = _paired_tests(s_full[lab]["auc"], s_abl[lab]["auc"])
        rows.append({"model": lab, "full_mean_auc": mf, "ablated_mean_auc": ma, "delta_auc": ma - mf,
                     "relative_change": (ma - mf) / mf, "wilcoxon_p": tests[lab].get("p"),
                     "cohens_d": tests[lab].get("cohens_d")})
    samples = {k: v["samples"]["auc"] for k, v in models.items()}
    clusters = cluster(samples, cfg)
    return ExperimentResult("ablation", cfg.to_dict(), _provenance(cfg, {"train": dataset}), models, clusters,
                            {"paired": tests}, {"ablation": rows},
                            {"disabled": list(cfg.ablation_disable), "kept": kept}, failures, rocs,
                            time.perf_counter() - t0)


def rating_variant(d: Dataset, value: float, name: str) -> Dataset:
    threads = [dataclasses.replace(t, answers=tuple(dataclasses.replace(a, rating_score=value) for a in t.answers))
               for t in d.threads]
    return dataclasses.replace(d.with_threads(threads, name), scores_absent=False)


def single_answer_variant(d: Dataset) -> Dataset:
    return d.with_threads([t for t in d.threads if len(t.answers) == 1], f"{d.name}[single-answer]")


def run_corner_cases(cfg: ExperimentConfig, dataset: Dataset | None = None,
                     models: dict[str, TrainedModel] | None = None) -> ExperimentResult:
    """Re-evaluate on three rating-free variants: all zero (A), all median (B)
    and single-answer threads only (C).  ``models``, when given, are also
    scored as-is on each variant."""
    t0 = time.perf_counter()
    if dataset is None:
        _, dataset = _train_dataset(cfg)
    ratings = [a.rating_score for _, a in dataset.answers()]
    med = float(np.median(ratings)) if ratings else 0.0
    med = int(med) if med.is_integer() else med
    variants = {
        "original": dataset,
        "A_zero": rating_variant(dataset, 0, f"{dataset.name}[rating=0]"),
        "B_median": rating_variant(dataset, med, f"{dataset.name}[rating=median]"),
        "C_single_answer": single_answer_variant(dataset),
    }
    ff0 = FoldFeatures(dataset, cfg.directions, cfg.disabled_features)
    specs, traces, failures = tune_entries(cfg.learners, ff0.fold, ff0.y, ff0.names, cfg, cfg.seed, ff0.thread_idx)
    out_models, rocs, rows, skipped, scored = {}, {}, [], {}, {}
    for vname, vd in variants.items():
        if not vd.answered_threads:
            skipped[vname] = "no threads in this variant"
            log.warning("corner case %s skipped: %s", vname, skipped[vname])
            continue
        ff = ff0 if vname == "original" else FoldFeatures(vd, cfg.directions, cfg.disabled_features)
        y = ff.y
        if y.all() or not y.any():
            skipped[vname] = "single-class labels; AUC undefined"
            log.warning("corner case %s skipped: %s", vname, skipped[vname])
            continue
        try:
            splits = _splits(y, cfg.cv, cfg.seed, ff.thread_idx)
        except FoldError as ex:
            skipped[vname] = str(ex)
            log.warning("corner case %s skipped: %s", vname, ex)
            continue
        samples, r = evaluate_cv(specs, ff.fold, y, ff.names, splits, cfg.cv.k, dict(failures))
        for lab, s in samples.items():
            out_models[f"{vname}:{lab}"] = _model_block(specs[lab], s, traces.get(lab))
            rocs[f"{vname}_{lab}"] = r[lab]
            rows.append({"variant": vname, "model": lab, **summarize(s)})
        if models:
            X = ff.matrix(np.arange(len(ff)))
            for lab, m in models.items():
                cols = [ff.names.index(n) for n in m.feature_names]
                scored[f"{vname}:{lab}"] = metric_report(m.score(X[:, cols]), y).as_dict()
    details = {"median_rating": med, "skipped": skipped, "scored_models": scored,
               "variant_sizes": {k: sum(len(t.answers) for t in v.answered_threads) for k, v in variants.items()}}
    return ExperimentResult("corner_case", cfg.to_dict(), _provenance(cfg, {"train": dataset}), out_models, [], {},
                            {"corner_cases": rows}, details, failures, rocs, time.perf_counter() - t0)


def run_timewise(cfg: ExperimentConfig, dataset: Dataset | None = None) -> ExperimentResult:
    t0 = time.perf_counter()
    if dataset is None:
        _, dataset = _train_dataset(cfg)
    tw = cfg.timewise
    batches = timewise_batches(dataset, tw.window_days, tw.shift_days, tw.base_days)
    ff = FoldFeatures(dataset, cfg.directions, cfg.disabled_features)
    y = ff.y
    # tune on the base period only, so no later answer informs the configuration
    base_rows = batches[0].train_idx
    try:
        specs, traces, failures = tune_entries(cfg.learners, ff.fold, y, ff.names, cfg, cfg.seed,
                                               ff.thread_idx, rows=base_rows)
    except FoldError as ex:
        log.warning("base period too small to tune (%s); using configured parameters", ex)
        specs, traces, failures = {e.spec.label: e.spec for e in cfg.learners}, {}, {}
    per = {lab: {"auc": [], "balance": [], "reports": [], "batches": []} for lab in specs}
    rows = []
    n_max = max(len(b.train_idx) for b in batches)
    for b in batches:
        info = b.as_dict()
        rows_b = {"batch": b.index, "test_start": info["test_start"], "n_train": info["n_train"],
                  "n_test": info["n_test"], "train_fraction": len(b.train_idx) / n_max if n_max else 0.0}
        if b.skip_reason:
            log.warning("batch %d skipped: %s", b.index, b.skip_reason)
            rows.append({**rows_b, "model": None, "auc": None, "balance": None, "skip_reason": b.skip_reason})
            continue
        Xtr, Xte = ff.fold(b.train_idx, b.test_idx)
        for lab, spec in specs.items():
            if lab in failures:
                continue
            try:
                m = train(spec, Xtr, y[b.train_idx], ff.names)
                rep = metric_report(m.score(Xte), y[b.test_idx])
            except Exception as ex:
                log.warning("learner %s failed on batch %d: %s", lab, b.index, ex)
                failures[lab] = f"{type(ex).__name__}: {ex}"
                continue
            per[lab]["auc"].append(rep.auc)
            per[lab]["balance"].append(rep.balance)
            per[lab]["reports"].append(rep.as_dict())
            per[lab]["batches"].append(b.index)
            rows.append({**rows_b, "model": lab, "auc": rep.auc, "balance": rep.balance, "skip_reason": None})
    models = {}
    for lab, s in per.items():
        if lab in failures or not s["auc"]:
            continue
        blk = _model_block(specs[lab], s, traces.get(lab))
        blk["batches"] = s["batches"]
        models[lab] = blk
    details = {"batches": [b.as_dict() for b in batches]}
    return ExperimentResult("timewise", cfg.to_dict(), _provenance(cfg, {"train": dataset}), models, [], {},
                            {"timewise": rows}, details, failures, {}, time.perf_counter() - t0)


def run_feature_selection(cfg: ExperimentConfig, dataset: Dataset | None = None) -> ExperimentResult:
    t0 = time.perf_counter()
    if dataset is None:
        _, dataset = _train_dataset(cfg)
    ff = FoldFeatures(dataset, cfg.directions, cfg.disabled_features)
    fs = cfg.feature_selection
    res = select_features(None, ff.y, ff.names, fs.learner, fs.repetitions, cfg.seed, fs.holdout_folds,
                          fold_fn=ff.fold)
    rows = [f.as_dict() for f in res.ranking]
    details = {"shadow_max_z": res.shadow_max_z, "shadow_median_z": res.shadow_median_z, "drops": res.drops}
    return ExperimentResult("feature_selection", cfg.to_dict(), _provenance(cfg, {"train": dataset}), {}, [], {},
                            {"feature_selection": rows}, details, {}, {}, time.perf_counter() - t0)


RUNNERS = {
    "within_cv": run_within_cv,
    "cross_platform": run_cross_platform,
    "ablation": run_ablation,
    "corner_case": run_corner_cases,
    "timewise": run_timewise,
    "feature_selection": run_feature_selection,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return RUNNERS[cfg.design](cfg)


__all__ = ["run_experiment", "run_within_cv", "run_cross_platform", "run_ablation", "run_corner_cases",
           "run_timewise", "run_feature_selection", "tune_entries", "evaluate_cv", "LearnerEntry"]
