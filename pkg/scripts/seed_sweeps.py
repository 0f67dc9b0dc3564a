#!/usr/bin/env python3
"""Seed sweeps behind the directional effects: how often does an effect show up?

    python scripts/seed_sweeps.py tuning   --seeds 100
    python scripts/seed_sweeps.py ablation --seeds 100
    python scripts/seed_sweeps.py ranked   --seeds 10
    python scripts/seed_sweeps.py timewise --seeds 5

Each sweep prints one line per seed and a summary count.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from qarank.harness import (
    CVConfig,
    ExperimentConfig,
    LearnerEntry,
    TimewiseConfig,
    TuningConfig,
    run_ablation,
    run_timewise,
    run_within_cv,
    select_features,
)
from qarank.learners import LearnerSpec
from qarank.synth import generate


def tuning(seed: int, n: int) -> tuple[bool, str]:
    """Tuned gbt against the depth-1 default on an interaction corpus."""
    d = generate(n_threads=n, profile="interaction", seed=seed)
    entries = (LearnerEntry(LearnerSpec("gbt", name="tuned"), tune=True),
               LearnerEntry(LearnerSpec("gbt", name="default")))
    cfg = ExperimentConfig("within_cv", d, learners=entries, cv=CVConfig(5, 1), seed=seed,
                           tuning=TuningConfig(3, 3, 1))
    m = run_within_cv(cfg).models
    a, b = np.mean(m["tuned"]["samples"]["auc"]), np.mean(m["default"]["samples"]["auc"])
    return a >= b, f"tuned {a:.4f} default {b:.4f} params {m['tuned']['params']['max_depth']}/{m['tuned']['params']['n_trees']}"


def ablation(seed: int, n: int) -> tuple[bool, str]:
    """Relative AUC loss from dropping both rating features."""
    d = generate(n_threads=n, profile="rating+speed", seed=seed)
    cfg = ExperimentConfig("ablation", d, learners=(LearnerEntry(LearnerSpec("gbt")),), cv=CVConfig(5, 1),
                           seed=seed, ablation_disable=("rating_score", "rating_score_ranked"))
    row = run_ablation(cfg).tables["ablation"][0]
    drop = -row["relative_change"]
    return drop >= 0.05, f"full {row['full_mean_auc']:.4f} ablated {row['ablated_mean_auc']:.4f} drop {drop:.1%}"


def ranked(seed: int, n: int) -> tuple[bool, str]:
    """Ranked against raw importance Z on a corpus with per-thread scale noise."""
    d = generate(n_threads=n, profile="scaled", seed=seed)
    res = select_features(d, learner=LearnerSpec("gbt", {"max_depth": 1, "n_trees": 300}),
                          repetitions=15, seed=seed)
    pairs = [(f.feature, f.delta_z) for f in res.ranking if f.delta_z is not None]
    wins = sum(dz >= 0 for _, dz in pairs)
    below = ", ".join(f"{name}({dz:+.2f})" for name, dz in pairs if dz < 0)
    return wins >= 8, f"{wins}/10 ranked >= raw; below: {below or 'none'}"


def timewise(seed: int, n: int) -> tuple[bool, str]:
    """Mean per-batch AUC against repeated-CV AUC on a stationary corpus."""
    d = generate(n_threads=n, profile="rating+speed", seed=seed, span_days=365)
    entry = (LearnerEntry(LearnerSpec("gbt")),)
    tw = run_timewise(ExperimentConfig("timewise", d, learners=entry, seed=seed,
                                       timewise=TimewiseConfig(21, 14, 30)))
    cv = run_within_cv(ExperimentConfig("within_cv", d, learners=entry, cv=CVConfig(10, 2), seed=seed))
    a = float(np.mean(tw.models["gbt"]["samples"]["auc"]))
    b = cv.models["gbt"]["summary"]["mean_auc"]
    return abs(a - b) < 0.05, f"batches {a:.4f} cv {b:.4f} diff {a - b:+.4f}"


SWEEPS = {"tuning": (tuning, 200), "ablation": (ablation, 200), "ranked": (ranked, 1500),
          "timewise": (timewise, 1500)}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("sweep", choices=sorted(SWEEPS))
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--first-seed", type=int, default=0)
    ap.add_argument("--threads", type=int, help="corpus size (default depends on the sweep)")
    args = ap.parse_args(argv)
    fn, default_n = SWEEPS[args.sweep]
    hits = 0
    for seed in range(args.first_seed, args.first_seed + args.seeds):
        ok, msg = fn(seed, args.threads or default_n)
        hits += ok
        print(f"seed {seed:4d} {'yes' if ok else 'no '} {msg}", flush=True)
    print(f"{args.sweep}: effect present in {hits}/{args.seeds} seeds")
    return 0


if __name__ == "__main__":
    sys.exit(main())
