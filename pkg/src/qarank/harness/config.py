"""Experiment configuration: a versioned YAML/JSON document.

Schema (version 1)::

    schema: 1
    design: within_cv | cross_platform | timewise | ablation | corner_case | feature_selection
    train_dataset: <dataset ref>
    test_datasets: [<dataset ref>, ...]        # cross_platform only
    learners:
      - {family: gbt, name: gbt, hyperparameters: {...}, seed: 0, tune: true}
    cv: {k: 10, repeats: 10, by_thread: false}
    tuning: {budget: 5, k: 10, repeats: 1}
    seed: 0
    features: {disabled: [...], directions: {age: ascending, ...}}
    train_cap: null                             # max training answers
    timewise: {window_days: 21, shift_days: 14, base_days: 30}
    ablation: {disable: [rating_score, rating_score_ranked]}
    feature_selection: {repetitions: 10, holdout_folds: 3, learner: {family: gbt}}
    scott_knott: {alpha: 0.01, negligible_d: 0.2}

A dataset ref is a path (``.xml``, ``.jsonl``, or for test sets a feature
``.csv``), a mapping ``{path: ..., format: xml|jsonl|csv}``, or
``{synthetic: {n_threads: ..., profile: ..., seed: ...}}``.  Relative paths
resolve against the config file's directory.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml

from qarank.features import FEATURE_NAMES, RANKED_BASES
from qarank.learners import LearnerSpec
from qarank.model import Dataset
from qarank.synth import SynthConfig, parse_profile

SCHEMA_VERSION = 1
DESIGNS = ("within_cv", "cross_platform", "timewise", "ablation", "corner_case", "feature_selection")
_TOP_KEYS = {"schema", "design", "train_dataset", "test_datasets", "learners", "cv", "tuning", "seed",
             "features", "train_cap", "timewise", "ablation", "feature_selection", "scott_knott"}


class ConfigError(ValueError):
    """Carries every schema violation found, not just the first."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid experiment config:\n" + "\n".join(f"  - {e}" for e in self.errors))


@dataclass(frozen=True)
class LearnerEntry:
    spec: LearnerSpec
    tune: bool = False

    def as_dict(self) -> dict:
        return {**self.spec.as_dict(), "tune": self.tune}


@dataclass(frozen=True)
class CVConfig:
    k: int = 10
    repeats: int = 10
    by_thread: bool = False


@dataclass(frozen=True)
class TuningConfig:
    budget: int = 5
    k: int = 10
    repeats: int = 1


@dataclass(frozen=True)
class TimewiseConfig:
    window_days: float = 21.0
    shift_days: float = 14.0
    base_days: float | None = None


@dataclass(frozen=True)
class FeatureSelectionConfig:
    repetitions: int = 10
    holdout_folds: int = 3
    learner: LearnerSpec = field(default_factory=lambda: LearnerSpec("gbt"))


@dataclass(frozen=True)
class ExperimentConfig:
    design: str
    train_dataset: Any
    test_datasets: tuple = ()
    learners: tuple[LearnerEntry, ...] = ()
    cv: CVConfig = CVConfig()
    tuning: TuningConfig = TuningConfig()
    seed: int = 0
    disabled_features: tuple[str, ...] = ()
    directions: dict = field(default_factory=dict)
    train_cap: int | None = None
    timewise: TimewiseConfig = TimewiseConfig()
    ablation_disable: tuple[str, ...] = ()
    feature_selection: FeatureSelectionConfig = FeatureSelectionConfig()
    alpha: float = 0.01
    negligible_d: float = 0.2
    base_dir: Path = field(default=Path("."), compare=False)

    def __post_init__(self) -> None:
        errors = _semantic_errors(self)
        if errors:
            raise ConfigError(errors)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(n for n in FEATURE_NAMES if n not in self.disabled_features)

    def with_overrides(self, **kw) -> ExperimentConfig:
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(kw)
        return ExperimentConfig(**values)

    def to_dict(self) -> dict:
        """Canonical form; in-memory datasets appear by name and content hash."""
        return {
            "schema": SCHEMA_VERSION,
            "design": self.design,
            "train_dataset": describe_ref(self.train_dataset),
            "test_datasets": [describe_ref(r) for r in self.test_datasets],
            "learners": [e.as_dict() for e in self.learners],
            "cv": {"k": self.cv.k, "repeats": self.cv.repeats, "by_thread": self.cv.by_thread},
            "tuning": {"budget": self.tuning.budget, "k": self.tuning.k, "repeats": self.tuning.repeats},
            "seed": self.seed,
            "features": {"disabled": list(self.disabled_features), "directions": dict(sorted(self.directions.items()))},
            "train_cap": self.train_cap,
            "timewise": {"window_days": self.timewise.window_days, "shift_days": self.timewise.shift_days,
                         "base_days": self.timewise.base_days},
            "ablation": {"disable": list(self.ablation_disable)},
            "feature_selection": {"repetitions": self.feature_selection.repetitions,
                                  "holdout_folds": self.feature_selection.holdout_folds,
                                  "learner": self.feature_selection.learner.as_dict()},
            "scott_knott": {"alpha": self.alpha, "negligible_d": self.negligible_d},
        }

    def config_hash(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    @classmethod
    def from_dict(cls, raw: dict, base_dir: Path | str = ".") -> ExperimentConfig:
        errors: list[str] = []
        build = _parse(raw, Path(base_dir), errors)
        if build is None:
            raise ConfigError(errors)
        cfg = None
        try:
            cfg = build()
        except ConfigError as e:
            errors.extend(e.errors)
        if errors:
            raise ConfigError(list(dict.fromkeys(errors)))
        return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ConfigError([f"{path}: not valid YAML/JSON ({e})"]) from None
    return ExperimentConfig.from_dict(raw, path.parent)


def describe_ref(ref) -> Any:
    if isinstance(ref, Dataset):
        from qarank.ingestion import serialize_normalized_jsonl

        return {"in_memory": ref.name, "sha256": hashlib.sha256(serialize_normalized_jsonl(ref)).hexdigest()}
    if isinstance(ref, Path):
        return str(ref)
    return ref


# -- parsing -------------------------------------------------------------------------------


def _section(raw: dict, key: str, allowed: set[str], errors: list[str]) -> dict:
    sec = raw.get(key) or {}
    if not isinstance(sec, dict):
        errors.append(f"{key}: expected a mapping")
        return {}
    for extra in sorted(set(sec) - allowed):
        errors.append(f"{key}.{extra}: unknown key")
    return sec


def _int(sec: dict, key: str, default, lo: int, where: str, errors: list[str]):
    v = sec.get(key, default)
    if v is None:
        return v
    if isinstance(v, bool) or not isinstance(v, int) or v < lo:
        errors.append(f"{where}.{key}: expected an integer >= {lo}, got {v!r}")
        return default
    return v


def _num(sec: dict, key: str, default, where: str, errors: list[str], positive=True):
    v = sec.get(key, default)
    if v is None:
        return v
    if isinstance(v, bool) or not isinstance(v, (int, float)) or (positive and v <= 0):
        errors.append(f"{where}.{key}: expected a {'positive ' if positive else ''}number, got {v!r}")
        return default
    return float(v)


def _check_ref(ref, where: str, base_dir: Path, errors: list[str], allow_csv: bool):
    if isinstance(ref, Dataset):
        return ref
    if isinstance(ref, (str, Path)):
        ref = {"path": str(ref)}
    if not isinstance(ref, dict):
        errors.append(f"{where}: expected a path or mapping, got {ref!r}")
        return ref
    if "synthetic" in ref:
        spec = ref["synthetic"] or {}
        bad = set(spec) - {f.name for f in fields(SynthConfig)}
        if bad:
            errors.append(f"{where}.synthetic: unknown keys {sorted(bad)}")
        elif "profile" in spec:
            try:
                parse_profile(spec["profile"])
            except ValueError as e:
                errors.append(f"{where}.synthetic.profile: {e}")
        return ref
    if "path" not in ref:
        errors.append(f"{where}: needs 'path' or 'synthetic'")
        return ref
    p = Path(ref["path"])
    p = p if p.is_absolute() else base_dir / p
    fmt = ref.get("format") or p.suffix.lstrip(".").lower()
    formats = ("xml", "jsonl", "csv") if allow_csv else ("xml", "jsonl")
    if fmt not in formats:
        errors.append(f"{where}: format {fmt!r} not one of {', '.join(formats)}")
    if not p.is_file():
        errors.append(f"{where}: dataset file {p} does not exist")
    return {"path": str(p), "format": fmt}


def _learner(raw, where: str, errors: list[str]) -> LearnerEntry | None:
    if not isinstance(raw, dict):
        errors.append(f"{where}: expected a mapping")
        return None
    bad = set(raw) - {"family", "name", "hyperparameters", "seed", "tune"}
    if bad:
        errors.append(f"{where}: unknown keys {sorted(bad)}")
    if "family" not in raw:
        errors.append(f"{where}: missing 'family'")
        return None
    try:
        spec = LearnerSpec(raw["family"], dict(raw.get("hyperparameters") or {}), int(raw.get("seed", 0)),
                           raw.get("name"))
    except (ValueError, TypeError) as e:
        errors.append(f"{where}: {e}")
        return None
    return LearnerEntry(spec, bool(raw.get("tune", False)))


def _parse(raw, base_dir: Path, errors: list[str]):
    if not isinstance(raw, dict):
        errors.append("config must be a mapping")
        return None
    for extra in sorted(set(raw) - _TOP_KEYS):
        errors.append(f"{extra}: unknown key")
    if raw.get("schema") != SCHEMA_VERSION:
        errors.append(f"schema: expected {SCHEMA_VERSION}, got {raw.get('schema')!r}")
    design = raw.get("design")
    if design not in DESIGNS:
        errors.append(f"design: expected one of {', '.join(DESIGNS)}, got {design!r}")

    train = None
    if "train_dataset" not in raw:
        errors.append("train_dataset: required")
    else:
        train = _check_ref(raw["train_dataset"], "train_dataset", base_dir, errors, allow_csv=False)
    tests_raw = raw.get("test_datasets") or []
    if not isinstance(tests_raw, list):
        errors.append("test_datasets: expected a list")
        tests_raw = []
    tests = tuple(_check_ref(r, f"test_datasets[{i}]", base_dir, errors, allow_csv=True)
                  for i, r in enumerate(tests_raw))
    if design == "cross_platform" and not tests:
        errors.append("test_datasets: cross_platform needs at least one test dataset")

    learners_raw = raw.get("learners") or []
    if not isinstance(learners_raw, list):
        errors.append("learners: expected a list")
        learners_raw = []
    learners = tuple(e for i, r in enumerate(learners_raw)
                     if (e := _learner(r, f"learners[{i}]", errors)) is not None)
    if design not in (None, "feature_selection") and not learners_raw:
        errors.append("learners: at least one learner is required")

    cv = _section(raw, "cv", {"k", "repeats", "by_thread"}, errors)
    cv_cfg = CVConfig(_int(cv, "k", 10, 2, "cv", errors), _int(cv, "repeats", 10, 1, "cv", errors),
                      bool(cv.get("by_thread", False)))
    tu = _section(raw, "tuning", {"budget", "k", "repeats"}, errors)
    tu_cfg = TuningConfig(_int(tu, "budget", 5, 1, "tuning", errors), _int(tu, "k", 10, 2, "tuning", errors),
                          _int(tu, "repeats", 1, 1, "tuning", errors))
    seed = _int(raw, "seed", 0, 0, "config", errors)

    feats = _section(raw, "features", {"disabled", "directions"}, errors)
    disabled = feats.get("disabled") or []
    if not isinstance(disabled, list):
        errors.append("features.disabled: expected a list")
        disabled = []
    directions = feats.get("directions") or {}
    if not isinstance(directions, dict):
        errors.append("features.directions: expected a mapping")
        directions = {}

    train_cap = _int(raw, "train_cap", None, 1, "config", errors)

    tw = _section(raw, "timewise", {"window_days", "shift_days", "base_days"}, errors)
    tw_cfg = TimewiseConfig(_num(tw, "window_days", 21.0, "timewise", errors),
                            _num(tw, "shift_days", 14.0, "timewise", errors),
                            _num(tw, "base_days", None, "timewise", errors))
    ab = _section(raw, "ablation", {"disable"}, errors)
    ab_disable = ab.get("disable") or []
    if not isinstance(ab_disable, list):
        errors.append("ablation.disable: expected a list")
        ab_disable = []

    fs = _section(raw, "feature_selection", {"repetitions", "holdout_folds", "learner"}, errors)
    fs_learner = _learner(fs.get("learner", {"family": "gbt"}), "feature_selection.learner", errors)
    fs_cfg = FeatureSelectionConfig(_int(fs, "repetitions", 10, 1, "feature_selection", errors),
                                    _int(fs, "holdout_folds", 3, 2, "feature_selection", errors),
                                    fs_learner.spec if fs_learner else LearnerSpec("gbt"))
    sk = _section(raw, "scott_knott", {"alpha", "negligible_d"}, errors)
    alpha = _num(sk, "alpha", 0.01, "scott_knott", errors)
    neg_d = _num(sk, "negligible_d", 0.2, "scott_knott", errors, positive=False)

    def build() -> ExperimentConfig:
        return ExperimentConfig(
            design=design, train_dataset=train, test_datasets=tests, learners=learners, cv=cv_cfg,
            tuning=tu_cfg, seed=seed, disabled_features=tuple(disabled), directions=dict(directions),
            train_cap=train_cap, timewise=tw_cfg, ablation_disable=tuple(ab_disable),
            feature_selection=fs_cfg, alpha=alpha, negligible_d=neg_d, base_dir=base_dir,
        )

    return build


def _semantic_errors(c: ExperimentConfig) -> list[str]:
    """Cross-field rules, shared by file-loaded and programmatic configs."""
    errs = []
    if c.design not in DESIGNS:
        errs.append(f"design: expected one of {', '.join(DESIGNS)}, got {c.design!r}")
    for n in c.disabled_features:
        if n not in FEATURE_NAMES:
            errs.append(f"features.disabled: unknown feature {n!r}")
    if set(FEATURE_NAMES) <= set(c.disabled_features):
        errs.append("features.disabled: cannot disable every feature")
    for k, v in c.directions.items():
        if k not in RANKED_BASES:
            errs.append(f"features.directions: {k!r} is not a ranked feature")
        if v not in ("ascending", "descending"):
            errs.append(f"features.directions.{k}: expected ascending or descending, got {v!r}")
    labels = [e.spec.label for e in c.learners]
    for dup in sorted({x for x in labels if labels.count(x) > 1}):
        errs.append(f"learners: duplicate learner name {dup!r} (set distinct 'name' fields)")
    if c.design == "ablation":
        if not c.ablation_disable:
            errs.append("ablation.disable: ablation needs at least one feature to disable")
        for n in c.ablation_disable:
            if n not in FEATURE_NAMES:
                errs.append(f"ablation.disable: unknown feature {n!r}")
        if set(c.feature_names) <= set(c.ablation_disable):
            errs.append("ablation.disable: cannot disable every feature")
    if c.design == "timewise" and c.timewise.base_days is None:
        errs.append("timewise.base_days: required for the timewise design")
    if c.design == "feature_selection" and c.feature_selection.repetitions < 5:
        errs.append("feature_selection.repetitions: need at least 5 repetitions for a stable sd")
    if c.design == "cross_platform" and not c.test_datasets:
        errs.append("test_datasets: cross_platform needs at least one test dataset")
    if not 0 < c.alpha < 1:
        errs.append(f"scott_knott.alpha: must be in (0, 1), got {c.alpha}")
    if c.negligible_d < 0:
        errs.append("scott_knott.negligible_d: must be >= 0")
    return errs
