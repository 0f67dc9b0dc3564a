"""``qarank`` command line: ingest, featurize, experiment, synth.

Exit codes: 0 success, 1 usage or config error, 2 data error, 3 internal error.
Every command writes a run manifest (JSON) next to its outputs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from pathlib import Path

import qarank

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
SEED_ENV = "QARANK_SEED"

log = logging.getLogger("qarank.cli")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2, which we reserve for data errors
        raise UsageError(f"{self.prog}: {message}")


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def atomic_write(path: Path, data: bytes | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data.encode("utf-8") if isinstance(data, str) else data)
    tmp.replace(path)
    return path


def write_manifest(path: Path, command: str, argv: list[str], inputs: list[Path], outputs: list[Path],
                   seed: int | None, wall_time: float, config: Path | None = None) -> Path:
    manifest = {
        "command": command,
        "argv": argv,
        "config": str(config) if config else None,
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "outputs": {str(p): sha256_file(p) for p in outputs},
        "seed": seed,
        "tool_version": qarank.__version__,
        "wall_time": round(wall_time, 3),
    }
    return atomic_write(path, json.dumps(manifest, indent=1, sort_keys=True) + "\n")


def _env_seed() -> int | None:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


# -- commands -----------------------------------------------------------------------------


def cmd_ingest(args) -> int:
    from qarank.ingestion import parse_normalized_jsonl, parse_stackexchange_xml, serialize_normalized_jsonl
    from qarank.model import dataset_stats

    t0 = time.perf_counter()
    src = Path(args.input)
    with src.open("rb") as fh:
        if args.format == "xml":
            d = parse_stackexchange_xml(fh, name=args.name or src.stem)
        else:
            d = parse_normalized_jsonl(fh, name=args.name, default_name=src.stem)
    if not d.threads:
        print("warning: dataset is empty", file=sys.stderr)
    out = atomic_write(Path(args.out), serialize_normalized_jsonl(d))
    print(dataset_stats(d).render(), end="")
    write_manifest(_manifest_path(out), "ingest", sys.argv[1:], [src], [out], None, time.perf_counter() - t0)
    return EXIT_OK


def cmd_featurize(args) -> int:
    from qarank.features import TextCache
    from qarank.ingestion import load_dataset

    t0 = time.perf_counter()
    src = Path(args.dataset)
    d = load_dataset(src, args.format)
    inputs = [src]
    if args.vocab_from == "self":
        vsrc = d
    else:
        if not args.vocab_dataset:
            raise UsageError("--vocab-from train needs --vocab-dataset (the training corpus)")
        vpath = Path(args.vocab_dataset)
        if not vpath.is_file():
            raise FileNotFoundError(f"vocabulary dataset {vpath} does not exist")
        vsrc = load_dataset(vpath)
        inputs.append(vpath)
    cache = TextCache(d)
    voc = cache.vocabulary() if vsrc is d else TextCache(vsrc).vocabulary()
    table = cache.table(cache.ll_n(voc))
    out = atomic_write(Path(args.out), table.to_csv())
    print(f"{len(table)} rows, {len(table.feature_names)} features -> {out}")
    write_manifest(_manifest_path(out), "featurize", sys.argv[1:], inputs, [out], None, time.perf_counter() - t0)
    return EXIT_OK


def cmd_synth(args) -> int:
    from qarank.ingestion import serialize_normalized_jsonl
    from qarank.model import dataset_stats
    from qarank.synth import SynthConfig, generate

    t0 = time.perf_counter()
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    seed = _resolve_seed(args.seed, None)
    try:
        d = generate(SynthConfig(n_threads=args.threads, profile=args.signal, seed=seed))
    except ValueError as e:
        raise UsageError(str(e)) from None
    out = atomic_write(Path(args.out), serialize_normalized_jsonl(d))
    print(dataset_stats(d).render(), end="")
    write_manifest(_manifest_path(out), "synth", sys.argv[1:], [], [out], seed, time.perf_counter() - t0)
    return EXIT_OK


def cmd_experiment(args) -> int:
    from qarank.harness import load_config, run_experiment

    t0 = time.perf_counter()
    cfg_path = Path(args.config)
    if not cfg_path.is_file():
        raise UsageError(f"config file {cfg_path} does not exist")
    cfg = load_config(cfg_path)
    overrides = {}
    seed = _resolve_seed(args.seed, cfg.seed if _config_has_seed(cfg_path) else None)
    if seed != cfg.seed:
        overrides["seed"] = seed
    if args.train_cap is not None:
        if args.train_cap < 1:
            raise UsageError("--train-cap must be >= 1")
        overrides["train_cap"] = args.train_cap
    if overrides:
        cfg = cfg.with_overrides(**overrides)
    result = run_experiment(cfg)
    out_dir = Path(args.out)
    outputs = result.write(out_dir, svg=args.svg)
    inputs = [cfg_path] + [Path(r["path"]) for r in [cfg.train_dataset, *cfg.test_datasets]
                           if isinstance(r, dict) and "path" in r]
    write_manifest(out_dir / "manifest.json", "experiment", sys.argv[1:], inputs, outputs, cfg.seed,
                   time.perf_counter() - t0, cfg_path)
    _print_summary(result)
    return EXIT_OK


def _config_has_seed(path: Path) -> bool:
    import yaml

    raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    return isinstance(raw, dict) and "seed" in raw


def _resolve_seed(flag: int | None, config_seed: int | None) -> int:
    """--seed flag, then the config's own seed, then QARANK_SEED, then 0."""
    for s in (flag, config_seed, _env_seed()):
        if s is not None:
            if s < 0:
                raise UsageError(f"seed must be >= 0, got {s}")
            return s
    return 0


def _print_summary(result) -> None:
    for name, rows in sorted(result.tables.items()):
        if not rows:
            continue
        print(f"== {name}")
        cols = [c for c in rows[0] if c not in ("reports",)]
        print("\t".join(cols))
        for r in rows:
            print("\t".join(_fmt(r.get(c)) for c in cols))
    for lab, msg in sorted(result.failures.items()):
        print(f"warning: learner {lab} failed: {msg}", file=sys.stderr)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.4f}"
    if isinstance(v, list):
        return ",".join(str(x) for x in v)
    return "" if v is None else str(v)


def _manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


# -- entry point --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qarank", description="Best-answer prediction toolkit.")
    p.add_argument("--version", action="version", version=f"qarank {qarank.__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", help="parse a dump into the normalized JSONL store")
    s.add_argument("--format", choices=("xml", "jsonl"), required=True)
    s.add_argument("--in", dest="input", required=True, help="input file")
    s.add_argument("--out", required=True, help="normalized dataset file to write")
    s.add_argument("--name", help="dataset name (default: input file stem)")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("featurize", help="write the 22-feature CSV for a dataset")
    s.add_argument("--dataset", required=True)
    s.add_argument("--format", choices=("xml", "jsonl"))
    s.add_argument("--vocab-from", choices=("train", "self"), default="self",
                   help="vocabulary source: this dataset (self) or a training corpus (train)")
    s.add_argument("--vocab-dataset", help="training corpus used with --vocab-from train")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_featurize)

    s = sub.add_parser("experiment", help="run an experiment config")
    s.add_argument("--config", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--train-cap", type=int, help="max training answers (whole threads are kept)")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--svg", action="store_true", help="also render ROC curves as SVG")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("synth", help="generate a synthetic corpus with a known signal")
    s.add_argument("--threads", type=int, required=True)
    s.add_argument("--signal", default="rating+speed",
                   help="no-signal, interaction, scaled or a '+'-joined subset of "
                        "rating, speed, length, wordiness, vocabulary")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv: list[str] | None = None) -> int:
    from qarank.harness import ConfigError, SchemaError
    from qarank.ingestion import IngestError
    from qarank.learners import TrainingError
    from qarank.model import FoldError

    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestError, SchemaError, FoldError, TrainingError, OSError, ValueError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:  # invariant breach or bug
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
