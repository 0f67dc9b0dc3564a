#!/usr/bin/env python3
"""Run the bundled experiment configs through the CLI.

    python scripts/run_experiments.py                 # every config
    python scripts/run_experiments.py ablation timewise --out results --seed 3
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from qarank.cli import main as qarank

CONFIGS = Path(__file__).parent / "configs"


def main(argv=None) -> int:
    names = sorted(p.stem for p in CONFIGS.glob("*.yaml"))
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("configs", nargs="*", metavar="CONFIG", help=f"subset of: {', '.join(names)}")
    ap.add_argument("--out", default="results", help="parent directory for result folders")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--svg", action="store_true")
    args = ap.parse_args(argv)
    unknown = sorted(set(args.configs) - set(names))
    if unknown:
        ap.error(f"unknown config(s): {', '.join(unknown)}")
    status = 0
    for name in args.configs or names:
        argv = ["experiment", "--config", str(CONFIGS / f"{name}.yaml"), "--out", str(Path(args.out) / name)]
        if args.seed is not None:
            argv += ["--seed", str(args.seed)]
        if args.svg:
            argv.append("--svg")
        t0 = time.perf_counter()
        print(f"### {name}", flush=True)
        code = qarank(argv)
        print(f"### {name}: exit {code} in {time.perf_counter() - t0:.1f}s\n", flush=True)
        status = status or code
    return status


if __name__ == "__main__":
    sys.exit(main())
