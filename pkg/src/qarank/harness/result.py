"""ExperimentResult: deterministic JSON plus flat CSV tables and ROC files."""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from qarank.evaluation import RocCurve

RESULT_FORMAT_VERSION = 1


def plain(obj):
    """Recursively convert to JSON-ready builtins; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _revive(obj):
    if isinstance(obj, dict):
        return {k: _revive(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_revive(v) for v in obj]
    if obj in ("nan", "inf", "-inf"):
        return float(obj)
    return obj


def safe_name(s: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.+-]+", "_", s).strip("_") or "x"


@dataclass
class ExperimentResult:
    design: str
    config: dict
    provenance: dict
    models: dict = field(default_factory=dict)
    clusters: list = field(default_factory=list)
    tests: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    rocs: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def payload(self) -> dict:
        # wall time lives in the run manifest so that this stays byte-stable
        return plain({
            "format": RESULT_FORMAT_VERSION,
            "design": self.design,
            "config": self.config,
            "provenance": self.provenance,
            "models": self.models,
            "clusters": self.clusters,
            "tests": self.tests,
            "tables": self.tables,
            "details": self.details,
            "failures": self.failures,
        })

    def to_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ExperimentResult:
        d = _revive(json.loads(text))
        if d.get("format") != RESULT_FORMAT_VERSION:
            raise ValueError(f"unsupported result format {d.get('format')!r}")
        return cls(d["design"], d["config"], d["provenance"], d["models"], d["clusters"], d["tests"],
                   d["tables"], d["details"], d["failures"])

    def auc_samples(self) -> dict[str, list[float]]:
        return {k: v["samples"]["auc"] for k, v in self.models.items() if "samples" in v}

    def write(self, out_dir: str | Path, svg: bool = False) -> list[Path]:
        """Write result.json, one CSV per table and one CSV (plus SVG) per ROC curve."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = [_atomic(out / "result.json", self.to_json())]
        for name in sorted(self.tables):
            written.append(_atomic(out / f"{safe_name(name)}.csv", table_csv(self.tables[name])))
        for key in sorted(self.rocs):
            curve: RocCurve = self.rocs[key]
            base = f"roc_{safe_name(key)}"
            written.append(_atomic(out / f"{base}.csv", curve.to_csv()))
            if svg:
                written.append(_atomic(out / f"{base}.svg", curve.to_svg(title=key)))
        return written


def table_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    cols = list(rows[0])
    for r in rows[1:]:
        cols.extend(c for c in r if c not in cols)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow(["" if r.get(c) is None else _cell(r.get(c)) for c in cols])
    return buf.getvalue()


def _cell(v):
    v = plain(v)
    if isinstance(v, list):
        return " ".join(str(x) for x in v)
    return repr(v) if isinstance(v, float) else v


def _atomic(path: Path, text: str) -> Path:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)
    return path
