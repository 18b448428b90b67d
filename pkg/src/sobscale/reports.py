"""Experiment reports with canonical serialization.

Canonical JSON rules: keys sorted, no insignificant whitespace variation,
floats printed with 17 significant digits (``%.17g``, which round-trips
float64 exactly), trailing newline.  Identical configs and seeds therefore
produce byte-identical report files.  Volatile run metadata (wall time,
timestamp) goes to a separate ``*_meta.json`` sidecar that is not part of
the canonical payload.

Emission formats:

* ``json``      canonical report, ``<suite>.json``
* ``csv``       one row per check record: columns  id, operation, inputs,
                measured, threshold, passed  (structured cells are canonical
                JSON strings), ``<suite>.csv``
* ``plotdata``  for each record carrying a series: a two-column
                whitespace-separated file ``<suite>__<id>.dat``
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError

__all__ = [
    "CheckRecord",
    "ExperimentReport",
    "canonical_json",
    "environment_stamp",
    "emit",
]


def _canonical(obj, out: List[str]) -> None:
    if obj is None or isinstance(obj, bool):
        out.append("null" if obj is None else ("true" if obj else "false"))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ConfigError(f"non-finite value {x!r} cannot enter a canonical report")
        out.append(format(x, ".17g"))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key), ensure_ascii=True))
            out.append(":")
            _canonical(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(list(obj)):
            if i:
                out.append(",")
            _canonical(item, out)
        out.append("]")
    else:
        raise ConfigError(f"cannot canonically serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    out: List[str] = []
    _canonical(obj, out)
    out.append("\n")
    return "".join(out)


def environment_stamp() -> Dict[str, str]:
    import scipy

    return {
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
    }


@dataclass
class CheckRecord:
    """One verified quantity: which operation produced it, what was measured,
    against what threshold, and whether it passed."""

    id: str
    operation: str
    inputs: dict
    measured: dict
    threshold: str
    passed: bool
    series: Optional[Dict[str, Sequence[float]]] = None  # {"x": [...], "y": [...]}

    def to_payload(self) -> dict:
        payload = {
            "id": self.id,
            "operation": self.operation,
            "inputs": self.inputs,
            "measured": self.measured,
            "threshold": self.threshold,
            "passed": self.passed,
        }
        if self.series is not None:
            payload["series"] = {k: list(v) for k, v in self.series.items()}
        return payload


@dataclass
class ExperimentReport:
    suite: str
    config_digest: str
    seed: int
    environment: Dict[str, str] = field(default_factory=environment_stamp)
    records: List[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def add(self, record: CheckRecord) -> None:
        self.records.append(record)

    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def to_payload(self) -> dict:
        return {
            "suite": self.suite,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "environment": self.environment,
            "records": [r.to_payload() for r in self.records],
            "passed": self.passed,
        }


def config_digest(path) -> str:
    digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return f"sha256:{digest}"


def emit(
    report: ExperimentReport,
    formats: Sequence[str],
    out_dir,
    *,
    runtime_seconds: Optional[float] = None,
) -> List[Path]:
    """Write the report in the requested formats; returns the created paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    for fmt in formats:
        if fmt == "json":
            path = out / f"{report.suite}.json"
            path.write_text(canonical_json(report.to_payload()), encoding="ascii")
            written.append(path)
        elif fmt == "csv":
            path = out / f"{report.suite}.csv"
            with open(path, "w", newline="", encoding="ascii") as fh:
                writer = csv.writer(fh)
                writer.writerow(["id", "operation", "inputs", "measured", "threshold", "passed"])
                for r in report.records:
                    writer.writerow(
                        [
                            r.id,
                            r.operation,
                            canonical_json(r.inputs).strip(),
                            canonical_json(r.measured).strip(),
                            r.threshold,
                            "pass" if r.passed else "fail",
                        ]
                    )
            written.append(path)
        elif fmt == "plotdata":
            for r in report.records:
                if r.series is None:
                    continue
                path = out / f"{report.suite}__{r.id}.dat"
                xs, ys = r.series["x"], r.series["y"]
                lines = [f"{format(float(x), '.17g')} {format(float(y), '.17g')}" for x, y in zip(xs, ys)]
                path.write_text("\n".join(lines) + "\n", encoding="ascii")
                written.append(path)
        else:
            raise ConfigError(f"unknown emit format {fmt!r}")
    if runtime_seconds is not None:
        meta = out / f"{report.suite}_meta.json"
        meta.write_text(
            json.dumps({"runtime_seconds": runtime_seconds}, indent=2) + "\n", encoding="ascii"
        )
    return written
