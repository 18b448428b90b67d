"""Experiment configuration: a single human-editable YAML file.

Schema (all sections optional except ``suites`` for the suites actually run)::

    seed: 20260801            # master seed; CLI --seed overrides
    out_dir: out              # output directory; --out / SOBSCALE_OUT override
    formats: [json, csv]      # emit formats; plotdata adds .dat series
    memory_budget_mb: 512     # pre-flight cap on lattice allocations

    catalog:                  # weight specs available to every suite
      - "pow(1)"
      - "pow(2) * log(-3)"

    suites:
      interp5:
        phis: ["pow(1.3)", ...]       # default: catalog
        offsets: [[-1, 1], [-2, 1], [-0.5, 1.5]]   # (s0, s1) around each
                                                   # weight's own exponent
        lattices: [{n: 1, N: 16}, {n: 2, N: 16}]
        samples: 50
        tolerance: 1.0e-12
      ...                     # per-suite keys documented in suites.py

Weight strings use the grammar of :mod:`sobscale.grammar`; relative table
paths resolve against the config file's directory.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import yaml

from .errors import ConfigError, GrammarError
from .grammar import parse_psi, parse_weight

__all__ = ["SUITE_NAMES", "LoadedConfig", "load_config", "validate_config"]

SUITE_NAMES = (
    "indices",
    "embed",
    "interp5",
    "interp6",
    "opnorm",
    "trace",
    "bvp",
    "localreg",
    "cp",
)


@dataclass
class LoadedConfig:
    path: Path
    base_dir: str
    data: dict

    def suite_params(self, suite: str) -> dict:
        return dict(self.data.get("suites", {}).get(suite, {}) or {})

    @property
    def seed(self) -> int:
        return int(self.data.get("seed", 0))

    @property
    def out_dir(self) -> str:
        return str(self.data.get("out_dir", "out"))

    @property
    def formats(self) -> List[str]:
        return list(self.data.get("formats", ["json", "csv", "plotdata"]))

    @property
    def catalog(self) -> List[str]:
        return list(self.data.get("catalog", []))


def load_config(path) -> LoadedConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            raise ConfigError(f"YAML parse error: {exc}", mark.line + 1, mark.column + 1)
        raise ConfigError(f"YAML parse error: {exc}")
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    return LoadedConfig(path=path, base_dir=str(path.parent), data=data)


def _check_ladder(values, key: str) -> None:
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError(f"{key}: ladder must be a non-empty list")
    nums = [int(v) for v in values]
    if any(b <= a for a, b in zip(nums, nums[1:])):
        raise ConfigError(f"{key}: ladder must be strictly increasing, got {nums}")


def _check_weight(spec: str, key: str, base_dir: str) -> None:
    try:
        parse_weight(str(spec), base_dir)
    except GrammarError as exc:
        raise ConfigError(f"{key}: {exc}")


def _estimate_modes(n: int, N: int) -> int:
    return (2 * N + 1) ** n


def validate_config(cfg: LoadedConfig) -> None:
    """Raise ConfigError on the first invalid entry; silent on success."""
    data = cfg.data
    budget_mb = float(data.get("memory_budget_mb", 512))
    max_modes = int(budget_mb * 1e6 / 16.0)

    catalog = data.get("catalog", [])
    if catalog is not None and not isinstance(catalog, list):
        raise ConfigError("catalog must be a list of weight specs")
    for i, spec in enumerate(catalog or []):
        _check_weight(spec, f"catalog[{i}]", cfg.base_dir)

    suites = data.get("suites", {}) or {}
    if not isinstance(suites, dict):
        raise ConfigError("suites must be a mapping")
    for name, params in suites.items():
        if name not in SUITE_NAMES:
            raise ConfigError(f"unknown suite {name!r}; expected one of {', '.join(SUITE_NAMES)}")
        params = params or {}
        if "phis" in params:
            if not params["phis"]:
                raise ConfigError(f"suites.{name}.phis: empty catalog")
            for i, spec in enumerate(params["phis"]):
                _check_weight(spec, f"suites.{name}.phis[{i}]", cfg.base_dir)
        if "psis" in params:
            for i, spec in enumerate(params["psis"]):
                try:
                    parse_psi(str(spec), cfg.base_dir)
                except GrammarError as exc:
                    raise ConfigError(f"suites.{name}.psis[{i}]: {exc}")
        for key in ("N_ladder", "resolution_ladder", "verdict_ladder"):
            if key in params:
                _check_ladder(params[key], f"suites.{name}.{key}")
        for key, value in params.items():
            if key.startswith("tolerance") and not float(value) > 0:
                raise ConfigError(f"suites.{name}.{key}: tolerance must be positive")
        if "lattices" in params:
            for spec in params["lattices"]:
                n, N = int(spec["n"]), int(spec["N"])
                if _estimate_modes(n, N) > max_modes:
                    raise ConfigError(
                        f"suites.{name}: lattice n={n}, N={N} needs "
                        f"{_estimate_modes(n, N)} modes, over the "
                        f"{budget_mb:g} MB budget ({max_modes} modes)"
                    )
        if "n" in params and "N_ladder" in params:
            n = int(params["n"])
            worst = _estimate_modes(n, int(max(params["N_ladder"])))
            if worst > max_modes:
                raise ConfigError(
                    f"suites.{name}: ladder top needs {worst} modes, over the budget"
                )

    if "phis" not in suites.get("indices", {}) and "catalog" in data and not data["catalog"]:
        raise ConfigError("empty catalog")


def resolve_out_dir(cfg: LoadedConfig, override: Optional[str]) -> str:
    env = os.environ.get("SOBSCALE_OUT")
    return override or env or cfg.out_dir
