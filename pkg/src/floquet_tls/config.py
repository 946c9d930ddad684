"""Run configuration: a single TOML file drives every CLI command.

Complex numbers appear as [re, im] pairs; harmonics as [n, re, im]
triples.  Everything numeric that influences results (epsilon, order,
truncations, tolerances, grids) lives here so runs are reproducible
from the file alone.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .drive import DriveSpec

__all__ = ["RunConfig", "ConfigError", "load_config"]


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass
class RunConfig:
    drive: DriveSpec
    epsilon: float = 0.1
    order: int = 8
    m_max: int | None = None           # None: pick from the decay bound
    p_max: int = 40
    alpha_branch: int = 1
    tol_case: float = 1e-9
    tol_unit: float = 1e-8
    tol_res: float | None = None       # None: 1e-6 * omega
    points_per_period: int = 1024
    periods: float = 10.0
    oracle_tol: float = 1e-11
    validate_thresholds: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)

    def grid(self, periods: float | None = None):
        import numpy as np
        if periods is None:
            periods = self.periods
        n = max(int(self.points_per_period * periods), 2)
        return np.linspace(0.0, periods * self.drive.period, n)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _get_float(table: dict, key: str, default: float, positive: bool = True) -> float:
    val = table.get(key, default)
    _require(isinstance(val, (int, float)) and not isinstance(val, bool),
             f"'{key}' must be a number")
    val = float(val)
    if positive:
        _require(val > 0.0, f"'{key}' must be positive")
    return val


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a TOML run configuration."""
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc

    drive_tbl = raw.get("drive")
    _require(isinstance(drive_tbl, dict), "missing [drive] table")
    omega = _get_float(drive_tbl, "omega", 1.0)
    harmonics = drive_tbl.get("harmonics", [])
    _require(isinstance(harmonics, list), "'harmonics' must be a list of [n, re, im]")
    parsed = []
    for entry in harmonics:
        _require(isinstance(entry, list) and len(entry) == 3,
                 "each harmonic must be a [n, re, im] triple")
        n, re, im = entry
        _require(isinstance(n, int) and not isinstance(n, bool),
                 "harmonic index must be an integer")
        parsed.append((n, complex(float(re), float(im))))
    try:
        drive = DriveSpec(omega, tuple(parsed))
    except ValueError as exc:
        raise ConfigError(f"invalid drive: {exc}") from exc

    tol_tbl = raw.get("tolerances", {})
    _require(isinstance(tol_tbl, dict), "[tolerances] must be a table")
    grid_tbl = raw.get("grid", {})
    _require(isinstance(grid_tbl, dict), "[grid] must be a table")
    oracle_tbl = raw.get("oracle", {})
    validate_tbl = raw.get("validate", {})
    sweep_tbl = raw.get("sweep", {})

    m_max = raw.get("m_max", 0)
    _require(isinstance(m_max, int) and m_max >= 0, "'m_max' must be a nonnegative integer")
    order = raw.get("order", 8)
    _require(isinstance(order, int) and order >= 1, "'order' must be a positive integer")
    p_max = raw.get("p_max", 40)
    _require(isinstance(p_max, int) and p_max >= 1, "'p_max' must be a positive integer")
    alpha_branch = raw.get("alpha_branch", 1)
    _require(alpha_branch in (1, -1), "'alpha_branch' must be 1 or -1")
    epsilon = raw.get("epsilon", 0.1)
    _require(isinstance(epsilon, (int, float)) and not isinstance(epsilon, bool),
             "'epsilon' must be a number")

    ppp = grid_tbl.get("points_per_period", 1024)
    _require(isinstance(ppp, int) and ppp >= 4, "'points_per_period' must be an integer >= 4")
    tol_res = tol_tbl.get("tol_res")
    if tol_res is not None:
        _require(isinstance(tol_res, (int, float)) and tol_res > 0, "'tol_res' must be positive")
        tol_res = float(tol_res)

    return RunConfig(
        drive=drive,
        epsilon=float(epsilon),
        order=order,
        m_max=m_max if m_max > 0 else None,
        p_max=p_max,
        alpha_branch=alpha_branch,
        tol_case=_get_float(tol_tbl, "tol_case", 1e-9),
        tol_unit=_get_float(tol_tbl, "tol_unit", 1e-8),
        tol_res=tol_res,
        points_per_period=ppp,
        periods=_get_float(grid_tbl, "periods", 10.0),
        oracle_tol=_get_float(oracle_tbl, "tol", 1e-11),
        validate_thresholds=dict(validate_tbl),
        sweep=dict(sweep_tbl),
    )
