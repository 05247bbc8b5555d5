"""Experiment configuration: a sectioned key = value file plus command-line overrides."""

from __future__ import annotations

import configparser
import dataclasses
import logging
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Any

from newton_maximal.errors import ConfigError
from newton_maximal.polynomial import MAX_DIMENSION

logger = logging.getLogger(__name__)

SUITES = ("diagram", "partition", "monomial", "maximal", "cz", "oscillatory", "weaktype", "all")

# key -> section
SECTIONS: dict[str, str] = {
    "poly": "experiment", "n": "experiment", "suite": "experiment", "seed": "experiment",
    "out": "experiment", "workers": "experiment",
    "qmax": "diagram",
    "x_min": "maximal", "x_max": "maximal", "dx_log2": "maximal", "h_grid_size": "maximal",
    "quadrature_order": "maximal", "dyadic_qmax": "maximal", "eta_nodes": "maximal",
    "monomial_tolerance": "maximal",
    "cases": "cz", "amplification": "cz", "lambda_min": "cz", "lambda_max": "cz",
    "n_min": "oscillatory", "n_max": "oscillatory", "k_max": "oscillatory", "theta": "oscillatory",
    "bins_log2": "oscillatory", "measure_nodes": "oscillatory", "xi_min": "oscillatory",
    "xi_max": "oscillatory", "xi_points": "oscillatory",
    "corpus_size": "weaktype", "alpha_points": "weaktype", "alpha_lo": "weaktype",
    "alpha_hi": "weaktype", "stability_tolerance": "weaktype", "weak_nodes": "weaktype",
}


@dataclass(frozen=True)
class ExperimentConfig:
    poly: str = "t1^2*t2 + t1*t2^3"
    n: int = 2
    suite: str = "all"
    seed: int = 0
    out: Path = Path("results")
    workers: int = 1
    qmax: int = 20
    x_min: float = -8.0
    x_max: float = 8.0
    dx_log2: int = 10
    h_grid_size: int = 6
    quadrature_order: int = 16
    dyadic_qmax: int = 8
    eta_nodes: int = 16
    monomial_tolerance: float = 0.05
    cases: int = 200
    amplification: float = 0.0
    lambda_min: float = 0.05
    lambda_max: float = 4.0
    n_min: int = 2
    n_max: int = 8
    k_max: int = 4
    theta: Fraction = Fraction(1, 4)
    bins_log2: int = 14
    measure_nodes: int = 48
    xi_min: float = 1e-3
    xi_max: float = 64.0
    xi_points: int = 64
    corpus_size: int = 20
    alpha_points: int = 64
    alpha_lo: float = 1e-3
    alpha_hi: float = 1.5
    stability_tolerance: float = 0.2
    weak_nodes: int = 16

    def __post_init__(self) -> None:
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; expected one of {', '.join(SUITES)}")
        if not 1 <= self.n <= MAX_DIMENSION:
            raise ConfigError(f"n must be in 1..{MAX_DIMENSION}, got {self.n}")
        if not self.poly.strip():
            raise ConfigError("poly must not be empty")
        for item in fields(self):
            value = getattr(self, item.name)
            if item.name in ("poly", "suite", "out", "x_min", "x_max"):
                continue
            if item.name in ("seed", "amplification"):
                if value < 0:
                    raise ConfigError(f"{item.name} must be nonnegative, got {value}")
                continue
            if not value > 0:
                raise ConfigError(f"{item.name} must be positive, got {value}")
        if not self.x_min < self.x_max:
            raise ConfigError(f"x_min must be below x_max, got [{self.x_min}, {self.x_max}]")
        if self.n_min > self.n_max:
            raise ConfigError(f"n_min {self.n_min} exceeds n_max {self.n_max}")
        if self.lambda_min > self.lambda_max:
            raise ConfigError(f"lambda_min {self.lambda_min} exceeds lambda_max {self.lambda_max}")
        if self.xi_min >= self.xi_max:
            raise ConfigError(f"xi_min {self.xi_min} must be below xi_max {self.xi_max}")

    @property
    def suites(self) -> tuple[str, ...]:
        if self.suite == "all":
            return SUITES[:-1]
        return (self.suite,)

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Replace fields by name; ``None`` values are ignored."""

        known = {item.name for item in fields(self)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ConfigError(f"unknown override(s): {', '.join(unknown)}")
        changes = {key: _coerce(key, value) for key, value in overrides.items() if value is not None}
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        result: dict[str, Any] = {}
        for item in fields(self):
            value = getattr(self, item.name)
            result[item.name] = str(value) if isinstance(value, (Path, Fraction)) else value
        return result


_TYPES = {item.name: item.type for item in fields(ExperimentConfig)}


def _coerce(key: str, value: Any) -> Any:
    kind = _TYPES[key]
    try:
        if kind == "int":
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if kind == "float":
            return float(value)
        if kind == "Fraction":
            return Fraction(str(value).strip())
        if kind == "Path":
            return Path(value)
        return str(value).strip()
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"invalid value for {key}: {value!r}") from exc


def load_experiment_config(path: Path | str) -> ExperimentConfig:
    """Read a sectioned configuration file.

    Raises:
        ConfigError: If the file is missing, malformed, or names unknown
            sections or keys, or a key sits in the wrong section.
    """

    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    allowed = set(SECTIONS.values())
    values: dict[str, Any] = {}
    for section in parser.sections():
        if section not in allowed:
            raise ConfigError(f"unknown section [{section}] in {path}")
        for key, raw in parser.items(section):
            if key not in SECTIONS:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            if SECTIONS[key] != section:
                raise ConfigError(f"key {key!r} belongs in [{SECTIONS[key]}], not [{section}]")
            values[key] = _coerce(key, raw)
    logger.debug(f"Loaded {len(values)} setting(s) from {path}")
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
