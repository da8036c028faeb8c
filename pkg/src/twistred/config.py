"""Run configuration for the command line harness."""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .lie_core import SUPPORTED_RANKS
from .product_twist import CouplingVector

SCHEMA_VERSION = "1.0"

DEFAULT_TOLERANCES = {
    "hamiltonian": 1e-10,
    "simulate": 1e-6,
    "energy_drift": 1e-10,
    "verify": 1e-8,
    "ym": 1e-10,
}


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class TimeGrid:
    start: float = 0.0
    stop: float = 1.0
    steps: int = 11

    def points(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass
class RunConfig:
    family: str = "A"
    rank: int = 1
    gamma: int = 1
    N: int | None = None
    lambdas: list | None = None
    marks: list | None = None
    orbit_seeds: list | None = None
    zero_spin: bool = False
    initial_q: list | None = None
    initial_p: list | None = None
    p_scale: float = 1.0
    margin: float = 0.05
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    time_grid: TimeGrid = field(default_factory=TimeGrid)
    seed: int = 0
    samples: int = 5
    spin_weights: list | None = None
    energy_cutoff: float = 10.0
    suite: str = "all"
    output_dir: str | None = None

    def __post_init__(self):
        self.validate()

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        if self.family not in SUPPORTED_RANKS:
            raise ConfigError(f"unknown algebra family {self.family!r}")
        if self.rank not in SUPPORTED_RANKS[self.family]:
            raise ConfigError(f"rank {self.rank} is not supported for family {self.family}")
        if self.gamma not in (1, 2, 3):
            raise ConfigError("gamma must be the order of a diagram automorphism (1, 2 or 3)")
        if (self.lambdas is None) == (self.marks is None):
            raise ConfigError("exactly one of 'lambdas' and 'marks' must be given")
        try:
            coupling = self.coupling()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.N is not None and self.N != coupling.N:
            raise ConfigError(f"N = {self.N} does not match {coupling.N} couplings")
        self.N = coupling.N
        bad = {k: v for k, v in self.tolerances.items() if not (isinstance(v, (int, float)) and v > 0)}
        if bad:
            raise ConfigError(f"tolerances must be positive: {bad}")
        if isinstance(self.time_grid, dict):
            self.time_grid = TimeGrid(**self.time_grid)
        if self.time_grid.steps < 2 or not self.time_grid.stop > self.time_grid.start:
            raise ConfigError("time grid needs at least two increasing points")
        if self.samples < 1:
            raise ConfigError("samples must be positive")
        if self.spin_weights is not None:
            if len(self.spin_weights) != self.N:
                raise ConfigError("one spin weight per site is required")
            for w in self.spin_weights:
                if len(w) != self.rank or any(int(x) != x or x < 0 for x in w):
                    raise ConfigError(f"spin weight {w} is not dominant integral")
        if self.orbit_seeds is not None and np.shape(self.orbit_seeds)[0] != self.N:
            raise ConfigError("one orbit seed per site is required")

    def coupling(self) -> CouplingVector:
        if self.marks is not None:
            return CouplingVector.from_marks(self.marks)
        return CouplingVector(tuple(float(x) for x in self.lambdas))

    def tolerance(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        data = asdict(self)
        data["algebra"] = {"family": data.pop("family"), "rank": data.pop("rank")}
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = copy.deepcopy(data)
        data.pop("schema_version", None)
        algebra = data.pop("algebra", None)
        if algebra is not None:
            data.setdefault("family", algebra.get("family", "A"))
            data.setdefault("rank", algebra.get("rank", 1))
        tol = dict(DEFAULT_TOLERANCES)
        tol.update(data.pop("tolerances", {}) or {})
        data["tolerances"] = tol
        if "time_grid" in data and isinstance(data["time_grid"], dict):
            data["time_grid"] = TimeGrid(**data["time_grid"])
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration fields: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
        return cls.from_dict(data)
