"""Study configuration: a flat sectioned key-value file and its dataclass.

The on-disk format is INI-style, parsed with the standard library:
``[section]`` headers, one ``key = value`` per line, ``#`` comments.
Numeric lists are comma-separated; matrices use ``;`` between rows.  The
same data round-trips through a plain dict (``to_dict`` / ``from_dict``)
so reports can embed the exact configuration as JSON.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, asdict
from pathlib import Path

from .coefficients import CoefficientField, coefficient_family
from .errors import ConfigError
from .forcing import forcing_field
from .grid import (Grid, NestedFamily, ScalarField, SubdomainMask,
                   interior_subdomain, make_grid, nested_family)
from .semilinear import Nonlinearity, nonlinearity_family

__all__ = ["StudyConfig", "load_config"]


def _floats(text: str) -> list[float]:
    items = [t for t in text.replace(",", " ").split() if t]
    return [float(t) for t in items]


def _ints(text: str) -> list[int]:
    out = []
    for x in _floats(text):
        if x != int(x):
            raise ConfigError(f"expected integer, got {x}")
        out.append(int(x))
    return out


def _matrix(text: str) -> list[list[float]]:
    return [_floats(row) for row in text.split(";") if row.strip()]


@dataclass
class StudyConfig:
    """Everything a study run needs, JSON-representable throughout."""

    # grid
    lo: list[float] = field(default_factory=lambda: [0.0, 0.0])
    hi: list[float] = field(default_factory=lambda: [1.0, 1.0])
    cells: list[int] = field(default_factory=lambda: [64, 64])
    q: int = 1
    # coefficients
    coefficient_family: str = "identity"
    coefficient_params: dict = field(default_factory=dict)
    # forcing
    forcing_family: str = "constant"
    forcing_params: dict = field(default_factory=dict)
    # sweep
    epsilons: list[float] = field(
        default_factory=lambda: [1.0, 0.5, 0.25, 0.125])
    margin: int | None = None
    nested: int = 20
    workers: int = 1
    # solver
    solver_method: str = "direct"
    solver_tol: float = 1e-10
    maxiter_factor: float = 20.0
    # optional nonlinearity
    nonlinearity: str | None = None
    nonlinearity_params: dict = field(default_factory=dict)
    damping: float = 0.5
    picard_max_iter: int = 200
    # fourier-check settings
    fourier_lattice: int = 64
    fourier_samples: int = 20
    fourier_epsilons: list[float] = field(
        default_factory=lambda: [1.0, 0.5, 0.1, 0.01, 0.001])
    # translation diagnostic
    translation_levels: int = 3
    # output
    out_dir: str = "out"
    out_format: str = "csv"
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self):
        if len(self.lo) != len(self.hi) or len(self.lo) != len(self.cells):
            raise ConfigError("lo, hi, cells must have equal length")
        eps = list(self.epsilons)
        if not eps:
            raise ConfigError("epsilon list is empty")
        for e in eps:
            if not 0.0 < e <= 1.0:
                raise ConfigError(f"epsilon {e} outside (0, 1]")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ConfigError(
                f"epsilon list must be strictly decreasing, got {eps}")
        for e in self.fourier_epsilons:
            if not 0.0 < e <= 1.0:
                raise ConfigError(f"fourier epsilon {e} outside (0, 1]")
        if self.margin is not None and self.margin < 1:
            raise ConfigError(f"margin must be >= 1, got {self.margin}")
        if self.nested < 1:
            raise ConfigError(f"nested depth must be >= 1, got {self.nested}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.solver_method not in ("direct", "cg"):
            raise ConfigError(f"unknown solver method '{self.solver_method}'")
        if self.out_format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, "
                              f"got '{self.out_format}'")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        if self.fourier_lattice < 2 or self.fourier_samples < 1:
            raise ConfigError("fourier lattice/samples out of range")
        if self.translation_levels < 1:
            raise ConfigError("translation levels must be >= 1")
        if not 0.0 < self.damping <= 1.0:
            raise ConfigError(f"damping must lie in (0, 1], got {self.damping}")

    # construction of the working objects -------------------------------

    def build_grid(self) -> Grid:
        return make_grid(list(zip(self.lo, self.hi)), self.cells, self.q)

    def build_coefficients(self, grid: Grid) -> CoefficientField:
        return coefficient_family(self.coefficient_family, grid,
                                  **self.coefficient_params)

    def build_forcing(self, grid: Grid) -> ScalarField:
        return forcing_field(self.forcing_family, grid,
                             **self.forcing_params)

    def build_nonlinearity(self) -> Nonlinearity | None:
        if self.nonlinearity is None:
            return None
        return nonlinearity_family(self.nonlinearity,
                                   **self.nonlinearity_params)

    def effective_margin(self, grid: Grid) -> int:
        if self.margin is not None:
            return self.margin
        return max(1, min(grid.cells) // 8)

    def build_mask(self, grid: Grid) -> SubdomainMask:
        return interior_subdomain(grid, self.effective_margin(grid))

    def build_family(self, grid: Grid) -> NestedFamily:
        return nested_family(grid, self.nested)

    # serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "StudyConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "StudyConfig":
        parser = configparser.ConfigParser(
            inline_comment_prefixes=("#",), interpolation=None)
        text = Path(path).read_text()
        try:
            parser.read_string(text, source=str(path))
        except configparser.Error as err:
            raise ConfigError(f"cannot parse {path}: {err}") from err
        data: dict = {}

        def take(section, key, conv, dest=None):
            if parser.has_option(section, key):
                raw = parser.get(section, key)
                data[dest or key] = conv(raw)

        take("grid", "lo", _floats)
        take("grid", "hi", _floats)
        take("grid", "cells", _ints)
        take("grid", "q", lambda s: _ints(s)[0])

        if parser.has_section("coefficients"):
            take("coefficients", "family", str.strip,
                 "coefficient_family")
            params: dict = {}
            if parser.has_option("coefficients", "matrix"):
                params["matrix"] = _matrix(
                    parser.get("coefficients", "matrix"))
            if parser.has_option("coefficients", "lam"):
                params["lam"] = _floats(
                    parser.get("coefficients", "lam"))[0]
            if params:
                data["coefficient_params"] = params

        if parser.has_section("forcing"):
            take("forcing", "family", str.strip, "forcing_family")
            params = {}
            if parser.has_option("forcing", "value"):
                params["value"] = _floats(parser.get("forcing", "value"))[0]
            if parser.has_option("forcing", "modes"):
                params["modes"] = _ints(parser.get("forcing", "modes"))
            if params:
                data["forcing_params"] = params

        take("sweep", "epsilons", _floats)
        take("sweep", "margin", lambda s: _ints(s)[0])
        take("sweep", "nested", lambda s: _ints(s)[0])
        take("sweep", "workers", lambda s: _ints(s)[0])

        take("solver", "method", str.strip, "solver_method")
        take("solver", "tol", lambda s: _floats(s)[0], "solver_tol")
        take("solver", "maxiter_factor", lambda s: _floats(s)[0])

        if parser.has_section("nonlinearity"):
            take("nonlinearity", "family", str.strip, "nonlinearity")
            params = {}
            if parser.has_option("nonlinearity", "kappa"):
                params["kappa"] = _floats(
                    parser.get("nonlinearity", "kappa"))[0]
            if params:
                data["nonlinearity_params"] = params
            take("nonlinearity", "damping", lambda s: _floats(s)[0])
            take("nonlinearity", "max_iter", lambda s: _ints(s)[0],
                 "picard_max_iter")

        take("fourier", "lattice", lambda s: _ints(s)[0], "fourier_lattice")
        take("fourier", "samples", lambda s: _ints(s)[0], "fourier_samples")
        take("fourier", "epsilons", _floats, "fourier_epsilons")

        take("translation", "levels", lambda s: _ints(s)[0],
             "translation_levels")

        take("output", "dir", str.strip, "out_dir")
        take("output", "format", str.strip, "out_format")
        take("random", "seed", lambda s: _ints(s)[0], "seed")

        known_sections = {"grid", "coefficients", "forcing", "sweep",
                          "solver", "nonlinearity", "fourier",
                          "translation", "output", "random"}
        extra = set(parser.sections()) - known_sections
        if extra:
            raise ConfigError(f"unknown config sections {sorted(extra)}")
        return cls.from_dict(data)


def load_config(path) -> StudyConfig:
    return StudyConfig.from_file(path)
