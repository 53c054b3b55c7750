"""Named forcing fields for studies and the command line."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .grid import Grid, ScalarField

__all__ = ["forcing_field"]


def _unit_coords(grid: Grid) -> list[np.ndarray]:
    """Coordinates rescaled to [0, 1] per axis, so sine modes vanish on
    the faces of any box."""
    mesh = grid.meshgrid()
    return [(m - lo) / (hi - lo)
            for m, lo, hi in zip(mesh, grid.lo, grid.hi)]


def forcing_field(name: str, grid: Grid, **params) -> ScalarField:
    """Families:

    ``constant``      f = value (default 1)
    ``sine_product``  f = prod_a sin(k_a pi xhat_a), modes default to 1
    ``sine_x2``       same product over retained axes only, so f does not
                      depend on the scaled coordinates
    """
    if name == "constant":
        value = float(params.pop("value", 1.0))
        if params:
            raise ConfigError(f"unknown parameters {sorted(params)}")
        return ScalarField(grid, np.full(grid.node_shape, value))
    if name in ("sine_product", "sine_x2"):
        axes = (tuple(range(grid.ndim)) if name == "sine_product"
                else grid.x2_axes)
        modes = params.pop("modes", None)
        if params:
            raise ConfigError(f"unknown parameters {sorted(params)}")
        if modes is None:
            modes = [1] * len(axes)
        modes = [int(k) for k in modes]
        if len(modes) != len(axes):
            raise ConfigError(
                f"{name}: need {len(axes)} modes, got {len(modes)}")
        xhat = _unit_coords(grid)
        vals = np.ones(grid.node_shape)
        for k, a in zip(modes, axes):
            vals = vals * np.sin(k * np.pi * xhat[a])
        return ScalarField(grid, vals)
    raise ConfigError(f"unknown forcing family '{name}'")
