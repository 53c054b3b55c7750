"""Quadrature norms, the retained-axes Sobolev seminorms, and the
interior-family metric.

All norms are plain node sums weighted by the cell volume,
``sqrt(sum u_i^2 * prod h)``, over a mask (default: every interior node).
The hierarchy is

    l2  <=  v12 = (l2^2 + |grad_x2|^2)^(1/2)
        <=  v22(w) = (v12^2 + |hess_x2|^2_w)^(1/2)

where only the Hessian block is mask-local; the lower-order terms are
always taken over the whole interior.  The metric over a nested mask
family sums 2^(-n) t_n / (1 + t_n) with t_n the v22 difference norm on
mask n; with the default truncation depth of 20 the dropped tail is below
2^(-19), and convergence in the metric is equivalent to convergence of the
v22 norm on every mask of the family.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, ShiftError
from .fd_ops import grad_axis, hess_component
from .grid import (NestedFamily, ScalarField, SubdomainMask,
                   grid_interior_slices, shift_field)

__all__ = [
    "l2_norm",
    "inner_product",
    "grad_x1_seminorm",
    "grad_x2_seminorm",
    "hess_x1_seminorm",
    "hess_x2_seminorm",
    "hess_x1x2_seminorm",
    "v12_norm",
    "v22_norm",
    "NormBundle",
    "norm_bundle",
    "frechet_distance",
    "translation_modulus",
]


def _masked(u: ScalarField, mask: SubdomainMask | None) -> np.ndarray:
    if mask is None:
        return u.values[grid_interior_slices(u.grid)]
    return mask.extract(u)


def l2_norm(u: ScalarField, mask: SubdomainMask | None = None) -> float:
    vals = _masked(u, mask)
    return float(np.sqrt(np.sum(vals ** 2) * u.grid.cell_volume))


def inner_product(u: ScalarField, v: ScalarField,
                  mask: SubdomainMask | None = None) -> float:
    if v.grid != u.grid:
        raise ConfigError("fields live on different grids")
    return float(np.sum(_masked(u, mask) * _masked(v, mask))
                 * u.grid.cell_volume)


def _component_sq_sum(fields: Iterable[ScalarField],
                      mask: SubdomainMask | None) -> float:
    return sum(l2_norm(g, mask) ** 2 for g in fields)


def grad_x1_seminorm(u: ScalarField,
                     mask: SubdomainMask | None = None) -> float:
    """sqrt(sum over scaled axes of |d_i u|^2)."""
    comps = [grad_axis(u, a) for a in u.grid.x1_axes]
    return float(np.sqrt(_component_sq_sum(comps, mask)))


def grad_x2_seminorm(u: ScalarField,
                     mask: SubdomainMask | None = None) -> float:
    """sqrt(sum over retained axes of |d_i u|^2)."""
    comps = [grad_axis(u, a) for a in u.grid.x2_axes]
    return float(np.sqrt(_component_sq_sum(comps, mask)))


def hess_x2_seminorm(u: ScalarField,
                     mask: SubdomainMask | None = None) -> float:
    """Full retained-axes Hessian block, ordered pairs both counted."""
    axes = u.grid.x2_axes
    comps = [hess_component(u, i, j) for i in axes for j in axes]
    return float(np.sqrt(_component_sq_sum(comps, mask)))


def hess_x1_seminorm(u: ScalarField,
                     mask: SubdomainMask | None = None) -> float:
    """Full scaled-axes Hessian block, ordered pairs both counted."""
    axes = u.grid.x1_axes
    comps = [hess_component(u, i, j) for i in axes for j in axes]
    return float(np.sqrt(_component_sq_sum(comps, mask)))


def hess_x1x2_seminorm(u: ScalarField,
                       mask: SubdomainMask | None = None) -> float:
    """Mixed block, each scaled/retained pair counted once."""
    comps = [hess_component(u, i, j)
             for i in u.grid.x1_axes for j in u.grid.x2_axes]
    return float(np.sqrt(_component_sq_sum(comps, mask)))


def v12_norm(u: ScalarField) -> float:
    """(l2^2 + retained-gradient^2)^(1/2) over the whole interior."""
    return float(np.sqrt(l2_norm(u) ** 2 + grad_x2_seminorm(u) ** 2))


def v22_norm(u: ScalarField, mask: SubdomainMask) -> float:
    """v12 plus the retained-axes Hessian block measured on the mask."""
    return float(np.sqrt(v12_norm(u) ** 2 + hess_x2_seminorm(u, mask) ** 2))


@dataclass
class NormBundle:
    """l2, v12 and the per-mask v22 values of one field."""

    l2: float
    v12: float
    v22_by_margin: dict[tuple[int, ...], float]

    def max_v22(self) -> float:
        return max(self.v22_by_margin.values())


def norm_bundle(u: ScalarField, family: NestedFamily) -> NormBundle:
    base_l2 = l2_norm(u)
    base_v12 = v12_norm(u)
    axes = u.grid.x2_axes
    comps = [hess_component(u, i, j) for i in axes for j in axes]
    v22 = {}
    for mask in family:
        hess_sq = _component_sq_sum(comps, mask)
        v22[mask.margins] = float(np.sqrt(base_v12 ** 2 + hess_sq))
    return NormBundle(l2=base_l2, v12=base_v12, v22_by_margin=v22)


def frechet_distance(u: ScalarField, v: ScalarField, family: NestedFamily,
                     n_max: int | None = None) -> float:
    """Truncated series  sum_n 2^(-n) t_n / (1 + t_n)  over the family.

    ``t_n`` is the v22 norm of ``u - v`` on mask n.  When the family is
    shorter than the truncation depth its largest mask repeats, matching
    the constant tail of the standard exhaustion.  The dropped tail is
    bounded by 2^(-n_max + 1).
    """
    if v.grid != u.grid:
        raise ConfigError("fields live on different grids")
    if n_max is None:
        n_max = max(len(family), 20)
    if n_max < 1:
        raise ConfigError(f"truncation depth must be >= 1, got {n_max}")
    diff = u - v
    lower_sq = v12_norm(diff) ** 2
    axes = diff.grid.x2_axes
    comps = [hess_component(diff, i, j) for i in axes for j in axes]
    total = 0.0
    t_last = None
    for n in range(n_max):
        if n < len(family):
            t_last = float(np.sqrt(
                lower_sq + _component_sq_sum(comps, family[n])))
        t = t_last
        total += 2.0 ** (-n) * t / (1.0 + t)
    return total


def translation_modulus(fields: Sequence[ScalarField], mask: SubdomainMask,
                        shifts: Sequence[Sequence[int]]
                        ) -> dict[tuple[int, ...], float]:
    """Worst translation defect over a field family.

    sigma(h) = max over the family of the masked l2 norm of tau_h v - v,
    with tau_h the whole-cell translation.  Shifts must keep every masked
    read at interior nodes (|h_a| strictly below the mask margin), the
    discrete form of the distance-to-boundary admissibility condition;
    anything else raises ShiftError.
    """
    if not fields:
        raise ConfigError("empty field family")
    grid = fields[0].grid
    for v in fields:
        if v.grid != grid:
            raise ConfigError("family fields live on different grids")
    if mask.grid != grid:
        raise ConfigError("mask lives on a different grid")
    out: dict[tuple[int, ...], float] = {}
    for shift in shifts:
        h = tuple(int(c) for c in shift)
        for a in range(grid.ndim):
            if abs(h[a]) > mask.margins[a] - 1:
                raise ShiftError(
                    f"shift {h} reaches within one cell of the boundary "
                    f"for margin {mask.margins}")
        worst = 0.0
        for v in fields:
            shifted = shift_field(v, h, mask=mask)
            defect = float(np.sqrt(
                np.sum((mask.extract(shifted) - mask.extract(v)) ** 2)
                * grid.cell_volume))
            worst = max(worst, defect)
        out[h] = worst
    return out
