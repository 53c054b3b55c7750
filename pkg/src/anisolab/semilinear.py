"""Semilinear problems  -div(A_eps grad u) = a(u) + f  via damped iteration.

The nonlinearities are continuous, nonincreasing and of at most linear
growth |a(x)| <= c (1 + |x|); monotonicity keeps the fixed-point map
well-behaved without any smallness assumption on f.  The iteration is

    u_{m+1} = (1 - d) u_m + d * Linv(a(u_m) + f)

with a single factorization of the linear operator reused across steps.
The start iterate is the linear solve with a(0) folded in, so a vanishing
nonlinearity converges in one step and reproduces the linear answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse.linalg as spla

from .coefficients import CoefficientField
from .errors import ConfigError, SolverError
from .fd_ops import SparseOperator
from .grid import Grid, ScalarField
from .limit import iter_slice_systems

__all__ = [
    "Nonlinearity",
    "nonlinearity_family",
    "PicardResult",
    "picard_solve",
    "semilinear_limit",
]


@dataclass(frozen=True)
class Nonlinearity:
    """Nonincreasing reaction term with declared linear-growth constant."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    growth: float

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.fn(x)


def nonlinearity_family(name: str, **params) -> Nonlinearity:
    """Named terms: ``zero``, ``linear`` (a = -kappa u), ``tanh``
    (a = -tanh u), ``rational`` (a = -u / (1 + |u|))."""
    if name == "zero":
        if params:
            raise ConfigError("zero nonlinearity takes no parameters")
        return Nonlinearity("zero", lambda x: np.zeros_like(x), 0.0)
    if name == "linear":
        kappa = float(params.pop("kappa", 1.0))
        if params:
            raise ConfigError(f"unknown parameters {sorted(params)}")
        if kappa < 0:
            raise ConfigError("kappa must be >= 0 to stay nonincreasing")
        return Nonlinearity("linear", lambda x: -kappa * x, kappa)
    if name == "tanh":
        if params:
            raise ConfigError("tanh nonlinearity takes no parameters")
        return Nonlinearity("tanh", lambda x: -np.tanh(x), 1.0)
    if name == "rational":
        if params:
            raise ConfigError("rational nonlinearity takes no parameters")
        return Nonlinearity("rational", lambda x: -x / (1.0 + np.abs(x)), 1.0)
    raise ConfigError(f"unknown nonlinearity '{name}'")


@dataclass
class PicardResult:
    """Converged iterate plus how the iteration went."""

    field: ScalarField
    iterations: int
    final_increment: float
    residual: float
    increments: tuple[float, ...]


def _picard_core(solve: Callable[[np.ndarray], np.ndarray],
                 rhs: np.ndarray, a: Nonlinearity,
                 weight: float, damping: float, tol: float,
                 max_iter: int) -> tuple[np.ndarray, int, float, list[float]]:
    """Damped iteration on flat interior vectors.

    ``weight`` converts the flat euclidean norm into the quadrature l2 norm
    for the stopping rule.
    """
    if not 0.0 < damping <= 1.0:
        raise ConfigError(f"damping must lie in (0, 1], got {damping}")
    u = solve(rhs + a(np.zeros_like(rhs)))
    increments: list[float] = []
    for m in range(1, max_iter + 1):
        u_next = (1.0 - damping) * u + damping * solve(rhs + a(u))
        inc = float(np.linalg.norm(u_next - u)) * weight
        increments.append(inc)
        u_prev_norm = float(np.linalg.norm(u)) * weight
        u = u_next
        if inc <= tol * max(1.0, u_prev_norm):
            return u, m, inc, increments
    raise SolverError(
        f"damped iteration exhausted {max_iter} steps",
        last_increment=increments[-1] if increments else None)


def _relative_residual(matrix, u: np.ndarray, rhs_total: np.ndarray) -> float:
    scale = max(float(np.linalg.norm(rhs_total)), 1e-300)
    return float(np.linalg.norm(matrix @ u - rhs_total)) / scale


def picard_solve(op: SparseOperator, f: ScalarField, a: Nonlinearity,
                 damping: float = 0.5, tol: float = 1e-10,
                 max_iter: int = 200) -> PicardResult:
    """Solve the semilinear Dirichlet problem on the full grid."""
    if f.grid != op.grid:
        raise ConfigError("forcing lives on a different grid")
    rhs = f.interior_vector()
    weight = float(np.sqrt(op.grid.cell_volume))
    lu = op.factor()
    u, iters, inc, increments = _picard_core(
        lu.solve, rhs, a, weight, damping, tol, max_iter)
    res = _relative_residual(op.matrix, u, rhs + a(u))
    return PicardResult(
        field=ScalarField.from_interior(op.grid, u),
        iterations=iters, final_increment=inc, residual=res,
        increments=tuple(increments))


def semilinear_limit(grid: Grid, coeffs: CoefficientField, f: ScalarField,
                     a: Nonlinearity, damping: float = 0.5,
                     tol: float = 1e-10, max_iter: int = 200) -> PicardResult:
    """Limit field of the semilinear problem: per-slice damped iterations.

    Each X1 lattice node gets its own retained-axes solve with the same
    nonlinearity; reported iteration and residual figures are the worst
    over all slices.
    """
    out = np.zeros(grid.node_shape)
    weight = float(np.sqrt(
        np.prod([grid.spacing[ax] for ax in grid.x2_axes])))
    worst_iters = 0
    worst_inc = 0.0
    worst_res = 0.0
    longest: tuple[float, ...] = ()
    for x1_index, matrix, rhs, scatter in iter_slice_systems(grid, coeffs, f):
        lu = spla.splu(matrix.tocsc(), permc_spec="COLAMD")
        try:
            u, iters, inc, increments = _picard_core(
                lu.solve, rhs, a, weight, damping, tol, max_iter)
        except SolverError as err:
            raise SolverError(
                f"slice {x1_index}: {err}",
                last_increment=err.last_increment) from err
        res = _relative_residual(matrix, u, rhs + a(u))
        if iters >= worst_iters:
            worst_iters = iters
            longest = tuple(increments)
        worst_inc = max(worst_inc, inc)
        worst_res = max(worst_res, res)
        scatter(u, out)
    return PicardResult(
        field=ScalarField(grid, out), iterations=worst_iters,
        final_increment=worst_inc, residual=worst_res, increments=longest)
