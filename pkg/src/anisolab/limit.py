"""Slice-by-slice solver for the anisotropic limit problem.

For every node of the scaled-axes (X1) lattice, boundary columns included,
the retained block A22 drives an independent Dirichlet problem on that
slice's retained-axes box; the X1 coordinate enters only as a parameter.
Slices are assembled with the same flux-form core and solved with the same
direct factorization as the full problem, so the truncation structure
matches the perturbed solves.  No boundary condition is imposed in the X1
directions: the assembled limit field is generally nonzero on X1 faces.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse.linalg as spla

from .coefficients import CoefficientField
from .errors import ConfigError, SolverError
from .fd_ops import assemble_flux_matrix
from .grid import Grid, ScalarField

__all__ = ["solve_limit", "iter_slice_systems"]


def iter_slice_systems(grid: Grid, coeffs: CoefficientField,
                       f: ScalarField):
    """Yield ``(x1_index, matrix, rhs, scatter)`` for every X1 lattice node.

    ``scatter(values, out)`` writes a slice solution (interior unknowns of
    the slice, row-major) into the full node array ``out``.
    """
    if coeffs.grid != grid or f.grid != grid:
        raise ConfigError("grid mismatch between coefficients, forcing, grid")
    q = grid.q
    x2 = grid.x2_axes
    sub_cells = tuple(grid.cells[a] for a in x2)
    sub_spacing = tuple(grid.spacing[a] for a in x2)
    sub_interior = tuple(slice(1, n) for n in sub_cells)
    a22 = coeffs.x2_block()
    x1_nodes = tuple(grid.cells[a] + 1 for a in range(q))
    for x1_index in np.ndindex(*x1_nodes):
        entries = a22[(slice(None), slice(None)) + x1_index]
        matrix = assemble_flux_matrix(sub_cells, sub_spacing, entries)
        rhs = f.values[x1_index][sub_interior].reshape(-1)

        def scatter(values, out, x1_index=x1_index):
            block = out[x1_index]
            block[sub_interior] = values.reshape(
                tuple(n - 1 for n in sub_cells))

        yield x1_index, matrix, rhs, scatter


def solve_limit(grid: Grid, coeffs: CoefficientField, f: ScalarField,
                tol: float = 1e-10) -> ScalarField:
    """Limit field u0: independent retained-axes solves at every X1 node.

    The result vanishes on the retained-axes faces (slice Dirichlet data)
    but not, in general, on the X1 faces.  Slice ordering does not affect
    the result: the systems are fully decoupled.
    """
    out = np.zeros(grid.node_shape)
    for x1_index, matrix, rhs, scatter in iter_slice_systems(grid, coeffs, f):
        lu = spla.splu(matrix.tocsc(), permc_spec="COLAMD")
        x = lu.solve(rhs)
        scale = float(np.linalg.norm(rhs))
        res = float(np.linalg.norm(matrix @ x - rhs))
        if scale > 0:
            res /= scale
        if not res <= tol:
            raise SolverError(
                f"slice {x1_index}: residual {res:.3e} above {tol:g}",
                residual=res)
        scatter(x, out)
    return ScalarField(grid, out)
