"""Symmetric coefficient tables a_ij(x) and their anisotropic scaling.

A coefficient field stores the full N x N entry table at every node together
with a declared ellipticity constant lambda: the symmetric part of A(x) must
have smallest eigenvalue >= lambda everywhere.  Scaling by epsilon in (0, 1]
multiplies entry (i, j) by

    epsilon^2   if both axes are in the X1 group,
    1           if both axes are in the X2 group,
    epsilon     for mixed pairs (both orderings),

which is the block form (eps^2 A11, eps A12; eps A21, A22).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EllipticityError
from .grid import Grid

__all__ = [
    "CoefficientField",
    "ScaledCoefficientField",
    "scale_coefficients",
    "scaling_factors",
    "verify_ellipticity",
    "observed_ellipticity",
    "coefficient_family",
]


@dataclass
class CoefficientField:
    """Per-node entry table with declared ellipticity constant.

    ``entries[i, j]`` is the node array of a_ij; ``derivs[i, j]`` (optional)
    is the node array of the partial derivative of a_ij along axis i, the
    only derivative the first-order term of the expanded operator needs.
    Derivative tables are expected to match centered differences of the
    entries to second order.
    """

    grid: Grid
    entries: np.ndarray
    lam: float
    derivs: np.ndarray | None = None
    name: str = "custom"

    def __post_init__(self):
        ndim = self.grid.ndim
        shape = (ndim, ndim) + self.grid.node_shape
        self.entries = np.asarray(self.entries, dtype=float)
        if self.entries.shape != shape:
            raise ConfigError(
                f"entry table shape {self.entries.shape}, expected {shape}")
        if self.lam <= 0:
            raise ConfigError(f"ellipticity constant must be > 0, got {self.lam}")
        if self.derivs is not None:
            self.derivs = np.asarray(self.derivs, dtype=float)
            if self.derivs.shape != shape:
                raise ConfigError(
                    f"derivative table shape {self.derivs.shape}, "
                    f"expected {shape}")

    @property
    def ndim(self) -> int:
        return self.grid.ndim

    def block(self, rows, cols) -> np.ndarray:
        """Entry sub-table for the given axis groups."""
        return self.entries[np.ix_(rows, cols)]

    def x2_block(self) -> np.ndarray:
        """The retained A22 block, entries a_ij for i, j > q."""
        x2 = self.grid.x2_axes
        return self.block(x2, x2)


def scaling_factors(ndim: int, q: int, epsilon: float) -> np.ndarray:
    """Entrywise scale: eps^2 on the X1 block, eps on mixed, 1 on X2."""
    if not 0.0 < epsilon <= 1.0:
        raise ConfigError(f"epsilon must lie in (0, 1], got {epsilon}")
    in_x1 = np.arange(ndim) < q
    fac = np.ones((ndim, ndim))
    fac[np.ix_(in_x1, in_x1)] = epsilon ** 2
    fac[np.ix_(in_x1, ~in_x1)] = epsilon
    fac[np.ix_(~in_x1, in_x1)] = epsilon
    return fac


@dataclass
class ScaledCoefficientField:
    """A coefficient field after the anisotropic entrywise scaling."""

    base: CoefficientField
    epsilon: float
    entries: np.ndarray = field(init=False)
    derivs: np.ndarray | None = field(init=False)

    def __post_init__(self):
        fac = scaling_factors(self.base.ndim, self.base.grid.q, self.epsilon)
        expand = fac.reshape(fac.shape + (1,) * self.base.grid.ndim)
        self.entries = self.base.entries * expand
        self.derivs = (None if self.base.derivs is None
                       else self.base.derivs * expand)

    @property
    def grid(self) -> Grid:
        return self.base.grid

    @property
    def lam(self) -> float:
        """Ellipticity constant of the unscaled table (the scaled field is
        only coercive in the epsilon-weighted sense)."""
        return self.base.lam


def scale_coefficients(coeffs: CoefficientField,
                       epsilon: float) -> ScaledCoefficientField:
    return ScaledCoefficientField(coeffs, float(epsilon))


def observed_ellipticity(entries: np.ndarray) -> tuple[float, tuple[int, ...]]:
    """Smallest symmetric-part eigenvalue over all nodes and its node index.

    ``entries`` has shape (N, N, *nodes); the eigenvalue problem is solved
    nodewise on the symmetrized table.
    """
    ndim = entries.shape[0]
    node_shape = entries.shape[2:]
    mats = np.moveaxis(entries, (0, 1), (-2, -1)).reshape(-1, ndim, ndim)
    sym = 0.5 * (mats + np.swapaxes(mats, -1, -2))
    eigs = np.linalg.eigvalsh(sym)[:, 0]
    worst_flat = int(np.argmin(eigs))
    worst = tuple(int(i) for i in np.unravel_index(worst_flat, node_shape))
    return float(eigs[worst_flat]), worst


def verify_ellipticity(coeffs: CoefficientField) -> float:
    """Check min_x lambda_min(sym A(x)) >= declared lambda; return the minimum.

    A small floating-point cushion keeps exact-boundary families (identity,
    tight constant tables) from failing on roundoff.
    """
    lam_obs, worst = observed_ellipticity(coeffs.entries)
    cushion = 1e-12 * max(1.0, abs(coeffs.lam))
    if lam_obs < coeffs.lam - cushion:
        raise EllipticityError(
            f"coefficient field '{coeffs.name}': smallest symmetric "
            f"eigenvalue {lam_obs:.6g} at node {worst} is below the "
            f"declared constant {coeffs.lam:.6g}")
    return lam_obs


def _constant_table(grid: Grid, matrix: np.ndarray) -> np.ndarray:
    ndim = grid.ndim
    table = np.empty((ndim, ndim) + grid.node_shape)
    for i in range(ndim):
        for j in range(ndim):
            table[i, j] = matrix[i, j]
    return table


def _identity_field(grid: Grid) -> CoefficientField:
    table = _constant_table(grid, np.eye(grid.ndim))
    derivs = np.zeros_like(table)
    return CoefficientField(grid, table, lam=1.0, derivs=derivs,
                            name="identity")


def _constant_field(grid: Grid, matrix, lam: float | None = None
                    ) -> CoefficientField:
    mat = np.asarray(matrix, dtype=float)
    if mat.shape != (grid.ndim, grid.ndim):
        raise ConfigError(
            f"constant table must be {grid.ndim} x {grid.ndim}, "
            f"got {mat.shape}")
    if lam is None:
        lam = float(np.linalg.eigvalsh(0.5 * (mat + mat.T))[0])
        if lam <= 0:
            raise ConfigError("constant table is not positive definite")
    table = _constant_table(grid, mat)
    derivs = np.zeros_like(table)
    return CoefficientField(grid, table, lam=lam, derivs=derivs,
                            name="constant")


def _variable_field(grid: Grid) -> CoefficientField:
    """Smooth fully populated table with exact closed-form derivatives.

    Diagonal: a_ii = 1 + x_s^2 / 2 with s the next axis cyclically, so every
    diagonal entry genuinely varies.  Off-diagonal: a_ij = g * x_i * x_j with
    g sized by a Gershgorin budget, giving a certified constant 3/4 on any
    box.
    """
    ndim = grid.ndim
    mesh = grid.meshgrid()
    coord_bound = max(max(abs(lo), abs(hi))
                      for lo, hi in zip(grid.lo, grid.hi))
    g = 0.25 / ((ndim - 1) * coord_bound ** 2)
    table = np.empty((ndim, ndim) + grid.node_shape)
    derivs = np.zeros_like(table)
    for i in range(ndim):
        s = (i + 1) % ndim
        # a_ii varies only along axis s != i, so d a_ii / d x_i = 0
        table[i, i] = 1.0 + 0.5 * mesh[s] ** 2
        for j in range(ndim):
            if j == i:
                continue
            table[i, j] = g * mesh[i] * mesh[j]
            derivs[i, j] = g * mesh[j]
    return CoefficientField(grid, table, lam=0.75, derivs=derivs,
                            name="variable")


def coefficient_family(name: str, grid: Grid, **params) -> CoefficientField:
    """Named coefficient tables: ``identity``, ``constant``, ``variable``.

    ``constant`` takes ``matrix`` (row-major nested sequence) and an optional
    declared ``lam`` override; the others take no parameters.  Arbitrary
    tables can always be built through CoefficientField directly.
    """
    if name == "identity":
        if params:
            raise ConfigError("identity family takes no parameters")
        return _identity_field(grid)
    if name == "constant":
        matrix = params.pop("matrix", None)
        lam = params.pop("lam", None)
        if matrix is None:
            raise ConfigError("constant family needs a matrix")
        if params:
            raise ConfigError(f"unknown parameters {sorted(params)}")
        return _constant_field(grid, matrix, lam)
    if name == "variable":
        if params:
            raise ConfigError("variable family takes no parameters")
        return _variable_field(grid)
    raise ConfigError(f"unknown coefficient family '{name}'")
