"""Fourier verification of the second-derivative a-priori bounds.

Everything lives on a periodic lattice with integer frequencies (numpy fft
layout) and the unitary DFT convention, so the lattice l2 norm of samples
and coefficients agree exactly and every reported quantity is a clean
norm ratio.  For the constant-coefficient operator with the anisotropic
scaling the symbol is  s(xi) = sum_ij a_ij^eps xi_i xi_j  and the solve is
a pointwise division; the three weighted ratios

    r_x2    = lam * |xi2|^2-weighted Hessian norm / forcing norm
    r_x1    = lam * eps^2 * |xi1|^2-weighted Hessian norm / forcing norm
    r_cross = lam * sqrt(2) * eps * mixed-weighted norm / forcing norm

must each stay below one (lam = 1 for the pure Laplacian case).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coefficients import scaling_factors
from .errors import ConfigError

__all__ = [
    "SpectralField",
    "BoundReport",
    "BoundViolation",
    "torus_solve",
    "check_laplacian_bounds",
    "check_constant_bounds",
    "random_zero_mean_forcing",
    "restrict_to_zero_x1",
]

DEFAULT_TOL = 1e-9


class BoundViolation(AssertionError):
    """A verified inequality failed; message carries the offending ratio."""


@dataclass
class SpectralField:
    """Complex coefficients on the integer frequency lattice (fft layout)."""

    coeffs: np.ndarray
    q: int

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        ndim = self.coeffs.ndim
        if ndim < 2:
            raise ConfigError("need at least 2 lattice axes")
        if not 1 <= self.q <= ndim - 1:
            raise ConfigError(f"invalid split q={self.q} for {ndim} axes")

    @property
    def ndim(self) -> int:
        return self.coeffs.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape

    def frequencies(self) -> list[np.ndarray]:
        """Signed integer frequency grid per axis, broadcast to full shape."""
        axes = [np.fft.fftfreq(m) * m for m in self.shape]
        return list(np.meshgrid(*axes, indexing="ij"))

    def norm(self) -> float:
        """Lattice l2 norm; equals the sample norm under the unitary DFT."""
        return float(np.linalg.norm(self.coeffs))

    def mean_mode(self) -> complex:
        return complex(self.coeffs[(0,) * self.ndim])

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        """Whether the coefficients come from a real sample field."""
        c = self.coeffs
        r = np.conj(c)
        for a in range(self.ndim):
            r = np.roll(np.flip(r, axis=a), 1, axis=a)
        scale = max(np.abs(c).max(), 1e-300)
        return bool(np.abs(c - r).max() <= tol * scale)

    @classmethod
    def from_physical(cls, samples: np.ndarray, q: int) -> "SpectralField":
        return cls(np.fft.fftn(np.asarray(samples), norm="ortho"), q)

    def to_physical(self) -> np.ndarray:
        """Real samples; requires Hermitian-symmetric coefficients."""
        out = np.fft.ifftn(self.coeffs, norm="ortho")
        scale = max(np.abs(out).max(), 1e-300)
        if np.abs(out.imag).max() > 1e-10 * scale:
            raise ConfigError("coefficients are not Hermitian-symmetric")
        return out.real


def _split_weights(field: SpectralField) -> tuple[np.ndarray, np.ndarray]:
    """(|xi1|^2, |xi2|^2) on the lattice."""
    freqs = field.frequencies()
    w1 = np.zeros(field.shape)
    w2 = np.zeros(field.shape)
    for a in range(field.ndim):
        if a < field.q:
            w1 += freqs[a] ** 2
        else:
            w2 += freqs[a] ** 2
    return w1, w2


def _symbol(field: SpectralField, matrix: np.ndarray | None,
            epsilon: float) -> np.ndarray:
    """Constant-coefficient operator symbol sum_ij a_ij^eps xi_i xi_j."""
    if matrix is None:
        w1, w2 = _split_weights(field)
        return epsilon ** 2 * w1 + w2
    ndim = field.ndim
    mat = np.asarray(matrix, dtype=float)
    if mat.shape != (ndim, ndim):
        raise ConfigError(f"matrix must be {ndim} x {ndim}")
    scaled = mat * scaling_factors(ndim, field.q, epsilon)
    freqs = field.frequencies()
    sym = np.zeros(field.shape)
    for i in range(ndim):
        for j in range(ndim):
            if scaled[i, j]:
                sym += scaled[i, j] * freqs[i] * freqs[j]
    return sym


def torus_solve(f: SpectralField, epsilon: float,
                matrix: np.ndarray | None = None) -> SpectralField:
    """Divide by the symbol; zero-mean forcing required, mean mode stays 0."""
    if not 0.0 < epsilon <= 1.0:
        raise ConfigError(f"epsilon must lie in (0, 1], got {epsilon}")
    scale = max(f.norm(), 1e-300)
    if abs(f.mean_mode()) > 1e-13 * scale:
        raise ConfigError(
            "forcing has a nonzero mean mode; the periodic problem is "
            "only solvable with zero mean")
    sym = _symbol(f, matrix, epsilon)
    origin = (0,) * f.ndim
    off = np.ones(f.shape, dtype=bool)
    off[origin] = False
    if np.any(sym[off] <= 0):
        raise ConfigError("operator symbol is not positive off the origin")
    u = np.zeros_like(f.coeffs)
    u[off] = f.coeffs[off] / sym[off]
    return SpectralField(u, f.q)


@dataclass
class BoundReport:
    """Weighted ratio triple for one forcing/epsilon pair."""

    epsilon: float
    r_x2: float
    r_x1: float
    r_cross: float
    tol: float = DEFAULT_TOL

    @property
    def passed_x2(self) -> bool:
        return self.r_x2 <= 1.0 + self.tol

    @property
    def passed_x1(self) -> bool:
        return self.r_x1 <= 1.0 + self.tol

    @property
    def passed_cross(self) -> bool:
        return self.r_cross <= 1.0 + self.tol

    @property
    def passed(self) -> bool:
        return self.passed_x2 and self.passed_x1 and self.passed_cross

    def max_ratio(self) -> float:
        return max(self.r_x2, self.r_x1, self.r_cross)


def _bound_report(f: SpectralField, u: SpectralField, epsilon: float,
                  lam: float, tol: float) -> BoundReport:
    w1, w2 = _split_weights(f)
    power = np.abs(u.coeffs) ** 2
    f_norm = f.norm()
    if f_norm == 0.0:
        raise ConfigError("zero forcing has no bound ratio")
    # block Hessian norms: sum over index pairs gives (|xi2|^2)^2, (|xi1|^2)^2
    # and |xi1|^2 |xi2|^2 as spectral weights
    hess_x2 = float(np.sqrt(np.sum(w2 ** 2 * power)))
    hess_x1 = float(np.sqrt(np.sum(w1 ** 2 * power)))
    hess_cr = float(np.sqrt(np.sum(w1 * w2 * power)))
    return BoundReport(
        epsilon=epsilon,
        r_x2=lam * hess_x2 / f_norm,
        r_x1=lam * epsilon ** 2 * hess_x1 / f_norm,
        r_cross=lam * np.sqrt(2.0) * epsilon * hess_cr / f_norm,
        tol=tol)


def check_laplacian_bounds(f: SpectralField, epsilon: float,
                           tol: float = DEFAULT_TOL,
                           strict: bool = True) -> BoundReport:
    """Bound triple for the pure anisotropic Laplacian (identity table)."""
    u = torus_solve(f, epsilon)
    report = _bound_report(f, u, epsilon, lam=1.0, tol=tol)
    if strict and not report.passed:
        raise BoundViolation(
            f"bound violated at epsilon={epsilon}: max ratio "
            f"{report.max_ratio():.12f} > 1 + {tol:g}")
    return report


def check_constant_bounds(matrix: np.ndarray, lam: float, f: SpectralField,
                          epsilon: float, tol: float = DEFAULT_TOL,
                          strict: bool = True) -> BoundReport:
    """Lambda-weighted bound triple for a constant symmetric table.

    ``lam`` must be a certified lower bound on the smallest eigenvalue of
    the symmetric part of ``matrix``.
    """
    if lam <= 0:
        raise ConfigError(f"ellipticity constant must be > 0, got {lam}")
    u = torus_solve(f, epsilon, matrix=matrix)
    report = _bound_report(f, u, epsilon, lam=lam, tol=tol)
    if strict and not report.passed:
        raise BoundViolation(
            f"weighted bound violated at epsilon={epsilon}: max ratio "
            f"{report.max_ratio():.12f} > 1 + {tol:g}")
    return report


def random_zero_mean_forcing(shape: tuple[int, ...], q: int,
                             rng: np.random.Generator) -> SpectralField:
    """Hermitian-symmetric coefficients of a real white-noise sample field,
    mean mode removed."""
    samples = rng.standard_normal(shape)
    field = SpectralField.from_physical(samples, q)
    field.coeffs[(0,) * len(shape)] = 0.0
    return field


def restrict_to_zero_x1(f: SpectralField) -> SpectralField:
    """Keep only modes with xi1 = 0 (tight case for the retained-axes bound)."""
    w1, _ = _split_weights(f)
    coeffs = np.where(w1 == 0, f.coeffs, 0.0)
    out = SpectralField(coeffs, f.q)
    if out.norm() == 0.0:
        raise ConfigError("forcing has no xi1 = 0 content")
    return out
