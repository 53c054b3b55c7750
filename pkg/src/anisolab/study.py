"""Epsilon sweeps against the limit field, rate fits, and report files.

A sweep solves the scaled problem for every epsilon in the configured
(strictly decreasing) list, compares each solution with the limit field
computed once, and records one row of norm columns per epsilon:

    epsilon, l2_diff, v12_diff, eps_grad_x1, hess_x2_diff_omega,
    eps2_hess_x1_omega, eps_hess_x1x2_omega, frechet_d, wall_ms

Mask-local columns use the configured interior margin; the metric column
uses the configured nested family.  Reports are a CSV with exactly that
header plus a JSON twin embedding the full configuration, so every number
can be recomputed from the persisted solution fields.

The comparison columns are physically meaningful only while they sit above
the discretization floor: ten times the manufactured-solution error of the
same grid.  Below that, rows mostly measure truncation error of the
discrete operators; emitted reports carry the floor and the CLI warns
when a column ends up under it.
"""

from __future__ import annotations

import csv
import json
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .coefficients import scale_coefficients, verify_ellipticity
from .config import StudyConfig
from .errors import ConfigError, SolverError
from .fd_ops import assemble_operator
from .fieldio import save_field
from .forcing import forcing_field
from .grid import Grid, ScalarField
from .limit import solve_limit
from .norms import (frechet_distance, grad_x1_seminorm, hess_x1_seminorm,
                    hess_x1x2_seminorm, hess_x2_seminorm, l2_norm, v12_norm)
from .semilinear import picard_solve, semilinear_limit
from .solver import solve_dirichlet

__all__ = [
    "CSV_COLUMNS",
    "SweepRow",
    "SweepReport",
    "run_sweep",
    "estimate_rate",
    "emit_report",
    "discretization_floor",
    "FLOOR_NOTE",
]

CSV_COLUMNS = ("epsilon", "l2_diff", "v12_diff", "eps_grad_x1",
               "hess_x2_diff_omega", "eps2_hess_x1_omega",
               "eps_hess_x1x2_omega", "frechet_d", "wall_ms")

RATE_COLUMNS = CSV_COLUMNS[1:-1]

FLOOR_NOTE = (
    "Comparison columns are meaningful only while they exceed the "
    "discretization floor (10x the manufactured-solution error at this "
    "grid); below it they mostly measure truncation error.")


@dataclass
class SweepRow:
    epsilon: float
    l2_diff: float
    v12_diff: float
    eps_grad_x1: float
    hess_x2_diff_omega: float
    eps2_hess_x1_omega: float
    eps_hess_x1x2_omega: float
    frechet_d: float
    wall_ms: float


@dataclass
class SweepReport:
    """Sweep rows in decreasing-epsilon order plus fitted decay rates.

    ``complete`` is False when a solve failed; ``rows`` then holds the
    finished prefix and ``error`` the failure.  Solution fields are kept
    in memory for diagnostics and are persisted by ``emit_report``.
    """

    config: StudyConfig
    rows: list[SweepRow]
    rates: dict[str, float | None]
    mask_margin: int
    family_margins: list[int]
    floor: float
    complete: bool
    error: str | None
    u_limit: ScalarField | None = None
    u_eps: list[ScalarField] | None = None

    def floor_warnings(self) -> list[str]:
        """Columns whose final value fell below the floor."""
        if not self.rows:
            return []
        last = self.rows[-1]
        return [c for c in RATE_COLUMNS
                if getattr(last, c) < self.floor]


def discretization_floor(grid: Grid, tol: float = 1e-10) -> float:
    """Ten times the l2 error of a manufactured solve on this grid.

    Probe: identity coefficients at epsilon = 1 with the product-sine
    exact solution, the standard second-order reference case.
    """
    from .coefficients import coefficient_family

    exact = forcing_field("sine_product", grid)
    lengths = [hi - lo for lo, hi in zip(grid.lo, grid.hi)]
    factor = sum((np.pi / L) ** 2 for L in lengths)
    f = ScalarField(grid, factor * exact.values)
    op = assemble_operator(grid, scale_coefficients(
        coefficient_family("identity", grid), 1.0))
    u = solve_dirichlet(op, f, tol=tol)
    return 10.0 * l2_norm(u - exact)


def _sweep_row(config: StudyConfig, grid: Grid, coeffs, f, u_limit,
               mask, family, nonlinearity, epsilon: float
               ) -> tuple[SweepRow, ScalarField]:
    start = time.perf_counter()
    scaled = scale_coefficients(coeffs, epsilon)
    op = assemble_operator(grid, scaled)
    if nonlinearity is None:
        u = solve_dirichlet(op, f, tol=config.solver_tol,
                            method=config.solver_method,
                            maxiter_factor=config.maxiter_factor)
    else:
        u = picard_solve(op, f, nonlinearity, damping=config.damping,
                         tol=config.solver_tol,
                         max_iter=config.picard_max_iter).field
    diff = u - u_limit
    row = SweepRow(
        epsilon=epsilon,
        l2_diff=l2_norm(diff),
        v12_diff=v12_norm(diff),
        eps_grad_x1=epsilon * grad_x1_seminorm(u),
        hess_x2_diff_omega=hess_x2_seminorm(diff, mask),
        eps2_hess_x1_omega=epsilon ** 2 * hess_x1_seminorm(u, mask),
        eps_hess_x1x2_omega=epsilon * hess_x1x2_seminorm(u, mask),
        frechet_d=frechet_distance(u, u_limit, family,
                                   n_max=config.nested),
        wall_ms=0.0)
    row.wall_ms = 1000.0 * (time.perf_counter() - start)
    return row, u


def run_sweep(config: StudyConfig) -> SweepReport:
    """Full sweep: limit once, one scaled solve per epsilon, norm columns.

    Rows always come out in the configured (decreasing) epsilon order even
    when solves run on several workers.  A failed solve stops the sweep;
    the report is returned with the finished prefix and flagged incomplete.
    """
    grid = config.build_grid()
    coeffs = config.build_coefficients(grid)
    verify_ellipticity(coeffs)
    f = config.build_forcing(grid)
    mask = config.build_mask(grid)
    family = config.build_family(grid)
    nonlinearity = config.build_nonlinearity()

    if nonlinearity is None:
        u_limit = solve_limit(grid, coeffs, f, tol=config.solver_tol)
    else:
        u_limit = semilinear_limit(
            grid, coeffs, f, nonlinearity, damping=config.damping,
            tol=config.solver_tol, max_iter=config.picard_max_iter).field

    floor = discretization_floor(grid, tol=config.solver_tol)

    def work(epsilon):
        return _sweep_row(config, grid, coeffs, f, u_limit, mask, family,
                          nonlinearity, epsilon)

    rows: list[SweepRow] = []
    fields: list[ScalarField] = []
    error: str | None = None
    eps_list = list(config.epsilons)
    if config.workers == 1:
        for epsilon in eps_list:
            try:
                row, u = work(epsilon)
            except SolverError as err:
                error = f"epsilon={epsilon}: {err}"
                break
            rows.append(row)
            fields.append(u)
    else:
        outcomes: list = [None] * len(eps_list)
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(work, e) for e in eps_list]
            for i, fut in enumerate(futures):
                try:
                    outcomes[i] = fut.result()
                except SolverError as err:
                    outcomes[i] = f"epsilon={eps_list[i]}: {err}"
        for out in outcomes:
            if isinstance(out, str):
                error = out
                break
            row, u = out
            rows.append(row)
            fields.append(u)

    rates: dict[str, float | None] = {}
    for col in RATE_COLUMNS:
        pairs = [(r.epsilon, getattr(r, col)) for r in rows]
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                rates[col] = estimate_rate(pairs)
        except ValueError:
            rates[col] = None

    return SweepReport(
        config=config, rows=rows, rates=rates,
        mask_margin=config.effective_margin(grid),
        family_margins=list(family.margins),
        floor=floor, complete=error is None, error=error,
        u_limit=u_limit, u_eps=fields)


def estimate_rate(pairs) -> float:
    """Least-squares slope of log(value) against log(x).

    Pairs with nonpositive values are excluded with a warning; fewer than
    three usable pairs is an error.
    """
    pairs = list(pairs)
    usable = [(x, v) for x, v in pairs if v > 0 and x > 0]
    dropped = len(pairs) - len(usable)
    if dropped:
        warnings.warn(
            f"estimate_rate: dropped {dropped} nonpositive pair(s)")
    if len(usable) < 3:
        raise ValueError(
            f"need at least 3 usable pairs, have {len(usable)}")
    xs = np.log([x for x, _ in usable])
    vs = np.log([v for _, v in usable])
    return float(np.polyfit(xs, vs, 1)[0])


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def emit_report(report: SweepReport, out_dir, fmt: str | None = None
                ) -> dict[str, Path]:
    """Write report files and persisted solution fields; return the paths.

    ``csv`` (default) writes both the CSV and its JSON twin; ``json``
    writes only the twin.  Fields go to ``fields/`` next to the reports.
    """
    fmt = fmt or report.config.out_format
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got '{fmt}'")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    payload = {
        "config": report.config.to_dict(),
        "mask_margin": report.mask_margin,
        "family_margins": report.family_margins,
        "floor": report.floor,
        "complete": report.complete,
        "error": report.error,
        "rows": [asdict(r) for r in report.rows],
        "rates": report.rates,
        "floor_warnings": report.floor_warnings(),
        "note": FLOOR_NOTE,
    }
    json_path = out / "report.json"
    tmp = json_path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(payload, indent=2) + "\n")
    tmp.replace(json_path)
    paths["json"] = json_path

    if fmt == "csv":
        csv_path = out / "report.csv"
        tmp = csv_path.with_suffix(".csv.tmp")
        with open(tmp, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for r in report.rows:
                writer.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
        tmp.replace(csv_path)
        paths["csv"] = csv_path

    if report.u_limit is not None:
        fields_dir = out / "fields"
        fields_dir.mkdir(exist_ok=True)
        paths["u_limit"] = save_field(fields_dir / "u_limit.field",
                                      report.u_limit)
        for i, u in enumerate(report.u_eps or []):
            paths[f"u_eps_{i:03d}"] = save_field(
                fields_dir / f"u_eps_{i:03d}.field", u)
    return paths
