"""Independent reference values for the lattice resolvent kernel.

Two routes, each with its own error source:

* a sparse direct solve of ``(-Delta - lam) u = delta`` on a Dirichlet
  truncation (truncation error, controlled by geometric decay);
* the torus integral ``(2 pi)^-2 \\iint e^{i(a t + b f)} / (4 - 2cos t - 2cos f - lam)``
  by the periodic trapezoid rule (aliasing error, controlled by refinement).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .cochain import Cochain, GridIndex, Window
from .green import (
    ClosedFormKernel,
    ResolventContext,
    TabulatedKernel,
    make_context,
    spectrum_distance,
    stencil_residual,
)

__all__ = [
    "OracleError",
    "OracleDisagreementError",
    "OracleConfig",
    "QuadratureResult",
    "ResidualReport",
    "shifted_laplacian_matrix",
    "truncated_resolvent_solve",
    "fourier_green",
    "fourier_green_table",
    "oracle_kernel",
    "compare_kernels",
    "CROSS_ORACLE_TOL",
]

CROSS_ORACLE_TOL = 1e-8
EDGE_DECAY_TOL = 1e-10
QUADRATURE_TOL = 1e-10


class OracleError(RuntimeError):
    """An oracle failed to reach its own accuracy target."""


class OracleDisagreementError(OracleError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class OracleConfig:
    n_trunc: int = 64
    quadrature_points: int = 64
    solver_tol: float = 1e-12
    max_solver_iter: int = 20
    max_trunc: int = 512
    max_quadrature_points: int = 2048

    def __post_init__(self):
        if self.n_trunc < 8:
            raise ValueError("n_trunc must be >= 8")
        if self.quadrature_points < 64:
            raise ValueError("quadrature_points must be >= 64")
        if not self.solver_tol > 0:
            raise ValueError("solver_tol must be positive")
        if self.max_solver_iter < 1:
            raise ValueError("max_solver_iter must be >= 1")


def _context(lam_or_ctx) -> ResolventContext:
    return lam_or_ctx if isinstance(lam_or_ctx, ResolventContext) else make_context(lam_or_ctx)


def shifted_laplacian_matrix(n: int, lam: complex) -> sp.csc_matrix:
    """``-Delta - lam`` on the window ``n`` with zero exterior, row-major (s fastest)."""
    side = 2 * n + 1
    eye = sp.identity(side, format="csr")
    path = sp.diags([-np.ones(side - 1), -np.ones(side - 1)], [-1, 1], format="csr")
    mat = sp.kron(path, eye) + sp.kron(eye, path) + (4 - complex(lam)) * sp.identity(side * side)
    return sp.csc_matrix(mat, dtype=np.complex128)


def _solve(n, site, lam, config):
    side = 2 * n + 1
    a = shifted_laplacian_matrix(n, lam)
    b = np.zeros(side * side, dtype=np.complex128)
    b[(site.k + n) * side + (site.s + n)] = 1.0
    lu = splu(a)
    x = lu.solve(b)
    for _ in range(config.max_solver_iter):
        r = b - a @ x
        if np.max(np.abs(r)) <= config.solver_tol:
            return x.reshape(side, side)
        x = x + lu.solve(r)
    raise OracleError(f"linear solve residual {np.max(np.abs(r)):.3e} above solver_tol")


def truncated_resolvent_solve(site, ctx, config: OracleConfig = OracleConfig()) -> Cochain:
    """Green column ``(-Delta - lam)^{-1} delta^{site}`` from a Dirichlet-truncated solve.

    The window is doubled (up to ``config.max_trunc``) until the values on its
    boundary ring fall below ``1e-10 * |u(site)|``.
    """
    ctx = _context(ctx)
    site = GridIndex(*site)
    n = config.n_trunc
    while True:
        if max(abs(site.k), abs(site.s)) > n // 2:
            n *= 2
            continue
        u = _solve(n, site, ctx.lam, config)
        edge = max(np.abs(u[0]).max(), np.abs(u[-1]).max(), np.abs(u[:, 0]).max(), np.abs(u[:, -1]).max())
        if edge < EDGE_DECAY_TOL * abs(u[site.k + n, site.s + n]):
            return Cochain(0, Window(n), (u,))
        if 2 * n > config.max_trunc:
            raise OracleError(f"kernel not decayed at truncation cap n={n} (lambda too close to spectrum)")
        n *= 2


@dataclass(frozen=True)
class QuadratureResult:
    values: np.ndarray
    points: int
    increments: tuple = field(default_factory=tuple)


def _trapezoid(offsets_a, offsets_b, lam, points):
    theta = 2 * np.pi * np.arange(points) / points
    c = 2 * np.cos(theta)
    inv = 1.0 / (4 - c[:, None] - c[None, :] - lam)
    ea = np.exp(1j * np.outer(offsets_a, theta))
    eb = np.exp(1j * np.outer(offsets_b, theta))
    return (ea @ inv @ eb.T) / points**2


def fourier_green_table(offsets_a, offsets_b, lam, config: OracleConfig = OracleConfig()) -> QuadratureResult:
    """Trapezoid values of the torus integral at every pair in ``offsets_a x offsets_b``.

    The number of points per axis doubles until successive tables differ by
    less than 1e-10 everywhere.
    """
    lam = complex(lam)
    if spectrum_distance(lam) <= 1e-12:
        raise ValueError(f"lambda={lam} lies on the spectrum")
    a = np.asarray(offsets_a, dtype=float)
    b = np.asarray(offsets_b, dtype=float)
    points = config.quadrature_points
    prev = _trapezoid(a, b, lam, points)
    increments = []
    while points < config.max_quadrature_points:
        points *= 2
        cur = _trapezoid(a, b, lam, points)
        increments.append(float(np.max(np.abs(cur - prev))))
        prev = cur
        if increments[-1] < QUADRATURE_TOL:
            return QuadratureResult(cur, points, tuple(increments))
    raise OracleError(f"quadrature not converged at {points} points (lambda too close to spectrum)")


def fourier_green(a: int, b: int, lam: complex, config: OracleConfig = OracleConfig()) -> complex:
    return complex(fourier_green_table([a], [b], lam, config).values[0, 0])


def oracle_kernel(ctx, config: OracleConfig = OracleConfig()) -> TabulatedKernel:
    """Translation-invariant kernel taken from the solve-based column at the origin."""
    ctx = _context(ctx)
    col = truncated_resolvent_solve((0, 0), ctx, config)
    return TabulatedKernel(ctx, col.components[0], source="oracle")


def _pair(z):
    return [float(z.real), float(z.imag)]


def _fmt(x):
    return format(float(x), ".17g")


def _dump(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_dump(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_dump(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """Closed-form kernel audited against the two oracles over ``|k|, |s| <= w``."""

    lam: complex
    w: int
    tol: float
    closed_form: np.ndarray
    solve: np.ndarray
    fourier: np.ndarray
    residual_grid: np.ndarray
    oracle_residual_grid: np.ndarray
    agreement_mask: np.ndarray
    n_trunc: int
    quadrature_points: int

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.residual_grid)))

    @property
    def oracle_disagreement(self) -> float:
        return float(np.max(np.abs(self.solve - self.fourier) / (1 + np.abs(self.fourier))))

    @property
    def valid(self) -> bool:
        return self.oracle_disagreement <= CROSS_ORACLE_TOL

    def at(self, grid, k, s):
        return grid[k + self.w, s + self.w]

    def records(self):
        w = self.w
        for k in range(-w, w + 1):
            for s in range(-w, w + 1):
                i, j = k + w, s + w
                yield {
                    "k": k,
                    "s": s,
                    "closed_form": _pair(self.closed_form[i, j]),
                    "solve": _pair(self.solve[i, j]),
                    "fourier": _pair(self.fourier[i, j]),
                    "residual": _pair(self.residual_grid[i, j]),
                    "agree": bool(self.agreement_mask[i, j]),
                }

    def to_json(self) -> str:
        header = {
            "lambda": _pair(self.lam),
            "w": self.w,
            "tol": float(self.tol),
            "cross_oracle_tol": CROSS_ORACLE_TOL,
            "n_trunc": self.n_trunc,
            "quadrature_points": self.quadrature_points,
            "max_abs_residual": self.max_abs,
            "max_abs_oracle_residual": float(np.max(np.abs(self.oracle_residual_grid))),
            "oracle_disagreement": self.oracle_disagreement,
            "valid": self.valid,
        }
        lines = ["{"]
        lines += [f"  {json.dumps(k)}: {_dump(v)}," for k, v in header.items()]
        lines.append('  "records": [')
        recs = [f"    {_dump(r)}" for r in self.records()]
        lines.append(",\n".join(recs))
        lines.append("  ]")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "s", "abs_residual", "agree"])
        for r in self.records():
            writer.writerow([r["k"], r["s"], _fmt(abs(complex(*r["residual"]))), int(r["agree"])])
        return buf.getvalue()


def compare_kernels(ctx, w: int, tol: float = 1e-8, config: OracleConfig = OracleConfig()) -> ResidualReport:
    """Tabulate closed form, solve and quadrature kernels and the stencil residual of the closed form.

    Raises :class:`OracleDisagreementError` (carrying the report) when the two
    oracles differ by more than 1e-8 relative anywhere on the grid.
    """
    ctx = _context(ctx)
    if w < 2:
        raise ValueError("w must be >= 2")
    cfg = config if config.n_trunc >= 2 * (w + 1) else OracleConfig(
        2 * (w + 1), config.quadrature_points, config.solver_tol, config.max_solver_iter,
        max(config.max_trunc, 4 * (w + 1)), config.max_quadrature_points,
    )
    closed = ClosedFormKernel(ctx)
    solved = oracle_kernel(ctx, cfg)
    offsets = np.arange(-w, w + 1)
    quad = fourier_green_table(offsets, offsets, ctx.lam, cfg)
    cf, sv, fo = closed.table(w), solved.table(w), quad.values
    # relative: far offsets are tiny for every kernel and would agree trivially in absolute terms
    agree = (np.abs(cf - sv) <= tol * np.abs(sv)) & (np.abs(cf - fo) <= tol * np.abs(fo))
    report = ResidualReport(
        lam=ctx.lam,
        w=w,
        tol=tol,
        closed_form=cf,
        solve=sv,
        fourier=fo,
        residual_grid=stencil_residual(closed, w),
        oracle_residual_grid=stencil_residual(solved, w),
        agreement_mask=agree,
        n_trunc=solved.half_width,
        quadrature_points=quad.points,
    )
    if not report.valid:
        raise OracleDisagreementError(
            f"oracles disagree by {report.oracle_disagreement:.3e} > {CROSS_ORACLE_TOL:g}", report
        )
    return report
