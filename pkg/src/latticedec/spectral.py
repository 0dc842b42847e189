"""Numerical checks of boundedness, positivity and the spectral enclosure of the Laplacian."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .cochain import COMPONENT_COUNT, Cochain, inner_product, random_cochain
from .operators import laplacian, stencil

logger = logging.getLogger(__name__)

__all__ = [
    "SelfAdjointnessError",
    "SpectralEstimate",
    "PositivityReport",
    "rayleigh_quotient",
    "operator_norm_estimate",
    "positivity_check",
]

NORM_BOUND = 8.0


class SelfAdjointnessError(ArithmeticError):
    """The quadratic form (-Delta a, a) came out with a non-negligible imaginary part."""


@dataclass(frozen=True)
class SpectralEstimate:
    estimate: float
    iterations: int
    final_increment: float

    @property
    def converged_within(self) -> float:
        return self.final_increment


@dataclass(frozen=True)
class PositivityReport:
    samples: int
    min_quotient: float
    max_quotient: float
    max_imag_ratio: float
    all_positive: bool


def _quadratic_form(form: Cochain) -> tuple[complex, float]:
    aa = inner_product(form, form).real
    return inner_product(laplacian(form), form), aa


def rayleigh_quotient(form: Cochain, imag_tol: float = 1e-12) -> float:
    """``Re(-Delta a, a) / (a, a)``; raises if the imaginary part exceeds ``imag_tol * (a, a)``."""
    q, aa = _quadratic_form(form)
    if aa == 0.0:
        raise ValueError("Rayleigh quotient of the zero form is undefined")
    if abs(q.imag) > imag_tol * aa:
        raise SelfAdjointnessError(f"|Im(-Delta a, a)| = {abs(q.imag):.3e} exceeds {imag_tol:g}*(a,a)")
    return q.real / aa


def checkerboard(n: int) -> np.ndarray:
    idx = np.arange(-n, n + 1)
    return np.where((idx[:, None] + idx[None, :]) % 2 == 0, 1.0, -1.0)


def operator_norm_estimate(degree: int, n: int, max_iter: int = 200_000, tol: float = 1e-12) -> SpectralEstimate:
    """Power iteration for the Dirichlet truncation of ``-Delta^c`` to the window ``n``.

    The start vector is the checkerboard ``(-1)^(k+s)`` in every component,
    which overlaps the top Dirichlet mode. Iteration stops once the Rayleigh
    quotient changes by less than ``tol``; otherwise ``final_increment``
    reports how far from converged the result is.
    """
    if degree not in COMPONENT_COUNT:
        raise ValueError(f"form degree must be 0, 1 or 2, got {degree!r}")
    if n < 1 or max_iter < 1 or not tol > 0:
        raise ValueError("need n >= 1, max_iter >= 1 and tol > 0")
    # the truncated stencil acts on each component separately
    x = np.stack([checkerboard(n)] * COMPONENT_COUNT[degree])
    x /= np.linalg.norm(x)
    estimate, increment = 0.0, np.inf
    it = 0
    for it in range(1, max_iter + 1):
        y = np.stack([stencil(c) for c in x])
        rq = float(np.vdot(x, y).real)
        increment = abs(rq - estimate)
        estimate = rq
        x = y / np.linalg.norm(y)
        if increment < tol:
            break
    else:
        logger.warning("power iteration stopped at max_iter=%d, increment %.3e", max_iter, increment)
    return SpectralEstimate(estimate, it, increment)


def positivity_check(samples: int, n: int, seed: int, degrees=(0, 1, 2)) -> PositivityReport:
    """Rayleigh quotients of random nonzero forms of each degree on the window ``n``."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    lo, hi, worst_imag = np.inf, -np.inf, 0.0
    positive = True
    for degree in degrees:
        for _ in range(samples):
            form = random_cochain(degree, n, rng)
            q, aa = _quadratic_form(form)
            lo, hi = min(lo, q.real / aa), max(hi, q.real / aa)
            worst_imag = max(worst_imag, abs(q.imag) / aa)
            positive &= q.real > 0
    return PositivityReport(samples * len(degrees), lo, hi, worst_imag, bool(positive))
