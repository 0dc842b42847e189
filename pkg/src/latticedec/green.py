"""Resolvent of the lattice Laplacian: decaying roots, separable solutions and the closed-form kernel.

The spectral parameter ``lam`` is traded for ``mu = 1 - lam/4``, under which
the eigenvalue equation becomes the averaged 4-neighbour recurrence
``(1/4) * sum(neighbours) = mu * phi``. Its one-dimensional solutions are
powers of the roots of ``p**2 - 2*mu*p + 1 = 0``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .cochain import Cochain, GridIndex, Window, basis_cochain, shifted
from .operators import stencil

__all__ = [
    "SpectrumError",
    "ResolventContext",
    "make_context",
    "spectrum_distance",
    "phi_solution",
    "root_identity",
    "homogeneous_residual",
    "green_component",
    "green_for_1form",
    "green_for_2form",
    "GreenKernel",
    "ClosedFormKernel",
    "TabulatedKernel",
    "delta_form",
    "stencil_residual",
    "apply_shifted_operator",
    "resolvent_apply",
]

SPECTRUM_BAND = 1e-12
FAMILIES = (("+", "+"), ("+", "-"), ("-", "+"), ("-", "-"))


class SpectrumError(ValueError):
    """lambda lies on (or numerically at) the spectrum [0, 8]; the resolvent does not exist."""


def spectrum_distance(lam: complex) -> float:
    lam = complex(lam)
    nearest = min(max(lam.real, 0.0), 8.0)
    return abs(lam - nearest)


@dataclass(frozen=True)
class ResolventContext:
    """Spectral parameter together with its decaying root.

    ``r_mu`` is always ``p - mu``, so ``p = mu + r_mu`` holds whichever root
    the principal branch produced. ``swapped`` records that the principal
    ``mu - sqrt(mu**2 - 1)`` had modulus > 1 and its reciprocal was taken.
    """

    lam: complex
    mu: complex
    r_mu: complex
    p: complex
    dist_to_spectrum: float
    swapped: bool = False

    @property
    def q(self) -> complex:
        """The growing root ``mu - r_mu = 1/p``."""
        return self.mu - self.r_mu


def make_context(lam: complex) -> ResolventContext:
    lam = complex(lam)
    dist = spectrum_distance(lam)
    if dist <= SPECTRUM_BAND:
        raise SpectrumError(f"lambda={lam} is within {SPECTRUM_BAND:g} of the spectrum [0, 8]")
    mu = 1 - lam / 4
    root = cmath.sqrt(mu * mu - 1)
    candidate, other = mu - root, mu + root
    swapped = abs(candidate) > 1
    # the small root is 1/(large root); this avoids cancellation in mu - sqrt(mu^2 - 1)
    big = other if not swapped else candidate
    p = 1 / big
    return ResolventContext(lam, mu, p - mu, p, dist, swapped)


def _ipow(z: complex, k: int) -> complex:
    out = 1 + 0j
    for _ in range(abs(k)):
        out *= z
    return out


def phi_solution(k: int, sign: str, ctx: ResolventContext) -> complex:
    """``(mu +/- R(mu))**k``, by repeated multiplication; negative ``k`` uses the other root."""
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    grow = (sign == "+") == (k < 0)
    return _ipow(ctx.q if grow else ctx.p, k)


def root_identity(sign: str, ctx: ResolventContext) -> complex:
    """``phi_2 - 2 mu phi_1 + 1``; vanishes for both roots."""
    return phi_solution(2, sign, ctx) - 2 * ctx.mu * phi_solution(1, sign, ctx) + 1


def homogeneous_residual(k: int, s: int, ctx: ResolventContext, family=("+", "-")) -> complex:
    """Residual of the averaged recurrence for the product ``phi_k^a * phi_s^b`` at (k, s)."""
    a, b = family

    def f(i, j):
        return phi_solution(i, a, ctx) * phi_solution(j, b, ctx)

    return (f(k + 1, s) + f(k, s + 1) + f(k - 1, s) + f(k, s - 1)) / 4 - ctx.mu * f(k, s)


def _exponent(dk, ds):
    """Power of p in the closed-form kernel for offsets ``dk = k - m``, ``ds = s - n``."""
    if (dk == 0 and ds > 0) or (dk > 0 and ds == 0):
        return abs(dk + 1) + abs(ds + 1)
    if (dk == 0 and ds < 0) or (dk < 0 and ds == 0):
        return abs(dk - 1) + abs(ds - 1)
    return abs(dk) + abs(ds)


def green_component(k: int, s: int, m: int, n: int, ctx: ResolventContext) -> complex:
    """Closed-form kernel value ``-1/(4 R) * p**e`` with the three-case exponent rule."""
    return -phi_solution(_exponent(k - m, s - n), "+", ctx) / (4 * ctx.r_mu)


def green_for_1form(component: str, k: int, s: int, m: int, n: int, ctx: ResolventContext) -> complex:
    # u and v decouple under the componentwise stencil
    if component not in ("u", "v"):
        raise ValueError(f"component must be 'u' or 'v', got {component!r}")
    return green_component(k, s, m, n, ctx)


def green_for_2form(k: int, s: int, m: int, n: int, ctx: ResolventContext) -> complex:
    return green_component(k, s, m, n, ctx)


class GreenKernel:
    """A translation-invariant double 0-form ``G_{k,s,m,n}`` depending on ``(k-m, s-n)``."""

    source = "abstract"

    def __init__(self, context: ResolventContext):
        self.context = context

    def offset(self, a: int, b: int) -> complex:
        raise NotImplementedError

    def component(self, k: int, s: int, m: int, n: int) -> complex:
        return self.offset(k - m, s - n)

    def table(self, w: int) -> np.ndarray:
        """Values at offsets ``|a|, |b| <= w`` as ``arr[a + w, b + w]``."""
        r = range(-w, w + 1)
        return np.array([[self.offset(a, b) for b in r] for a in r], dtype=np.complex128)


class ClosedFormKernel(GreenKernel):
    source = "closed-form"

    def offset(self, a, b):
        return green_component(a, b, 0, 0, self.context)

    def table(self, w):
        r = np.arange(-w, w + 1)
        a, b = np.meshgrid(r, r, indexing="ij")
        e = np.abs(a) + np.abs(b)
        plus = ((a == 0) & (b > 0)) | ((a > 0) & (b == 0))
        minus = ((a == 0) & (b < 0)) | ((a < 0) & (b == 0))
        e = np.where(plus, np.abs(a + 1) + np.abs(b + 1), e)
        e = np.where(minus, np.abs(a - 1) + np.abs(b - 1), e)
        # sequential products, identical to phi_solution's loop
        powers = np.cumprod(np.r_[1 + 0j, np.full(int(e.max()), self.context.p)])
        return -powers[e] / (4 * self.context.r_mu)


class TabulatedKernel(GreenKernel):
    """Kernel read from a Green column on a finite window; zero beyond it."""

    def __init__(self, context: ResolventContext, column: np.ndarray, source: str = "oracle"):
        super().__init__(context)
        column = np.asarray(column, dtype=np.complex128)
        self.half_width = (column.shape[0] - 1) // 2
        self.column = column
        self.source = source

    def offset(self, a, b):
        w = self.half_width
        if abs(a) > w or abs(b) > w:
            return 0j
        return complex(self.column[a + w, b + w])

    def table(self, w):
        return shifted(self.column, self.half_width, w)


def delta_form(m: int, n: int, window: int | None = None, degree: int = 0, component=None) -> Cochain:
    """Discrete Dirac delta at (m, n): coefficient 1 there, zero elsewhere."""
    if degree == 1 and component is None:
        component = "u"
    return basis_cochain(degree, m, n, component, window)


def stencil_residual(kernel: GreenKernel, w: int) -> np.ndarray:
    """``4 mu G - sum of neighbours - delta`` for the column with source (0, 0), over ``|k|, |s| <= w``."""
    if w < 2:
        raise ValueError("residual grid needs w >= 2")
    t = kernel.table(w + 1)
    res = (4 * kernel.context.mu) * t[1:-1, 1:-1] - (t[2:, 1:-1] + t[:-2, 1:-1] + t[1:-1, 2:] + t[1:-1, :-2])
    res[w, w] -= 1
    return res


def apply_shifted_operator(form: Cochain, lam: complex) -> Cochain:
    """``(-Delta^c - lam)`` applied componentwise; window grows by one."""
    n = form.n + 1
    return Cochain(form.degree, Window(n), tuple(stencil(c) - lam * c for c in form.embed(n)))


def _kernel_for(source, ctx, reach):
    if isinstance(source, GreenKernel):
        return source
    if source == "closed-form":
        return ClosedFormKernel(ctx)
    if source == "oracle":
        from .oracle import OracleConfig, oracle_kernel

        return oracle_kernel(ctx, OracleConfig(n_trunc=max(64, 2 * reach)))
    raise ValueError(f"unknown kernel source {source!r}")


def resolvent_apply(
    phi: Cochain,
    ctx: ResolventContext,
    kernel_source="closed-form",
    rel_tol: float = 1e-12,
    shell: int = 4,
    max_window: int = 1024,
) -> Cochain:
    """``sum_{m,n} G_{k,s,m,n} phi_{m,n}`` on a window grown until the outer shell is negligible.

    The window starts at the support of ``phi`` and grows ``shell`` rings at a
    time until every value on its outermost ring is below ``rel_tol`` times the
    largest output value.
    """
    if phi.degree != 0:
        raise ValueError("resolvent_apply acts on 0-forms")
    if phi.is_zero():
        return phi.resized(phi.n)
    m = phi.n
    kernel = _kernel_for(kernel_source, ctx, m + 8 * shell)
    (arr,) = phi.components
    w_out = m + shell
    while True:
        table = kernel.table(w_out + m)
        full = convolve2d(arr, table, mode="full")  # centred on window w_out + 2m
        out = full[2 * m : 2 * m + 2 * w_out + 1, 2 * m : 2 * m + 2 * w_out + 1]
        top = np.max(np.abs(out))
        ring = np.concatenate([out[0], out[-1], out[:, 0], out[:, -1]])
        if np.max(np.abs(ring)) < rel_tol * top:
            return Cochain(0, Window(w_out), (out,))
        w_out += shell
        if w_out > max_window:
            raise RuntimeError(f"resolvent kernel did not decay within window {max_window}")
