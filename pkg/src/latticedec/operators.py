"""Coboundary, cup product, Hodge star, codifferential and Laplacian on lattice cochains.

Every difference operator returns a form on a window one larger than its
input, so nothing in the support of a compactly supported form is cut off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cochain import Cochain, GridIndex, Window, inner_product, shifted, zero_cochain

__all__ = [
    "OperatorReport",
    "coboundary",
    "cup",
    "star",
    "star_inverse",
    "codifferential",
    "codifferential_composed",
    "laplacian",
    "laplacian_composed",
    "stencil",
    "greens_formula_residual",
    "boundary_sums_r0",
]


@dataclass(frozen=True)
class OperatorReport:
    max_abs_residual: float
    location_of_max: GridIndex | None = None
    component: int | None = None

    def __post_init__(self):
        if not self.max_abs_residual >= 0:
            raise ValueError("max_abs_residual must be non-negative")


def _at(form: Cochain, c: int, n_out: int, dk: int = 0, ds: int = 0) -> np.ndarray:
    return shifted(form.components[c], form.n, n_out, dk, ds)


def coboundary(form: Cochain) -> Cochain:
    n = form.n + 1
    if form.formal_degree == -1:
        return zero_cochain(0, n)
    if form.degree == 2:
        return zero_cochain(2, n, structural=True)
    if form.degree == 0:
        phi = _at(form, 0, n)
        u = _at(form, 0, n, dk=1) - phi
        v = _at(form, 0, n, ds=1) - phi
        return Cochain(1, Window(n), (u, v))
    # d(u, v) = Delta_k v - Delta_s u
    eta = (_at(form, 1, n, dk=1) - _at(form, 1, n)) - (_at(form, 0, n, ds=1) - _at(form, 0, n))
    return Cochain(2, Window(n), (eta,))


def codifferential(form: Cochain) -> Cochain:
    """Explicit backward-difference codifferential."""
    n = form.n + 1
    if form.formal_degree == 3:
        return zero_cochain(2, n)
    if form.degree == 0:
        return zero_cochain(0, n, structural=True)
    if form.degree == 1:
        phi = -(_at(form, 0, n) - _at(form, 0, n, dk=-1)) - (_at(form, 1, n) - _at(form, 1, n, ds=-1))
        return Cochain(0, Window(n), (phi,))
    eta = form
    u = _at(eta, 0, n) - _at(eta, 0, n, ds=-1)
    v = -(_at(eta, 0, n) - _at(eta, 0, n, dk=-1))
    return Cochain(1, Window(n), (u, v))


def star(form: Cochain) -> Cochain:
    """Hodge star: x->Omega, e1^{k,s}->e2^{k+1,s}, e2^{k,s}->-e1^{k,s+1}, Omega^{k,s}->x^{k+1,s+1}."""
    if form.degree == 0:
        return Cochain(2, form.window, form.components)
    n = form.n + 1
    if form.degree == 1:
        u = -_at(form, 1, n, ds=-1)
        v = _at(form, 0, n, dk=-1)
        return Cochain(1, Window(n), (u, v))
    return Cochain(0, Window(n), (_at(form, 0, n, dk=-1, ds=-1),))


def star_inverse(form: Cochain) -> Cochain:
    if form.degree == 2:
        return Cochain(0, form.window, form.components)
    n = form.n + 1
    if form.degree == 1:
        u = _at(form, 1, n, dk=1)
        v = -_at(form, 0, n, ds=1)
        return Cochain(1, Window(n), (u, v))
    return Cochain(2, Window(n), (_at(form, 0, n, dk=1, ds=1),))


def codifferential_composed(form: Cochain) -> Cochain:
    """``(-1)^r star^{-1} d star`` on an r-form; used to cross-check :func:`codifferential`."""
    if form.degree == 0:
        return zero_cochain(0, form.n + 1, structural=True)
    out = star_inverse(coboundary(star(form)))
    return out if form.degree % 2 == 0 else -out


def cup(a: Cochain, b: Cochain) -> Cochain:
    """Whitney product defined on basis index patterns, zero on all others."""
    ra, rb = a.degree, b.degree
    if ra + rb > 2:
        raise ValueError(f"cup product of degrees {ra} and {rb} exceeds top degree 2")
    n = max(a.n, b.n) + 1
    if ra == 0 and rb == 0:
        comps = (_at(a, 0, n) * _at(b, 0, n),)
    elif ra == 0:
        comps = tuple(_at(a, 0, n) * _at(b, c, n) for c in range(len(b.components)))
    elif ra == 1 and rb == 0:
        comps = (_at(a, 0, n) * _at(b, 0, n, dk=1), _at(a, 1, n) * _at(b, 0, n, ds=1))
    elif ra == 2:
        comps = (_at(a, 0, n) * _at(b, 0, n, dk=1, ds=1),)
    else:
        # e1^{k,s} u e2^{k+1,s} = Omega^{k,s};  e2^{k,s} u e1^{k,s+1} = -Omega^{k,s}
        comps = (_at(a, 0, n) * _at(b, 1, n, dk=1) - _at(a, 1, n) * _at(b, 0, n, ds=1),)
    return Cochain(ra + rb, Window(n), comps)


def stencil(arr: np.ndarray) -> np.ndarray:
    """5-point stencil ``4c - (four neighbours)`` with zero reads outside ``arr``."""
    out = 4.0 * arr
    out[1:, :] -= arr[:-1, :]
    out[:-1, :] -= arr[1:, :]
    out[:, 1:] -= arr[:, :-1]
    out[:, :-1] -= arr[:, 1:]
    return out


def laplacian(form: Cochain) -> Cochain:
    """``-Delta^c``: the 5-point stencil applied to every component."""
    n = form.n + 1
    return Cochain(form.degree, Window(n), tuple(stencil(c) for c in form.embed(n)))


def laplacian_composed(form: Cochain) -> Cochain:
    """``delta d + d delta`` built from the primitive operators."""
    n = form.n + 2
    total = codifferential(coboundary(form)) + coboundary(codifferential(form))
    return total.resized(n)


def greens_formula_residual(a: Cochain, b: Cochain, n: int) -> complex:
    """``(d a, b)_N - (a, delta b)_N`` on the window of half-width ``n``."""
    if b.degree != a.degree + 1:
        raise ValueError(f"expected degrees r and r+1, got {a.degree} and {b.degree}")
    return inner_product(coboundary(a), b, n) - inner_product(a, codifferential(b), n)


def boundary_sums_r0(phi: Cochain, omega: Cochain, n: int) -> complex:
    """Boundary terms of the discrete Green formula for a 0-form and a 1-form.

    The sum over k pairs ``phi`` just above/below the window with ``v`` on the
    crossing edge, the sum over s does the same with ``u``.
    """
    if phi.degree != 0 or omega.degree != 1:
        raise ValueError("boundary sums are defined for a 0-form and a 1-form")

    def p(k, s):
        return phi.at(k, s)

    def u(k, s):
        return omega.at(k, s, "u")

    def v(k, s):
        return omega.at(k, s, "v")

    total = 0j
    for k in range(-n, n + 1):
        total += p(k, n + 1) * np.conj(v(k, n)) - p(k, -n) * np.conj(v(k, -n - 1))
    for s in range(-n, n + 1):
        total += p(n + 1, s) * np.conj(u(n, s)) - p(-n, s) * np.conj(u(-n - 1, s))
    return complex(total)
