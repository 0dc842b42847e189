"""Discrete r-forms on square windows of the integer lattice.

A cochain of degree 0 or 2 carries one coefficient array, a 1-form carries two
(``u`` on horizontal edges, ``v`` on vertical edges). Arrays are indexed
``arr[k + n, s + n]`` for ``-n <= k, s <= n``; every coefficient outside the
window is zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

__all__ = [
    "CochainFormatError",
    "GridIndex",
    "Window",
    "Cochain",
    "make_cochain",
    "random_cochain",
    "basis_cochain",
    "get_coefficient",
    "inner_product",
    "norm",
    "max_abs_diff",
    "save_cochain",
    "load_cochain",
    "dumps_cochain",
    "loads_cochain",
]

COMPONENT_COUNT = {0: 1, 1: 2, 2: 1}
_COMPONENT_NAMES = {"u": 0, "v": 1}


class CochainFormatError(ValueError):
    """Raised for malformed serialized cochains."""


class GridIndex(NamedTuple):
    k: int
    s: int


@dataclass(frozen=True)
class Window:
    """Centered square window ``-n <= k, s <= n``."""

    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise TypeError(f"window half-width must be an integer, got {self.n!r}")
        if self.n < 0:
            raise ValueError(f"window half-width must be non-negative, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def side(self) -> int:
        return 2 * self.n + 1

    @property
    def size(self) -> int:
        return self.side**2

    def contains(self, k: int, s: int) -> bool:
        return -self.n <= k <= self.n and -self.n <= s <= self.n

    def points(self):
        r = range(-self.n, self.n + 1)
        return [GridIndex(k, s) for k in r for s in r]


WindowLike = Union[Window, int]


def _as_window(window: WindowLike) -> Window:
    return window if isinstance(window, Window) else Window(window)


def _check_degree(degree) -> int:
    if isinstance(degree, bool) or degree not in (0, 1, 2):
        raise ValueError(f"form degree must be 0, 1 or 2, got {degree!r}")
    return int(degree)


def component_index(degree: int, component) -> int:
    """Normalize a component selector (``None``/0 for r=0,2; ``"u"``/``"v"``/0/1 for r=1)."""
    if isinstance(component, str):
        if degree != 1 or component not in _COMPONENT_NAMES:
            raise ValueError(f"component {component!r} is not valid for a {degree}-form")
        return _COMPONENT_NAMES[component]
    if component is None:
        if degree == 1:
            raise ValueError("a 1-form needs an explicit component ('u' or 'v')")
        return 0
    if component in range(COMPONENT_COUNT[degree]):
        return int(component)
    raise ValueError(f"component {component!r} is not valid for a {degree}-form")


def shifted(arr: np.ndarray, n_src: int, n_out: int, dk: int = 0, ds: int = 0) -> np.ndarray:
    """Array over window ``n_out`` whose entry at (k, s) is ``arr`` at (k+dk, s+ds).

    Reads outside the source window ``n_src`` give zero.
    """
    out = np.zeros((2 * n_out + 1, 2 * n_out + 1), dtype=arr.dtype)
    k_lo, k_hi = max(-n_out, -n_src - dk), min(n_out, n_src - dk)
    s_lo, s_hi = max(-n_out, -n_src - ds), min(n_out, n_src - ds)
    if k_lo <= k_hi and s_lo <= s_hi:
        out[k_lo + n_out : k_hi + n_out + 1, s_lo + n_out : s_hi + n_out + 1] = arr[
            k_lo + dk + n_src : k_hi + dk + n_src + 1,
            s_lo + ds + n_src : s_hi + ds + n_src + 1,
        ]
    return out


@dataclass(frozen=True, eq=False)
class Cochain:
    """An immutable discrete r-form on a window.

    ``structural_zero`` marks the images that formally live in degree -1 or 3
    (codifferential of a 0-form, coboundary of a 2-form). They are stored as
    zero forms of degree 0 and 2 respectively.
    """

    degree: int
    window: Window
    components: tuple
    structural_zero: bool = False

    def __post_init__(self):
        degree = _check_degree(self.degree)
        window = _as_window(self.window)
        comps = self.components
        if isinstance(comps, np.ndarray) and comps.ndim == 2:
            comps = (comps,)
        comps = tuple(comps)
        if len(comps) != COMPONENT_COUNT[degree]:
            raise ValueError(
                f"a {degree}-form needs {COMPONENT_COUNT[degree]} component arrays, got {len(comps)}"
            )
        frozen = []
        for c in comps:
            a = np.array(c, dtype=np.complex128, copy=True)
            if a.shape != (window.side, window.side):
                raise ValueError(f"component shape {a.shape} does not match window n={window.n}")
            if not np.all(np.isfinite(a)):
                raise ValueError("cochain coefficients must be finite")
            a.setflags(write=False)
            frozen.append(a)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "components", tuple(frozen))

    @property
    def n(self) -> int:
        return self.window.n

    @property
    def formal_degree(self) -> int:
        if self.structural_zero:
            return -1 if self.degree == 0 else 3
        return self.degree

    def at(self, k: int, s: int, component=None) -> complex:
        return get_coefficient(self, component, GridIndex(k, s))

    def embed(self, n: int) -> tuple:
        """Component arrays re-indexed onto window ``n`` (cropping if smaller)."""
        return tuple(shifted(c, self.n, n) for c in self.components)

    def resized(self, n: int) -> "Cochain":
        return Cochain(self.degree, Window(n), self.embed(n), self.structural_zero)

    def is_zero(self) -> bool:
        return all(not np.any(c) for c in self.components)

    def _binary(self, other: "Cochain", op) -> "Cochain":
        if not isinstance(other, Cochain):
            return NotImplemented
        if self.degree != other.degree:
            raise ValueError(f"cannot combine a {self.degree}-form with a {other.degree}-form")
        n = max(self.n, other.n)
        comps = tuple(op(a, b) for a, b in zip(self.embed(n), other.embed(n)))
        return Cochain(self.degree, Window(n), comps, self.structural_zero and other.structural_zero)

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        return Cochain(self.degree, self.window, tuple(-c for c in self.components), self.structural_zero)

    def __mul__(self, scalar):
        if isinstance(scalar, Cochain):
            return NotImplemented
        return Cochain(
            self.degree, self.window, tuple(scalar * c for c in self.components), self.structural_zero
        )

    __rmul__ = __mul__

    def __repr__(self):
        flag = ", structural_zero" if self.structural_zero else ""
        return f"Cochain(degree={self.degree}, n={self.n}{flag})"


def zero_cochain(degree: int, window: WindowLike, structural: bool = False) -> Cochain:
    window = _as_window(window)
    comps = tuple(np.zeros((window.side, window.side)) for _ in range(COMPONENT_COUNT[degree]))
    return Cochain(degree, window, comps, structural)


def make_cochain(degree: int, window: WindowLike, fill: Union[complex, Callable] = 0) -> Cochain:
    """Build a cochain from a scalar or a coefficient function.

    A callable ``fill(k, s)`` returns one scalar for degrees 0 and 2 and a
    ``(u, v)`` pair for degree 1. A scalar fills every component.
    """
    degree = _check_degree(degree)
    window = _as_window(window)
    count = COMPONENT_COUNT[degree]
    comps = [np.zeros((window.side, window.side), dtype=np.complex128) for _ in range(count)]
    if callable(fill):
        for k, s in window.points():
            val = fill(k, s)
            vals = tuple(val) if count == 2 else (val,)
            for c, v in zip(comps, vals):
                c[k + window.n, s + window.n] = v
    else:
        value = complex(fill)
        if not np.isfinite(value):
            raise ValueError(f"fill value must be finite, got {fill!r}")
        for c in comps:
            c[...] = value
    return Cochain(degree, window, tuple(comps))


def random_cochain(
    degree: int, window: WindowLike, rng: np.random.Generator, support: int | None = None
) -> Cochain:
    """Standard complex Gaussian coefficients, optionally supported within half-width ``support``."""
    window = _as_window(window)
    m = window.n if support is None else support
    comps = []
    for _ in range(COMPONENT_COUNT[_check_degree(degree)]):
        core = rng.standard_normal((2 * m + 1, 2 * m + 1)) + 1j * rng.standard_normal((2 * m + 1, 2 * m + 1))
        comps.append(shifted(core, m, window.n))
    return Cochain(degree, window, tuple(comps))


def basis_cochain(degree: int, k: int, s: int, component=None, window: WindowLike | None = None) -> Cochain:
    """The basis element x^{k,s}, e_1^{k,s}, e_2^{k,s} or Omega^{k,s} as a cochain."""
    degree = _check_degree(degree)
    idx = component_index(degree, component)
    window = _as_window(window if window is not None else max(abs(k), abs(s)))
    if not window.contains(k, s):
        raise ValueError(f"({k}, {s}) lies outside window n={window.n}")
    comps = [np.zeros((window.side, window.side)) for _ in range(COMPONENT_COUNT[degree])]
    comps[idx][k + window.n, s + window.n] = 1.0
    return Cochain(degree, window, tuple(comps))


def get_coefficient(form: Cochain, component, idx) -> complex:
    c = component_index(form.degree, component)
    k, s = idx
    if not form.window.contains(k, s):
        return 0j
    return complex(form.components[c][k + form.n, s + form.n])


def inner_product(a: Cochain, b: Cochain, n: int | None = None) -> complex:
    """``sum a_{k,s} conj(b_{k,s})`` over all components.

    With ``n`` given the sum runs over the window ``-n <= k, s <= n`` only.
    """
    if a.degree != b.degree:
        raise ValueError(f"inner product of a {a.degree}-form with a {b.degree}-form")
    m = max(a.n, b.n) if n is None else n
    total = 0j
    for x, y in zip(a.embed(m), b.embed(m)):
        total += np.vdot(y.ravel(), x.ravel())
    return complex(total)


def norm(a: Cochain) -> float:
    return float(np.sqrt(sum(np.vdot(c.ravel(), c.ravel()).real for c in a.components)))


def max_abs_diff(a: Cochain, b: Cochain) -> float:
    """Largest coefficient difference after embedding both forms in a common window."""
    if a.degree != b.degree:
        raise ValueError(f"cannot compare a {a.degree}-form with a {b.degree}-form")
    m = max(a.n, b.n)
    return max(float(np.max(np.abs(x - y))) for x, y in zip(a.embed(m), b.embed(m)))


def _to_payload(form: Cochain) -> dict:
    payload = {
        "degree": form.degree,
        "n": form.n,
        "components": [[[float(z.real), float(z.imag)] for z in c.ravel()] for c in form.components],
    }
    if form.structural_zero:
        payload["structural_zero"] = True
    return payload


def _from_payload(payload) -> Cochain:
    if not isinstance(payload, dict):
        raise CochainFormatError("cochain payload must be a JSON object")
    try:
        degree, n, comps = payload["degree"], payload["n"], payload["components"]
    except KeyError as exc:
        raise CochainFormatError(f"missing field {exc.args[0]!r}") from None
    if not isinstance(degree, int) or degree not in COMPONENT_COUNT:
        raise CochainFormatError(f"invalid degree {degree!r}")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise CochainFormatError(f"invalid window half-width {n!r}")
    if not isinstance(comps, list) or len(comps) != COMPONENT_COUNT[degree]:
        raise CochainFormatError(
            f"a {degree}-form needs {COMPONENT_COUNT[degree]} component arrays"
        )
    side = 2 * n + 1
    arrays = []
    for c in comps:
        try:
            a = np.asarray(c, dtype=np.float64)
        except (TypeError, ValueError):
            raise CochainFormatError("component entries must be [re, im] number pairs") from None
        if a.shape != (side * side, 2):
            raise CochainFormatError(f"component array has shape {a.shape}, expected ({side * side}, 2)")
        if not np.all(np.isfinite(a)):
            raise CochainFormatError("non-finite coefficient in payload")
        arrays.append((a[:, 0] + 1j * a[:, 1]).reshape(side, side))
    return Cochain(degree, Window(n), tuple(arrays), bool(payload.get("structural_zero", False)))


def dumps_cochain(form: Cochain) -> str:
    return json.dumps(_to_payload(form))


def loads_cochain(text: str) -> Cochain:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CochainFormatError(f"not valid JSON: {exc}") from None
    return _from_payload(payload)


def save_cochain(form: Cochain, destination) -> None:
    Path(destination).write_text(dumps_cochain(form) + "\n")


def load_cochain(source) -> Cochain:
    return loads_cochain(Path(source).read_text())
