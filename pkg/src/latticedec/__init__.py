"""Discrete exterior calculus on the square lattice and the resolvent of its Laplacian."""

from .cochain import (
    Cochain,
    CochainFormatError,
    GridIndex,
    Window,
    basis_cochain,
    get_coefficient,
    inner_product,
    load_cochain,
    make_cochain,
    norm,
    random_cochain,
    save_cochain,
)
from .green import (
    ClosedFormKernel,
    ResolventContext,
    SpectrumError,
    TabulatedKernel,
    green_component,
    make_context,
    phi_solution,
    resolvent_apply,
)
from .operators import coboundary, codifferential, cup, laplacian, star, star_inverse
from .oracle import OracleConfig, compare_kernels, fourier_green, truncated_resolvent_solve
from .spectral import operator_norm_estimate, rayleigh_quotient

__version__ = "0.1.0"
