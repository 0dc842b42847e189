import math

import numpy as np
import pytest

from latticedec.cochain import basis_cochain, inner_product, make_cochain, norm, random_cochain
from latticedec.operators import coboundary, codifferential, laplacian
from latticedec.spectral import (
    SpectralEstimate,
    operator_norm_estimate,
    positivity_check,
    rayleigh_quotient,
)


def dense_dirichlet_matrix(n):
    """5-point stencil on the (2n+1)^2 window, assembled entry by entry."""
    side = 2 * n + 1
    idx = {(k, s): i for i, (k, s) in enumerate((k, s) for k in range(side) for s in range(side))}
    mat = np.zeros((side * side, side * side))
    for (k, s), i in idx.items():
        mat[i, i] = 4
        for dk, ds in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            j = idx.get((k + dk, s + ds))
            if j is not None:
                mat[i, j] = -1
    return mat


def test_rayleigh_of_delta_is_center_coefficient():
    assert rayleigh_quotient(basis_cochain(0, 0, 0)) == 4


@pytest.mark.parametrize("n", [1, 3, 10, 25])
def test_rayleigh_of_constant_counts_boundary_edges(n):
    form = make_cochain(0, n, 1)
    # direct sum of 4*phi - neighbours over the window, neighbours outside are zero
    total = 0
    for k in range(-n, n + 1):
        for s in range(-n, n + 1):
            inside = sum(abs(k + dk) <= n and abs(s + ds) <= n for dk, ds in ((1, 0), (-1, 0), (0, 1), (0, -1)))
            total += 4 - inside
    expected = total / (2 * n + 1) ** 2
    q = rayleigh_quotient(form)
    assert q == pytest.approx(expected, rel=1e-14)
    assert q <= 8 / (2 * n + 1)


def test_rayleigh_rejects_zero_form():
    with pytest.raises(ValueError):
        rayleigh_quotient(make_cochain(1, 2, 0))


@pytest.mark.parametrize("degree", [0, 1, 2])
def test_random_rayleigh_in_spectrum(degree, rng):
    for _ in range(50):
        q = rayleigh_quotient(random_cochain(degree, 4, rng))
        assert 0 < q <= 8


@pytest.mark.parametrize("n", [1, 2, 3])
def test_norm_estimate_matches_dense_eigensolve(n):
    top = np.linalg.eigvalsh(dense_dirichlet_matrix(n))[-1]
    for degree in (0, 1, 2):
        est = operator_norm_estimate(degree, n)
        assert est.estimate == pytest.approx(top, abs=1e-6)
        assert est.final_increment < 1e-12


def test_norm_estimate_n2_closed_form():
    est = operator_norm_estimate(0, 2)
    assert abs(est.estimate - (4 + 2 * math.sqrt(3))) <= 1e-6
    assert abs(operator_norm_estimate(1, 2).estimate - (4 + 2 * math.sqrt(3))) <= 1e-6


def test_norm_estimate_monotone_and_bounded():
    values = [operator_norm_estimate(0, n).estimate for n in (2, 4, 8, 16, 32)]
    assert all(a <= b for a, b in zip(values, values[1:]))
    assert values[-1] <= 8 + 1e-9


def test_non_convergence_reported_not_raised():
    est = operator_norm_estimate(0, 30, max_iter=3, tol=1e-12)
    assert isinstance(est, SpectralEstimate)
    assert est.iterations == 3 and est.final_increment > 1e-12


def test_norm_estimate_validates_arguments():
    with pytest.raises(ValueError):
        operator_norm_estimate(0, 0)
    with pytest.raises(ValueError):
        operator_norm_estimate(3, 2)


def test_positivity_check_reports_minimum():
    rep = positivity_check(20, 3, seed=7)
    assert rep.all_positive and rep.samples == 60
    assert 0 < rep.min_quotient <= rep.max_quotient <= 8
    assert rep.max_imag_ratio <= 1e-12


def test_exact_form_quadratic_identity(rng):
    phi = random_cochain(0, 5, rng)
    dphi = coboundary(phi)
    lhs = inner_product(dphi, dphi)
    rhs = inner_product(phi, codifferential(dphi))
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)
    assert rayleigh_quotient(phi) == pytest.approx(lhs.real / norm(phi) ** 2, rel=1e-12)


def test_one_form_decomposition_identity(rng):
    w = random_cochain(1, 5, rng)
    lhs = inner_product(coboundary(w), coboundary(w)) + inner_product(codifferential(w), codifferential(w))
    rhs = inner_product(w, laplacian(w))
    assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


@pytest.mark.parametrize("degree", [0, 1, 2])
def test_self_adjointness_witness(degree, rng):
    for _ in range(20):
        a = random_cochain(degree, 6, rng, support=4)
        b = random_cochain(degree, 6, rng, support=4)
        res = abs(inner_product(laplacian(a), b) - inner_product(a, laplacian(b)))
        assert res <= 1e-12 * norm(a) * norm(b)
