"""Invariant suites run by ``latticedec verify``.

Each check yields a :class:`Check` with the measured residual and the
tolerance it was held to; a suite passes when every check does.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .cochain import basis_cochain, inner_product, max_abs_diff, norm, random_cochain
from .green import (
    FAMILIES,
    SpectrumError,
    apply_shifted_operator,
    homogeneous_residual,
    make_context,
    phi_solution,
    resolvent_apply,
)
from .operators import (
    boundary_sums_r0,
    coboundary,
    codifferential,
    codifferential_composed,
    cup,
    greens_formula_residual,
    laplacian,
    laplacian_composed,
    star,
    star_inverse,
)
from .oracle import OracleConfig, compare_kernels, truncated_resolvent_solve
from .spectral import operator_norm_estimate, positivity_check, rayleigh_quotient

SUITES = ("calculus", "spectral", "green")


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float
    passed: bool
    detail: str = ""

    def as_dict(self):
        return asdict(self)


def _le(name, residual, tol, detail=""):
    return Check(name, float(residual), float(tol), bool(residual <= tol), detail)


def dirichlet_top_eigenvalue(n: int) -> float:
    """Largest eigenvalue of the 5-point stencil on a (2n+1)^2 Dirichlet window."""
    return 4 + 4 * math.cos(math.pi / (2 * n + 2))


def signed_shift_residual(r: int, k: int, s: int, component=None) -> float:
    """``star(star(e))`` versus ``(-1)^{r(2-r)}`` times e shifted by (1, 1), for one basis element."""
    e = basis_cochain(r, k, s, component)
    expected = (-1) ** (r * (2 - r)) * basis_cochain(r, k + 1, s + 1, component)
    return max_abs_diff(star(star(e)), expected)


def calculus_suite(n: int = 8, seed: int = 0, samples: int = 20):
    rng = np.random.default_rng(seed)
    interior = max(n - 2, 0)
    nil, leib, two_path, adj, lap, green_b, green_i = (0.0,) * 7
    for _ in range(samples):
        for r in (0, 1, 2):
            a = random_cochain(r, n, rng)
            nil = max(nil, norm(coboundary(coboundary(a))) / norm(a))
            lap = max(lap, max_abs_diff(laplacian(a), laplacian_composed(a)) / norm(a))
            if r > 0:
                two_path = max(two_path, max_abs_diff(codifferential(a), codifferential_composed(a)) / norm(a))
            if r < 2:
                a_in = random_cochain(r, n, rng, support=interior)
                b_in = random_cochain(r + 1, n, rng, support=interior)
                res = abs(inner_product(coboundary(a_in), b_in) - inner_product(a_in, codifferential(b_in)))
                adj = max(adj, res / (norm(a_in) * norm(b_in) + 1))
        for ra, rb in ((0, 0), (0, 1), (1, 0)):
            a, b = random_cochain(ra, n, rng), random_cochain(rb, n, rng)
            lhs = coboundary(cup(a, b))
            rhs = cup(coboundary(a), b) + (-1) ** ra * cup(a, coboundary(b))
            leib = max(leib, max_abs_diff(lhs, rhs) / (norm(a) * norm(b)))
        phi, omega = random_cochain(0, n, rng), random_cochain(1, n, rng)
        scale = norm(phi) * norm(omega)
        m = max(n - 1, 0)
        green_b = max(green_b, abs(greens_formula_residual(phi, omega, m) - boundary_sums_r0(phi, omega, m)) / scale)
        phi_i = random_cochain(0, n, rng, support=interior)
        omega_i = random_cochain(1, n, rng, support=interior)
        green_i = max(green_i, abs(greens_formula_residual(phi_i, omega_i, n)) / (norm(phi_i) * norm(omega_i)))

    star_shift = star_inv = 0.0
    w = min(n, 4)
    for r in (0, 1, 2):
        for comp in ((None,) if r != 1 else ("u", "v")):
            for k in range(-w, w + 1):
                for s in range(-w, w + 1):
                    star_shift = max(star_shift, signed_shift_residual(r, k, s, comp))
                    e = basis_cochain(r, k, s, comp)
                    star_inv = max(star_inv, max_abs_diff(star_inverse(star(e)), e))
    return [
        _le("nilpotency d(d a) = 0", nil, 1e-14),
        _le("leibniz rule", leib, 1e-13),
        _le("two-path codifferential", two_path, 1e-14),
        _le("compact-support adjointness", adj, 1e-13),
        _le("laplacian = delta d + d delta", lap, 1e-13),
        _le("green formula boundary sums (r=0)", green_b, 1e-13),
        _le("green formula interior support", green_i, 1e-13),
        _le("star star = signed (1,1) shift", star_shift, 0.0),
        _le("star_inverse star = id", star_inv, 0.0),
    ]


def spectral_suite(n: int = 8, seed: int = 0, samples: int = 100):
    rng = np.random.default_rng(seed)
    w = min(n, 8)
    lo, hi, sa = math.inf, -math.inf, 0.0
    for _ in range(samples):
        for r in (0, 1, 2):
            a = random_cochain(r, w, rng)
            q = rayleigh_quotient(a)
            lo, hi = min(lo, q), max(hi, q)
            x, y = random_cochain(r, w, rng, support=max(w - 2, 0)), random_cochain(r, w, rng, support=max(w - 2, 0))
            res = abs(inner_product(laplacian(x), y) - inner_product(x, laplacian(y)))
            sa = max(sa, res / (norm(x) * norm(y)))
    pos = positivity_check(samples, w, seed + 1)
    est = operator_norm_estimate(0, n)
    ladder = [m for m in (2, 4, 8, 16, 32) if m <= max(n, 2)]
    values = [operator_norm_estimate(0, m).estimate for m in ladder]
    drops = max([0.0] + [a - b for a, b in zip(values, values[1:])])
    checks = [
        _le("rayleigh quotient below 8", max(hi - 8, 0.0), 1e-12, f"max quotient {hi:.17g}"),
        _le("rayleigh quotient above 0", max(-lo, 0.0), 1e-12, f"min quotient {lo:.17g}"),
        Check("positivity", pos.min_quotient, 0.0, pos.all_positive, f"{pos.samples} samples"),
        _le("self-adjointness witness", sa, 1e-12),
        _le("norm estimate matches Dirichlet eigenvalue", abs(est.estimate - dirichlet_top_eigenvalue(n)), 1e-6,
            f"n={n} estimate {est.estimate:.17g} after {est.iterations} iterations"),
        _le("norm estimate <= 8", max(est.estimate - 8, 0.0), 1e-9, f"estimate {est.estimate:.17g}"),
        _le("norm estimate monotone in n", drops, 0.0, f"n in {ladder}"),
    ]
    if n >= 100:
        checks.append(_le("norm estimate >= 7.995", max(7.995 - est.estimate, 0.0), 0.0))
    return checks


def sample_lambdas(count: int, rng: np.random.Generator):
    """Spectral parameters off [0, 8]: negative reals, reals above 8, complex with |Im| >= 0.1."""
    out = []
    for i in range(count):
        kind = i % 3
        if kind == 0:
            out.append(complex(-rng.uniform(1e-6, 50)))
        elif kind == 1:
            out.append(complex(8 + rng.uniform(1e-6, 50)))
        else:
            im = rng.uniform(0.1, 10) * rng.choice([-1, 1])
            out.append(complex(rng.uniform(-10, 18), im))
    return out


def green_suite(lam: complex = -4, seed: int = 0, w: int = 6, samples: int = 50):
    rng = np.random.default_rng(seed)
    root = 0.0
    contained = True
    for z in sample_lambdas(200, rng):
        ctx = make_context(z)
        root = max(root, abs(ctx.p**2 - 2 * ctx.mu * ctx.p + 1))
        contained &= abs(ctx.p) < 1
    rejected = 0
    for z in (0, 8, 4, 3 + 1e-13j, -1e-13, 8 + 5e-13):
        try:
            make_context(z)
        except SpectrumError:
            rejected += 1
    sep = 0.0
    for z in sample_lambdas(10, rng):
        ctx = make_context(z)
        for _ in range(samples // 10 or 1):
            k, s = (int(v) for v in rng.integers(-20, 21, size=2))
            for fam in FAMILIES:
                val = phi_solution(k, fam[0], ctx) * phi_solution(s, fam[1], ctx)
                sep = max(sep, abs(homogeneous_residual(k, s, ctx, fam)) / abs(val))

    ctx = make_context(lam)
    report = compare_kernels(ctx, w)
    grid = np.abs(report.residual_grid) / np.abs(report.closed_form)
    r = np.arange(-w, w + 1)
    off_axis = (np.abs(r)[:, None] >= 2) & (np.abs(r)[None, :] >= 2)
    cfg = OracleConfig()
    col = truncated_resolvent_solve((0, 0), ctx, cfg)
    inversion = apply_shifted_operator(col, ctx.lam) - basis_cochain(0, 0, 0)
    inv_res = max(float(np.max(np.abs(c[1:-1, 1:-1]))) for c in inversion.resized(col.n).components)

    phi = random_cochain(0, 3, rng)
    recovered = apply_shifted_operator(resolvent_apply(phi, ctx, "oracle"), ctx.lam)
    fixed = max_abs_diff(recovered.resized(3), phi)
    return [
        _le("root equation p^2 - 2 mu p + 1", root, 1e-13, "200 sampled lambda"),
        Check("decaying root |p| < 1", 0.0, 0.0, bool(contained)),
        Check("spectrum rejection", 6 - rejected, 0.0, rejected == 6, f"{rejected}/6 rejected"),
        _le("separable solutions (all sign families)", sep, 1e-12),
        _le("cross-oracle agreement", report.oracle_disagreement, 1e-8, f"lambda={lam}, |a|,|b|<={w}"),
        _le("solve column stencil inversion", inv_res, 10 * cfg.solver_tol),
        _le("closed-form residual off axis", float(np.max(grid[off_axis])), 1e-12),
        Check("closed-form residual on axes (measured)", float(np.max(np.abs(report.residual_grid))), math.inf, True,
              f"agreement with oracles at {int(report.agreement_mask.sum())}/{report.agreement_mask.size} offsets"),
        _le("resolvent fixed point (oracle kernel)", fixed, 1e-7),
    ]


def run_suite(suite: str, n: int = 8, seed: int = 0, lam: complex = -4):
    if suite == "all":
        return [c for s in SUITES for c in run_suite(s, n, seed, lam)]
    if suite == "calculus":
        return calculus_suite(n, seed)
    if suite == "spectral":
        return spectral_suite(n, seed)
    if suite == "green":
        return green_suite(lam, seed)
    raise ValueError(f"unknown suite {suite!r}")
