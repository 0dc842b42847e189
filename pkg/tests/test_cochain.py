import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticedec.cochain import (
    Cochain,
    CochainFormatError,
    GridIndex,
    Window,
    basis_cochain,
    dumps_cochain,
    get_coefficient,
    inner_product,
    load_cochain,
    loads_cochain,
    make_cochain,
    max_abs_diff,
    norm,
    random_cochain,
    save_cochain,
)


def test_window_counts_points():
    w = Window(3)
    assert w.size == 49 == len(w.points())
    assert w.contains(-3, 3) and not w.contains(4, 0)
    with pytest.raises(ValueError):
        Window(-1)


def test_zero_form_and_delta():
    z = make_cochain(0, 1, 0)
    assert z.components[0].shape == (3, 3) and z.is_zero()
    d = make_cochain(0, 1, lambda k, s: 1 if (k, s) == (0, 0) else 0)
    assert get_coefficient(d, None, GridIndex(0, 0)) == 1
    assert get_coefficient(d, None, GridIndex(3, 3)) == 0


def test_one_form_shape_and_component_access(rng):
    w = random_cochain(1, 2, rng)
    assert len(w.components) == 2
    assert all(c.shape == (5, 5) for c in w.components)
    assert w.at(1, -2, "v") == w.components[1][3, 0]
    assert w.at(1, -2, 0) == w.components[0][3, 0]


@pytest.mark.parametrize("degree, component", [(1, None), (0, "u"), (2, 1), (1, 2)])
def test_bad_component_selector(degree, component):
    form = make_cochain(degree, 1, 1)
    with pytest.raises(ValueError):
        get_coefficient(form, component, (0, 0))


def test_invalid_degree_and_fill():
    with pytest.raises(ValueError):
        make_cochain(3, 1, 0)
    with pytest.raises(ValueError):
        make_cochain(0, 1, float("nan"))
    with pytest.raises(ValueError):
        Cochain(0, Window(1), (np.full((3, 3), np.inf),))
    with pytest.raises(ValueError):
        Cochain(0, Window(1), (np.zeros((3, 3)), np.zeros((3, 3))))


def test_cochains_are_immutable(rng):
    form = random_cochain(0, 2, rng)
    with pytest.raises(ValueError):
        form.components[0][0, 0] = 1


def test_out_of_window_reads_are_zero(rng):
    for degree, comps in ((0, [None]), (1, ["u", "v"]), (2, [None])):
        form = random_cochain(degree, 2, rng)
        for c in comps:
            for idx in [(3, 0), (0, -3), (-5, 5), (100, 100)]:
                assert form.at(*idx, c) == 0


def test_inner_product_basis():
    d00 = basis_cochain(0, 0, 0)
    assert inner_product(d00, d00) == 1
    assert inner_product(d00, basis_cochain(0, 1, 0)) == 0


def test_inner_product_direct_summation(rng):
    a, b = random_cochain(1, 3, rng), random_cochain(1, 2, rng)
    direct = 0j
    for k in range(-3, 4):
        for s in range(-3, 4):
            for c in "uv":
                direct += a.at(k, s, c) * np.conj(b.at(k, s, c))
    assert abs(inner_product(a, b) - direct) <= 1e-14 * abs(direct)
    assert abs(inner_product(a, b) - np.conj(inner_product(b, a))) <= 1e-14 * abs(direct)


def test_inner_product_degree_mismatch():
    with pytest.raises(ValueError):
        inner_product(basis_cochain(0, 0, 0), basis_cochain(2, 0, 0))


def test_norm_examples():
    assert norm(make_cochain(0, 2, 0)) == 0
    assert norm(basis_cochain(0, 0, 0)) == 1
    # 9 unit entries in u on the 3x3 window
    assert norm(make_cochain(1, 1, lambda k, s: (1, 0))) == 3.0


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    degree=st.sampled_from([0, 1, 2]),
    na=st.integers(0, 4),
    nb=st.integers(0, 4),
    alpha=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
)
def test_inner_product_is_hermitian_sesquilinear(seed, degree, na, nb, alpha):
    rng = np.random.default_rng(seed)
    a, b, c = random_cochain(degree, na, rng), random_cochain(degree, nb, rng), random_cochain(degree, nb, rng)
    ab, ba = inner_product(a, b), inner_product(b, a)
    scale = norm(a) * norm(b)
    assert abs(ab - np.conj(ba)) <= 1e-14 * scale
    assert inner_product(a, a).real >= 0 and abs(inner_product(a, a).imag) <= 1e-14 * norm(a) ** 2
    lhs = inner_product(a, alpha * b + c)
    rhs = np.conj(alpha) * ab + inner_product(a, c)
    assert abs(lhs - rhs) <= 1e-13 * (abs(alpha) + 1) * norm(a) * (norm(b) + norm(c))


def test_save_load_round_trip_is_bit_exact(tmp_path, rng):
    form = random_cochain(1, 3, rng) * (1 / 3)
    path = tmp_path / "w.json"
    save_cochain(form, path)
    back = load_cochain(path)
    assert back.degree == 1 and back.n == 3
    for x, y in zip(form.components, back.components):
        assert np.array_equal(x.view(np.uint64), y.view(np.uint64))


def test_file_layout_is_row_major_s_fastest():
    form = make_cochain(0, 1, lambda k, s: k + 10 * s)
    payload = json.loads(dumps_cochain(form))
    flat = payload["components"][0]
    # offset (k+n)*(2n+1) + (s+n)
    assert flat[(1 + 1) * 3 + (-1 + 1)] == [1 - 10, 0]
    assert flat[(-1 + 1) * 3 + (0 + 1)] == [-1, 0]


def test_load_rejects_wrong_component_count():
    side = [[0.0, 0.0]] * 9
    bad = {"degree": 0, "n": 1, "components": [side, side, side]}
    with pytest.raises(CochainFormatError):
        loads_cochain(json.dumps(bad))


def test_load_rejects_nan():
    side = [[0.0, 0.0]] * 8 + [[float("nan"), 0.0]]
    bad = json.dumps({"degree": 0, "n": 1, "components": [side]})
    with pytest.raises(CochainFormatError):
        loads_cochain(bad)


@pytest.mark.parametrize(
    "payload",
    ["not json", "[]", '{"degree": 0, "n": 1}', '{"degree": 5, "n": 1, "components": []}',
     '{"degree": 0, "n": 1, "components": [[[0, 0]]]}'],
)
def test_load_rejects_malformed(payload):
    with pytest.raises(CochainFormatError):
        loads_cochain(payload)


def test_arithmetic_embeds_windows(rng):
    a, b = random_cochain(0, 1, rng), random_cochain(0, 3, rng)
    s = a + b
    assert s.n == 3
    assert s.at(0, 0) == a.at(0, 0) + b.at(0, 0)
    assert s.at(3, 3) == b.at(3, 3)
    assert max_abs_diff(s - b, a) <= 1e-15 * norm(s)
