"""Packed numeric layer: canonical form, displacement, vacuum contraction,
and numba/numpy backend agreement."""

import numpy as np
import pytest

from triphoton.algebra import OperatorPolynomial, poly_multiply
from triphoton.kernels import (
    PackedPoly,
    available_backends,
    coherent_eval,
    combine,
    displace,
    vacuum_pair_expectation,
)

from conftest import random_numeric_poly

BACKENDS = available_backends()


def _random_alphas(rng, scale=1.5):
    return (rng.normal(size=3) + 1j * rng.normal(size=3)) * scale


def test_round_trip(rng):
    poly = random_numeric_poly(rng, n_terms=10)
    assert PackedPoly.from_poly(poly).to_poly() == poly


def test_canonicalize_merges_duplicates():
    exps = np.array([[1, 0, 0, 0, 0, 0], [1, 0, 0, 0, 0, 0]])
    coeffs = np.array([1 + 0j, 2 + 0j])
    packed = PackedPoly(exps, coeffs)
    assert len(packed) == 1
    assert packed.coeffs[0] == 3 + 0j


def test_canonicalize_drops_cancelled_terms():
    exps = np.array([[0, 1, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0]])
    packed = PackedPoly(exps, np.array([1 + 0j, -1 + 0j]))
    assert len(packed) == 0


def test_packed_adjoint_matches_dict_adjoint(rng):
    poly = random_numeric_poly(rng)
    assert PackedPoly.from_poly(poly).dag().to_poly() == \
        PackedPoly.from_poly(poly.dag()).to_poly()


def test_constant_extraction(rng):
    poly = random_numeric_poly(rng) + 2.5
    packed = PackedPoly.from_poly(poly)
    assert packed.constant == pytest.approx(complex(poly.constant))
    assert packed.drop_constant().constant == 0


@pytest.mark.parametrize("backend", BACKENDS)
def test_displacement_at_zero_is_identity(rng, backend):
    packed = PackedPoly.from_poly(random_numeric_poly(rng))
    out = displace(packed, np.zeros(3, dtype=complex), backend=backend)
    assert out is packed


@pytest.mark.parametrize("backend", BACKENDS)
def test_displaced_constant_is_coherent_expectation(rng, backend):
    # <alpha|X|alpha> equals the scalar part of the displaced polynomial
    for _ in range(10):
        packed = PackedPoly.from_poly(random_numeric_poly(rng, n_terms=8))
        alphas = _random_alphas(rng)
        direct = coherent_eval(packed, alphas, backend=backend)
        shifted = displace(packed, alphas, backend=backend).constant
        assert abs(direct - shifted) <= 1e-10 * max(1.0, abs(direct))


@pytest.mark.parametrize("backend", BACKENDS)
def test_vacuum_pair_against_exact_product(rng, backend):
    # <L R>_0 must equal the constant term of the normal-ordered product
    for _ in range(15):
        left = random_numeric_poly(rng, n_terms=6)
        right = random_numeric_poly(rng, n_terms=6)
        got = vacuum_pair_expectation(PackedPoly.from_poly(left),
                                      PackedPoly.from_poly(right),
                                      backend=backend)
        want = complex(poly_multiply(left, right).constant)
        assert abs(got - want) <= 1e-10 * max(1.0, abs(want))


@pytest.mark.skipif(len(BACKENDS) < 2, reason="numba unavailable")
def test_backends_agree(rng):
    for _ in range(10):
        packed = PackedPoly.from_poly(random_numeric_poly(rng, n_terms=12))
        other = PackedPoly.from_poly(random_numeric_poly(rng, n_terms=12))
        alphas = _random_alphas(rng)
        d_np = displace(packed, alphas, backend="numpy")
        d_nb = displace(packed, alphas, backend="numba")
        assert np.array_equal(d_np.exps, d_nb.exps)
        assert np.allclose(d_np.coeffs, d_nb.coeffs, rtol=1e-12, atol=1e-14)
        v_np = vacuum_pair_expectation(packed, other, backend="numpy")
        v_nb = vacuum_pair_expectation(packed, other, backend="numba")
        assert abs(v_np - v_nb) <= 1e-12 * max(1.0, abs(v_np))
        e_np = coherent_eval(packed, alphas, backend="numpy")
        e_nb = coherent_eval(packed, alphas, backend="numba")
        assert abs(e_np - e_nb) <= 1e-12 * max(1.0, abs(e_np))


def test_coherent_eval_examples():
    from triphoton.algebra import annihilator, creator

    n1 = creator(1) * annihilator(1)
    packed = PackedPoly.from_poly(n1.to_numeric())
    assert coherent_eval(packed, [2, 0, 0]) == pytest.approx(4.0)
    sq = poly_multiply(n1, n1) - n1  # a1+^2 a1^2
    val = coherent_eval(PackedPoly.from_poly(sq.to_numeric()), [1 + 1j, 0, 0])
    assert val == pytest.approx(4.0)


def test_combine_weighted_sum(rng):
    a = PackedPoly.from_poly(random_numeric_poly(rng))
    b = PackedPoly.from_poly(random_numeric_poly(rng))
    merged = combine([a, b], [2.0, -1j])
    want = (a.scale(2.0) + b.scale(-1j)).to_poly()
    assert merged.to_poly() == want


def test_empty_poly_paths():
    empty = PackedPoly.empty()
    assert len(empty) == 0
    assert vacuum_pair_expectation(empty, empty) == 0j
    assert coherent_eval(empty, [1, 1, 1]) == 0j
    assert displace(empty, [1, 0, 0]) is empty
