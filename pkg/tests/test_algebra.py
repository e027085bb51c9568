"""Exact algebra layer: canonical ordering, ring axioms, Fock cross-checks."""

import numpy as np
import pytest

from triphoton.algebra import (
    DEGREE_CAP,
    DegreeCapError,
    ExactComplex,
    Monomial,
    OperatorPolynomial,
    annihilator,
    creator,
    normal_order_product,
    poly_adjoint,
    poly_commutator,
    poly_multiply,
)
from triphoton.evolution import hamiltonian_kernel
from triphoton.oracles import apply_monomial, apply_poly

from conftest import random_exact_poly, random_monomial


def mono(d, p):
    return Monomial(tuple(d), tuple(p))


def one_term(d, p, c=1):
    return OperatorPolynomial({mono(d, p): ExactComplex(c)})


class TestExactComplex:
    def test_arithmetic(self):
        a = ExactComplex(1, 2)
        b = ExactComplex(3, -1)
        assert a + b == ExactComplex(4, 1)
        assert a * b == ExactComplex(5, 5)
        assert -a == ExactComplex(-1, -2)
        assert a.conjugate() == ExactComplex(1, -2)
        assert complex(a) == 1 + 2j

    def test_mixing_with_floats_demotes(self):
        a = ExactComplex(1, 1)
        assert isinstance(a * 0.5, complex)
        assert isinstance(a + 1j, complex)
        assert a * 2 == ExactComplex(2, 2)

    def test_zero_test(self):
        assert not ExactComplex(0, 0)
        assert ExactComplex(0, 1)


class TestNormalOrderProduct:
    def test_single_mode_ccr(self):
        # a1 * a1+ = a1+ a1 + 1
        got = normal_order_product(mono((0, 0, 0), (1, 0, 0)),
                                   mono((1, 0, 0), (0, 0, 0)))
        want = one_term((1, 0, 0), (1, 0, 0)) + one_term((0, 0, 0), (0, 0, 0))
        assert got == want

    def test_number_operator_square(self):
        # (a1+ a1)(a1+ a1) = a1+^2 a1^2 + a1+ a1
        n1 = mono((1, 0, 0), (1, 0, 0))
        got = normal_order_product(n1, n1)
        want = one_term((2, 0, 0), (2, 0, 0)) + one_term((1, 0, 0), (1, 0, 0))
        assert got == want

    def test_cross_mode_already_ordered(self):
        # (a2+ a3+)(a2 a3) has no contractions to perform
        got = normal_order_product(mono((0, 1, 1), (0, 0, 0)),
                                   mono((0, 0, 0), (0, 1, 1)))
        assert got == one_term((0, 1, 1), (0, 1, 1))


class TestPolyMultiply:
    def test_affine_product(self):
        # (a1 + 1)(a1+ - 1) = a1+ a1 + a1+ - a1
        a = annihilator(1) + 1
        b = creator(1) - 1
        want = (creator(1) * annihilator(1)) + creator(1) - annihilator(1)
        assert poly_multiply(a, b) == want

    def test_zero_annihilates(self):
        b = random_exact_poly(np.random.default_rng(1))
        assert poly_multiply(OperatorPolynomial.zero(), b) == \
            OperatorPolynomial.zero()

    def test_scalar_one_is_unit(self):
        b = random_exact_poly(np.random.default_rng(2))
        one = OperatorPolynomial.scalar(ExactComplex(1))
        assert poly_multiply(one, b) == b
        assert poly_multiply(b, one) == b


class TestCommutator:
    def test_ccr(self):
        got = poly_commutator(annihilator(1), creator(1))
        assert got == OperatorPolynomial.scalar(ExactComplex(1))

    def test_kernel_with_a1(self):
        got = poly_commutator(hamiltonian_kernel(), annihilator(1))
        assert got == one_term((0, 1, 1), (0, 0, 0), -1)

    def test_self_commutator(self):
        h = hamiltonian_kernel()
        assert poly_commutator(h, h) == OperatorPolynomial.zero()

    def test_antisymmetry_exact(self, rng):
        for _ in range(25):
            a = random_exact_poly(rng)
            b = random_exact_poly(rng)
            assert poly_commutator(a, b) == -poly_commutator(b, a)

    def test_jacobi_identity_exact(self, rng):
        for _ in range(10):
            a = random_exact_poly(rng, n_terms=3, emax=1)
            b = random_exact_poly(rng, n_terms=3, emax=1)
            c = random_exact_poly(rng, n_terms=3, emax=1)
            total = (poly_commutator(a, poly_commutator(b, c))
                     + poly_commutator(b, poly_commutator(c, a))
                     + poly_commutator(c, poly_commutator(a, b)))
            assert total == OperatorPolynomial.zero()

    def test_distinct_modes_commute(self, rng):
        for _ in range(20):
            e = rng.integers(0, 3, size=4)
            f = one_term((e[0], 0, 0), (e[1], 0, 0))
            g = one_term((0, e[2], 0), (0, e[3], 0))
            assert poly_commutator(f, g) == OperatorPolynomial.zero()


class TestAdjoint:
    def test_antilinearity(self):
        assert annihilator(1).scale(1j).dag() == creator(1).scale(-1j)

    def test_hermitian_kernel(self):
        h = hamiltonian_kernel()
        assert poly_adjoint(h) == h

    def test_number_operator_self_adjoint(self):
        n1 = creator(1) * annihilator(1)
        assert poly_adjoint(n1) == n1

    def test_involution_exact(self, rng):
        for _ in range(25):
            a = random_exact_poly(rng)
            assert poly_adjoint(poly_adjoint(a)) == a

    def test_adjoint_reverses_products(self, rng):
        for _ in range(10):
            a = random_exact_poly(rng, n_terms=3)
            b = random_exact_poly(rng, n_terms=3)
            assert poly_adjoint(poly_multiply(a, b)) == \
                poly_multiply(poly_adjoint(b), poly_adjoint(a))


class TestDegreeCap:
    def test_monomial_exponent_cap(self):
        with pytest.raises(DegreeCapError):
            Monomial((DEGREE_CAP + 1, 0, 0), (0, 0, 0))

    def test_product_overflow(self):
        big = mono((0, 0, 0), (DEGREE_CAP, 0, 0))
        with pytest.raises(DegreeCapError):
            normal_order_product(big, big)

    def test_negative_exponent_rejected(self):
        with pytest.raises(ValueError):
            Monomial((-1, 0, 0), (0, 0, 0))


class TestRendering:
    def test_minus_one_pair(self):
        p = one_term((0, 1, 1), (0, 0, 0), -1)
        assert p.render() == "(-1+0i)*ad2*ad3"

    def test_zero(self):
        assert OperatorPolynomial.zero().render() == "0"

    def test_scalar_and_powers(self):
        p = one_term((2, 0, 0), (0, 0, 1), 3) + 2
        assert p.render() == "(2+0i) + (3+0i)*ad1^2*a3"

    def test_numeric_coefficients(self):
        p = OperatorPolynomial({mono((0, 0, 0), (1, 0, 0)): -1.5 + 0.25j})
        assert p.render() == "(-1.5+0.25i)*a1"

    def test_order_is_stable(self, rng):
        p = random_exact_poly(rng, n_terms=8)
        assert p.render() == OperatorPolynomial(dict(p.terms)).render()


def _random_state(rng, dim, support):
    psi = np.zeros((dim, dim, dim), dtype=np.complex128)
    block = rng.normal(size=(support, support, support)) \
        + 1j * rng.normal(size=(support, support, support))
    psi[:support, :support, :support] = block
    return psi / np.linalg.norm(psi)


class TestFockCrossCheck:
    """The acceptance suite reruns these at full 1e4/1e3 volume."""

    def test_products_match_fock(self, rng):
        dim, support = 13, 7
        psi = _random_state(rng, dim, support)
        for _ in range(300):
            left = random_monomial(rng, 3)
            right = random_monomial(rng, 3)
            ref = apply_monomial(apply_monomial(psi, right.daggers,
                                                right.plains),
                                 left.daggers, left.plains)
            got = apply_poly(psi, normal_order_product(left, right))
            err = np.linalg.norm(got - ref) / max(np.linalg.norm(ref), 1e-12)
            assert err <= 1e-9

    def test_commutators_match_fock(self, rng):
        dim, support = 13, 7
        psi = _random_state(rng, dim, support)
        for _ in range(100):
            a = random_monomial(rng, 3)
            b = random_monomial(rng, 3)
            ab = apply_monomial(apply_monomial(psi, b.daggers, b.plains),
                                a.daggers, a.plains)
            ba = apply_monomial(apply_monomial(psi, a.daggers, a.plains),
                                b.daggers, b.plains)
            pa = OperatorPolynomial({a: ExactComplex(1)})
            pb = OperatorPolynomial({b: ExactComplex(1)})
            got = apply_poly(psi, poly_commutator(pa, pb))
            scale = max(np.linalg.norm(ab), np.linalg.norm(ba), 1e-12)
            assert np.linalg.norm(got - (ab - ba)) / scale <= 1e-9
