import numpy as np
import pytest

from triphoton.algebra import ExactComplex, Monomial, OperatorPolynomial


@pytest.fixture
def rng():
    return np.random.default_rng(20170911)


def random_monomial(rng, emax=3):
    e = rng.integers(0, emax + 1, size=6)
    return Monomial(tuple(int(x) for x in e[:3]), tuple(int(x) for x in e[3:]))


def random_exact_poly(rng, n_terms=4, emax=2, coeff_range=4):
    terms = {}
    for _ in range(n_terms):
        c = ExactComplex(int(rng.integers(-coeff_range, coeff_range + 1)),
                         int(rng.integers(-coeff_range, coeff_range + 1)))
        if c:
            terms[random_monomial(rng, emax)] = c
    return OperatorPolynomial(terms)


def random_numeric_poly(rng, n_terms=6, emax=2):
    terms = {}
    for _ in range(n_terms):
        c = complex(rng.normal(), rng.normal())
        terms[random_monomial(rng, emax)] = c
    return OperatorPolynomial(terms)
