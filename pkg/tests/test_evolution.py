"""Nested-commutator tables and truncated mode evolution."""

import math

import numpy as np
import pytest

from triphoton.algebra import (
    ExactComplex,
    Monomial,
    OperatorPolynomial,
    annihilator,
    creator,
    poly_adjoint,
    poly_commutator,
)
from triphoton.evolution import (
    EvolutionParams,
    ExpansionOrderError,
    evolve_mode,
    hamiltonian_kernel,
    max_expansion_order,
    omega,
    omega_table_checksum,
    truncation_diagnostic,
)
from triphoton.oracles import fock_oracle_expectations
from triphoton.states import SeedState, moment_cache


def one_term(d, p, c=1):
    return OperatorPolynomial({Monomial(tuple(d), tuple(p)): ExactComplex(c)})


class TestKernel:
    def test_two_unit_terms(self):
        h = hamiltonian_kernel()
        assert len(h) == 2
        assert h == one_term((1, 1, 1), (0, 0, 0)) + one_term((0, 0, 0),
                                                              (1, 1, 1))

    def test_hermitian(self):
        h = hamiltonian_kernel()
        assert poly_adjoint(h) == h

    def test_self_commutator_vanishes(self):
        h = hamiltonian_kernel()
        assert poly_commutator(h, h) == OperatorPolynomial.zero()


class TestOmega:
    def test_zeroth_is_annihilator(self):
        assert omega(0, 1) == annihilator(1)
        assert omega(0, 3) == annihilator(3)

    def test_first_order(self):
        assert omega(1, 1) == one_term((0, 1, 1), (0, 0, 0), -1)

    def test_second_order(self):
        want = (one_term((0, 0, 0), (1, 0, 0), -1)
                + one_term((0, 1, 0), (1, 1, 0), -1)
                + one_term((0, 0, 1), (1, 0, 1), -1))
        assert omega(2, 1) == want

    def test_integer_coefficients_through_order_8(self):
        for k in (1, 2, 3):
            for n in range(9):
                assert omega(n, k).has_integer_coefficients

    def test_degree_growth(self):
        for n in range(1, 7):
            assert omega(n, 1).degree == n + 1
        assert omega(0, 2).degree == 1

    def test_spectator_mode_exchange_symmetry(self):
        # omega(n, 1) is invariant under swapping modes 2 and 3
        perm = (1, 3, 2)
        for n in range(7):
            w = omega(n, 1)
            relabeled = OperatorPolynomial(
                {m.relabeled(perm): c for m, c in w.terms.items()}
            )
            assert relabeled == w

    def test_mode_relabeling_between_tables(self):
        # swapping labels 1 and 2 maps the mode-1 table onto the mode-2 one
        perm = (2, 1, 3)
        for n in range(7):
            w1 = omega(n, 1)
            relabeled = OperatorPolynomial(
                {m.relabeled(perm): c for m, c in w1.terms.items()}
            )
            assert relabeled == omega(n, 2)

    def test_manley_rowe_commutes_with_kernel(self):
        n_diff = creator(1) * annihilator(1) - creator(2) * annihilator(2)
        assert poly_commutator(hamiltonian_kernel(), n_diff) == \
            OperatorPolynomial.zero()

    def test_bad_indices(self):
        with pytest.raises(ValueError):
            omega(-1, 1)
        with pytest.raises(ValueError):
            omega(0, 4)

    def test_checksum_is_stable(self):
        assert omega_table_checksum(3) == omega_table_checksum(3)
        assert omega_table_checksum(3) != omega_table_checksum(4)


class TestEvolveMode:
    def test_zero_strength_is_input_operator(self):
        mode = evolve_mode(1, EvolutionParams(xi=0.0, order=5))
        assert mode.poly == annihilator(1).to_numeric()

    def test_first_order_form(self):
        xi = 0.01
        mode = evolve_mode(1, EvolutionParams(xi=xi, order=1))
        want = (annihilator(1).to_numeric()
                + one_term((0, 1, 1), (0, 0, 0)).to_numeric().scale(-1j * xi))
        assert mode.poly == want

    def test_vacuum_photon_number_leading_order(self):
        xi = 1.75e-6
        mode = evolve_mode(1, EvolutionParams(xi=xi, order=5))
        cache = moment_cache(EvolutionParams(xi=xi, order=5),
                             SeedState.vacuum())
        nbar = cache.n_out[0]
        assert abs(nbar - xi ** 2) <= 10 * xi ** 4
        assert len(mode.packed) == len(mode.poly.terms)

    def test_adjoint_matches_independent_assembly(self):
        xi = 0.37 + 0.11j
        order = 5
        mode = evolve_mode(2, EvolutionParams(xi=xi, order=order))
        rebuilt = poly_adjoint(omega(0, 2).to_numeric())
        for n in range(1, order + 1):
            weight = ((1j * xi) ** n / math.factorial(n)).conjugate()
            rebuilt = rebuilt + poly_adjoint(omega(n, 2).to_numeric()).scale(
                weight
            )
        direct = poly_adjoint(mode.poly)
        scale = direct.max_abs_coeff()
        for m in direct.terms.keys() | rebuilt.terms.keys():
            delta = abs(complex(direct.coefficient(m))
                        - complex(rebuilt.coefficient(m)))
            assert delta <= 1e-12 * scale

    def test_order_cap_enforced(self):
        with pytest.raises(ExpansionOrderError):
            EvolutionParams(xi=0.1, order=max_expansion_order() + 1)

    def test_order_cap_env_override(self, monkeypatch):
        monkeypatch.setenv("TRIPHOTON_MAX_ORDER", "3")
        with pytest.raises(ExpansionOrderError):
            EvolutionParams(xi=0.1, order=4)
        monkeypatch.setenv("TRIPHOTON_MAX_ORDER", "9")
        assert EvolutionParams(xi=0.1, order=9).order == 9

    def test_mode_index_validated(self):
        with pytest.raises(ValueError):
            evolve_mode(0, EvolutionParams(xi=0.1, order=2))

    def test_photon_number_difference_conserved(self):
        # <A1+ A1> - <A2+ A2> equals the input difference to truncation order
        params = EvolutionParams(xi=0.01, order=5)
        seed = SeedState((0.5, 0.3j, -0.2))
        cache = moment_cache(params, seed)
        out_diff = cache.n_out[0] - cache.n_out[1]
        in_diff = seed.n_in[0] - seed.n_in[1]
        assert abs(out_diff - in_diff) <= 1e-9


class TestFockAgreement:
    def test_engine_matches_matrix_exponential(self):
        params = EvolutionParams(xi=0.01, order=5)
        seed = SeedState((0.3, 0.3j, -0.3))
        cache = moment_cache(params, seed)
        fm = fock_oracle_expectations(seed.alphas, 0.01, cutoff=12)
        rel = np.abs(cache.n_out - fm.n_mode) / np.abs(fm.n_mode)
        assert rel.max() <= 1e-4


class TestTruncationDiagnostic:
    def test_zero_strength(self):
        d = truncation_diagnostic(1, SeedState.full_seed(1e10, 0.3),
                                  EvolutionParams(xi=0.0, order=5))
        assert d == 0.0

    def test_weak_drive_is_tiny(self):
        # |xi*alpha| = 0.1: next-term remainder scale is (0.1)^5, and the
        # 1/5! plus combinatorial weights keep the measured value below it
        xi = 1e-3
        seed = SeedState.full_seed((0.1 / xi) ** 2, 0.0)
        d = truncation_diagnostic(1, seed, EvolutionParams(xi=xi, order=5))
        assert d <= 0.1 ** 5

    def test_strong_seed_stays_moderate(self):
        params = EvolutionParams(xi=1.75e-6, order=5)
        seed = SeedState.full_seed(1e11, math.pi / 2)
        d = truncation_diagnostic(1, seed, params)
        assert d <= 0.10

    def test_requires_first_order(self):
        with pytest.raises(ValueError):
            truncation_diagnostic(1, SeedState.vacuum(),
                                  EvolutionParams(xi=0.1, order=0))


def test_validity_warning(recwarn):
    params = EvolutionParams(xi=0.1, order=3)
    proxy = params.check_validity(10.0)
    assert proxy == pytest.approx(1.0)
    assert any("truncated expansion" in str(w.message) for w in recwarn.list)


def test_no_warning_in_safe_regime(recwarn):
    params = EvolutionParams(xi=1.75e-6, order=5)
    params.check_validity(math.sqrt(1e11))
    assert not recwarn.list
