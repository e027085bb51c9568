"""Reference implementations: exact squeezer, classical ODE, Fock evolution."""

import math

import numpy as np
import pytest

from triphoton.oracles import (
    ClassicalField,
    SPDCOracleParams,
    classical_gain,
    classical_meanfield,
    classical_trajectory,
    coherent_tensor,
    fock_oracle_expectations,
    ladder_matrix,
    spdc_crossing_nin,
    spdc_exact_S,
)

XI = 1.75e-6


class TestSPDCOracle:
    def test_starts_at_classical_limit(self):
        assert spdc_exact_S(SPDCOracleParams(r=0.0)) == 4.0

    def test_monotone_decreasing(self):
        rs = np.linspace(0, 2, 40)
        vals = [spdc_exact_S(SPDCOracleParams(r=r)) for r in rs]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_entanglement_bound_crossing(self):
        assert spdc_exact_S(SPDCOracleParams(r=math.log(2) / 2)) == \
            pytest.approx(2.0)
        nin = spdc_crossing_nin(XI)
        assert nin == pytest.approx(3.92e10, rel=0.01)

    def test_strong_seed_value(self):
        p = SPDCOracleParams.from_seed(XI, 1e11)
        assert p.r == pytest.approx(0.5534, rel=1e-3)
        assert spdc_exact_S(p) == pytest.approx(1.3225, rel=1e-3)

    def test_negative_r_rejected(self):
        with pytest.raises(ValueError):
            SPDCOracleParams(r=-0.1)


class TestClassicalMeanField:
    def test_zero_time_is_identity(self):
        init = ClassicalField((1 + 2j, -0.5, 0.25j))
        out = classical_meanfield(init, 0.0)
        assert out.alphas == init.alphas

    def test_amplification_phase_grows(self):
        n_in = 1e10
        amp = math.sqrt(n_in) * np.exp(1j * math.pi / 2)
        taus, path = classical_trajectory(
            ClassicalField((amp, amp, amp)), XI, steps=400)
        powers = np.abs(path[:, 0]) ** 2
        assert (np.diff(powers) > 0).all()

    def test_energy_flow_directions(self):
        for phi, sign in ((math.pi / 2, 1.0), (math.pi / 6, -1.0)):
            g = classical_gain(1e10, phi, XI, steps=500)
            assert math.copysign(1.0, g[0] - 1.0) == sign

    def test_manley_rowe_conservation(self):
        # asymmetric seed: pairwise photon-number differences stay constant
        a0 = (math.sqrt(2e10) * 1j, math.sqrt(5e9), math.sqrt(1e10) * (1 + 1j)
              / math.sqrt(2))
        taus, path = classical_trajectory(ClassicalField(a0), XI, steps=4000)
        n = np.abs(path) ** 2
        scale = n.max()
        for k, m in ((0, 1), (0, 2), (1, 2)):
            drift = np.abs((n[:, k] - n[:, m]) - (n[0, k] - n[0, m]))
            assert drift.max() <= 1e-9 * scale

    def test_richardson_convergence(self):
        n_in = 1e11
        amp = math.sqrt(n_in) * np.exp(1j * math.pi / 2)
        out = classical_meanfield(ClassicalField((amp, amp, amp)), XI,
                                  steps=1000)
        again = classical_meanfield(ClassicalField((amp, amp, amp)), XI,
                                    steps=3000)
        rel = max(abs(a - b) for a, b in zip(out.alphas, again.alphas))
        assert rel <= 1e-8 * math.sqrt(n_in)

    def test_step_limit_exceeded(self):
        amp = math.sqrt(1e11) * 1j
        with pytest.raises(RuntimeError):
            classical_meanfield(ClassicalField((amp, amp, amp)), XI,
                                steps=1, max_doublings=1)

    def test_step_validation(self):
        with pytest.raises(ValueError):
            classical_meanfield(ClassicalField((1, 1, 1)), 1.0, steps=0)


class TestLadderMatrix:
    def test_composition(self):
        dim = 10
        full = ladder_matrix(2, 3, dim)
        composed = ladder_matrix(2, 0, dim) @ ladder_matrix(0, 3, dim)
        assert np.allclose(full, composed)

    def test_number_operator_diagonal(self):
        mat = ladder_matrix(1, 1, 6)
        assert np.allclose(mat, np.diag(np.arange(6.0)))


class TestFockOracle:
    def test_zero_strength_reproduces_coherent_moments(self):
        alphas = (0.3, -0.2j, 0.1 + 0.1j)
        fm = fock_oracle_expectations(alphas, 0.0, cutoff=12)
        want_n = [abs(a) ** 2 for a in alphas]
        assert np.allclose(fm.n_mode, want_n, atol=1e-12)
        # coherent-state quadrature variances are all shot noise
        assert np.allclose(np.diag(fm.cov), 1.0, atol=1e-10)
        want_means = [2 * a.real for a in map(complex, alphas)] + \
            [-2 * complex(a).imag for a in alphas]
        assert np.allclose(fm.means, want_means, atol=1e-12)

    def test_vacuum_photon_number_scales_as_xi_squared(self):
        fm = fock_oracle_expectations((0, 0, 0), 0.01, cutoff=8)
        assert fm.n_mode[0] == pytest.approx(1e-4, rel=0.01)

    def test_norm_preserved(self):
        fm = fock_oracle_expectations((0.3, 0.3j, -0.3), 0.01, cutoff=12)
        assert fm.norm_error <= 1e-10

    def test_budget_guard(self):
        with pytest.raises(ValueError):
            fock_oracle_expectations((0, 0, 0), 0.01, cutoff=25)

    def test_population_guard(self):
        with pytest.raises(ValueError):
            fock_oracle_expectations((3.0, 0, 0), 0.01, cutoff=12)

    def test_coherent_tensor_norm(self):
        psi = coherent_tensor((0.5, 0.2j, -0.1), 12)
        assert np.linalg.norm(psi) == pytest.approx(1.0)
