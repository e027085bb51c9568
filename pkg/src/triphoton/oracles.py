"""Independent ground-truth references for tests and acceptance runs.

Three unrelated routes to the same physics keep the engine honest:

  * the exact Bogoliubov solution of the effective two-mode squeezer that a
    single bright seed turns the interaction into (S = 4 e^{-2r});
  * the classical three-wave mean-field equations integrated by RK4 with a
    step-halving accuracy check (stands in for the known closed-form
    elliptic-function solutions);
  * brute-force evolution of the truncated three-mode Fock space by the
    action of the matrix exponential, plus direct ladder-matrix application
    used to verify the normal-ordering algebra term by term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .algebra import OperatorPolynomial
from .kernels import PackedPoly

#: dense three-mode dimension budget for the Fock oracle
_FOCK_BUDGET = 8000


# --------------------------------------------------------------------------
# exact two-mode squeezing reference (single bright seed)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SPDCOracleParams:
    """Squeezing parameter r = |xi| * sqrt(N_in) of the effective two-mode
    squeezer obtained by replacing the seeded mode with its classical
    amplitude.  `seed_phase` records the convention that aligns
    u = Q_1 + Q_2, v = P_1 - P_2 with the squeezed pair."""

    r: float
    seed_phase: float = -math.pi / 2

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("squeezing parameter must be >= 0")

    @classmethod
    def from_seed(cls, xi, n_in):
        return cls(r=abs(xi) * math.sqrt(n_in))


def spdc_exact_S(p: SPDCOracleParams) -> float:
    """Phase-minimized criterion of the exact two-mode squeezed state.

    var(Q_1 + Q_2) = var(P_1 - P_2) = 2 e^{-2r}, so S = 4 e^{-2r}: it starts
    at the classical limit 4 and crosses the entanglement bound 2 at
    r = ln(2)/2.
    """
    return 4.0 * math.exp(-2.0 * p.r)


def spdc_crossing_nin(xi, level=2.0) -> float:
    """Seed photon number where the exact S crosses `level`."""
    r = -0.5 * math.log(level / 4.0)
    return (r / abs(xi)) ** 2


# --------------------------------------------------------------------------
# classical mean-field equations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassicalField:
    """Three complex mean-field amplitudes at dimensionless time tau."""

    alphas: tuple
    tau: float = 0.0

    def __post_init__(self):
        object.__setattr__(
            self, "alphas", tuple(complex(a) for a in self.alphas)
        )

    @property
    def photon_numbers(self):
        return tuple(abs(a) ** 2 for a in self.alphas)


def _classical_rhs(a):
    return np.array([
        -1j * np.conj(a[1]) * np.conj(a[2]),
        -1j * np.conj(a[2]) * np.conj(a[0]),
        -1j * np.conj(a[0]) * np.conj(a[1]),
    ])


def _rk4_path(a0, tau_final, steps):
    h = tau_final / steps
    a = a0.copy()
    path = np.empty((steps + 1, 3), dtype=np.complex128)
    path[0] = a
    for i in range(steps):
        k1 = _classical_rhs(a)
        k2 = _classical_rhs(a + 0.5 * h * k1)
        k3 = _classical_rhs(a + 0.5 * h * k2)
        k4 = _classical_rhs(a + h * k3)
        a = a + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        path[i + 1] = a
    return path


def classical_trajectory(initial: ClassicalField, tau_final, steps=1000):
    """RK4 trajectory samples (taus, amplitudes of shape (steps+1, 3))."""
    if steps < 1:
        raise ValueError("need at least one step")
    a0 = np.asarray(initial.alphas, dtype=np.complex128)
    path = _rk4_path(a0, tau_final, steps)
    taus = initial.tau + np.linspace(0.0, tau_final, steps + 1)
    return taus, path


def classical_meanfield(initial: ClassicalField, tau_final,
                        steps=1000, max_doublings=10) -> ClassicalField:
    """Integrate the three-wave equations da_k/dtau = -i conj(a_l a_m).

    Fixed-step RK4, with the step count doubled until the final state moves
    by less than 1e-10 relative between successive halvings.
    """
    if steps < 1:
        raise ValueError("need at least one step")
    a0 = np.asarray(initial.alphas, dtype=np.complex128)
    if tau_final == 0:
        return ClassicalField(tuple(a0), initial.tau)
    prev = _rk4_path(a0, tau_final, steps)[-1]
    scale = max(float(np.max(np.abs(prev))), 1e-30)
    for _ in range(max_doublings):
        steps *= 2
        cur = _rk4_path(a0, tau_final, steps)[-1]
        if float(np.max(np.abs(cur - prev))) < 1e-10 * scale:
            return ClassicalField(tuple(cur), initial.tau + tau_final)
        prev = cur
    raise RuntimeError(
        f"RK4 not converged to 1e-10 within {steps} steps"
    )


def classical_gain(n_in, phi, xi, steps=2000):
    """Classical per-mode gain of the symmetric seed after strength xi."""
    amp = math.sqrt(n_in) * np.exp(1j * phi)
    final = classical_meanfield(ClassicalField((amp, amp, amp)), abs(xi),
                                steps=steps)
    return tuple(n / n_in for n in final.photon_numbers)


# --------------------------------------------------------------------------
# truncated Fock space: ladder matrices, operator application, evolution
# --------------------------------------------------------------------------

@lru_cache(maxsize=512)
def ladder_matrix(m, n, dim) -> np.ndarray:
    """Dense single-mode matrix of a+^m a^n on occupations 0..dim-1."""
    mat = np.zeros((dim, dim))
    for c in range(n, dim):
        r = c - n + m
        if r >= dim:
            continue
        amp = 1.0
        for j in range(c, c - n, -1):          # a^n
            amp *= j
        for j in range(c - n + 1, r + 1):      # a+^m
            amp *= j
        mat[r, c] = math.sqrt(amp)
    return mat


def apply_monomial(psi, daggers, plains):
    """Apply a normal-ordered monomial to a (D, D, D) state tensor."""
    out = psi
    for axis in range(3):
        m, n = daggers[axis], plains[axis]
        if m == 0 and n == 0:
            continue
        mat = ladder_matrix(m, n, psi.shape[axis])
        out = np.moveaxis(np.tensordot(mat, out, axes=([1], [axis])), 0, axis)
    return out


def apply_poly(psi, poly):
    """Apply an OperatorPolynomial or PackedPoly to a state tensor."""
    out = np.zeros_like(psi, dtype=np.complex128)
    if isinstance(poly, PackedPoly):
        for row, c in zip(poly.exps, poly.coeffs):
            out += complex(c) * apply_monomial(psi, tuple(row[:3]),
                                               tuple(row[3:]))
        return out
    for mono, c in poly.terms.items():
        out += complex(c) * apply_monomial(psi, mono.daggers, mono.plains)
    return out


def coherent_tensor(alphas, dim):
    """Normalized truncated three-mode coherent product state (D, D, D)."""
    vecs = []
    ns = np.arange(dim)
    log_fact = np.cumsum(np.log(np.maximum(ns, 1)))
    for a in alphas:
        if a == 0:
            v = np.zeros(dim, dtype=np.complex128)
            v[0] = 1.0
        else:
            v = np.exp(ns * np.log(complex(a)) - 0.5 * log_fact
                       - 0.5 * abs(a) ** 2)
        vecs.append(v)
    psi = np.einsum("i,j,k->ijk", *vecs)
    return psi / np.linalg.norm(psi)


@dataclass(frozen=True)
class FockMoments:
    """Moment set from the brute-force evolution: photon numbers, quadrature
    means and the symmetrized quadrature covariance matrix in the layout
    (P_1, P_2, P_3, Q_1, Q_2, Q_3) at theta = 0."""

    n_mode: np.ndarray
    means: np.ndarray
    cov: np.ndarray
    norm_error: float


def fock_oracle_expectations(alphas, xi, cutoff=12) -> FockMoments:
    """Evolve the truncated coherent state by exp(-i xi H) and read moments.

    `cutoff` is the largest occupation kept per mode.  Guards: the dense
    three-mode dimension must stay within budget, the initial Poisson tail at
    the cutoff level must be below 1e-10 per mode, and the evolved state must
    keep unit norm to 1e-10.
    """
    dim = cutoff + 1
    if dim ** 3 > _FOCK_BUDGET:
        raise ValueError(
            f"three-mode dimension {dim ** 3} exceeds budget {_FOCK_BUDGET}"
        )
    alphas = [complex(a) for a in alphas]
    for a in alphas:
        tail = math.exp(-abs(a) ** 2) * abs(a) ** (2 * cutoff) / math.factorial(cutoff)
        if tail > 1e-10:
            raise ValueError(
                f"population {tail:.3g} at cutoff level for |alpha|={abs(a):.3g}; "
                "raise the cutoff or shrink the seed"
            )

    a1 = sp.csr_matrix(ladder_matrix(0, 1, dim))
    eye = sp.identity(dim, format="csr")
    ops = [
        sp.kron(sp.kron(a1, eye), eye, format="csr"),
        sp.kron(sp.kron(eye, a1), eye, format="csr"),
        sp.kron(sp.kron(eye, eye), a1, format="csr"),
    ]
    down = sp.kron(sp.kron(a1, a1), a1, format="csr")
    h = down + down.conj().T

    psi0 = coherent_tensor(alphas, dim).reshape(-1)
    psi = expm_multiply(-1j * complex(xi) * h, psi0)
    norm_error = abs(np.linalg.norm(psi) - 1.0)
    if norm_error > 1e-10:
        raise ArithmeticError(f"evolution lost unitarity by {norm_error:.3g}")

    lowered = [op @ psi for op in ops]          # a_k |psi>
    raised = [op.conj().T @ psi for op in ops]  # a_k+ |psi>
    mean_a = np.array([np.vdot(psi, v) for v in lowered])
    n_mode = np.array([np.vdot(v, v).real for v in lowered])

    aa = np.empty((3, 3), dtype=np.complex128)      # <a_k a_m>
    ad_a = np.empty((3, 3), dtype=np.complex128)    # <a_k+ a_m>
    a_ad = np.empty((3, 3), dtype=np.complex128)    # <a_k a_m+>
    adad = np.empty((3, 3), dtype=np.complex128)    # <a_k+ a_m+>
    for k in range(3):
        for m in range(3):
            aa[k, m] = np.vdot(raised[k], lowered[m])
            ad_a[k, m] = np.vdot(lowered[k], lowered[m])
            a_ad[k, m] = np.vdot(raised[k], raised[m])
            adad[k, m] = np.vdot(lowered[k], raised[m])

    # quadratures X = c a + conj(c) a+, with c = 1 for P and c = i for Q
    cs = [1.0 + 0j] * 3 + [1j] * 3
    ks = [0, 1, 2, 0, 1, 2]
    means = np.array([
        2.0 * (cs[i] * mean_a[ks[i]]).real for i in range(6)
    ])
    cov = np.empty((6, 6))
    for i in range(6):
        for j in range(6):
            ci, cj, k, m = cs[i], cs[j], ks[i], ks[j]
            xy = (ci * cj * aa[k, m] + ci * np.conj(cj) * a_ad[k, m]
                  + np.conj(ci) * cj * ad_a[k, m]
                  + np.conj(ci) * np.conj(cj) * adad[k, m])
            yx = (cj * ci * aa[m, k] + cj * np.conj(ci) * a_ad[m, k]
                  + np.conj(cj) * ci * ad_a[m, k]
                  + np.conj(cj) * np.conj(ci) * adad[m, k])
            cov[i, j] = (0.5 * (xy + yx)).real - means[i] * means[j]
    return FockMoments(n_mode=n_mode, means=means, cov=cov,
                       norm_error=norm_error)
