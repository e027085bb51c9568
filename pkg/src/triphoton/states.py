"""Coherent seed states, quadratures, and their moments.

Expectations of normal-ordered polynomials on a three-mode coherent product
state are evaluated in the displaced frame: substituting a_k -> a_k + alpha_k
turns the coherent expectation into a vacuum expectation, where variances and
covariances come out as O(1) contraction sums instead of differences of
O(N_in)-sized moments.  That keeps second-order statistics at full double
precision even for seeds of 1e11 photons.

Quadrature conventions (shot noise = 1):

    P_k(theta) = e^{-i theta} A_k+  +  e^{i theta} A_k
    Q_k(theta) = P_k(theta + pi/2)

so P_k(0) = p_k = A_k + A_k+ and Q_k(0) = q_k = i(A_k - A_k+), with
[q_k, p_k] = 2i.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import OperatorPolynomial
from .evolution import EvolutionParams, EvolvedMode, evolve_mode
from .kernels import (
    PackedPoly,
    coherent_eval,
    combine,
    displace,
    vacuum_pair_expectation,
)

HERMITICITY_TOL = 1e-12
MEAN_IMAG_TOL = 1e-9
VARIANCE_FLOOR = -1e-9

_TWO_PI = 2.0 * math.pi


class NonHermitianError(ValueError):
    """Operator expected to be Hermitian is not."""


@dataclass(frozen=True)
class SeedState:
    """Three coherent amplitudes; vacuum is alpha = 0."""

    alphas: tuple

    def __post_init__(self):
        if len(self.alphas) != 3:
            raise ValueError("need one amplitude per mode")
        object.__setattr__(
            self, "alphas", tuple(complex(a) for a in self.alphas)
        )

    @classmethod
    def vacuum(cls):
        return cls((0j, 0j, 0j))

    @classmethod
    def single_seed(cls, k, n_in, phi=0.0):
        """Seed mode k with n_in mean photons at phase phi."""
        if not 1 <= k <= 3:
            raise ValueError("mode index must be 1, 2 or 3")
        amp = _amp(n_in, phi)
        alphas = [0j, 0j, 0j]
        alphas[k - 1] = amp
        return cls(tuple(alphas))

    @classmethod
    def double_seed(cls, n_in, phi=0.0):
        """Seed modes 2 and 3 identically; mode 1 stays vacuum."""
        amp = _amp(n_in, phi)
        return cls((0j, amp, amp))

    @classmethod
    def full_seed(cls, n_in, phi=0.0):
        """Identical coherent states on all three modes."""
        amp = _amp(n_in, phi)
        return cls((amp, amp, amp))

    @property
    def n_in(self):
        return tuple(abs(a) ** 2 for a in self.alphas)

    @property
    def max_alpha(self):
        return max(abs(a) for a in self.alphas)

    @property
    def is_vacuum(self):
        return all(a == 0 for a in self.alphas)


def _amp(n_in, phi):
    if n_in < 0:
        raise ValueError("mean photon number must be >= 0")
    return math.sqrt(n_in) * cmath.exp(1j * phi)


@dataclass(frozen=True)
class QuadratureSpec:
    """Homodyne channel: mode index and local-oscillator phase (mod 2pi)."""

    mode: int
    theta: float

    def __post_init__(self):
        if not 1 <= self.mode <= 3:
            raise ValueError("mode index must be 1, 2 or 3")
        object.__setattr__(self, "theta", self.theta % _TWO_PI)


def coherent_expectation(a, state: SeedState) -> complex:
    """<alpha| A |alpha> for normal-ordered A: sum of c * conj(a)^m a^n."""
    packed = a if isinstance(a, PackedPoly) else PackedPoly.from_poly(a)
    return coherent_eval(packed, state.alphas)


def quadrature_poly(mode: EvolvedMode, theta, kind="P") -> OperatorPolynomial:
    """Generalized quadrature of an evolved mode as a numeric polynomial."""
    th = _effective_angle(theta, kind)
    return (mode.poly.dag().scale(cmath.exp(-1j * th))
            + mode.poly.scale(cmath.exp(1j * th)))


def _effective_angle(theta, kind):
    if kind == "P":
        return theta
    if kind == "Q":
        return theta + math.pi / 2
    raise ValueError(f"quadrature kind must be 'P' or 'Q', got {kind!r}")


def check_hermitian(x: OperatorPolynomial, tol=HERMITICITY_TOL):
    """Raise unless x equals its adjoint to `tol` relative on coefficients."""
    adj = x.dag()
    scale = max(x.max_abs_coeff(), 1.0)
    for mono in x.terms.keys() | adj.terms.keys():
        delta = complex(x.coefficient(mono)) - complex(adj.coefficient(mono))
        if abs(delta) > tol * scale:
            raise NonHermitianError(
                f"coefficient mismatch {abs(delta):.3g} vs adjoint "
                f"(scale {scale:.3g})"
            )


def _displaced_centered(x, state):
    packed = x if isinstance(x, PackedPoly) else PackedPoly.from_poly(x)
    d = displace(packed, state.alphas)
    return d.constant, d.drop_constant()


def mean_variance(x: OperatorPolynomial, state: SeedState):
    """Mean and variance of a Hermitian polynomial on a coherent seed."""
    check_hermitian(x)
    mean, centered = _displaced_centered(x, state)
    if abs(mean.imag) > MEAN_IMAG_TOL * max(1.0, abs(mean)):
        raise NonHermitianError(f"mean has imaginary part {mean.imag:.3g}")
    var = vacuum_pair_expectation(centered, centered)
    if var.real < VARIANCE_FLOOR:
        raise ArithmeticError(f"variance {var.real:.3g} below numeric floor")
    return mean.real, var.real


def sym_covariance(x: OperatorPolynomial, y: OperatorPolynomial,
                   state: SeedState) -> float:
    """Symmetrized covariance <XY + YX>/2 - <X><Y> on a coherent seed.

    Input-mode quadratures commute exactly, but truncated evolved operators
    only commute up to the first dropped expansion order; symmetrizing keeps
    the result real regardless.
    """
    check_hermitian(x)
    check_hermitian(y)
    _, xc = _displaced_centered(x, state)
    _, yc = _displaced_centered(y, state)
    cov = 0.5 * (vacuum_pair_expectation(xc, yc)
                 + vacuum_pair_expectation(yc, xc))
    return cov.real


class ModeMomentCache:
    """First and centered second moments of the three evolved modes on a seed.

    Built once per (xi, order, seed); every quadrature variance, covariance,
    gain, and criterion evaluation is then O(1) trigonometry on the cached
    6x6 matrix of centered products

        m2[i, j] = <X_i X_j>_0,   X = (dA_1, dA_2, dA_3, dA_1+, dA_2+, dA_3+)

    where dA_k is the displaced, mean-subtracted output operator of mode k.
    """

    def __init__(self, modes, seed: SeedState, backend=None):
        self.seed = seed
        self.modes = tuple(modes)
        alphas = np.asarray(seed.alphas, dtype=np.complex128)
        centered = []
        means = []
        for mode in self.modes:
            d = displace(mode.packed, alphas, backend=backend)
            means.append(d.constant)
            centered.append(d.drop_constant())
        centered.extend(p.dag() for p in centered[:3])
        self.means = np.array(means, dtype=np.complex128)
        self.centered = centered
        m2 = np.empty((6, 6), dtype=np.complex128)
        for i in range(6):
            for j in range(6):
                m2[i, j] = vacuum_pair_expectation(
                    centered[i], centered[j], backend=backend
                )
        self.m2 = m2
        self.n_out = np.array(
            [(m2[3 + k, k] + abs(self.means[k]) ** 2).real for k in range(3)]
        )

    # -- means ---------------------------------------------------------------

    def quadrature_mean(self, k, theta, kind="P"):
        th = _effective_angle(theta, kind)
        return 2.0 * (np.exp(1j * th) * self.means[k - 1]).real

    # -- second moments --------------------------------------------------------

    def _cov_complex(self, k, th_k, m, th_m):
        """Symmetrized <P_kc(th_k) P_mc(th_m)>_0, modes 0-based, P kind."""
        m2 = self.m2
        e_sum = np.exp(1j * (th_k + th_m))
        e_dif = np.exp(1j * (th_m - th_k))
        fwd = (np.conj(e_sum) * m2[3 + k, 3 + m] + e_dif * m2[3 + k, m]
               + np.conj(e_dif) * m2[k, 3 + m] + e_sum * m2[k, m])
        bwd = (np.conj(e_sum) * m2[3 + m, 3 + k] + np.conj(e_dif) * m2[3 + m, k]
               + e_dif * m2[m, 3 + k] + e_sum * m2[m, k])
        return 0.5 * (fwd + bwd)

    def covariance(self, k, theta_k, kind_k, m, theta_m, kind_m):
        """Symmetrized covariance between two generalized quadratures."""
        out = self._cov_complex(k - 1, _effective_angle(theta_k, kind_k),
                                m - 1, _effective_angle(theta_m, kind_m))
        return np.real(out)

    def quadrature_variance(self, k, theta, kind="P"):
        return self.covariance(k, theta, kind, k, theta, kind)

    def combination_variance(self, weights, thetas, kind="P"):
        """Bilinear-form variance of sum_k w_k X_k(theta_k): the expanded
        per-mode + cross-term route."""
        total = 0.0
        for k in range(3):
            for m in range(3):
                total += (weights[k] * weights[m]
                          * self.covariance(k + 1, thetas[k], kind,
                                            m + 1, thetas[m], kind))
        return total

    def combination_packed(self, weights, thetas, kind="P") -> PackedPoly:
        """Centered displaced polynomial of sum_k w_k X_k(theta_k): the
        direct square-the-combination route."""
        parts = []
        coeffs = []
        for k in range(3):
            th = _effective_angle(thetas[k], kind)
            parts.extend([self.centered[3 + k], self.centered[k]])
            coeffs.extend([weights[k] * np.exp(-1j * th),
                           weights[k] * np.exp(1j * th)])
        return combine(parts, coeffs)

    def combination_variance_direct(self, weights, thetas, kind="P"):
        u = self.combination_packed(weights, thetas, kind)
        return vacuum_pair_expectation(u, u).real

    def s_value(self, h, g, thetas):
        """Criterion value from the bilinear form (fast path for scans)."""
        return (self.combination_variance(h, thetas, "Q")
                + self.combination_variance(g, thetas, "P"))

    def s_grid(self, h, g, theta1, theta2_grid, theta3_grid):
        """Vectorized s_value over a (theta2, theta3) mesh at fixed theta1."""
        t2 = np.asarray(theta2_grid)[:, None]
        t3 = np.asarray(theta3_grid)[None, :]
        shape = np.broadcast(t2, t3).shape
        total = np.zeros(shape)
        for kind, w in (("Q", h), ("P", g)):
            shift = math.pi / 2 if kind == "Q" else 0.0
            ths = (theta1 + shift, t2 + shift, t3 + shift)
            for k in range(3):
                for m in range(3):
                    if w[k] == 0.0 or w[m] == 0.0:
                        continue
                    total += w[k] * w[m] * np.real(
                        self._cov_complex(k, ths[k], m, ths[m])
                    )
        return total


@lru_cache(maxsize=32)
def _cached_moments(xi, order, alphas):
    modes = tuple(evolve_mode(k, EvolutionParams(xi=xi, order=order))
                  for k in (1, 2, 3))
    return ModeMomentCache(modes, SeedState(alphas))


def moment_cache(params: EvolutionParams, seed: SeedState) -> ModeMomentCache:
    """Memoized ModeMomentCache for (xi, order, seed)."""
    return _cached_moments(complex(params.xi), params.order, seed.alphas)


def quadrature_moment_set(params: EvolutionParams, seed: SeedState):
    """Means and symmetrized covariance matrix of (P_1..3, Q_1..3) at theta=0.

    Layout matches the truncated-Fock oracle so the two can be compared
    entry by entry.
    """
    cache = moment_cache(params, seed)
    kinds = [("P", 1), ("P", 2), ("P", 3), ("Q", 1), ("Q", 2), ("Q", 3)]
    means = np.array([cache.quadrature_mean(k, 0.0, kind)
                      for kind, k in kinds])
    cov = np.empty((6, 6))
    for i, (kind_i, k_i) in enumerate(kinds):
        for j, (kind_j, k_j) in enumerate(kinds):
            cov[i, j] = cache.covariance(k_i, 0.0, kind_i, k_j, 0.0, kind_j)
    return means, cov
