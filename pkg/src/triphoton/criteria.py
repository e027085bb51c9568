"""van Loock-Furusawa inseparability criterion for the three output modes.

The criterion is the variance sum S = <Du^2> + <Dv^2> of the commuting
combinations

    u = h1 Q_1(t1) + h2 Q_2(t2) + h3 Q_3(t3)
    v = g1 P_1(t1) + g2 P_2(t2) + g3 P_3(t3),

compared against the bipartition bound f_p (genuine tripartite entanglement
when S < f_p) and the full-separability bound f_s.  S is computed twice per
report, by squaring the assembled combinations directly and through the
expanded per-mode variance + cross-covariance sums; the two routes must agree
to 1e-10 relative or the evaluation aborts, which turns the algebraic
identity behind the expansion into a built-in self-test.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .evolution import EvolutionParams
from .kernels import vacuum_pair_expectation
from .states import ModeMomentCache, SeedState, moment_cache

GENUINE_TRIPARTITE = "genuine-tripartite"
PARTIALLY_SEPARABLE = "partially-separable-region"
NO_VIOLATION = "no-violation"

#: relative tolerance for the internal direct-vs-expanded S identity
_S_IDENTITY_RTOL = 1e-10

_SQRT2 = math.sqrt(2.0)


class CriterionIdentityError(ArithmeticError):
    """Direct and expanded evaluations of S disagreed beyond tolerance."""


@dataclass(frozen=True)
class CombinationWeights:
    """Weights h (on Q), g (on P), local-oscillator phases, optional beta.

    When `beta` is given the weights follow the one-against-two pattern
    h = (1, 1/(beta*sqrt2), 1/(beta*sqrt2)), g = (1, -beta/sqrt2,
    -beta/sqrt2), whose commutator sum h.g vanishes for every beta.
    """

    h: tuple
    g: tuple
    thetas: tuple = (0.0, 0.0, 0.0)
    beta: float = None

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(float(x) for x in self.h))
        object.__setattr__(self, "g", tuple(float(x) for x in self.g))
        object.__setattr__(self, "thetas",
                           tuple(float(t) for t in self.thetas))
        if len(self.h) != 3 or len(self.g) != 3 or len(self.thetas) != 3:
            raise ValueError("h, g and thetas each need three entries")
        if not any(self.h):
            raise ValueError("h must not be all zero")
        if not any(self.g):
            raise ValueError("g must not be all zero")
        if self.beta is not None and not self.beta > 0:
            raise ValueError("beta must be positive")

    @classmethod
    def from_beta(cls, beta, thetas=(0.0, 0.0, 0.0)):
        s = 1.0 / (beta * _SQRT2)
        return cls(h=(1.0, s, s), g=(1.0, -beta / _SQRT2, -beta / _SQRT2),
                   thetas=thetas, beta=float(beta))

    @classmethod
    def symmetric(cls, thetas=(0.0, 0.0, 0.0)):
        return cls(h=(1.0, 1.0, 1.0), g=(1.0, 1.0, 1.0), thetas=thetas)

    @classmethod
    def double_seed_preset(cls, thetas=(0.0, 0.0, 0.0)):
        s = 1.0 / _SQRT2
        return cls(h=(1.0, s, s), g=(1.0, -s, -s), thetas=thetas)

    @classmethod
    def bipartite_pair(cls, thetas=(0.0, 0.0, 0.0)):
        """u = Q_1 + Q_2, v = P_1 - P_2 (mode 3 unweighted)."""
        return cls(h=(1.0, 1.0, 0.0), g=(1.0, -1.0, 0.0), thetas=thetas)

    @property
    def commutator_sum(self):
        """[u, v] = 2i * sum_k h_k g_k; zero makes u and v commute."""
        return float(sum(hk * gk for hk, gk in zip(self.h, self.g)))

    @property
    def gamma_sq(self):
        return float(sum(x * x for x in self.h) + sum(x * x for x in self.g))


def thresholds(w: CombinationWeights):
    """Bipartition bounds per isolated mode, their minimum, and f_s."""
    hg = [w.h[k] * w.g[k] for k in range(3)]
    per_split = {}
    for k in range(3):
        l, m = [i for i in range(3) if i != k]
        per_split[k + 1] = 2.0 * (abs(hg[k]) + abs(hg[l] + hg[m]))
    f_p = min(per_split.values())
    f_s = 2.0 * sum(abs(x) for x in hg)
    return per_split, f_p, f_s


@dataclass(frozen=True)
class CriterionReport:
    S: float
    var_u: float
    var_v: float
    variance_terms: tuple
    cross_terms_q: float
    cross_terms_p: float
    f_p_per_split: dict
    f_p: float
    f_s: float
    gamma_sq: float
    commutator_sum: float
    verdict: str
    weights: CombinationWeights = field(repr=False)
    seed: SeedState = field(repr=False)
    params: EvolutionParams = field(repr=False)


def _verdict(s, f_p, f_s):
    if s < f_p:
        return GENUINE_TRIPARTITE
    if s < f_s:
        return PARTIALLY_SEPARABLE
    return NO_VIOLATION


def compute_S(w: CombinationWeights, seed: SeedState,
              params: EvolutionParams) -> CriterionReport:
    """Full criterion report for one weight/seed/strength configuration."""
    params.check_validity(seed.max_alpha)
    if abs(w.commutator_sum) > 1e-12:
        warnings.warn(
            f"u and v do not commute (sum h_k g_k = {w.commutator_sum:.3g}); "
            "S is still reported but the criterion bounds assume [u,v] = 0",
            stacklevel=2,
        )
    cache = moment_cache(params, seed)

    # direct route: square the assembled combinations
    u = cache.combination_packed(w.h, w.thetas, "Q")
    v = cache.combination_packed(w.g, w.thetas, "P")
    var_u = vacuum_pair_expectation(u, u).real
    var_v = vacuum_pair_expectation(v, v).real
    s_direct = var_u + var_v

    # expanded route: per-mode variances plus cross covariances
    variance_terms = tuple(
        [w.h[k] ** 2 * cache.quadrature_variance(k + 1, w.thetas[k], "Q")
         for k in range(3)]
        + [w.g[k] ** 2 * cache.quadrature_variance(k + 1, w.thetas[k], "P")
           for k in range(3)]
    )
    cross_q = 0.0
    cross_p = 0.0
    for k in range(3):
        for m in range(3):
            if k == m:
                continue
            cross_q += (w.h[k] * w.h[m]
                        * cache.covariance(k + 1, w.thetas[k], "Q",
                                           m + 1, w.thetas[m], "Q"))
            cross_p += (w.g[k] * w.g[m]
                        * cache.covariance(k + 1, w.thetas[k], "P",
                                           m + 1, w.thetas[m], "P"))
    s_expanded = sum(variance_terms) + cross_q + cross_p

    if abs(s_direct - s_expanded) > _S_IDENTITY_RTOL * max(1.0, abs(s_direct)):
        raise CriterionIdentityError(
            f"direct S = {s_direct!r} vs expanded S = {s_expanded!r}"
        )

    per_split, f_p, f_s = thresholds(w)
    return CriterionReport(
        S=s_direct,
        var_u=var_u,
        var_v=var_v,
        variance_terms=variance_terms,
        cross_terms_q=cross_q,
        cross_terms_p=cross_p,
        f_p_per_split=per_split,
        f_p=f_p,
        f_s=f_s,
        gamma_sq=w.gamma_sq,
        commutator_sum=w.commutator_sum,
        verdict=_verdict(s_direct, f_p, f_s),
        weights=w,
        seed=seed,
        params=params,
    )


def fluorescence_closed_form(w: CombinationWeights, nbar: float):
    """Unseeded-regime closed form: S and its gap above f_s.

    With no seeding the three output modes are uncorrelated and every
    quadrature variance equals 1 + 2*nbar, so S = (1 + 2*nbar) * Gamma^2 and

        S - f_s = 2 * Gamma^2 * nbar + sum_k (|h_k| - |g_k|)^2  >=  0:

    spontaneous triple-photon generation never violates the criterion.
    """
    if nbar < 0:
        raise ValueError("mean photon number must be >= 0")
    gamma_sq = w.gamma_sq
    s = (1.0 + 2.0 * nbar) * gamma_sq
    gap = 2.0 * gamma_sq * nbar + sum(
        (abs(hk) - abs(gk)) ** 2 for hk, gk in zip(w.h, w.g)
    )
    return s, gap


@dataclass(frozen=True)
class GainReport:
    """Per-mode photon gain and phase-resolved quadrature variances."""

    n_in: tuple
    n_out: tuple
    gain: tuple
    theta_grid: np.ndarray
    var_p: np.ndarray  # (3, len(theta_grid))
    var_q: np.ndarray


def gain_and_variances(seed: SeedState, params: EvolutionParams,
                       theta_grid=None) -> GainReport:
    """Gains G_k = N_out/N_in and variances of P_k(theta), Q_k(theta)."""
    n_in = seed.n_in
    if any(n == 0 for n in n_in):
        raise ValueError("gain is undefined for an unseeded mode")
    if theta_grid is None:
        theta_grid = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    theta_grid = np.asarray(theta_grid, dtype=float)
    cache = moment_cache(params, seed)
    n_out = tuple(float(x) for x in cache.n_out)
    gain = tuple(o / i for o, i in zip(n_out, n_in))
    var_p = np.empty((3, theta_grid.size))
    var_q = np.empty((3, theta_grid.size))
    for k in range(3):
        for j, th in enumerate(theta_grid):
            var_p[k, j] = cache.quadrature_variance(k + 1, th, "P")
            var_q[k, j] = cache.quadrature_variance(k + 1, th, "Q")
    return GainReport(n_in=n_in, n_out=n_out, gain=gain,
                      theta_grid=theta_grid, var_p=var_p, var_q=var_q)


def optimize_beta(seed: SeedState, params: EvolutionParams,
                  thetas=(0.0, 0.0, 0.0), beta_range=(0.1, 10.0)):
    """Minimize S over beta for the one-against-two weight pattern.

    Brackets the minimum on a log-spaced grid first, then refines with
    golden-section search; if the grid minimum sits on a boundary the best
    grid point is returned as-is.
    """
    cache = moment_cache(params, seed)

    def s_of(beta):
        w = CombinationWeights.from_beta(beta, thetas)
        return cache.s_value(w.h, w.g, thetas)

    lo, hi = beta_range
    if not 0 < lo < hi:
        raise ValueError("beta_range must satisfy 0 < lo < hi")
    grid = np.geomspace(lo, hi, 33)
    values = [s_of(b) for b in grid]
    i = int(np.argmin(values))
    if i == 0 or i == len(grid) - 1:
        return float(grid[i]), float(values[i])

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(grid[i - 1]), float(grid[i + 1])
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = s_of(c), s_of(d)
    while b - a > 1e-10 * max(1.0, b):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = s_of(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = s_of(d)
    beta_star = 0.5 * (a + b)
    return float(beta_star), float(s_of(beta_star))


def _parabolic_refine(grid, values, i):
    """Vertex of the parabola through the periodic 3-point stencil at i."""
    n = len(grid)
    step = grid[1] - grid[0]
    y0, y1, y2 = values[(i - 1) % n], values[i], values[(i + 1) % n]
    denom = y0 - 2.0 * y1 + y2
    if denom <= 0:
        return grid[i]
    return grid[i] + 0.5 * step * (y0 - y2) / denom


def scan_thetas(seed: SeedState, params: EvolutionParams,
                w: CombinationWeights, theta1_grid, grid_points=64):
    """For each theta_1, the (theta_2, theta_3) pair minimizing S.

    Minimization uses a periodic grid of `grid_points` per axis followed by
    one local parabolic refinement step per axis.  Returns a list of
    (theta1, theta2, theta3, S) tuples.
    """
    theta1_grid = np.atleast_1d(np.asarray(theta1_grid, dtype=float))
    if grid_points < 8:
        raise ValueError("theta grids need at least 8 points")
    axis = np.linspace(0.0, 2.0 * math.pi, grid_points, endpoint=False)
    cache = moment_cache(params, seed)
    rows = []
    for t1 in theta1_grid:
        s = cache.s_grid(w.h, w.g, t1, axis, axis)
        i2, i3 = np.unravel_index(np.argmin(s), s.shape)
        t2 = _parabolic_refine(axis, s[:, i3], i2)
        t3 = _parabolic_refine(axis, s[i2, :], i3)
        s_min = float(s[i2, i3])
        s_ref = float(cache.s_grid(w.h, w.g, t1,
                                   np.array([t2]), np.array([t3]))[0, 0])
        if s_ref <= s_min:
            rows.append((float(t1), float(t2 % (2 * math.pi)),
                         float(t3 % (2 * math.pi)), s_ref))
        else:
            rows.append((float(t1), float(axis[i2]), float(axis[i3]), s_min))
    return rows
