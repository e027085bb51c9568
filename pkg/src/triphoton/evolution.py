"""Truncated Heisenberg-picture evolution under the triple-photon Hamiltonian.

The interaction kernel is H = a1+ a2+ a3+ + a1 a2 a3 (units of hbar*kappa).
Mode operators after an interaction of dimensionless strength xi = kappa*t
are expanded as

    A_k = a_k + sum_{n=1..N} (i xi)^n / n! * W_n(k),

where W_n(k) is the n-fold nested commutator of H with a_k.  The W tables
are built once, exactly (integer coefficients), and shared across every xi;
only the (i xi)^n / n! weights are numeric.
"""

from __future__ import annotations

import hashlib
import math
import os
import threading
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

from .algebra import (
    ExactComplex,
    OperatorPolynomial,
    annihilator,
    creator,
    poly_commutator,
)
from .kernels import PackedPoly, vacuum_pair_expectation

MAX_ORDER_ENV = "TRIPHOTON_MAX_ORDER"

#: |xi| * max_k |alpha_k| above this triggers a truncation-validity warning.
VALIDITY_THRESHOLD = 0.7


class ExpansionOrderError(ValueError):
    """Requested expansion order exceeds the configured maximum."""


def max_expansion_order() -> int:
    return int(os.environ.get(MAX_ORDER_ENV, "8"))


@lru_cache(maxsize=1)
def hamiltonian_kernel() -> OperatorPolynomial:
    """H = a1+ a2+ a3+ + a1 a2 a3, exact unit coefficients."""
    up = creator(1) * creator(2) * creator(3)
    down = annihilator(1) * annihilator(2) * annihilator(3)
    return up + down


_omega_cache: dict = {}
_omega_lock = threading.Lock()


def omega(n: int, k: int) -> OperatorPolynomial:
    """n-fold nested commutator of the kernel with a_k (exact, memoized).

    omega(0, k) = a_k and omega(n, k) = [H, omega(n-1, k)].  The tables are
    shared across threads; construction is serialized once per (n, k).
    """
    if n < 0:
        raise ValueError("order index must be >= 0")
    if not 1 <= k <= 3:
        raise ValueError("mode index must be 1, 2 or 3")
    key = (n, k)
    hit = _omega_cache.get(key)
    if hit is not None:
        return hit
    with _omega_lock:
        hit = _omega_cache.get(key)
        if hit is not None:
            return hit
        if n == 0:
            result = annihilator(k)
        else:
            result = poly_commutator(hamiltonian_kernel(), omega(n - 1, k))
        _omega_cache[key] = result
        return result


def omega_table_checksum(order: int) -> str:
    """SHA-256 over the canonical rendering of all tables up to `order`.

    Pinned in run manifests so that sweep outputs are traceable to the exact
    symbolic tables that produced them.
    """
    h = hashlib.sha256()
    for k in (1, 2, 3):
        for n in range(order + 1):
            h.update(f"omega({n},{k})=".encode())
            h.update(omega(n, k).render().encode())
            h.update(b"\n")
    return h.hexdigest()


@dataclass(frozen=True)
class EvolutionParams:
    """Interaction strength xi = kappa*t and expansion order."""

    xi: complex = 1.75e-6
    order: int = 5

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("expansion order must be >= 0")
        if self.order > max_expansion_order():
            raise ExpansionOrderError(
                f"order {self.order} exceeds maximum {max_expansion_order()}"
                f" (set {MAX_ORDER_ENV} to raise it)"
            )

    def check_validity(self, max_alpha: float) -> float:
        """Warn when |xi|*max|alpha| leaves the safely convergent regime.

        Returns the proxy value either way; the expansion degrades gradually
        rather than failing hard, so this is a warning, not an error.
        """
        proxy = abs(self.xi) * max_alpha
        if proxy >= VALIDITY_THRESHOLD:
            warnings.warn(
                f"|xi|*max|alpha| = {proxy:.3g} >= {VALIDITY_THRESHOLD}; "
                "truncated expansion may be inaccurate",
                stacklevel=2,
            )
        return proxy


@dataclass(frozen=True)
class EvolvedMode:
    """Output-mode operator A_k as a numeric normal-ordered polynomial."""

    mode: int
    order: int
    params: EvolutionParams
    poly: OperatorPolynomial = field(repr=False)
    packed: PackedPoly = field(repr=False)
    packed_dag: PackedPoly = field(repr=False)


@lru_cache(maxsize=64)
def _evolve_cached(k: int, xi: complex, order: int) -> EvolvedMode:
    params = EvolutionParams(xi=xi, order=order)
    total = omega(0, k).to_numeric()
    for n in range(1, order + 1):
        weight = (1j * xi) ** n / math.factorial(n)
        total = total + omega(n, k).to_numeric().scale(weight)
    packed = PackedPoly.from_poly(total)
    return EvolvedMode(mode=k, order=order, params=params, poly=total,
                       packed=packed, packed_dag=packed.dag())


def evolve_mode(k: int, params: EvolutionParams) -> EvolvedMode:
    """Assemble A_k(xi) at the requested order with numeric coefficients."""
    if not 1 <= k <= 3:
        raise ValueError("mode index must be 1, 2 or 3")
    return _evolve_cached(k, complex(params.xi), params.order)


def evolved_triple(params: EvolutionParams):
    return tuple(evolve_mode(k, params) for k in (1, 2, 3))


def truncation_diagnostic(k: int, seed, params: EvolutionParams) -> float:
    """Proxy for the truncation error of the order-N expansion on a seed.

    Maximum of (a) the relative change of <A_k+ A_k> between orders N and
    N-1 and (b) the unitarity deficit |<[A_k, A_k+]> - 1|.  Both vanish for
    the exact evolution; the truncated series violates them at the scale of
    the first dropped term.
    """
    if params.order < 1:
        raise ValueError("diagnostic needs order >= 1")
    if params.xi == 0:
        return 0.0
    alphas = seed.alphas
    cur = evolve_mode(k, params)
    prev = evolve_mode(k, EvolutionParams(xi=params.xi, order=params.order - 1))

    def n_out(mode):
        a_disp = mode.packed.displace(alphas)
        return vacuum_pair_expectation(a_disp.dag(), a_disp).real

    n_cur = n_out(cur)
    n_prev = n_out(prev)
    rel_change = abs(n_cur - n_prev) / max(abs(n_cur), 1e-30)

    a_disp = cur.packed.displace(alphas)
    ad_disp = a_disp.dag()
    comm = (vacuum_pair_expectation(a_disp, ad_disp)
            - vacuum_pair_expectation(ad_disp, a_disp))
    unitarity = abs(comm - 1.0)
    return max(rel_change, unitarity)
