"""Packed numeric polynomials and the hot evaluation kernels.

The exact algebra layer (`triphoton.algebra`) is dict-based and slow to
evaluate repeatedly.  Once coefficients go numeric, a polynomial is packed
into flat arrays

    exps   : (T, 6) int64     columns [m1 m2 m3 n1 n2 n3]
    coeffs : (T,)   complex128

with rows sorted by a packed integer key (canonical form).  Three operations
dominate every sweep and are implemented twice, as numba @njit kernels and as
pure-numpy fallbacks:

  * displacement  a_k -> a_k + alpha_k (binomial expansion per term), used to
    shift coherent-state evaluation into the vacuum frame where variance
    arithmetic is free of large-number cancellation;
  * vacuum expectation of a product <L R>_0 of two normal-ordered
    polynomials, evaluated by contraction matching without materializing the
    product;
  * direct coherent-state expectation of a single polynomial.

Backend selection: environment variable ``TRIPHOTON_BACKEND`` = ``auto``
(default: numba when importable), ``numba`` or ``numpy``.  Every public
function also takes an explicit ``backend=`` override, which is what the
benchmark and the cross-backend tests use.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .algebra import DEGREE_CAP, Monomial, OperatorPolynomial

_PACK_BASE = 64  # fits exponents up to 63; the algebra caps them at 16

#: factorials are exact in float64 up to 18!; exponents never exceed DEGREE_CAP
_FACT = np.array([float(math.factorial(n)) for n in range(DEGREE_CAP + 1)])
_BINOM = np.array(
    [[float(math.comb(n, k)) for k in range(DEGREE_CAP + 1)]
     for n in range(DEGREE_CAP + 1)]
)

_env_backend = os.environ.get("TRIPHOTON_BACKEND", "auto").lower()
if _env_backend not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"TRIPHOTON_BACKEND={_env_backend!r}: expected auto, numba or numpy"
    )

if _env_backend == "numpy":
    _HAVE_NUMBA = False
else:
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _env_backend == "numba":
            raise
        _HAVE_NUMBA = False

DEFAULT_BACKEND = "numba" if _HAVE_NUMBA else "numpy"


def available_backends():
    return ("numpy", "numba") if _HAVE_NUMBA else ("numpy",)


def _resolve(backend):
    b = backend or DEFAULT_BACKEND
    if b == "numba" and not _HAVE_NUMBA:
        raise ValueError("numba backend requested but numba is unavailable")
    if b not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {b!r}")
    return b


# --------------------------------------------------------------------------
# canonical packed form (shared plumbing, numpy only)
# --------------------------------------------------------------------------

def pack_keys(exps):
    keys = np.zeros(exps.shape[0], dtype=np.int64)
    for s in range(6):
        keys = keys * _PACK_BASE + exps[:, s]
    return keys


def canonicalize(exps, coeffs):
    """Sort by packed key, merge duplicates, drop (near-)zero coefficients."""
    if exps.shape[0] == 0:
        return exps.reshape(0, 6), coeffs.reshape(0)
    keys = pack_keys(exps)
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    exps = exps[order]
    coeffs = coeffs[order]
    boundaries = np.empty(len(keys), dtype=bool)
    boundaries[0] = True
    np.not_equal(keys[1:], keys[:-1], out=boundaries[1:])
    starts = np.flatnonzero(boundaries)
    summed = np.add.reduceat(coeffs, starts)
    exps = exps[starts]
    keep = np.abs(summed) >= 1e-300
    return np.ascontiguousarray(exps[keep]), np.ascontiguousarray(summed[keep])


class PackedPoly:
    """Canonical packed polynomial with complex128 coefficients."""

    __slots__ = ("exps", "coeffs")

    def __init__(self, exps, coeffs, canonical=False):
        exps = np.asarray(exps, dtype=np.int64).reshape(-1, 6)
        coeffs = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
        if exps.shape[0] != coeffs.shape[0]:
            raise ValueError("exponent/coefficient row mismatch")
        if exps.size and (exps.min() < 0 or exps.max() > DEGREE_CAP):
            raise ValueError("packed exponent outside [0, DEGREE_CAP]")
        if not canonical:
            exps, coeffs = canonicalize(exps, coeffs)
        self.exps = exps
        self.coeffs = coeffs

    @classmethod
    def empty(cls):
        return cls(np.zeros((0, 6), dtype=np.int64),
                   np.zeros(0, dtype=np.complex128), canonical=True)

    @classmethod
    def from_poly(cls, poly: OperatorPolynomial):
        n = len(poly.terms)
        exps = np.zeros((n, 6), dtype=np.int64)
        coeffs = np.zeros(n, dtype=np.complex128)
        for i, (mono, c) in enumerate(poly.terms.items()):
            exps[i, :3] = mono.daggers
            exps[i, 3:] = mono.plains
            coeffs[i] = complex(c)
        exps, coeffs = canonicalize(exps, coeffs)
        return cls(exps, coeffs, canonical=True)

    def to_poly(self) -> OperatorPolynomial:
        terms = {}
        for row, c in zip(self.exps, self.coeffs):
            terms[Monomial(tuple(int(e) for e in row[:3]),
                           tuple(int(e) for e in row[3:]))] = complex(c)
        return OperatorPolynomial(terms)

    def __len__(self):
        return self.exps.shape[0]

    def __add__(self, other):
        return PackedPoly(np.concatenate([self.exps, other.exps]),
                          np.concatenate([self.coeffs, other.coeffs]))

    def scale(self, s):
        return PackedPoly(self.exps, self.coeffs * s, canonical=True)

    def dag(self):
        """Swap dagger/plain blocks and conjugate; re-sorts."""
        return PackedPoly(self.exps[:, (3, 4, 5, 0, 1, 2)], self.coeffs.conj())

    @property
    def constant(self):
        """Coefficient of the identity monomial (vacuum expectation)."""
        if len(self) and not self.exps[0].any():
            return complex(self.coeffs[0])
        return 0j

    def drop_constant(self):
        if len(self) and not self.exps[0].any():
            return PackedPoly(self.exps[1:], self.coeffs[1:], canonical=True)
        return self

    def displace(self, alphas, backend=None):
        return displace(self, alphas, backend=backend)


def combine(packed_polys, weights=None):
    """Weighted sum of packed polynomials."""
    if weights is None:
        weights = [1.0] * len(packed_polys)
    exps = [p.exps for p in packed_polys]
    coeffs = [p.coeffs * w for p, w in zip(packed_polys, weights)]
    if not exps:
        return PackedPoly.empty()
    return PackedPoly(np.concatenate(exps), np.concatenate(coeffs))


# --------------------------------------------------------------------------
# numpy fallback kernels
# --------------------------------------------------------------------------

def _slot_scalars(alphas):
    alphas = np.asarray(alphas, dtype=np.complex128)
    return np.concatenate([alphas.conj(), alphas])  # slots 0-2 daggers, 3-5 plains


def _displace_np(exps, coeffs, alphas):
    """Expand (a+ + conj(alpha))^m (a + alpha)^n slot by slot."""
    zs = _slot_scalars(alphas)
    exps = exps.copy()
    for s in range(6):
        e = exps[:, s]
        emax = int(e.max()) if e.size else 0
        if emax == 0:
            continue
        counts = e + 1
        idx = np.repeat(np.arange(len(e)), counts)
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        kept = np.arange(counts.sum()) - np.repeat(starts, counts)
        zpow = zs[s] ** np.arange(emax + 1)
        coeffs = coeffs[idx] * _BINOM[e[idx], kept] * zpow[e[idx] - kept]
        exps = exps[idx]
        exps[:, s] = kept
    return exps, coeffs


def _group_sums(keys, coeffs):
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    coeffs = coeffs[order]
    boundaries = np.empty(len(keys), dtype=bool)
    if len(keys):
        boundaries[0] = True
        np.not_equal(keys[1:], keys[:-1], out=boundaries[1:])
        starts = np.flatnonzero(boundaries)
        return keys[starts], np.add.reduceat(coeffs, starts)
    return keys, coeffs


def _pair_vacuum_np(expsL, coeffsL, expsR, coeffsR):
    maskL = ~expsL[:, :3].any(axis=1)
    maskR = ~expsR[:, 3:].any(axis=1)
    if not maskL.any() or not maskR.any():
        return 0j
    keyL = (expsL[maskL, 3] * _PACK_BASE + expsL[maskL, 4]) * _PACK_BASE + expsL[maskL, 5]
    keyR = (expsR[maskR, 0] * _PACK_BASE + expsR[maskR, 1]) * _PACK_BASE + expsR[maskR, 2]
    ukL, sumL = _group_sums(keyL, coeffsL[maskL])
    ukR, sumR = _group_sums(keyR, coeffsR[maskR])
    common, iL, iR = np.intersect1d(ukL, ukR, assume_unique=True,
                                    return_indices=True)
    if common.size == 0:
        return 0j
    e3 = common % _PACK_BASE
    e2 = (common // _PACK_BASE) % _PACK_BASE
    e1 = common // (_PACK_BASE * _PACK_BASE)
    weights = _FACT[e1] * _FACT[e2] * _FACT[e3]
    return complex(np.sum(sumL[iL] * sumR[iR] * weights))


def _eval_np(exps, coeffs, alphas):
    if exps.shape[0] == 0:
        return 0j
    zs = _slot_scalars(alphas)
    emax = int(exps.max())
    vals = coeffs.copy()
    for s in range(6):
        zpow = zs[s] ** np.arange(emax + 1)
        vals = vals * zpow[exps[:, s]]
    return complex(np.sum(vals))


# --------------------------------------------------------------------------
# numba kernels
# --------------------------------------------------------------------------

if _HAVE_NUMBA:

    @njit(cache=True)
    def _displace_count_nb(exps):
        total = 0
        for t in range(exps.shape[0]):
            n = 1
            for s in range(6):
                n *= exps[t, s] + 1
            total += n
        return total

    @njit(cache=True)
    def _displace_nb(exps, coeffs, zs, binom, out_exps, out_coeffs):
        idx = 0
        maxe = binom.shape[0]
        zpow = np.empty((6, maxe), dtype=np.complex128)
        for t in range(exps.shape[0]):
            for s in range(6):
                zpow[s, 0] = 1.0 + 0j
                for p in range(1, exps[t, s] + 1):
                    zpow[s, p] = zpow[s, p - 1] * zs[s]
            e0, e1, e2 = exps[t, 0], exps[t, 1], exps[t, 2]
            e3, e4, e5 = exps[t, 3], exps[t, 4], exps[t, 5]
            c = coeffs[t]
            for i0 in range(e0 + 1):
                c0 = c * binom[e0, i0] * zpow[0, e0 - i0]
                for i1 in range(e1 + 1):
                    c1 = c0 * binom[e1, i1] * zpow[1, e1 - i1]
                    for i2 in range(e2 + 1):
                        c2 = c1 * binom[e2, i2] * zpow[2, e2 - i2]
                        for i3 in range(e3 + 1):
                            c3 = c2 * binom[e3, i3] * zpow[3, e3 - i3]
                            for i4 in range(e4 + 1):
                                c4 = c3 * binom[e4, i4] * zpow[4, e4 - i4]
                                for i5 in range(e5 + 1):
                                    out_exps[idx, 0] = i0
                                    out_exps[idx, 1] = i1
                                    out_exps[idx, 2] = i2
                                    out_exps[idx, 3] = i3
                                    out_exps[idx, 4] = i4
                                    out_exps[idx, 5] = i5
                                    out_coeffs[idx] = (
                                        c4 * binom[e5, i5] * zpow[5, e5 - i5]
                                    )
                                    idx += 1
        return idx

    @njit(cache=True)
    def _pair_products_nb(expsL, coeffsL, expsR, coeffsR, fact):
        nL, nR = expsL.shape[0], expsR.shape[0]
        keyL = np.empty(nL, dtype=np.int64)
        valL = np.empty(nL, dtype=np.complex128)
        cntL = 0
        for i in range(nL):
            if expsL[i, 0] == 0 and expsL[i, 1] == 0 and expsL[i, 2] == 0:
                keyL[cntL] = (expsL[i, 3] * 64 + expsL[i, 4]) * 64 + expsL[i, 5]
                valL[cntL] = coeffsL[i]
                cntL += 1
        keyR = np.empty(nR, dtype=np.int64)
        valR = np.empty(nR, dtype=np.complex128)
        cntR = 0
        for i in range(nR):
            if expsR[i, 3] == 0 and expsR[i, 4] == 0 and expsR[i, 5] == 0:
                keyR[cntR] = (expsR[i, 0] * 64 + expsR[i, 1]) * 64 + expsR[i, 2]
                valR[cntR] = coeffsR[i]
                cntR += 1
        kL = keyL[:cntL]
        vL = valL[:cntL]
        kR = keyR[:cntR]
        vR = valR[:cntR]
        oL = np.argsort(kL)
        oR = np.argsort(kR)
        out = np.zeros(min(cntL, cntR), dtype=np.complex128)
        nout = 0
        i = 0
        j = 0
        while i < cntL and j < cntR:
            a = kL[oL[i]]
            b = kR[oR[j]]
            if a < b:
                i += 1
            elif b < a:
                j += 1
            else:
                sL = 0j
                while i < cntL and kL[oL[i]] == a:
                    sL += vL[oL[i]]
                    i += 1
                sR = 0j
                while j < cntR and kR[oR[j]] == a:
                    sR += vR[oR[j]]
                    j += 1
                e3 = a % 64
                e2 = (a // 64) % 64
                e1 = a // 4096
                out[nout] = sL * sR * fact[e1] * fact[e2] * fact[e3]
                nout += 1
        return out[:nout]

    @njit(cache=True)
    def _eval_products_nb(exps, coeffs, zs):
        n = exps.shape[0]
        out = np.empty(n, dtype=np.complex128)
        for t in range(n):
            v = coeffs[t]
            for s in range(6):
                z = zs[s]
                for _ in range(exps[t, s]):
                    v *= z
            out[t] = v
        return out


# --------------------------------------------------------------------------
# public dispatchers
# --------------------------------------------------------------------------

def displace(packed: PackedPoly, alphas, backend=None) -> PackedPoly:
    """Substitute a_k -> a_k + alpha_k (and a_k+ -> a_k+ + conj(alpha_k)).

    The result is the same operator expressed in the frame displaced by
    -alpha; its vacuum moments are the coherent-state moments of the input.
    """
    alphas = np.asarray(alphas, dtype=np.complex128)
    if len(packed) == 0 or not np.abs(alphas).any():
        return packed
    b = _resolve(backend)
    if b == "numba":
        zs = _slot_scalars(alphas)
        total = _displace_count_nb(packed.exps)
        out_exps = np.empty((total, 6), dtype=np.int64)
        out_coeffs = np.empty(total, dtype=np.complex128)
        _displace_nb(packed.exps, packed.coeffs, zs, _BINOM, out_exps, out_coeffs)
        exps, coeffs = canonicalize(out_exps, out_coeffs)
    else:
        exps, coeffs = _displace_np(packed.exps, packed.coeffs, alphas)
        exps, coeffs = canonicalize(exps, coeffs)
    return PackedPoly(exps, coeffs, canonical=True)


def vacuum_pair_expectation(left: PackedPoly, right: PackedPoly,
                            backend=None) -> complex:
    """<0| L R |0> for normal-ordered L, R, without forming the product.

    Per mode only the full contraction survives: the L term must carry no
    creation operators, the R term no annihilation operators, and the facing
    exponents must match, contributing n!.
    """
    if len(left) == 0 or len(right) == 0:
        return 0j
    b = _resolve(backend)
    if b == "numba":
        prods = _pair_products_nb(left.exps, left.coeffs,
                                  right.exps, right.coeffs, _FACT)
        return complex(np.sum(prods)) if prods.size else 0j
    return _pair_vacuum_np(left.exps, left.coeffs, right.exps, right.coeffs)


def coherent_eval(packed: PackedPoly, alphas, backend=None) -> complex:
    """Direct coherent-state expectation: sum of c * conj(a)^m a^n."""
    if len(packed) == 0:
        return 0j
    b = _resolve(backend)
    if b == "numba":
        zs = _slot_scalars(alphas)
        return complex(np.sum(_eval_products_nb(packed.exps, packed.coeffs, zs)))
    return _eval_np(packed.exps, packed.coeffs, np.asarray(alphas, np.complex128))
