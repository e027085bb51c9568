"""Exact normal-ordered ladder-operator algebra for three bosonic modes.

Every operator expression is stored as a sparse polynomial in the six ladder
operators a1, a2, a3, a1+, a2+, a3+ written in canonical normal order: all
creation operators to the left of all annihilation operators, modes ascending
inside each block.  A monomial is therefore fully described by six exponents,

    a1+^m1 a2+^m2 a3+^m3  a1^n1 a2^n2 a3^n3.

Products are re-normal-ordered through the closed-form single-mode identity

    a^n (a+)^m = sum_j  j! C(n,j) C(m,j) (a+)^(m-j) a^(n-j),

which keeps all coefficients exact integers.  Coefficients are exact Gaussian
rationals (`ExactComplex`, a pair of `Fraction`s) until a caller substitutes
numeric values, at which point ordinary `complex` coefficients take over.
Nested-commutator tables built from the cubic interaction Hamiltonian stay
exact this way, so the algebra layer contributes no rounding error at all.

All values are immutable after construction and all operations are pure
functions, so polynomials can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

N_MODES = 3

#: Largest exponent a single ladder operator may carry.  The deepest objects
#: built here (order-8 commutator tables, squared mode combinations) stay
#: well below this; hitting the cap means a runaway recursion, not physics.
DEGREE_CAP = 16

#: Numeric coefficients with magnitude below this are treated as zero.
PRUNE_EPS = 1e-300


class DegreeCapError(ValueError):
    """A ladder-operator exponent exceeded the configured degree cap."""


class ExactComplex:
    """Gaussian-rational complex number: exact real and imaginary Fractions.

    Mixing with a float or complex value demotes the result to `complex`;
    mixing with ints or Fractions stays exact.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def __add__(self, other):
        if isinstance(other, ExactComplex):
            return ExactComplex(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return ExactComplex(self.re + other, self.im)
        return complex(self) + other

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, ExactComplex):
            return ExactComplex(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, (int, Fraction)):
            return ExactComplex(self.re * other, self.im * other)
        return complex(self) * other

    __rmul__ = __mul__

    def conjugate(self):
        return ExactComplex(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, ExactComplex):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    @property
    def is_gaussian_integer(self):
        return self.re.denominator == 1 and self.im.denominator == 1

    def __repr__(self):
        return f"ExactComplex({self.re!r}, {self.im!r})"


def _is_zero_coeff(c):
    if isinstance(c, ExactComplex):
        return not c
    return abs(c) < PRUNE_EPS


def _as_coeff(x):
    """Lift a bare scalar into a coefficient: ints and Fractions stay exact,
    floats and complex go numeric."""
    if isinstance(x, ExactComplex):
        return x
    if isinstance(x, (int, Fraction)):
        return ExactComplex(x)
    return complex(x)


def _conj_coeff(c):
    return c.conjugate()


@dataclass(frozen=True)
class Monomial:
    """Normal-ordered ladder monomial: `daggers` are the a+ exponents per
    mode, `plains` the a exponents, modes 1..3 left to right."""

    daggers: tuple
    plains: tuple

    def __post_init__(self):
        for exps in (self.daggers, self.plains):
            if len(exps) != N_MODES:
                raise ValueError("need one exponent per mode")
            for e in exps:
                if e < 0:
                    raise ValueError("negative ladder exponent")
                if e > DEGREE_CAP:
                    raise DegreeCapError(
                        f"exponent {e} exceeds degree cap {DEGREE_CAP}"
                    )

    @property
    def degree(self):
        return sum(self.daggers) + sum(self.plains)

    @property
    def is_identity(self):
        return self.degree == 0

    def adjoint(self):
        """Hermitian conjugate; swapping the blocks is again normal-ordered."""
        return Monomial(self.plains, self.daggers)

    def relabeled(self, perm):
        """Apply a mode permutation, perm[k] = image of mode k+1 (1-based)."""
        d = [0] * N_MODES
        p = [0] * N_MODES
        for k in range(N_MODES):
            d[perm[k] - 1] = self.daggers[k]
            p[perm[k] - 1] = self.plains[k]
        return Monomial(tuple(d), tuple(p))

    def render(self):
        parts = []
        for k in range(N_MODES):
            e = self.daggers[k]
            if e:
                parts.append(f"ad{k + 1}" + (f"^{e}" if e > 1 else ""))
        for k in range(N_MODES):
            e = self.plains[k]
            if e:
                parts.append(f"a{k + 1}" + (f"^{e}" if e > 1 else ""))
        return "*".join(parts)


IDENTITY = Monomial((0, 0, 0), (0, 0, 0))


def _coeff_str(c):
    if isinstance(c, ExactComplex):
        re, im = str(c.re), str(c.im)
    else:
        c = complex(c)
        re, im = f"{c.real:.12g}", f"{c.imag:.12g}"
    sign = "-" if im.startswith("-") else "+"
    return f"({re}{sign}{im.lstrip('-')}i)"


class OperatorPolynomial:
    """Sparse normal-ordered polynomial: map from Monomial to coefficient.

    Coefficients are ExactComplex (exact layer) or complex (numeric layer);
    arithmetic preserves whichever kind it is handed.  Zero coefficients are
    never stored.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        data = {}
        if terms:
            for mono, c in terms.items():
                if not _is_zero_coeff(c):
                    data[mono] = c
        self.terms = data

    @classmethod
    def _raw(cls, data):
        # internal: data already pruned, ownership transferred
        poly = object.__new__(cls)
        poly.terms = data
        return poly

    @classmethod
    def zero(cls):
        return cls._raw({})

    @classmethod
    def scalar(cls, c):
        if _is_zero_coeff(c):
            return cls.zero()
        return cls._raw({IDENTITY: c})

    @classmethod
    def ladder(cls, k, dagger=False):
        """The bare operator a_k (or a_k+ when dagger), k in 1..3."""
        if not 1 <= k <= N_MODES:
            raise ValueError(f"mode index {k} outside 1..{N_MODES}")
        exps = tuple(1 if i == k - 1 else 0 for i in range(N_MODES))
        zeros = (0, 0, 0)
        mono = Monomial(exps, zeros) if dagger else Monomial(zeros, exps)
        return cls._raw({mono: ExactComplex(1)})

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    @property
    def degree(self):
        return max((m.degree for m in self.terms), default=0)

    def coefficient(self, mono):
        return self.terms.get(mono, 0)

    @property
    def constant(self):
        return self.terms.get(IDENTITY, 0)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, OperatorPolynomial):
            other = OperatorPolynomial.scalar(_as_coeff(other))
        data = dict(self.terms)
        for mono, c in other.terms.items():
            acc = data.get(mono, 0) + c if mono in data else c
            if _is_zero_coeff(acc):
                data.pop(mono, None)
            else:
                data[mono] = acc
        return OperatorPolynomial._raw(data)

    __radd__ = __add__

    def __neg__(self):
        return OperatorPolynomial._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s):
        if _is_zero_coeff(s):
            return OperatorPolynomial.zero()
        data = {}
        for mono, c in self.terms.items():
            sc = c * s
            if not _is_zero_coeff(sc):
                data[mono] = sc
        return OperatorPolynomial._raw(data)

    def __mul__(self, other):
        if isinstance(other, OperatorPolynomial):
            return poly_multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def dag(self):
        return poly_adjoint(self)

    def __eq__(self, other):
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- conversions ---------------------------------------------------------

    def map_coefficients(self, f):
        data = {}
        for mono, c in self.terms.items():
            fc = f(c)
            if not _is_zero_coeff(fc):
                data[mono] = fc
        return OperatorPolynomial._raw(data)

    def to_numeric(self):
        """Demote all coefficients to double-precision complex."""
        return self.map_coefficients(complex)

    @property
    def has_integer_coefficients(self):
        return all(
            isinstance(c, ExactComplex) and c.is_gaussian_integer
            for c in self.terms.values()
        )

    def max_abs_coeff(self):
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)

    # -- rendering -------------------------------------------------------------

    def render(self):
        """Stable text form used by golden tests, e.g. "(-1+0i)*ad2*ad3".

        Terms are sorted by (total degree, dagger exponents, plain exponents);
        exact coefficients print as integers/fractions, numeric ones with 12
        significant digits.
        """
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda m: (m.degree, m.daggers, m.plains))
        parts = []
        for mono in keys:
            c = _coeff_str(self.terms[mono])
            body = mono.render()
            parts.append(f"{c}*{body}" if body else c)
        return " + ".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"OperatorPolynomial<{len(self.terms)} terms: {self.render()}>"


def normal_order_product(left: Monomial, right: Monomial) -> OperatorPolynomial:
    """Normal-ordered expansion of the monomial product left*right.

    Modes commute, so the reordering factorizes mode by mode; per mode the
    contraction sum over j runs to min(n_left, m_right).  Coefficients are
    exact integers.
    """
    data = {}
    _accumulate_product(data, left, right, ExactComplex(1))
    return OperatorPolynomial._raw(data)


def _accumulate_product(data, left, right, coeff):
    """Add coeff * normal_order(left*right) into the dict `data`."""
    ml, nl = left.daggers, left.plains
    mr, nr = right.daggers, right.plains
    ranges = [range(min(nl[k], mr[k]) + 1) for k in range(N_MODES)]
    for j1 in ranges[0]:
        w1 = math.factorial(j1) * math.comb(nl[0], j1) * math.comb(mr[0], j1)
        for j2 in ranges[1]:
            w2 = w1 * math.factorial(j2) * math.comb(nl[1], j2) * math.comb(mr[1], j2)
            for j3 in ranges[2]:
                w = w2 * math.factorial(j3) * math.comb(nl[2], j3) * math.comb(mr[2], j3)
                j = (j1, j2, j3)
                mono = Monomial(
                    tuple(ml[k] + mr[k] - j[k] for k in range(N_MODES)),
                    tuple(nl[k] + nr[k] - j[k] for k in range(N_MODES)),
                )
                acc = data.get(mono, 0) + coeff * w if mono in data else coeff * w
                if _is_zero_coeff(acc):
                    data.pop(mono, None)
                else:
                    data[mono] = acc


def poly_multiply(a: OperatorPolynomial, b: OperatorPolynomial) -> OperatorPolynomial:
    """Bilinear extension of `normal_order_product` to polynomials."""
    data = {}
    for mono_a, ca in a.terms.items():
        for mono_b, cb in b.terms.items():
            _accumulate_product(data, mono_a, mono_b, ca * cb)
    return OperatorPolynomial._raw(data)


def poly_commutator(a: OperatorPolynomial, b: OperatorPolynomial) -> OperatorPolynomial:
    """AB - BA, re-canonicalized."""
    return poly_multiply(a, b) - poly_multiply(b, a)


def poly_adjoint(a: OperatorPolynomial) -> OperatorPolynomial:
    """Hermitian conjugate.  The adjoint of a normal-ordered monomial is the
    monomial with dagger and plain blocks swapped, which is again normal
    ordered, so no rewriting pass is required."""
    return OperatorPolynomial._raw(
        {mono.adjoint(): _conj_coeff(c) for mono, c in a.terms.items()}
    )


def annihilator(k):
    return OperatorPolynomial.ladder(k, dagger=False)


def creator(k):
    return OperatorPolynomial.ladder(k, dagger=True)
