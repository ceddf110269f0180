"""
Coefficient ring shared by every series in the package.

Two coefficient domains exist side by side and are never mixed:

* ``SymCoeff`` -- exact rational combinations of monomials
  ``(iπ)^a (ln ε)^b ζ(s)ζ(s')...``.
* ``NumCoeff`` -- double precision complex numbers.

``coeff_eval`` is the ring homomorphism from the first to the second.
"""

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import sympy

from utils.errors import CoefficientDomainError, InadmissibleIndexError

SYM = "sym"
NUM = "num"

DEFAULT_MZV_TOL = 1e-14


def check_admissible(idx):
    """Return ``idx`` as a tuple, raising if it is not an admissible MZV index."""
    idx = tuple(int(s) for s in idx)
    if not idx or idx[0] < 2 or any(s < 1 for s in idx):
        raise InadmissibleIndexError(f"Inadmissible zeta index {idx}")
    return idx


def mzv_monomial(*indices):
    """Canonical (sorted) multiset of admissible zeta indices."""
    return tuple(sorted(check_admissible(idx) for idx in indices))


def _merge_monomials(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    return tuple(sorted(m1 + m2))


@lru_cache(maxsize=None)
def _zeta_value(idx, tol):
    from utils.mzv import mzv_eval

    return mzv_eval(idx, tol)


@lru_cache(maxsize=None)
def _even_zeta_ratio(k):
    """Rational r with ζ(2k) = r·π^{2k}."""
    ratio = sympy.nsimplify(sympy.zeta(2 * k) / sympy.pi ** (2 * k))
    return Fraction(int(ratio.p), int(ratio.q))


class SymCoeff:
    """Exact coefficient: map (ipi power, ln ε power, MZV monomial) -> Fraction."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for key, value in (terms or {}).items():
            value = Fraction(value)
            if value:
                clean[key] = value
        self.terms = clean

    # ----- constructors -----

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def rational(cls, q):
        return cls({(0, 0, ()): Fraction(q)})

    @classmethod
    def one(cls):
        return cls.rational(1)

    @classmethod
    def monomial(cls, ipi=0, lneps=0, zetas=(), coeff=1):
        return cls({(int(ipi), int(lneps), mzv_monomial(*zetas)): Fraction(coeff)})

    @classmethod
    def ipi(cls, power=1):
        return cls.monomial(ipi=power)

    @classmethod
    def lneps(cls, power=1):
        return cls.monomial(lneps=power)

    @classmethod
    def zeta(cls, *idx):
        return cls.monomial(zetas=(idx,))

    # ----- ring structure -----

    def _coerce(self, other):
        if isinstance(other, SymCoeff):
            return other
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            return SymCoeff.rational(other)
        if isinstance(other, NumCoeff) or isinstance(other, (float, complex)):
            raise CoefficientDomainError(
                "Cannot combine a symbolic coefficient with a numeric value"
            )
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for key, value in other.terms.items():
            terms[key] = terms.get(key, 0) + value
        return SymCoeff(terms)

    __radd__ = __add__

    def __neg__(self):
        return SymCoeff({key: -value for key, value in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = {}
        for (a1, b1, m1), q1 in self.terms.items():
            for (a2, b2, m2), q2 in other.terms.items():
                key = (a1 + a2, b1 + b2, _merge_monomials(m1, m2))
                terms[key] = terms.get(key, 0) + q1 * q2
        return SymCoeff(terms)

    __rmul__ = __mul__

    def scale(self, q):
        q = Fraction(q)
        if not q:
            return SymCoeff()
        return SymCoeff({key: value * q for key, value in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, SymCoeff):
            return self.terms == other.terms
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            return self.terms == SymCoeff.rational(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # ----- inspection -----

    def lneps_degree(self):
        return max((b for (_, b, _) in self.terms), default=0)

    def sorted_items(self):
        return sorted(self.terms.items())

    def evaluate(self, eps, mzv_tol=DEFAULT_MZV_TOL):
        return coeff_eval(self, eps, mzv_tol)

    def to_json(self):
        return [
            {
                "ipi": a,
                "lneps": b,
                "zetas": [list(idx) for idx in m],
                "coeff": f"{q.numerator}/{q.denominator}",
            }
            for (a, b, m), q in self.sorted_items()
        ]

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b, m), q in self.sorted_items():
            factors = [] if q == 1 else [str(q)]
            if a:
                factors.append("(iπ)" + (f"^{a}" if a > 1 else ""))
            if b:
                factors.append("(lnε)" + (f"^{b}" if b > 1 else ""))
            factors.extend("ζ(" + ",".join(map(str, idx)) + ")" for idx in m)
            parts.append("·".join(factors) or "1")
        return " + ".join(parts)


class NumCoeff:
    """Finite double precision complex coefficient."""

    __slots__ = ("value",)

    def __init__(self, value):
        value = complex(value)
        if not cmath.isfinite(value):
            raise ValueError(f"Non-finite coefficient {value}")
        self.value = value

    @classmethod
    def zero(cls):
        return cls(0)

    @classmethod
    def one(cls):
        return cls(1)

    def _coerce(self, other):
        if isinstance(other, NumCoeff):
            return other.value
        if isinstance(other, SymCoeff):
            raise CoefficientDomainError(
                "Cannot combine a numeric coefficient with a symbolic value"
            )
        if isinstance(other, (int, float, complex, Rational)):
            return complex(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return NumCoeff(self.value + other)

    __radd__ = __add__

    def __neg__(self):
        return NumCoeff(-self.value)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return NumCoeff(self.value - other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return NumCoeff(other - self.value)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return NumCoeff(self.value * other)

    __rmul__ = __mul__

    def scale(self, q):
        return NumCoeff(self.value * complex(q))

    def is_zero(self):
        return self.value == 0

    def __bool__(self):
        return self.value != 0

    def __eq__(self, other):
        if isinstance(other, NumCoeff):
            return self.value == other.value
        if isinstance(other, (int, float, complex)):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __complex__(self):
        return self.value

    def __abs__(self):
        return abs(self.value)

    def to_json(self):
        return {"re": self.value.real, "im": self.value.imag}

    def __repr__(self):
        return f"NumCoeff({self.value!r})"


def domain_of(c):
    if isinstance(c, SymCoeff):
        return SYM
    if isinstance(c, NumCoeff):
        return NUM
    raise CoefficientDomainError(f"Not a coefficient: {c!r}")


def coerce(value, domain):
    """Lift a plain number (or check a coefficient) into ``domain``."""
    if isinstance(value, (SymCoeff, NumCoeff)):
        if domain_of(value) != domain:
            raise CoefficientDomainError(
                f"Coefficient of domain '{domain_of(value)}' used in a '{domain}' series"
            )
        return value
    if domain == SYM:
        if isinstance(value, (int, Rational)) and not isinstance(value, bool):
            return SymCoeff.rational(value)
        raise CoefficientDomainError(
            f"Inexact value {value!r} cannot enter a symbolic series"
        )
    return NumCoeff(value)


def coeff_zero(domain):
    return SymCoeff() if domain == SYM else NumCoeff(0)


def coeff_one(domain):
    return SymCoeff.one() if domain == SYM else NumCoeff(1)


def coeff_arith(a, b, op):
    """Explicit coefficient arithmetic: ``op`` is ``add``, ``mul`` or ``scale``."""
    match op:
        case "add":
            if domain_of(a) != domain_of(b):
                raise CoefficientDomainError("Coefficient domains differ")
            return a + b
        case "mul":
            if domain_of(a) != domain_of(b):
                raise CoefficientDomainError("Coefficient domains differ")
            return a * b
        case "scale":
            return a.scale(b)
        case _:
            raise ValueError(f"Unknown coefficient operation '{op}'")


def coeff_eval(c, eps, mzv_tol=DEFAULT_MZV_TOL):
    """Substitute iπ, ln ε and every ζ(...) to obtain a NumCoeff."""
    if isinstance(c, NumCoeff):
        return c
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if mzv_tol <= 0:
        raise ValueError("mzv_tol must be positive")
    lneps = math.log(eps)
    total = 0j
    for (a, b, m), q in c.terms.items():
        value = complex(q.numerator / q.denominator) * (1j * math.pi) ** a * lneps**b
        for idx in m:
            value *= _zeta_value(check_admissible(idx), mzv_tol)
        total += value
    return NumCoeff(total)


def reduce_even_zetas(c):
    """Rewrite each ζ(2k) factor as its rational multiple of (iπ)^{2k}."""
    terms = {}
    for (a, b, m), q in c.terms.items():
        kept = []
        for idx in m:
            if len(idx) == 1 and idx[0] % 2 == 0:
                k = idx[0] // 2
                q = q * _even_zeta_ratio(k) * (-1) ** k
                a += 2 * k
            else:
                kept.append(idx)
        key = (a, b, tuple(kept))
        terms[key] = terms.get(key, 0) + q
    return SymCoeff(terms)


def numeric_by_lneps(c, mzv_tol=DEFAULT_MZV_TOL):
    """Evaluate everything except ln ε: map lneps power -> complex value."""
    if isinstance(c, NumCoeff):
        return {0: c.value}
    parts = {}
    for (a, b, m), q in c.terms.items():
        value = complex(q.numerator / q.denominator) * (1j * math.pi) ** a
        for idx in m:
            value *= _zeta_value(check_admissible(idx), mzv_tol)
        parts[b] = parts.get(b, 0j) + value
    return parts


def residual_magnitude(c, mzv_tol=DEFAULT_MZV_TOL):
    """Zero test used by every identity check.

    Returns ``(exact, magnitude)``: ``exact`` is True when ``c`` vanishes
    symbolically, possibly after even-zeta reduction; otherwise the
    magnitude is the largest modulus of the numerically evaluated
    coefficient of any power of ln ε.
    """
    if isinstance(c, NumCoeff):
        return c.value == 0, abs(c.value)
    if c.is_zero():
        return True, 0.0
    reduced = reduce_even_zetas(c)
    if reduced.is_zero():
        return True, 0.0
    parts = numeric_by_lneps(reduced, mzv_tol)
    return False, max(abs(v) for v in parts.values())
