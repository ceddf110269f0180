"""
Truncated free model of the second Drinfeld–Kohno differential crossed module.

Degree 0 is the free algebra on ``t12, t13, t23`` (``AlgebraSeries``),
degree −1 the free bimodule on the four-term relationators ``𝓛, 𝓡``
(``BimoduleSeries``). Words are tuples of letter indices; a bimodule word
is ``(left, letter, right)``.

Grading: each t has ℏ-grade 1, 𝓛 and 𝓡 have ℏ-grade 2, so the
coboundary ``∂𝓛 = [t12, t13+t23]`` preserves grade.
"""

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from itertools import product
from math import comb, factorial

import numpy as np

from utils.coeffring import (
    NUM,
    SYM,
    NumCoeff,
    SymCoeff,
    coeff_eval,
    coeff_one,
    coerce,
    numeric_by_lneps,
    residual_magnitude,
)
from utils.errors import CoefficientDomainError, ConstantTermError, OrderMismatchError

MOD_GRADE = 2


class Generator(IntEnum):
    T12 = 0
    T13 = 1
    T23 = 2


class ModLetter(IntEnum):
    L = 0
    R = 1


@dataclass(frozen=True)
class Alphabet:
    name: str
    letters: tuple

    @property
    def size(self):
        return len(self.letters)

    def render(self, word):
        return ".".join(self.letters[i] for i in word) if word else "1"

    def parse(self, text):
        text = text.strip()
        if text in ("", "1"):
            return ()
        return tuple(self.letters.index(part) for part in text.split("."))


DK2 = Alphabet("dk2", ("t12", "t13", "t23"))
TWO_LETTER = Alphabet("two-letter", ("A", "B"))
MOD_NAMES = ("L", "R")

# Labels of t_ij by the unordered pair {i, j}.
PAIR_OF = {Generator.T12: (1, 2), Generator.T13: (1, 3), Generator.T23: (2, 3)}
GENERATOR_OF = {pair: g for g, pair in PAIR_OF.items()}

# ∂𝓛 = [t12, t13+t23], ∂𝓡 = [t23, t12+t13] as signed two-letter words.
BOUNDARY = {
    ModLetter.L: (((0, 1), 1), ((0, 2), 1), ((1, 0), -1), ((2, 0), -1)),
    ModLetter.R: (((2, 0), 1), ((2, 1), 1), ((0, 2), -1), ((1, 2), -1)),
}

# D(t12) = −𝓛, D(t13) = 𝓛+𝓡, D(t23) = −𝓡, so that ∂D(w) = [Λ, w].
DERIVATION = {
    Generator.T12: ((ModLetter.L, -1),),
    Generator.T13: ((ModLetter.L, 1), (ModLetter.R, 1)),
    Generator.T23: ((ModLetter.R, -1),),
}

# Images of 𝓛 and 𝓡 under the coherent relabelling, keyed by the one-line
# notation "ijk" for 1 ↦ i, 2 ↦ j, 3 ↦ k.
_MINUS_SUM = ((ModLetter.L, -1), (ModLetter.R, -1))
MOD_IMAGES = {
    "123": (((ModLetter.L, 1),), ((ModLetter.R, 1),)),
    "213": (((ModLetter.L, 1),), _MINUS_SUM),
    "132": (_MINUS_SUM, ((ModLetter.R, 1),)),
    "321": (((ModLetter.R, 1),), ((ModLetter.L, 1),)),
    "231": (((ModLetter.R, 1),), _MINUS_SUM),
    "312": (_MINUS_SUM, ((ModLetter.L, 1),)),
}
LABELS = tuple(MOD_IMAGES)


def _is_scalar(value):
    return isinstance(value, (int, float, complex, Fraction, SymCoeff, NumCoeff)) and (
        not isinstance(value, bool)
    )


class _Series:
    """Shared storage and linear structure of the two series kinds."""

    __slots__ = ("terms", "order", "alphabet", "domain")

    def __init__(self, terms=None, order=2, alphabet=DK2, domain=SYM):
        self.order = int(order)
        self.alphabet = alphabet
        self.domain = domain
        clean = {}
        for key, value in (terms or {}).items():
            if self.grade_of(key) > self.order:
                continue
            value = coerce(value, domain)
            if not value.is_zero():
                clean[key] = value
        self.terms = clean

    # ----- helpers -----

    @staticmethod
    def grade_of(key):
        raise NotImplementedError

    def _new(self, terms, order=None):
        return type(self)(
            terms, self.order if order is None else order, self.alphabet, self.domain
        )

    def _check_pair(self, other):
        if self.order != other.order:
            raise OrderMismatchError(
                f"Truncation orders differ: {self.order} vs {other.order}"
            )
        if self.domain != other.domain:
            raise CoefficientDomainError(
                f"Coefficient domains differ: {self.domain} vs {other.domain}"
            )
        if self.alphabet != other.alphabet:
            raise ValueError(
                f"Alphabets differ: {self.alphabet.name} vs {other.alphabet.name}"
            )

    def zero_like(self):
        return self._new({})

    # ----- linear structure -----

    def __add__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        self._check_pair(other)
        terms = dict(self.terms)
        for key, value in other.terms.items():
            terms[key] = terms[key] + value if key in terms else value
        return self._new(terms)

    def __neg__(self):
        return self._new({key: -value for key, value in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return self + (-other)

    def scale(self, c):
        c = coerce(c, self.domain)
        return self._new({key: value * c for key, value in self.terms.items()})

    def __rmul__(self, other):
        if _is_scalar(other):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, int):
            return self.scale(Fraction(1, other))
        if self.domain == NUM and _is_scalar(other):
            return self.scale(1 / complex(other))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return (
            self.order == other.order
            and self.domain == other.domain
            and self.alphabet == other.alphabet
            and self.terms == other.terms
        )

    __hash__ = None

    def is_zero(self):
        return not self.terms

    def grades(self):
        return sorted({self.grade_of(key) for key in self.terms})

    def extract_order(self, k):
        if k > self.order:
            raise ValueError(f"Grade {k} exceeds truncation order {self.order}")
        return self._new({key: v for key, v in self.terms.items() if self.grade_of(key) == k})

    def truncate(self, order):
        if order > self.order:
            raise OrderMismatchError(f"Cannot raise truncation from {self.order} to {order}")
        return self._new(self.terms, order)

    def with_order(self, order):
        """Reinterpret the stored terms at another truncation order."""
        return self._new(self.terms, order)

    def coeff(self, key):
        if isinstance(key, str):
            key = self.parse_key(key)
        return self.terms.get(key, coerce(0, self.domain))

    __getitem__ = coeff

    def evaluate(self, eps, mzv_tol=1e-14):
        """Numeric copy with every symbolic coefficient evaluated at ε."""
        if self.domain == NUM:
            return self
        return type(self)(
            {key: coeff_eval(v, eps, mzv_tol) for key, v in self.terms.items()},
            self.order,
            self.alphabet,
            NUM,
        )

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kv: (self.grade_of(kv[0]), kv[0]))

    def __repr__(self):
        if not self.terms:
            return f"{type(self).__name__}(0, order={self.order})"
        body = " + ".join(
            f"({value})·{self.render_key(key)}" for key, value in self.sorted_items()
        )
        return f"{type(self).__name__}({body}, order={self.order})"


class AlgebraSeries(_Series):
    """Truncated noncommutative series in words over an alphabet."""

    __slots__ = ()

    @staticmethod
    def grade_of(key):
        return len(key)

    def render_key(self, key):
        return self.alphabet.render(key)

    def parse_key(self, text):
        return self.alphabet.parse(text)

    @classmethod
    def one(cls, order, alphabet=DK2, domain=SYM):
        return cls({(): coeff_one(domain)}, order, alphabet, domain)

    @classmethod
    def zero(cls, order, alphabet=DK2, domain=SYM):
        return cls({}, order, alphabet, domain)

    @classmethod
    def letter(cls, index, order, alphabet=DK2, domain=SYM, coeff=1):
        return cls({(int(index),): coeff}, order, alphabet, domain)

    def constant_term(self):
        return self.terms.get((), coerce(0, self.domain))

    def __mul__(self, other):
        if isinstance(other, AlgebraSeries):
            return series_mul(self, other)
        if isinstance(other, BimoduleSeries):
            return bimodule_act(self, other, "left")
        if _is_scalar(other):
            return self.scale(other)
        return NotImplemented

    def __add__(self, other):
        if _is_scalar(other):
            other = AlgebraSeries.one(self.order, self.alphabet, self.domain).scale(other)
        return super().__add__(other)

    __radd__ = __add__

    def __sub__(self, other):
        if _is_scalar(other):
            other = AlgebraSeries.one(self.order, self.alphabet, self.domain).scale(other)
        return super().__sub__(other)

    def __rsub__(self, other):
        return (-self) + other

    def __pow__(self, n):
        return series_pow(self, n)

    def to_json(self):
        return {
            "order": self.order,
            "alphabet": self.alphabet.name,
            "domain": self.domain,
            "terms": [
                {"word": self.render_key(key), "coeff": value.to_json()}
                for key, value in self.sorted_items()
            ],
            "modterms": [],
        }


class BimoduleSeries(_Series):
    """Truncated series in bimodule words ``left · X · right``, X ∈ {𝓛, 𝓡}."""

    __slots__ = ()

    @staticmethod
    def grade_of(key):
        return MOD_GRADE + len(key[0]) + len(key[2])

    def render_key(self, key):
        left, letter, right = key
        parts = [self.alphabet.letters[i] for i in left]
        parts.append(MOD_NAMES[letter])
        parts.extend(self.alphabet.letters[i] for i in right)
        return ".".join(parts)

    def parse_key(self, text):
        parts = text.strip().split(".")
        position = next(i for i, part in enumerate(parts) if part in MOD_NAMES)
        left = tuple(self.alphabet.letters.index(p) for p in parts[:position])
        right = tuple(self.alphabet.letters.index(p) for p in parts[position + 1 :])
        return (left, MOD_NAMES.index(parts[position]), right)

    @classmethod
    def zero(cls, order, alphabet=DK2, domain=SYM):
        return cls({}, order, alphabet, domain)

    @classmethod
    def letter(cls, letter, order, domain=SYM, coeff=1):
        return cls({((), int(letter), ()): coeff}, order, DK2, domain)

    def __mul__(self, other):
        if isinstance(other, AlgebraSeries):
            return bimodule_act(other, self, "right")
        if _is_scalar(other):
            return self.scale(other)
        return NotImplemented

    def to_json(self):
        return {
            "order": self.order,
            "alphabet": self.alphabet.name,
            "domain": self.domain,
            "terms": [],
            "modterms": [
                {
                    "left": self.alphabet.render(key[0]),
                    "letter": MOD_NAMES[key[1]],
                    "right": self.alphabet.render(key[2]),
                    "coeff": value.to_json(),
                }
                for key, value in self.sorted_items()
            ],
        }


# ----- named elements -----


def _combination(pairs, order, domain):
    return AlgebraSeries({(int(g),): c for g, c in pairs}, order, DK2, domain)


def symbol(name, order, domain=SYM):
    """Named degree-0 elements: t's, Λ and the barred/strict combinations."""
    T12, T13, T23 = Generator.T12, Generator.T13, Generator.T23
    match name:
        case "t12":
            pairs = ((T12, 1),)
        case "t13":
            pairs = ((T13, 1),)
        case "t23":
            pairs = ((T23, 1),)
        case "Lambda" | "Λ":
            pairs = ((T12, 1), (T13, 1), (T23, 1))
        case "t13bar":
            pairs = ((T12, -1), (T23, -1))
        case "t12bar":
            pairs = ((T13, -1), (T23, -1))
        case "t(12)3":
            pairs = ((T13, 1), (T23, 1))
        case "t1(23)":
            pairs = ((T12, 1), (T13, 1))
        case "t(12)3bar":
            pairs = ((T12, -1),)
        case _:
            raise ValueError(f"Unknown symbol '{name}'")
    return _combination(pairs, order, domain)


def mod_symbol(name, order, domain=SYM):
    """𝓛, 𝓡 or 𝓛+𝓡 as bimodule series."""
    match name:
        case "L":
            pairs = ((ModLetter.L, 1),)
        case "R":
            pairs = ((ModLetter.R, 1),)
        case "L+R":
            pairs = ((ModLetter.L, 1), (ModLetter.R, 1))
        case _:
            raise ValueError(f"Unknown relationator '{name}'")
    return BimoduleSeries({((), int(x), ()): c for x, c in pairs}, order, DK2, domain)


# ----- products -----


def _by_grade(series):
    groups = {}
    for key, value in series.terms.items():
        groups.setdefault(series.grade_of(key), []).append((key, value))
    return groups


def series_mul(a, b):
    """Concatenation product with truncation at the common order."""
    a._check_pair(b)
    order = a.order
    right = _by_grade(b)
    out = {}
    for wa, ca in a.terms.items():
        for length in range(order - len(wa) + 1):
            for wb, cb in right.get(length, ()):
                key = wa + wb
                value = ca * cb
                out[key] = out[key] + value if key in out else value
    return a._new(out)


def series_pow(a, n):
    if n < 0:
        raise ValueError("Negative powers need series_inverse")
    result = AlgebraSeries.one(a.order, a.alphabet, a.domain)
    for _ in range(n):
        result = series_mul(result, a)
    return result


def series_exp(a):
    """exp(a) = Σ_{k≤N} a^k / k!; ``a`` must have zero constant term."""
    if not a.constant_term().is_zero():
        raise ConstantTermError("series_exp needs a series with zero constant term")
    result = AlgebraSeries.one(a.order, a.alphabet, a.domain)
    power = result
    for k in range(1, a.order + 1):
        power = series_mul(power, a)
        if power.is_zero():
            break
        result = result + power.scale(Fraction(1, factorial(k)))
    return result


def series_inverse(a):
    """Inverse of a series with unit constant term (geometric series)."""
    one = AlgebraSeries.one(a.order, a.alphabet, a.domain)
    if a.constant_term() != one.constant_term():
        raise ConstantTermError("series_inverse needs constant term exactly 1")
    x = one - a
    result = one
    power = one
    for _ in range(a.order):
        power = series_mul(power, x)
        if power.is_zero():
            break
        result = result + power
    return result


def series_conjugate(g, x):
    """g·x·g⁻¹ for x in either degree."""
    return g * x * series_inverse(g)


def commutator(a, b):
    return series_mul(a, b) - series_mul(b, a)


def bimodule_act(a, m, side):
    """Whiskering: ``a·m`` (left) or ``m·a`` (right)."""
    a._check_pair(m)
    order = m.order
    out = {}
    match side:
        case "left":
            for wa, ca in a.terms.items():
                for (left, x, right), cm in m.terms.items():
                    if MOD_GRADE + len(wa) + len(left) + len(right) > order:
                        continue
                    key = (wa + left, x, right)
                    value = ca * cm
                    out[key] = out[key] + value if key in out else value
        case "right":
            for (left, x, right), cm in m.terms.items():
                for wa, ca in a.terms.items():
                    if MOD_GRADE + len(wa) + len(left) + len(right) > order:
                        continue
                    key = (left, x, right + wa)
                    value = cm * ca
                    out[key] = out[key] + value if key in out else value
        case _:
            raise ValueError(f"Unknown side '{side}'")
    return m._new(out)


def triangle_act(a, m):
    """a ▷ m = a·m − m·a."""
    return bimodule_act(a, m, "left") - bimodule_act(a, m, "right")


def coboundary(m):
    """∂ on bimodule series: 𝓛 ↦ [t12, t13+t23], 𝓡 ↦ [t23, t12+t13]."""
    if m.alphabet != DK2:
        raise ValueError("The coboundary is defined on the DK2 alphabet only")
    out = {}
    for (left, x, right), value in m.terms.items():
        for pair, sign in BOUNDARY[ModLetter(x)]:
            key = left + pair + right
            term = value.scale(sign)
            out[key] = out[key] + term if key in out else term
    return AlgebraSeries(out, m.order, DK2, m.domain)


def derivation_D(a):
    """Degree −1 derivation with ∂D(w) = [Λ, w] (grade raised by one)."""
    if a.alphabet != DK2:
        raise ValueError("The derivation D is defined on the DK2 alphabet only")
    out = {}
    for word, value in a.terms.items():
        for i, g in enumerate(word):
            for x, sign in DERIVATION[Generator(g)]:
                key = (word[:i], int(x), word[i + 1 :])
                term = value.scale(sign)
                out[key] = out[key] + term if key in out else term
    return BimoduleSeries(out, a.order, DK2, a.domain)


# ----- relabelling -----


def normalize_label(sigma):
    """Accept ``"213"``, ``(2, 1, 3)`` or ``[2, 1, 3]``; return ``"213"``."""
    label = "".join(str(int(i)) for i in sigma) if not isinstance(sigma, str) else sigma
    label = label.strip()
    if label not in MOD_IMAGES:
        raise ValueError(f"Not a permutation label of {{1,2,3}}: {sigma!r}")
    return label


def compose_labels(first, then):
    """Label of "apply ``first`` then ``then``" for :func:`permute_labels`."""
    first, then = normalize_label(first), normalize_label(then)
    return "".join(then[int(first[a]) - 1] for a in range(3))


def _permute_word(word, label):
    out = []
    for g in word:
        i, j = PAIR_OF[Generator(g)]
        si, sj = int(label[i - 1]), int(label[j - 1])
        out.append(int(GENERATOR_OF[(min(si, sj), max(si, sj))]))
    return tuple(out)


def permute_labels(x, sigma):
    """Coherent relabelling t_ij ↦ t_{σ(i)σ(j)} with the matching 𝓛/𝓡 images."""
    label = normalize_label(sigma)
    if x.alphabet != DK2:
        raise ValueError("Relabelling is defined on the DK2 alphabet only")
    if isinstance(x, AlgebraSeries):
        out = {}
        for word, value in x.terms.items():
            key = _permute_word(word, label)
            out[key] = out[key] + value if key in out else value
        return x._new(out)
    out = {}
    for (left, letter, right), value in x.terms.items():
        new_left, new_right = _permute_word(left, label), _permute_word(right, label)
        for image, sign in MOD_IMAGES[label][letter]:
            key = (new_left, int(image), new_right)
            term = value.scale(sign)
            out[key] = out[key] + term if key in out else term
    return x._new(out)


# ----- combinatorial expansions -----


def noncomm_binomial_expand(A, B, n, form="easy"):
    """(A+B)^n in the direct, "easy" or "hard" expanded form."""
    if n > A.order:
        raise ValueError(f"n = {n} exceeds truncation order {A.order}")
    S = A + B
    match form:
        case "direct":
            return series_pow(S, n)
        case "easy":
            result = series_pow(A, n)
            for m in range(n):
                result = result + series_pow(S, n - 1 - m) * B * series_pow(A, m)
            return result
        case "hard":
            result = A.zero_like()
            for p in range(n + 1):
                result = result + (series_pow(A, n - p) * series_pow(B, p)).scale(comb(n, p))
            for j in range(1, n):
                for k in range(n - j):
                    bracket = commutator(B, series_pow(A, n - j - k))
                    term = series_pow(S, j - 1) * bracket * series_pow(B, k)
                    result = result + term.scale(comb(n - j, k))
            return result
        case _:
            raise ValueError(f"Unknown expansion form '{form}'")


def ad_power(B, A, q, form="iterate"):
    """ad_B^q(A), iterated or by the closed binomial formula."""
    match form:
        case "iterate":
            result = A
            for _ in range(q):
                result = commutator(B, result)
            return result
        case "closed":
            result = A.zero_like()
            for k in range(q + 1):
                term = series_pow(B, q - k) * A * series_pow(B, k)
                result = result + term.scale(comb(q, k) * (-1) ** k)
            return result
        case _:
            raise ValueError(f"Unknown ad form '{form}'")


def extract_order(x, k):
    return x.extract_order(k)


# ----- residuals -----


def grade_residuals(x, mzv_tol=1e-14):
    """Per grade: (exact, largest coefficient magnitude) of ``x``."""
    report = {}
    for key, value in x.terms.items():
        grade = x.grade_of(key)
        exact, magnitude = residual_magnitude(value, mzv_tol)
        old_exact, old_magnitude = report.get(grade, (True, 0.0))
        report[grade] = (old_exact and exact, max(old_magnitude, magnitude))
    return report


def interchange_relators(grade):
    """Relators w₁X w₂ ∂Y w₃ − w₁ ∂X w₂ Y w₃ of the given total grade."""
    free = grade - 2 * MOD_GRADE
    if free < 0:
        return []
    relators = []
    for X in ModLetter:
        for Y in ModLetter:
            for n1 in range(free + 1):
                for n2 in range(free + 1 - n1):
                    n3 = free - n1 - n2
                    for w1 in product(range(3), repeat=n1):
                        for w2 in product(range(3), repeat=n2):
                            for w3 in product(range(3), repeat=n3):
                                relator = {}
                                for pair, sign in BOUNDARY[Y]:
                                    key = (w1, int(X), w2 + pair + w3)
                                    relator[key] = relator.get(key, 0) + sign
                                for pair, sign in BOUNDARY[X]:
                                    key = (w1 + pair + w2, int(Y), w3)
                                    relator[key] = relator.get(key, 0) - sign
                                relators.append(relator)
    return relators


def residual_mod_interchange(m, mzv_tol=1e-14):
    """Distance of each grade of ``m`` from the span of interchange relators.

    In the crossed module ``Ξ·∂Θ = ∂Ξ·Θ`` holds, while the free bimodule
    keeps both sides apart. Coefficients are evaluated numerically (each
    power of ln ε separately) and projected by least squares.
    """
    report = {}
    by_grade = _by_grade(m)
    for grade, items in sorted(by_grade.items()):
        relators = interchange_relators(grade)
        keys = sorted({key for key, _ in items} | {k for r in relators for k in r})
        index = {key: i for i, key in enumerate(keys)}
        vectors = {}
        for key, value in items:
            for power, number in numeric_by_lneps(value, mzv_tol).items():
                vectors.setdefault(power, np.zeros(len(keys), dtype=complex))
                vectors[power][index[key]] += number
        worst = 0.0
        if relators:
            matrix = np.zeros((len(keys), len(relators)))
            for column, relator in enumerate(relators):
                for key, sign in relator.items():
                    matrix[index[key], column] = sign
        for vector in vectors.values():
            if relators:
                solution, *_ = np.linalg.lstsq(matrix, vector, rcond=None)
                vector = vector - matrix @ solution
            worst = max(worst, float(np.max(np.abs(vector))) if vector.size else 0.0)
        report[grade] = worst
    return report


# ----- combinatorial identities -----


def random_series(rng, order, alphabet=TWO_LETTER, grades=(1, 2), span=5):
    """Series with small random integer coefficients in the given grades."""
    terms = {}
    for grade in grades:
        for word in product(range(len(alphabet.letters)), repeat=grade):
            value = int(rng.integers(-span, span + 1))
            if value:
                terms[word] = value
    return AlgebraSeries(terms, order, alphabet, SYM)


def combinatorial_check(max_power=6, seed=0):
    """Binomial expansions and closed ad-powers against direct products.

    Every comparison is exact; the report lists the failing (form, power)
    pairs, if any.
    """
    rng = np.random.default_rng(seed)
    A = random_series(rng, max_power)
    B = random_series(rng, max_power)
    failures = []
    for n in range(max_power + 1):
        direct = noncomm_binomial_expand(A, B, n, "direct")
        for form in ("easy", "hard"):
            if noncomm_binomial_expand(A, B, n, form) != direct:
                failures.append(f"binomial {form} n={n}")
    for q in range(max_power + 1):
        if ad_power(B, A, q, "closed") != ad_power(B, A, q, "iterate"):
            failures.append(f"ad_power q={q}")
    return {
        "name": "combinatorial lemmas",
        "max_power": max_power,
        "seed": seed,
        "failures": failures,
        "pass": not failures,
    }
