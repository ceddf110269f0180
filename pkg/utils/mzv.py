"""
Multiple zeta values, single-variable multiple polylogarithms and
iterated integrals of 1-forms on a real interval.

Conventions
-----------
``ζ(s₁,…,s_k) = Σ_{n₁>…>n_k≥1} Π n_i^{-s_i}`` and
``Li_{s₁,…,s_k}(z) = Σ_{n₁>…>n_k≥1} z^{n₁} / Π n_i^{s_i}``.

Iterated integrals are defined inductively with the first form outermost::

    ∫_a^b ω₁ω₂⋯ω_n = ∫_a^b f₁(s) (∫_a^s ω₂⋯ω_n) ds

so that ``∫₀¹ Ω₀Ω₁ = −ζ(2)`` with ``Ω₀ = ds/s`` and ``Ω₁ = ds/(s−1)``.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import expit

from utils.coeffring import check_admissible
from utils.core import debug_print
from utils.errors import ConvergenceDomainError, PunctureError, QuadratureError

MAX_SUM_TERMS = 1 << 22
HALF = 0.5


@dataclass(frozen=True)
class FormSpec:
    """A 1-form f(s)ds on the real line.

    ``logit_func`` optionally gives f(s)·ds/dx in the coordinate
    ``s = expit(2x)`` as a function of ``(s, 1 − s)``, which keeps the
    integrand finite when the integration runs up to a singular endpoint.
    """

    name: str
    func: Callable
    singularities: tuple = ()
    logit_func: Callable = field(default=None, compare=False)

    @classmethod
    def from_callable(cls, func, singularities=(), name="custom"):
        return cls(name, func, tuple(singularities))

    def in_logit(self, s, one_minus_s):
        if self.logit_func is not None:
            return self.logit_func(s, one_minus_s)
        return self.func(s) * 2.0 * s * one_minus_s


OMEGA0 = FormSpec(
    "Ω0", lambda s: 1.0 / s, (0.0,), lambda s, one_minus_s: 2.0 * one_minus_s
)
OMEGA1 = FormSpec(
    "Ω1", lambda s: 1.0 / (s - 1.0), (1.0,), lambda s, one_minus_s: -2.0 * s
)


# ----- words and indices -----


def index_to_word(idx):
    """Letters 0/1 of ``ω₀^{s₁−1}ω₁ ⋯ ω₀^{s_k−1}ω₁``."""
    word = []
    for s in idx:
        word.extend([0] * (int(s) - 1))
        word.append(1)
    return tuple(word)


def word_to_index(word):
    """Inverse of :func:`index_to_word`; the word must end with the letter 1."""
    if not word or word[-1] != 1:
        raise ValueError(f"Word {word} does not end with ω₁")
    idx, run = [], 0
    for letter in word:
        if letter == 0:
            run += 1
        else:
            idx.append(run + 1)
            run = 0
    return tuple(idx)


def regularized_omega_word(idx):
    """Ω-word of an admissible index together with its sign (−1)^k."""
    idx = check_admissible(idx)
    forms = tuple(OMEGA1 if letter else OMEGA0 for letter in index_to_word(idx))
    return forms, (-1) ** len(idx)


# ----- nested sums -----


def _nested_terms(idx, count):
    """Array a_n, n = 1..count, with Li_idx(z) = Σ z^n a_n."""
    n = np.arange(1, count + 1, dtype=float)
    acc = n ** (-float(idx[-1]))
    for s in reversed(idx[:-1]):
        shifted = np.concatenate(([0.0], np.cumsum(acc)[:-1]))
        acc = n ** (-float(s)) * shifted
    return acc


def _tail_envelope(idx, count):
    """Upper bound for a_n at n ≥ count (inner sums bounded by harmonic numbers)."""
    return count ** (-float(idx[0])) * (1.0 + math.log(count)) ** (len(idx) - 1)


def _sum_to_tolerance(idx, z, tol):
    modulus = abs(z)
    count = 64
    while True:
        envelope = _tail_envelope(idx, count)
        if modulus < 1:
            bound = envelope * modulus**count / (1.0 - modulus)
        else:
            bound = 2.0 * envelope / abs(1.0 - z)
        if bound < tol:
            break
        if count >= MAX_SUM_TERMS:
            raise QuadratureError(
                f"Nested sum for {idx} at z={z} cannot reach tol={tol} "
                f"within {MAX_SUM_TERMS} terms"
            )
        count *= 2
    terms = _nested_terms(idx, count)
    powers = np.power(complex(z), np.arange(1, count + 1))
    debug_print(f"Nested sum {idx} at z={z}: {count} terms, tail ≤ {bound:.2e}")
    return complex(np.sum(terms * powers))


@lru_cache(maxsize=None)
def _li_half(idx, tol):
    if not idx:
        return 1.0
    return _sum_to_tolerance(idx, HALF, tol).real


def mzv_eval(idx, tol=1e-12):
    """Multiple zeta value ζ(idx).

    The defining sum converges too slowly to truncate directly, so the
    integral over [0,1] is split at 1/2: the upper half maps to the lower
    half of the dual word under s ↦ 1 − s, and every piece becomes a
    multiple polylogarithm at 1/2 with geometric tail bound.

    Raises
    ------
    InadmissibleIndexError
        If ``idx`` is empty or starts with an entry below 2.
    """
    idx = check_admissible(idx)
    word = index_to_word(idx)
    weight = len(word)
    piece_tol = tol / (4.0 * (weight + 1))
    total = 0.0
    for j in range(weight + 1):
        dual = tuple(1 - letter for letter in reversed(word[:j]))
        left = _li_half(word_to_index(dual), piece_tol) if dual else 1.0
        rest = word[j:]
        right = _li_half(word_to_index(rest), piece_tol) if rest else 1.0
        total += left * right
    return float(total)


def polylog_eval(idx, z, tol=1e-12):
    """Single-variable multiple polylogarithm Li_idx(z) for |z| ≤ 1."""
    idx = tuple(int(s) for s in idx)
    if not idx or any(s < 1 for s in idx):
        raise ValueError(f"Polylogarithm index must be positive integers, got {idx}")
    z = complex(z)
    if abs(z) > 1 + 1e-15:
        raise ConvergenceDomainError(f"|z| = {abs(z)} > 1 is outside the sum's domain")
    if z == 1:
        if idx[0] < 2:
            raise ConvergenceDomainError("Li diverges at z = 1 when s₁ = 1")
        return complex(mzv_eval(idx, tol))
    if z == 0:
        return 0j
    return _sum_to_tolerance(idx, z, tol)


# ----- iterated integrals -----


def _check_domain(forms, a, b):
    lo, hi = min(a, b), max(a, b)
    for position, form in enumerate(forms):
        for point in form.singularities:
            if lo < point < hi:
                raise PunctureError(
                    f"Form {form.name} is singular at {point} inside [{a}, {b}]"
                )
            at_start = math.isclose(point, a, abs_tol=1e-15)
            at_end = math.isclose(point, b, abs_tol=1e-15)
            if at_end and position == 0:
                raise PunctureError(
                    f"Outermost form {form.name} diverges at the upper endpoint {b}"
                )
            if at_start and position == len(forms) - 1:
                raise PunctureError(
                    f"Innermost form {form.name} diverges at the lower endpoint {a}"
                )


def _touches_singularity(forms, a, b):
    return any(
        math.isclose(point, end, abs_tol=1e-15)
        for form in forms
        for point in form.singularities
        for end in (a, b)
    )


def _endpoint_cutoff(weight, tol):
    """Truncation ε₀ with ε₀(1 + ln 1/ε₀)^weight below tol/10."""
    for k in range(2, 60):
        eps0 = 10.0**-k
        if eps0 * (1.0 + k * math.log(10.0)) ** weight < tol / 10.0:
            return eps0
    return 1e-60


def _solve(rhs, span, size, tol):
    y0 = np.zeros(size, dtype=complex)
    y0[0] = 1.0
    sol = solve_ivp(
        rhs, span, y0, method="DOP853", rtol=max(tol * 1e-2, 1e-13), atol=tol * 1e-3
    )
    if not sol.success:
        raise QuadratureError(f"Iterated integral failed: {sol.message}")
    return sol.y[:, -1]


def _inner_first(integrands, span, tol):
    """F_j(s) = ∫ ω_j⋯ω_n, propagated upwards from the innermost form."""
    n = len(integrands)

    def rhs(x, y):
        dy = np.zeros(n + 1, dtype=complex)
        values = [f(x) for f in integrands]
        # y[0] = 1, y[i] = F_{n-i+1}
        for i in range(1, n + 1):
            dy[i] = values[n - i] * y[i - 1]
        return dy

    return _solve(rhs, span, n + 1, tol)[n]


def _outer_first(integrands, span, tol):
    """G_j(s) = ∫_s^b ω₁⋯ω_j, propagated downwards from the outermost form."""
    n = len(integrands)

    def rhs(x, y):
        dy = np.zeros(n + 1, dtype=complex)
        for j in range(1, n + 1):
            dy[j] = -integrands[j - 1](x) * y[j - 1]
        return dy

    return _solve(rhs, (span[1], span[0]), n + 1, tol)[n]


def iterated_integral(forms, a, b, tol=1e-10, eps0=None, order="inner"):
    """Iterated integral ∫_a^b ω₁⋯ω_n with ω₁ outermost.

    Parameters
    ----------
    forms : sequence[FormSpec]
        The 1-forms, outermost first.
    a, b : float
        Integration limits. An endpoint may sit on a singularity of an
        inner form (or of ω₁ at ``a``, ω_n at ``b``) when the integral
        converges there; the interval is then truncated to [a+ε₀, b−ε₀]
        in logistic coordinates.
    tol : float
        Target absolute accuracy.
    eps0 : float, optional
        Explicit truncation at singular endpoints; derived from ``tol``
        when omitted.
    order : {"inner", "outer"}
        Recursion order of the inductive definition.

    Raises
    ------
    PunctureError
        If a singularity lies inside the interval or at an endpoint where
        the integral diverges.
    """
    forms = tuple(forms)
    if not forms:
        return 1.0 + 0j
    if a == b:
        return 0j
    _check_domain(forms, a, b)

    if _touches_singularity(forms, a, b):
        if not (0.0 <= a < b <= 1.0):
            raise PunctureError(
                "Singular endpoints are only supported on sub-intervals of [0, 1]"
            )
        cut = eps0 if eps0 is not None else _endpoint_cutoff(len(forms), tol)
        lo = max(a, cut) if a == 0.0 else a
        hi = min(b, 1.0 - cut) if b == 1.0 else b
        span = (0.5 * math.log(lo / (1.0 - lo)), 0.5 * math.log(hi / (1.0 - hi)))
        integrands = [
            (lambda x, form=form: form.in_logit(expit(2 * x), expit(-2 * x)))
            for form in forms
        ]
        debug_print(f"Iterated integral truncated at ε₀={cut:.1e}")
    else:
        span = (a, b)
        integrands = [form.func for form in forms]

    match order:
        case "inner":
            return complex(_inner_first(integrands, span, tol))
        case "outer":
            return complex(_outer_first(integrands, span, tol))
        case _:
            raise ValueError(f"Unknown recursion order '{order}'")


def iterated_integral_consistency(forms, a, b, tol=1e-10):
    """Difference between the two recursion orders of the inductive definition."""
    inner = iterated_integral(forms, a, b, tol, order="inner")
    outer = iterated_integral(forms, a, b, tol, order="outer")
    return abs(inner - outer)


def mzv_eval_iterint(idx, tol=1e-10):
    """ζ(idx) from its regularised Ω-word: ∫₀¹ Ω₀^{s₁−1}Ω₁⋯ = (−1)^k ζ(idx)."""
    forms, sign = regularized_omega_word(idx)
    return float((sign * iterated_integral(forms, 0.0, 1.0, tol)).real)


# ----- reports -----

TABLE_INDICES = ((2,), (3,), (2, 1), (4,), (3, 1), (2, 2), (2, 1, 1))


def mzv_table(indices=TABLE_INDICES, tol=1e-12):
    """ζ by nested sums and by iterated integrals, side by side."""
    rows = []
    for idx in indices:
        by_sum = mzv_eval(idx, tol)
        by_integral = mzv_eval_iterint(idx, max(tol, 1e-10))
        rows.append(
            {
                "index": list(idx),
                "nested_sum": by_sum,
                "iterated_integral": by_integral,
                "difference": abs(by_sum - by_integral),
            }
        )
    return rows


def golden_checks(tol=1e-12):
    """Euler's ζ(2), the regularised ∫₀¹Ω₀Ω₁, ζ(2,1) = ζ(3) and Li₂(1/2)."""
    zeta2 = mzv_eval((2,), tol)
    omega = iterated_integral((OMEGA0, OMEGA1), 0.0, 1.0, 1e-8)
    zeta21, zeta3 = mzv_eval((2, 1), tol), mzv_eval((3,), tol)
    zeta21_integral = mzv_eval_iterint((2, 1), 1e-10)
    li2_half = polylog_eval((2,), 0.5, tol).real
    li2_exact = math.pi**2 / 12 - math.log(2.0) ** 2 / 2
    consistency = iterated_integral_consistency((OMEGA0, OMEGA1, OMEGA1), 0.2, 0.7, 1e-10)
    checks = [
        ("zeta(2) = pi^2/6", abs(zeta2 - math.pi**2 / 6), 1e-10),
        ("int Omega0 Omega1 = -pi^2/6", abs(omega + math.pi**2 / 6), 1e-6),
        ("zeta(2,1) = zeta(3)", abs(zeta21 - zeta3), 1e-8),
        ("zeta(2,1) sum = integral", abs(zeta21 - zeta21_integral), 1e-8),
        ("Li2(1/2)", abs(li2_half - li2_exact), 1e-10),
        ("iterated integral recursion orders", consistency, 1e-8),
    ]
    return [
        {"name": name, "residual": residual, "tolerance": bound, "pass": bool(residual < bound)}
        for name, residual, bound in checks
    ]
