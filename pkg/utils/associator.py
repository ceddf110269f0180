"""
The KZ associator Φ(A, B) on two letters.

Three independent constructions:

* ``phi_symbolic``: exact MZV coefficients from the profile formula,
  in the expanded form or the nested ad-form;
* ``phi_numeric_brw``: ln 2 and the 𝓘 integrals, assembled as
  ``e^{ln2·B} Ξ_{B,A} Ξ_{A,B}⁻¹ e^{−ln2·A}``;
* ``phi_transport_eps``: the regularised transport
  ``e^{−lnε·B} W^{c_I} e^{lnε·A}`` at finite ε.

``substitute_pair`` places Φ into the DK2 algebra.
"""

import math
from functools import lru_cache
from itertools import product
from math import comb, factorial

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import gammaincc

from utils.coeffring import NUM, SYM, SymCoeff, coerce
from utils.core import debug_print, time_execution
from utils.dk2 import (
    TWO_LETTER,
    AlgebraSeries,
    ad_power,
    series_exp,
    series_inverse,
    series_mul,
    symbol,
)
from utils.errors import ConstantTermError, OrderMismatchError, QuadratureError

A, B = 0, 1
LN2 = math.log(2.0)


def _letter(index, order, domain):
    return AlgebraSeries.letter(index, order, TWO_LETTER, domain)


# ----- profile formula -----


def _compositions(total, parts):
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def lm_profiles(N):
    """All nonempty profiles (p, q) of equal length with |p| + |q| ≤ N."""
    profiles = []
    for weight in range(2, N + 1):
        for length in range(1, weight // 2 + 1):
            for size_p in range(length, weight - length + 1):
                for p in _compositions(size_p, length):
                    for q in _compositions(weight - size_p, length):
                        profiles.append((p, q))
    return profiles


def profile_zeta_index(p, q):
    idx = []
    for pl, ql in zip(p, q):
        idx.append(pl + 1)
        idx.extend([1] * (ql - 1))
    return tuple(idx)


def _profile_coefficient(p, q, j):
    """ζ^{p,q}_j = (−1)^{|j|+|p|} ζ(p₁+1, {1}^{q₁−1}, …) Π C(p_l, j_l)."""
    sign = (-1) ** (sum(j) + sum(p))
    binomials = math.prod(comb(pl, jl) for pl, jl in zip(p, j))
    return SymCoeff.zeta(*profile_zeta_index(p, q)).scale(sign * binomials)


def _add(out, word, coeff):
    out[word] = out[word] + coeff if word in out else coeff


def _expanded(N):
    out = {(): SymCoeff.one()}
    for p, q in lm_profiles(N):
        for j in product(*(range(pl + 1) for pl in p)):
            zeta = _profile_coefficient(p, q, j)
            for k in product(*(range(ql + 1) for ql in q)):
                factor = math.prod(
                    (-1) ** kl * comb(ql, kl) for ql, kl in zip(q, k)
                )
                word = (B,) * (sum(q) - sum(k))
                for jl, kl in zip(j, k):
                    word += (A,) * jl + (B,) * kl
                word += (A,) * (sum(p) - sum(j))
                _add(out, word, zeta.scale(factor))
    return AlgebraSeries(out, N, TWO_LETTER, SYM)


def _ad_form(N):
    letter_a, letter_b = _letter(A, N, SYM), _letter(B, N, SYM)
    one = AlgebraSeries.one(N, TWO_LETTER, SYM)
    result = one
    for p, q in lm_profiles(N):
        for j in product(*(range(pl + 1) for pl in p)):
            nested = one
            for jl, ql in zip(j, q):
                nested = ad_power(letter_b, nested * letter_a**jl, ql)
                if nested.is_zero():
                    break
            if nested.is_zero():
                continue
            term = nested * letter_a ** (sum(p) - sum(j))
            result = result + term.scale(_profile_coefficient(p, q, j))
    return result


@lru_cache(maxsize=None)
def phi_symbolic(N, form="expanded"):
    """Φ(A, B) up to grade N with exact MZV coefficients.

    ``form="expanded"`` sums the profile formula word by word;
    ``form="ad"`` evaluates the nested ``ad_B^{q_i}(· A^{j_i})`` form.
    """
    if N < 0:
        raise ValueError("Order must be non-negative")
    match form:
        case "expanded":
            return time_execution(f"Φ expanded N={N}", _expanded, N)
        case "ad":
            return time_execution(f"Φ ad-form N={N}", _ad_form, N)
        case _:
            raise ValueError(f"Unknown associator form '{form}'")


def phi_ad_form(N):
    return phi_symbolic(N, "ad")


def phi_forms_agree(N):
    return phi_symbolic(N, "expanded") == phi_ad_form(N)


def phi_swap(phi):
    """Φ(B, A): exchange the two letters."""
    swapped = {tuple(1 - letter for letter in word): c for word, c in phi.terms.items()}
    return AlgebraSeries(swapped, phi.order, phi.alphabet, phi.domain)


# ----- regularised integrals -----


def _brw_sequences(N):
    """Index sequences (ℓ₁, …, ℓ_r) of grade r + Σℓ ≤ N."""
    sequences = []
    for r in range(1, N + 1):
        for total in range(N - r + 1):
            for ells in product(range(total + 1), repeat=r):
                if sum(ells) == total:
                    sequences.append(ells)
    return sequences


def _kernel(ell):
    norm = 1.0 / factorial(ell)

    def f(tau):
        decay = math.exp(-tau)
        return norm * tau**ell * decay / (2.0 - decay)

    return f


def _upper_limit(ell, tol):
    log_tol = -math.log(tol)
    T = log_tol + ell * math.log(max(log_tol, 1.0))
    while gammaincc(ell + 1, T) >= tol / 10.0:
        T *= 2.0
    return T


def brw_integrals(sequences, tol=1e-12, upper=None):
    """Nested integrals 𝓘_{ℓ₁…ℓ_r} over τ₁ ≥ τ₂ ≥ … ≥ τ_r ≥ 0.

    Every suffix of every sequence is carried in one triangular ODE in τ;
    the outermost variable runs to ``upper`` (finite-ε version) or to a
    cutoff beyond which the e^{−τ} tail is below ``tol``.
    """
    needed = set()
    for ells in sequences:
        for i in range(len(ells)):
            needed.add(tuple(ells[i:]))
    order = sorted(needed, key=len)
    index = {ells: i for i, ells in enumerate(order)}
    kernels = {ell: _kernel(ell) for ell in {e[0] for e in order}}
    if upper is None:
        upper = max(_upper_limit(max(e[0] for e in order), tol), 1.0)

    def rhs(tau, y):
        dy = np.empty_like(y)
        for ells, i in index.items():
            inner = 1.0 if len(ells) == 1 else y[index[ells[1:]]]
            dy[i] = kernels[ells[0]](tau) * inner
        return dy

    sol = solve_ivp(
        rhs,
        (0.0, upper),
        np.zeros(len(order)),
        method="DOP853",
        rtol=max(tol * 1e-2, 1e-13),
        atol=tol * 1e-3,
    )
    if not sol.success:
        raise QuadratureError(f"𝓘 integrals failed: {sol.message}")
    debug_print(f"𝓘 integrals: {len(order)} sequences up to τ = {upper:.2f}")
    return {ells: float(sol.y[index[ells], -1]) for ells in sequences}


def brw_integral(ells, tol=1e-12, upper=None):
    ells = tuple(int(e) for e in ells)
    return brw_integrals([ells], tol, upper)[ells]


def _xi(first, second, integrals, N):
    """Ξ_{first,second} = 1 + Σ 𝓘_ℓ ad_first^{ℓ₁}(second)⋯ad_first^{ℓ_r}(second)."""
    pieces = {ell: ad_power(first, second, ell) for ell in range(N)}
    result = AlgebraSeries.one(N, TWO_LETTER, NUM)
    for ells, value in integrals.items():
        term = AlgebraSeries.one(N, TWO_LETTER, NUM)
        for ell in ells:
            term = series_mul(term, pieces[ell])
        result = result + term.scale(value)
    return result


def phi_numeric_brw(N, tol=1e-12, upper=None):
    """Φ(A, B) = e^{ln2·B} Ξ_{B,A} Ξ_{A,B}⁻¹ e^{−ln2·A} with numeric coefficients."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b = _letter(A, N, NUM), _letter(B, N, NUM)
    integrals = brw_integrals(_brw_sequences(N), tol, upper)
    xi_ba = _xi(b, a, integrals, N)
    xi_ab = _xi(a, b, integrals, N)
    return (
        series_exp(b.scale(LN2))
        * xi_ba
        * series_inverse(xi_ab)
        * series_exp(a.scale(-LN2))
    )


# ----- finite ε -----


def phi_transport_eps(N, eps, tol=1e-10):
    """e^{−lnε·B} W^{c_I} e^{lnε·A} for the two-letter KZ connection."""
    from data.catalog import make_path
    from data.geometry import KZ2Connection
    from utils.transport import QuadratureSpec, parallel_transport

    if not 0 < eps <= 0.25:
        raise ValueError(f"eps must lie in (0, 1/4], got {eps}")
    path = make_path("c_I", {"eps": eps, "a": 1.0})
    spec = QuadratureSpec(rel_tol=tol, abs_tol=tol * 1e-2)
    W = parallel_transport(path, KZ2Connection(), N, spec)
    lneps = math.log(eps)
    a, b = _letter(A, N, NUM), _letter(B, N, NUM)
    return series_exp(b.scale(-lneps)) * W * series_exp(a.scale(lneps))


def extrapolate_to_zero(eps_values, values):
    """Value at ε = 0 of a least-squares fit in {1, ε lnᵏε, ε² lnᵏε}.

    ``values`` has one row per ε (any trailing shape); the basis is cut
    to the number of grid points.
    """
    eps_values = np.asarray(eps_values, dtype=float)
    values = np.asarray(values, dtype=complex)
    n = len(eps_values)
    if n == 0:
        raise ValueError("Empty ε grid")
    logs = np.log(eps_values)
    columns = [np.ones(n)]
    for power in (1, 2):
        for k in range(n):
            columns.append(eps_values**power * logs**k)
    basis = np.column_stack(columns[:n])
    flat = values.reshape(n, -1)
    solution, *_ = np.linalg.lstsq(basis, flat, rcond=None)
    return solution[0].reshape(values.shape[1:])


# ----- substitution -----


def substitute_pair(phi, X, Y):
    """Φ(X, Y): replace A by X and B by Y word by word."""
    if phi.alphabet != TWO_LETTER:
        raise ValueError("substitute_pair expects a two-letter series")
    for name, value in (("X", X), ("Y", Y)):
        if not value.constant_term().is_zero():
            raise ConstantTermError(f"{name} must have zero constant term")
    X._check_pair(Y)
    if phi.order < X.order:
        raise OrderMismatchError(
            f"Φ is known to grade {phi.order}, substitution needs {X.order}"
        )
    images = (X, Y)
    prefixes = {(): AlgebraSeries.one(X.order, X.alphabet, X.domain)}

    def image(word):
        if word not in prefixes:
            prefixes[word] = series_mul(image(word[:-1]), images[word[-1]])
        return prefixes[word]

    result = X.zero_like()
    for word, c in sorted(phi.terms.items(), key=lambda kv: len(kv[0])):
        if len(word) > X.order:
            continue
        result = result + image(word).scale(coerce(c, X.domain))
    return result


_PAIRS = {
    "123": ("t12", "t23"),
    "213": ("t12", "t13"),
    "132": ("t13", "t23"),
    "321": ("t23", "t12"),
    "231": ("t23", "t13"),
    "312": ("t13", "t12"),
}


@lru_cache(maxsize=None)
def phi_labelled(label, N):
    """Φ_{ijk} = Φ(t_ij, t_jk) in the DK2 algebra."""
    x, y = _PAIRS[label]
    return substitute_pair(phi_symbolic(N), symbol(x, N), symbol(y, N))


@lru_cache(maxsize=None)
def phi_of(x_name, y_name, N):
    """Φ on any two named DK2 symbols (e.g. ``t12``, ``t13bar``)."""
    return substitute_pair(phi_symbolic(N), symbol(x_name, N), symbol(y_name, N))


def abelianize(series):
    """Coefficients of a^i b^j after letting A and B commute."""
    out = {}
    for word, c in series.terms.items():
        key = (word.count(A), word.count(B))
        out[key] = out.get(key, 0j) + complex(c)
    return out


# ----- agreement report -----

AGREEMENT_TOL = 1e-5
TRANSPORT_EPS_GRID = (1e-3, 5e-4, 2.5e-4, 1.25e-4, 6.25e-5, 3.125e-5)


def _max_deviation(x, y, words):
    return max((abs(complex(x.coeff(w)) - complex(y.coeff(w))) for w in words), default=0.0)


def associator_agreement(N=4, eps_grid=TRANSPORT_EPS_GRID, tol=1e-10, mzv_tol=1e-14):
    """Φ from the MZV formula, the 𝓘 integrals and the finite-ε transport.

    The transport route is extrapolated to ε = 0 coefficient-wise; the
    report also carries Φ(A,B)Φ(B,A) = 1 and the abelianisation Φ^ab = 1.
    """
    symbolic = phi_symbolic(N).evaluate(eps_grid[-1], mzv_tol)
    words = sorted({w for w in symbolic.terms} | {(A,) * k for k in range(1, N + 1)})
    brw = phi_numeric_brw(N, tol=min(tol, 1e-12))
    samples = [phi_transport_eps(N, eps, tol) for eps in eps_grid]
    values = np.array([[complex(s.coeff(w)) for w in words] for s in samples])
    limit = extrapolate_to_zero(eps_grid, values)
    extrapolated = AlgebraSeries(
        {w: complex(v) for w, v in zip(words, limit)}, N, TWO_LETTER, NUM
    )
    one = AlgebraSeries.one(N, TWO_LETTER, NUM)
    unitarity = series_mul(symbolic, phi_swap(symbolic)) - one
    abelian = {k: v for k, v in abelianize(symbolic).items() if k != (0, 0)}
    checks = [
        ("symbolic vs BRW", _max_deviation(symbolic, brw, words), AGREEMENT_TOL),
        ("symbolic vs transport", _max_deviation(symbolic, extrapolated, words), AGREEMENT_TOL),
        ("BRW vs transport", _max_deviation(brw, extrapolated, words), AGREEMENT_TOL),
        (
            "Phi(A,B)Phi(B,A) = 1",
            max((abs(complex(v)) for v in unitarity.terms.values()), default=0.0),
            1e-8,
        ),
        ("abelianised Phi = 1", max((abs(v) for v in abelian.values()), default=0.0), 1e-8),
    ]
    return {
        "name": "associator agreement",
        "order": N,
        "eps_grid": list(eps_grid),
        "checks": [
            {"name": name, "residual": r, "tolerance": bound, "pass": bool(r < bound)}
            for name, r, bound in checks
        ],
        "forms_agree": phi_forms_agree(N),
        "phi": symbolic,
        "pass": bool(phi_forms_agree(N) and all(r < bound for _, r, bound in checks)),
    }
