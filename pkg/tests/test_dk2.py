import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parent.parent))

from utils.coeffring import NUM, SymCoeff
from utils.dk2 import (
    DK2,
    LABELS,
    TWO_LETTER,
    AlgebraSeries,
    BimoduleSeries,
    ad_power,
    bimodule_act,
    coboundary,
    combinatorial_check,
    commutator,
    compose_labels,
    derivation_D,
    grade_residuals,
    interchange_relators,
    mod_symbol,
    noncomm_binomial_expand,
    normalize_label,
    permute_labels,
    random_series,
    residual_mod_interchange,
    series_conjugate,
    series_exp,
    series_inverse,
    series_mul,
    symbol,
    triangle_act,
)
from utils.errors import CoefficientDomainError, ConstantTermError, OrderMismatchError


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def _random_dk2(rng, order, grades=(1, 2)):
    return random_series(rng, order, DK2, grades)


def _random_bimodule(rng, order):
    terms = {}
    for x in (0, 1):
        terms[((), x, ())] = int(rng.integers(-3, 4))
        for g in range(3):
            terms[((g,), x, ())] = int(rng.integers(-3, 4))
            terms[((), x, (g,))] = int(rng.integers(-3, 4))
    return BimoduleSeries(terms, order)


# ----- series arithmetic tests -----


def test_truncation_drops_high_grades():
    s = AlgebraSeries({(0,): 1, (0, 1): 2, (0, 1, 2): 3}, 2)
    assert s.grades() == [1, 2]


def test_product_is_associative(rng):
    a, b, c = (_random_dk2(rng, 4) for _ in range(3))
    assert (a * b) * c == a * (b * c)


def test_exp_of_negative_is_inverse(rng):
    x = _random_dk2(rng, 4)
    one = AlgebraSeries.one(4)
    assert series_exp(x) * series_exp(-x) == one


def test_inverse(rng):
    a = 1 + _random_dk2(rng, 4)
    assert series_mul(a, series_inverse(a)) == AlgebraSeries.one(4)
    assert series_mul(series_inverse(a), a) == AlgebraSeries.one(4)


def test_exp_needs_zero_constant_term():
    with pytest.raises(ConstantTermError):
        series_exp(AlgebraSeries.one(3))


def test_inverse_needs_unit_constant_term():
    with pytest.raises(ConstantTermError):
        series_inverse(AlgebraSeries.one(3).scale(2))


def test_mixed_orders_are_rejected():
    with pytest.raises(OrderMismatchError):
        symbol("t12", 2) + symbol("t12", 3)


def test_mixed_domains_are_rejected():
    with pytest.raises(CoefficientDomainError):
        symbol("t12", 2) + symbol("t12", 2, NUM)


def test_conjugation_of_commuting_elements():
    lam = symbol("Lambda", 4)
    x = symbol("t12", 4)
    assert series_conjugate(series_exp(x), x) == x
    assert series_conjugate(series_exp(lam), lam) == lam


def test_coefficient_access_by_rendered_word():
    s = AlgebraSeries({(0, 2): 5}, 2)
    assert s.coeff("t12.t23") == 5
    m = mod_symbol("L+R", 2)
    assert m.coeff("R") == 1


# ----- crossed module tests -----


def test_coboundary_of_relationators():
    t12, t13, t23 = (symbol(n, 3) for n in ("t12", "t13", "t23"))
    assert coboundary(mod_symbol("L", 3)) == commutator(t12, t13 + t23)
    assert coboundary(mod_symbol("R", 3)) == commutator(t23, t12 + t13)


def test_coboundary_is_a_bimodule_map(rng):
    a = _random_dk2(rng, 4, grades=(1,))
    m = _random_bimodule(rng, 4)
    assert coboundary(bimodule_act(a, m, "left")) == a * coboundary(m)
    assert coboundary(bimodule_act(a, m, "right")) == coboundary(m) * a


def test_triangle_action_is_the_commutator_under_coboundary(rng):
    a = _random_dk2(rng, 4, grades=(1,))
    m = _random_bimodule(rng, 4)
    assert coboundary(triangle_act(a, m)) == commutator(a, coboundary(m))


def test_derivation_lifts_the_lambda_commutator(rng):
    w = _random_dk2(rng, 4)
    lam = symbol("Lambda", 4)
    assert coboundary(derivation_D(w)) == commutator(lam, w)


def test_derivation_on_generators():
    assert derivation_D(symbol("t12", 3)) == -mod_symbol("L", 3)
    assert derivation_D(symbol("t23", 3)) == -mod_symbol("R", 3)
    assert derivation_D(symbol("t13", 3)) == mod_symbol("L+R", 3)


def test_grades_of_bimodule_words():
    m = BimoduleSeries({((0,), 0, (1, 2)): 1}, 5)
    assert m.grades() == [5]
    assert BimoduleSeries({((0,), 0, (1, 2)): 1}, 4).is_zero()


def test_interchange_relators_vanish_under_coboundary():
    for relator in interchange_relators(5):
        m = BimoduleSeries(relator, 5)
        assert coboundary(m).is_zero()


def test_residual_mod_interchange_ignores_relators():
    (relator, *_) = interchange_relators(4)
    m = BimoduleSeries(relator, 4)
    assert grade_residuals(m)[4][1] > 0
    assert residual_mod_interchange(m)[4] < 1e-12
    assert residual_mod_interchange(mod_symbol("L", 4))[2] == pytest.approx(1.0)


# ----- relabelling tests -----


def test_normalize_label_accepts_sequences():
    assert normalize_label((2, 1, 3)) == "213"
    assert normalize_label([3, 2, 1]) == "321"
    with pytest.raises(ValueError):
        normalize_label("112")


def test_permute_labels_on_generators():
    assert permute_labels(symbol("t13", 2), "213") == symbol("t23", 2)
    assert permute_labels(symbol("t12", 2), "321") == symbol("t23", 2)
    assert permute_labels(mod_symbol("L", 2), "321") == mod_symbol("R", 2)


@pytest.mark.parametrize("first", LABELS)
@pytest.mark.parametrize("then", LABELS)
def test_compose_labels_matches_successive_relabelling(rng, first, then):
    x = _random_dk2(rng, 3)
    once = permute_labels(x, compose_labels(first, then))
    assert permute_labels(permute_labels(x, first), then) == once


@pytest.mark.parametrize("label", LABELS)
def test_relabelling_commutes_with_coboundary(rng, label):
    m = _random_bimodule(rng, 4)
    assert coboundary(permute_labels(m, label)) == permute_labels(coboundary(m), label)


def test_lambda_is_relabelling_invariant():
    lam = symbol("Lambda", 3)
    for label in LABELS:
        assert permute_labels(lam, label) == lam


# ----- combinatorial tests -----


@pytest.mark.parametrize("n", range(7))
def test_binomial_forms_agree(rng, n):
    A = random_series(rng, 6, TWO_LETTER)
    B = random_series(rng, 6, TWO_LETTER)
    direct = noncomm_binomial_expand(A, B, n, "direct")
    assert noncomm_binomial_expand(A, B, n, "easy") == direct
    assert noncomm_binomial_expand(A, B, n, "hard") == direct


@pytest.mark.parametrize("q", range(7))
def test_ad_power_closed_form(rng, q):
    A = random_series(rng, 6, TWO_LETTER)
    B = random_series(rng, 6, TWO_LETTER)
    assert ad_power(B, A, q, "closed") == ad_power(B, A, q, "iterate")


def test_binomial_rejects_powers_beyond_order():
    A = random_series(np.random.default_rng(0), 3, TWO_LETTER)
    with pytest.raises(ValueError):
        noncomm_binomial_expand(A, A, 4)


def test_combinatorial_check_report():
    report = combinatorial_check(4, seed=3)
    assert report["pass"]
    assert report["failures"] == []


def test_series_json():
    s = AlgebraSeries({(0, 1): Fraction(1, 2)}, 2)
    (entry,) = s.to_json()["terms"]
    assert entry["word"] == "t12.t13"
    m = mod_symbol("L", 3).scale(SymCoeff.ipi(2))
    (modterm,) = m.to_json()["modterms"]
    assert modterm["letter"] == "L"
    assert modterm["left"] == "1"
