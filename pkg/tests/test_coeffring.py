import math
import sys
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest

sys.path.append(str(Path(__file__).resolve().parent.parent))

from utils.coeffring import (
    NUM,
    SYM,
    NumCoeff,
    SymCoeff,
    check_admissible,
    coeff_arith,
    coeff_eval,
    coerce,
    numeric_by_lneps,
    reduce_even_zetas,
    residual_magnitude,
)
from utils.errors import CoefficientDomainError, InadmissibleIndexError


# ----- SymCoeff arithmetic tests -----


def test_symcoeff_monomials_multiply_by_adding_exponents():
    c = SymCoeff.ipi() * SymCoeff.lneps(2) * SymCoeff.zeta(3)
    assert c == SymCoeff.monomial(ipi=1, lneps=2, zetas=[(3,)])


def test_symcoeff_zeta_monomial_is_canonical():
    a = SymCoeff.zeta(3) * SymCoeff.zeta(2)
    b = SymCoeff.zeta(2) * SymCoeff.zeta(3)
    assert a == b
    assert len(a.terms) == 1


def test_symcoeff_rational_scalars():
    c = SymCoeff.ipi(2) * Fraction(1, 6) + SymCoeff.ipi(2) * Fraction(1, 3)
    assert c == SymCoeff.ipi(2).scale(Fraction(1, 2))
    assert (c - c).is_zero()
    assert 2 * SymCoeff.one() == 2


def test_symcoeff_rejects_floats():
    with pytest.raises(CoefficientDomainError):
        SymCoeff.one() + 0.5


def test_numcoeff_rejects_symbolic():
    with pytest.raises(CoefficientDomainError):
        NumCoeff(1.0) + SymCoeff.one()


def test_numcoeff_rejects_nan():
    with pytest.raises(ValueError):
        NumCoeff(float("nan"))


def test_coeff_arith_checks_domains():
    assert coeff_arith(NumCoeff(2), NumCoeff(3), "mul") == NumCoeff(6)
    with pytest.raises(CoefficientDomainError):
        coeff_arith(NumCoeff(2), SymCoeff.one(), "add")
    with pytest.raises(ValueError):
        coeff_arith(NumCoeff(2), NumCoeff(3), "pow")


def test_coerce_lifts_plain_numbers():
    assert coerce(3, SYM) == SymCoeff.rational(3)
    assert coerce(0.5, NUM) == NumCoeff(0.5)
    with pytest.raises(CoefficientDomainError):
        coerce(0.5, SYM)


def test_check_admissible():
    assert check_admissible([2, 1]) == (2, 1)
    for bad in ((), (1,), (1, 2), (2, 0)):
        with pytest.raises(InadmissibleIndexError):
            check_admissible(bad)


# ----- evaluation tests -----


def test_coeff_eval_substitutes_every_symbol():
    c = SymCoeff.ipi(2) + SymCoeff.lneps() * SymCoeff.zeta(3)
    eps = 0.01
    expected = -math.pi**2 + math.log(eps) * float(mpmath.zeta(3))
    assert abs(complex(coeff_eval(c, eps)) - expected) < 1e-12


def test_coeff_eval_rejects_eps_outside_unit_interval():
    with pytest.raises(ValueError):
        coeff_eval(SymCoeff.one(), 1.5)


def test_numeric_by_lneps_splits_powers():
    c = SymCoeff.lneps(2).scale(3) + SymCoeff.ipi()
    parts = numeric_by_lneps(c)
    assert parts[2] == 3
    assert abs(parts[0] - 1j * math.pi) < 1e-15


# ----- even zeta tests -----


@pytest.mark.parametrize("k", [1, 2, 3])
def test_reduce_even_zetas_matches_numeric_value(k):
    c = SymCoeff.zeta(2 * k)
    reduced = reduce_even_zetas(c)
    assert all(not m for (_, _, m) in reduced.terms)
    assert abs(complex(coeff_eval(reduced, 0.5)) - float(mpmath.zeta(2 * k))) < 1e-13


def test_zeta2_is_minus_ipi_squared_over_six():
    assert reduce_even_zetas(SymCoeff.zeta(2)) == SymCoeff.ipi(2).scale(Fraction(-1, 6))


def test_residual_magnitude_three_stages():
    assert residual_magnitude(SymCoeff()) == (True, 0.0)
    exact, size = residual_magnitude(SymCoeff.zeta(2) + SymCoeff.ipi(2).scale(Fraction(1, 6)))
    assert exact and size == 0.0
    exact, size = residual_magnitude(SymCoeff.zeta(2, 1) - SymCoeff.zeta(3))
    assert not exact
    assert size < 1e-12
    exact, size = residual_magnitude(SymCoeff.zeta(3))
    assert not exact
    assert abs(size - float(mpmath.zeta(3))) < 1e-12


def test_json_forms():
    assert NumCoeff(1 + 2j).to_json() == {"re": 1.0, "im": 2.0}
    (entry,) = SymCoeff.zeta(2, 1).scale(Fraction(-1, 2)).to_json()
    assert entry == {"ipi": 0, "lneps": 0, "zetas": [[2, 1]], "coeff": "-1/2"}
