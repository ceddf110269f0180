import math
import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parent.parent))

import utils.hexagonator as hexagonator
from constants import LIMIT_2PATHS
from utils.coeffring import NUM, SymCoeff
from utils.dk2 import DK2, AlgebraSeries, mod_symbol, permute_labels
from utils.hexagonator import (
    PREDICTED_GRADE2,
    PREHEX_GRADE2,
    bch_modification,
    brw_relation_check,
    breen_2loop_check,
    breen_symbolic_check,
    congruence_holonomy,
    congruence_series,
    convergence_rows,
    dpartial_suite,
    exp_shift_modification,
    grade2_letters,
    holonomy_convergence,
    lemma_ad_relation_check,
    phi_lambda_comm_modification,
    phi_shift_modification,
    prehex_convergence,
    prehex_direct,
    prehex_grade2_check,
    t_eps_series,
    tau_equivariance_check,
)

BUILDERS = {
    "congruence L": lambda N: congruence_series("L", N),
    "congruence R": lambda N: congruence_series("R", N),
    "t_eps": t_eps_series,
    "bch": bch_modification,
    "phi_shift 213": lambda N: phi_shift_modification("213", N),
    "phi_shift 231": lambda N: phi_shift_modification("231", N),
    "phi_lambda_comm": phi_lambda_comm_modification,
    "QVI": lambda N: exp_shift_modification("QVI", N),
    "QIV": lambda N: exp_shift_modification("QIV", N),
    "PIV": lambda N: exp_shift_modification("PIV", N),
}


# ----- ∂-contract tests -----


@pytest.mark.parametrize("name", list(BUILDERS))
def test_contracts_hold_exactly(name):
    report = BUILDERS[name](3).contract_check()
    assert report["exact"], report
    assert report["pass"]


@pytest.mark.slow
@pytest.mark.parametrize("name", list(BUILDERS))
def test_contracts_hold_exactly_at_order_four(name):
    assert BUILDERS[name](4).contract_check()["exact"]


def test_prehex_contract_holds_numerically():
    report = prehex_direct(3).contract_check()
    assert report["pass"], report


def test_dpartial_suite_reports_every_builder():
    reports = dpartial_suite(2)
    assert len(reports) == 11
    assert all(r["pass"] for r in reports)


def test_evaluated_contract_still_holds():
    report = bch_modification(3).evaluate(0.1).contract_check()
    assert report["pass"]


def test_builder_argument_errors():
    with pytest.raises(ValueError):
        congruence_series("L", 1)
    with pytest.raises(ValueError):
        congruence_series("M", 2)
    with pytest.raises(ValueError):
        exp_shift_modification("QX", 2)
    with pytest.raises(ValueError):
        phi_shift_modification("123", 2)


def test_right_congruence_is_the_relabelled_left():
    left, right = congruence_series("L", 3), congruence_series("R", 3)
    assert right.value == permute_labels(left.value, "321")
    assert right.name == "R_cong"


def test_congruence_grade_two():
    # e^{iπt12} and e^{iπt_(12)3} commute up to (iπ)²𝓛
    value = congruence_series("L", 2).value
    assert value == mod_symbol("L", 2).scale(SymCoeff.ipi(2))


# ----- pre-hexagonator and Breen tests -----


def test_prehex_grade_two_is_exact():
    report = prehex_grade2_check(2)
    assert report["pass"]
    assert report["exact"]


def test_lemma_ad_relation_modulo_interchange():
    report = lemma_ad_relation_check(3)
    assert report["pass"], report


@pytest.mark.slow
def test_lemma_ad_relation_at_order_five():
    assert lemma_ad_relation_check(5)["pass"]


def test_breen_symbolic_grade_two():
    report = breen_symbolic_check(2)
    assert report["pass"]
    assert report["grade2_max_abs"] < 1e-9


# ----- numeric holonomy tests -----


def test_predicted_values_are_relabelling_consistent():
    eps = 0.01
    left, right = PREDICTED_GRADE2["P_L"](eps), PREDICTED_GRADE2["P_R"](eps)
    assert (left["L"], left["R"]) == (right["R"], right["L"])
    assert PREHEX_GRADE2["R"] == pytest.approx(2 * PREHEX_GRADE2["L"])
    p_v = PREDICTED_GRADE2["P_V"](eps)
    assert p_v["L"] - p_v["R"] == pytest.approx(-math.pi**2 / 6)


def test_grade2_letters_and_rows():
    m = mod_symbol("L", 2).scale(2) + mod_symbol("R", 2).scale(-1)
    letters = grade2_letters(m.evaluate(0.1))
    assert letters == {"L": 2, "R": -1}
    rows = convergence_rows(0.1, letters, {"L": 2.5, "R": -1.0}, "P_V")
    assert [r["term_key"] for r in rows] == ["P_V:L", "P_V:R"]
    assert rows[0]["abs_err"] == pytest.approx(0.5)
    assert rows[1]["abs_err"] == 0


def test_reparametrisation_2path_has_no_grade_two_holonomy():
    report = holonomy_convergence("harmless", [0.1])
    assert report["pass"], report["errors"]


@pytest.mark.slow
def test_holonomy_convergence_report_shape():
    report = holonomy_convergence("Q_VI", [0.1, 0.03])
    assert len(report["rows"]) == 4
    assert report["limit_within_tolerance"] is None
    assert report["errors"][1] < report["errors"][0]


@pytest.mark.slow
def test_brw_relation_at_finite_eps():
    report = brw_relation_check(0.1, N=2)
    assert report["pass"], report


@pytest.mark.slow
def test_tau_equivariance_of_a_2path():
    report = tau_equivariance_check("Q_VI", "13", 0.1)
    assert report["pass"], report


@pytest.mark.slow
def test_right_congruence_holonomy_is_the_relabelled_left():
    report = congruence_holonomy(0.1)
    assert report["pass"], report["relabel_residual"]


@pytest.mark.slow
def test_dpartial_suite_at_order_five():
    reports = dpartial_suite(5)
    assert all(r["pass"] for r in reports), [r["name"] for r in reports if not r["pass"]]


# ----- globularity gate tests -----


def _fake_prehex(globular):
    def prehex_holonomy(N, eps, q=None, a=1.0, gate=True):
        R_eps = mod_symbol("L", N, NUM).scale(PREHEX_GRADE2["L"] + eps) + mod_symbol(
            "R", N, NUM
        ).scale(PREHEX_GRADE2["R"])
        return {"R_eps": R_eps, "globularity": [{"pass": globular}]}

    return prehex_holonomy


def _fake_breen_sides(globular, equivariance=0.0):
    def breen_2loop_sides(N, eps, q=None, a=1.0, compare_pullbacks=True):
        one = AlgebraSeries.one(N, DK2, NUM)
        return one, one, [one], {"Q213": equivariance}, [{"pass": globular}]

    return breen_2loop_sides


@pytest.mark.parametrize("globular", [True, False])
def test_prehex_convergence_requires_globularity(monkeypatch, globular):
    monkeypatch.setattr(hexagonator, "prehex_holonomy", _fake_prehex(globular))
    report = prehex_convergence(2, [1e-1, 1e-2, 1e-3])
    assert report["monotone"]
    assert report["relative_error_smallest_eps"] < 0.02
    assert report["globularity_pass"] is globular
    assert report["pass"] is globular


@pytest.mark.parametrize("globular, equivariance, expected", [
    (True, 0.0, True),
    (False, 0.0, False),
    (True, 1e-3, False),
])
def test_breen_2loop_requires_its_gates(monkeypatch, globular, equivariance, expected):
    monkeypatch.setattr(hexagonator, "breen_2loop_sides", _fake_breen_sides(globular, equivariance))
    report = breen_2loop_check(2, 0.01)
    assert report["grade2_relative"] == 0
    assert report["pass"] is expected


# ----- ε → 0 acceptance tests -----


@pytest.mark.slow
@pytest.mark.parametrize("key", LIMIT_2PATHS)
def test_holonomy_limits_of_the_catalog(key):
    report = holonomy_convergence(key, [1e-1, 1e-2, 1e-3])
    assert report["monotone"], report["errors"]
    assert report["relative_errors"][-1] < 1e-3
    assert report["pass"]


@pytest.mark.slow
def test_prehex_holonomy_reaches_the_infinitesimal_hexagonator():
    report = prehex_convergence(2, [1e-1, 1e-2, 1e-3])
    assert report["globularity_pass"]
    assert report["relative_error_smallest_eps"] < 0.02
    assert report["pass"]


@pytest.mark.slow
def test_breen_2loop_at_small_eps():
    report = breen_2loop_check(2, 0.01)
    assert report["globularity_pass"]
    assert report["equivariance_pass"]
    assert report["grade2_relative"] < 0.05
    assert report["pass"]
