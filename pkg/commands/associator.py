import math

from commands.run import assemble, guarded, run_report
from constants import SYMBOLIC_ORDER
from utils.associator import TRANSPORT_EPS_GRID, associator_agreement, brw_integral
from utils.mzv import mzv_eval, polylog_eval
from utils.validation import validation_wrapper


def _brw_integral_checks(tol):
    ln2 = math.log(2.0)
    I0, I1 = brw_integral((0,), tol), brw_integral((1,), tol)
    li2_half = polylog_eval((2,), 0.5, tol).real
    checks = [
        ("I_0 = ln 2", abs(I0 - ln2)),
        ("I_1 = Li2(1/2)", abs(I1 - li2_half)),
        ("2 I_1 + ln^2 2 = zeta(2)", abs(2 * I1 + ln2**2 - mzv_eval((2,), tol))),
    ]
    return [
        {"name": name, "residual": r, "tolerance": 1e-9, "pass": bool(r < 1e-9)}
        for name, r in checks
    ]


def build_associator(cfg, targets):
    N = max(cfg.order, SYMBOLIC_ORDER)
    agreement = guarded(
        "associator agreement",
        associator_agreement,
        N,
        TRANSPORT_EPS_GRID,
        cfg.quad.rel_tol,
        cfg.mzv_tol,
    )
    checks = agreement.pop("checks", [agreement])
    checks.extend(_brw_integral_checks(cfg.mzv_tol))
    checks.append(
        {"name": "expanded form = ad-form", "pass": bool(agreement.get("forms_agree", False))}
    )
    return assemble(checks, order=N, phi=agreement.get("phi"))


@validation_wrapper
def cmd_associator(args, state, validated=None):
    return run_report("associator", state, validated)
