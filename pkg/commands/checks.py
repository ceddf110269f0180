from commands.run import assemble, guarded, run_report
from constants import FLATNESS_POINTS, SYMBOLIC_ORDER
from utils.core import debug_print
from utils.dk2 import combinatorial_check
from utils.hexagonator import (
    breen_2loop_check,
    breen_symbolic_check,
    congruence_holonomy,
    dpartial_suite,
    lemma_ad_relation_check,
    prehex_convergence,
    prehex_grade2_check,
)
from utils.transport import flatness_suite
from utils.validation import validation_wrapper

LEMMA_ORDER = 5
COMBINATORIAL_POWER = 6


def build_flatness_check(cfg, targets):
    """Fake flatness and 2-flatness of (∇, Δ) and its five τ-pullbacks."""
    return assemble(flatness_suite(FLATNESS_POINTS, cfg.seed), points=FLATNESS_POINTS)


def build_dpartial_check(cfg, targets):
    """∂-contracts of every modification builder, the ad-relation lemma and the binomial lemmas."""
    N = max(cfg.order, SYMBOLIC_ORDER)
    checks = guarded("∂-contract suite", dpartial_suite, N)
    if isinstance(checks, dict):
        checks = [checks]
    checks.append(guarded("lemma ad-relation", lemma_ad_relation_check, max(N, LEMMA_ORDER)))
    checks.append(combinatorial_check(COMBINATORIAL_POWER, cfg.seed))
    return assemble(checks, order=N)


def build_hexagon_check(cfg, targets):
    """Infinitesimal hexagonator: exact grade 2 and the finite-ε 2-holonomy assembly."""
    checks = [guarded("prehex grade 2", prehex_grade2_check, max(cfg.order, 2))]
    convergence = guarded(
        "prehex holonomy",
        prehex_convergence,
        max(cfg.order, 2),
        cfg.eps_grid,
        cfg.quad,
        cfg.a,
    )
    debug_print(f"prehex errors: {convergence.get('errors')}")
    checks.append(convergence)
    checks.append(
        guarded("congruence holonomy", congruence_holonomy, cfg.eps, max(cfg.order, 2), cfg.quad, cfg.a)
    )
    return assemble(checks, eps_grid=list(cfg.eps_grid))


def _breen_trend(reports):
    ratios = [r.get("grade2_relative") for r in reports]
    if any(r is None for r in ratios):
        return {"name": "breen 2-loop trend", "ratios": ratios, "pass": False}
    decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))
    return {"name": "breen 2-loop trend", "ratios": ratios, "pass": bool(decreasing)}


def build_breen_check(cfg, targets):
    """Breen equation: symbolic grade 2 and the geometric 2-loop over the ε grid."""
    checks = [guarded("breen symbolic", breen_symbolic_check, max(cfg.order, 2))]
    loops = [
        guarded(
            f"breen 2-loop {eps:g}",
            breen_2loop_check,
            max(cfg.order, 2),
            eps,
            cfg.quad,
            cfg.a,
        )
        for eps in cfg.eps_grid
    ]
    # Only the smallest ε carries the 5% criterion; larger ones feed the trend
    # but still need their globularity and equivariance gates.
    for report in loops[:-1]:
        report["pass"] = bool(
            "error" not in report and report["globularity_pass"] and report["equivariance_pass"]
        )
    checks.extend(loops)
    if len(loops) > 1:
        checks.append(_breen_trend(loops))
    return assemble(checks, eps_grid=list(cfg.eps_grid))


@validation_wrapper
def cmd_flatness_check(args, state, validated=None):
    return run_report("flatness-check", state, validated)


@validation_wrapper
def cmd_dpartial_check(args, state, validated=None):
    return run_report("dpartial-check", state, validated)


@validation_wrapper
def cmd_hexagon_check(args, state, validated=None):
    return run_report("hexagon-check", state, validated)


@validation_wrapper
def cmd_breen_check(args, state, validated=None):
    return run_report("breen-check", state, validated)
