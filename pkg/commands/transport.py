from commands.run import assemble, guarded, run_report
from constants import BRW_RELATION_EPS, GLOBULARITY_EPS, LIMIT_2PATHS
from data.catalog import PATH_KEYS, TWO_PATH_KEYS, make_2path, make_path
from data.geometry import Connection
from utils.core import format_complex
from utils.hexagonator import brw_relation_check, holonomy_convergence
from utils.transport import (
    globularity_check,
    max_abs,
    parallel_transport,
    surface_holonomy,
    surface_holonomy_pieces,
    transport_derivative_check,
)
from utils.validation import validation_wrapper

GLOBULARITY_ORDER = 3


def _transport_report(key, cfg):
    path = make_path(key, {"eps": cfg.eps, "a": cfg.a})
    W = parallel_transport(path, Connection(), cfg.order, cfg.quad)
    grade1 = {}
    if cfg.order:
        grade1 = {name: format_complex(W.coeff(name)) for name in ("t12", "t13", "t23")}
    return {"name": f"transport {key}", "grade1": grade1, "W": W, "pass": True}


def _split_additivity(cfg, key="P_V"):
    """Holonomy over [0, 1] equals the sum over [0, 1/2] and [1/2, 1]."""
    P = make_2path(key, {"eps": GLOBULARITY_EPS, "a": cfg.a})
    c = Connection()
    whole = surface_holonomy(P, c, GLOBULARITY_ORDER, cfg.quad)
    left, right = surface_holonomy_pieces(P, c, GLOBULARITY_ORDER, cfg.quad)
    residual = max_abs(whole - left - right) / max(1.0, max_abs(whole))
    return {
        "name": f"vertical split {key}",
        "residual": residual,
        "pass": bool(residual < 10 * cfg.quad.rel_tol),
    }


def build_transport(cfg, targets):
    """Transports of the requested 1-paths, globularity of every 2-path and the BRW relation."""
    keys = targets or PATH_KEYS
    checks = [guarded(f"transport {key}", _transport_report, key, cfg) for key in keys]
    c = Connection()
    params = {"eps": GLOBULARITY_EPS, "a": cfg.a}
    for key in TWO_PATH_KEYS:
        checks.append(
            guarded(
                f"globularity {key}",
                lambda k=key: globularity_check(
                    make_2path(k, params), c, GLOBULARITY_ORDER, cfg.quad
                ),
            )
        )
    checks.append(guarded("vertical split", _split_additivity, cfg))
    for eps in BRW_RELATION_EPS:
        checks.append(
            guarded(
                f"BRW relation {eps:g}",
                brw_relation_check,
                eps,
                GLOBULARITY_ORDER,
                cfg.quad,
                cfg.a,
            )
        )
    derivative = guarded(
        "transport derivative",
        lambda: transport_derivative_check(
            make_2path("Q_VI", params), c, GLOBULARITY_ORDER, 0.3, cfg.quad
        ),
    )
    return assemble(checks, diagnostics=[derivative])


def build_holonomy(cfg, targets):
    """ε → 0 behaviour of the grade-2 part of each 2-holonomy."""
    keys = targets or LIMIT_2PATHS
    checks = [
        guarded(
            f"holonomy limit {key}",
            holonomy_convergence,
            key,
            cfg.eps_grid,
            cfg.order,
            cfg.quad,
            cfg.a,
        )
        for key in keys
    ]
    return assemble(checks, eps_grid=list(cfg.eps_grid))


@validation_wrapper
def cmd_transport(args, state, validated=None):
    return run_report("transport", state, validated)


@validation_wrapper
def cmd_holonomy(args, state, validated=None):
    return run_report("holonomy", state, validated)
