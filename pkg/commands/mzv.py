from commands.run import assemble, guarded, run_report
from utils.core import debug_print
from utils.mzv import TABLE_INDICES, golden_checks, mzv_table
from utils.validation import validation_wrapper


def build_mzv(cfg, targets):
    """Golden values plus a ζ table by two independent evaluators."""
    indices = [tuple(t) for t in targets] or list(TABLE_INDICES)
    checks = guarded("golden values", golden_checks, cfg.mzv_tol)
    if isinstance(checks, dict):
        checks = [checks]
    table = mzv_table(indices, cfg.mzv_tol)
    for row in table:
        debug_print(f"ζ{tuple(row['index'])} = {row['nested_sum']:.15f}")
    worst = max(row["difference"] for row in table)
    checks.append(
        {
            "name": "table: nested sum = iterated integral",
            "residual": worst,
            "tolerance": 1e-8,
            "pass": bool(worst < 1e-8),
        }
    )
    return assemble(checks, table=table)


@validation_wrapper
def cmd_mzv(args, state, validated=None):
    return run_report("mzv", state, validated)
