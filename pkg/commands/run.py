"""
Shared runner of the batch commands: configuration, spinner, report files
and the pass/fail summary.
"""

import multiprocessing
import traceback

from constants import BATCH_COMMANDS
from ui.spinner import Spinner
from utils import core
from utils.cache import save_report, save_table
from utils.core import debug_print, time_execution
from utils.errors import HexagonatorError
from utils.validation import validation_wrapper


def config_with_overrides(state, overrides):
    """RunConfig with ``overrides`` applied on top of the state, which is left as it was."""
    saved = {}
    for name, value in (overrides or {}).items():
        saved[name] = state.get_raw_variable(name)
        state.set_variable(name, value)
    try:
        return state.run_config()
    finally:
        for name, value in saved.items():
            state.variables[name] = value


def guarded(name, build, *args, **kwargs):
    """Run one check; numerical failures become a failed report instead of an exception."""
    try:
        return build(*args, **kwargs)
    except HexagonatorError as e:
        debug_print(traceback.format_exc())
        return {"name": name, "error": f"{type(e).__name__}: {e}", "pass": False}


def _builders():
    from commands.associator import build_associator
    from commands.checks import (
        build_breen_check,
        build_dpartial_check,
        build_flatness_check,
        build_hexagon_check,
    )
    from commands.mzv import build_mzv
    from commands.paths import build_paths
    from commands.transport import build_holonomy, build_transport

    return {
        "mzv": build_mzv,
        "associator": build_associator,
        "paths": build_paths,
        "transport": build_transport,
        "holonomy": build_holonomy,
        "flatness-check": build_flatness_check,
        "dpartial-check": build_dpartial_check,
        "hexagon-check": build_hexagon_check,
        "breen-check": build_breen_check,
    }


def _describe(check):
    for field in ("max_abs_residual", "residual", "grade2_relative", "relative_error_smallest_eps"):
        if field in check and isinstance(check[field], (int, float)):
            return f" ({field} {check[field]:.2e})"
    if "error" in check:
        return f" ({check['error']})"
    return ""


def print_summary(name, report):
    checks = report.get("checks", [])
    for check in checks:
        mark = "✅" if check.get("pass") else "❌"
        print(f"  {mark} {check.get('name', '?')}{_describe(check)}")
    passed = sum(1 for c in checks if c.get("pass"))
    status = "✅" if report.get("pass") else "❌"
    print(f"{status} {name}: {passed}/{len(checks)} checks passed")


def finish_report(name, report, cfg, state):
    """Write the JSON report (and CSV table when asked) and print the summary."""
    rows = [row for check in report.get("checks", []) for row in check.get("rows", [])]
    save_report(name, report, cfg, state)
    if cfg.fmt == "csv" and rows:
        save_table(name, rows, cfg)
    state.last_reports[name] = report
    print_summary(name, report)
    return bool(report.get("pass"))


def assemble(checks, **extra):
    return {**extra, "checks": checks, "pass": all(c.get("pass") for c in checks)}


def run_report(name, state, validated):
    """Build, save and summarise the report of one batch command."""
    try:
        cfg = config_with_overrides(state, validated["overrides"])
    except ValueError as e:
        print(f"❌ {e}")
        return False
    build = _builders()[name]
    print(f"🔍 Running {name} (order {cfg.order}, eps {cfg.eps:g})")
    with Spinner(f"🔄 {name}... ", enabled=not core.DEBUG):
        report = time_execution(name, build, cfg, validated["targets"])
    return finish_report(name, report, cfg, state)


def _build_worker(job):
    name, cfg = job
    return name, _builders()[name](cfg, [])


@validation_wrapper
def cmd_all(args, state, validated=None):
    """Run every batch command; the symbolic and numeric suites run in parallel workers."""
    try:
        cfg = config_with_overrides(state, validated["overrides"])
    except ValueError as e:
        print(f"❌ {e}")
        return False
    jobs = [(name, cfg) for name in BATCH_COMMANDS]
    processes = min(len(jobs), multiprocessing.cpu_count())
    print(f"🔍 Running {len(jobs)} commands on {processes} workers")
    with Spinner("🔄 all... ", enabled=not core.DEBUG):
        if processes > 1:
            with multiprocessing.Pool(processes) as pool:
                results = pool.map(_build_worker, jobs)
        else:
            results = [_build_worker(job) for job in jobs]
    # Reports are written in command order whatever order the workers finish in.
    outcomes = {name: finish_report(name, report, cfg, state) for name, report in results}
    failed = [name for name, ok in outcomes.items() if not ok]
    if failed:
        print(f"❌ Failed: {', '.join(failed)}")
    else:
        print("✅ All commands passed")
    return not failed
