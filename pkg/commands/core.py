"""
State commands of the hexagonator CLI: set, show, config, clear.
"""

import json
import os
from pathlib import Path

from commands.common import print_help_for_command
from data.catalog import PATH_KEYS, TWO_PATH_KEYS
from utils.cache import load_report
from utils.core import sync_debug_with_state


def cmd_set(args, state):
    if len(args) < 2:
        return print_help_for_command("set", state)
    var_name = args[0].upper()
    value = " ".join(args[1:])
    if not state.set_variable(var_name, value):
        print(f"❌ Unknown variable: {var_name}")
        return
    _, invalid = state.validate_required_vars([var_name])
    if invalid:
        print(f"💡 {var_name} will be rejected by the next run until it is fixed")
        return
    print(f"✅ {var_name} => {value}")
    if var_name == "DEBUG":
        sync_debug_with_state(state)


def _show_report(path):
    metadata, report = load_report(path)
    if not report:
        print(f"❌ Could not read report {path}")
        return
    print(f"\n📋 {metadata.get('command', Path(path).stem)} (order {metadata.get('order')})")
    for check in report.get("checks", []):
        mark = "✅" if check.get("pass") else "❌"
        print(f"  {mark} {check.get('name')}")
    print(f"{'✅ PASS' if report.get('pass') else '❌ FAIL'}")


def cmd_show(args, state):
    if not args:
        state.list_variables()
        return
    target = args[0].lower()
    if target in ("variables", "vars"):
        state.list_variables()
    elif target == "paths":
        print(f"\n📋 1-paths ({len(PATH_KEYS)}):")
        for i, key in enumerate(PATH_KEYS, 1):
            print(f"  {i:2}. {key}")
        print(f"\n📋 2-paths ({len(TWO_PATH_KEYS)}):")
        for i, key in enumerate(TWO_PATH_KEYS, 1):
            print(f"  {i:2}. {key}")
    elif target == "config":
        try:
            cfg = state.run_config()
        except ValueError as e:
            print(f"❌ {e}")
            return
        print(f"order={cfg.order} eps={cfg.eps:g} eps_grid={list(cfg.eps_grid)}")
        print(f"quad={cfg.quad} seed={cfg.seed} out={cfg.output} format={cfg.fmt} a={cfg.a}")
    elif target == "report":
        path = args[1] if len(args) > 1 else state.get_variable("LAST_REPORT")
        if not path:
            print("❌ No report yet. Run a command first.")
            return
        _show_report(path)
    else:
        print(f"❌ Unknown show target: {target}")
        print("Available targets: variables, paths, config, report")


def cmd_config(args, state):
    """Load a JSON config file into the variables."""
    if not args:
        return print_help_for_command("config", state)
    path = args[0]
    if not os.path.exists(path):
        print(f"❌ Config file not found: {path}")
        return
    try:
        applied = state.load_config(path)
    except (json.JSONDecodeError, ValueError) as e:
        print(f"❌ Failed to load config: {e}")
        return
    sync_debug_with_state(state)
    print(f"✅ Loaded {len(applied)} variables from {path}")


def cmd_clear(args):
    """Clear the terminal screen."""
    os.system("clear" if os.name != "nt" else "cls")
