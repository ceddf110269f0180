from utils.core import sync_debug_with_state

RUN_FLAGS_USAGE = "[--order N] [--eps E] [--eps-grid E1,E2,...] [--quad-tol T] [--out DIR] [--seed S] [--json|--csv]"


def _get_var_description(var):
    """Get description for a variable."""
    descriptions = {
        "ORDER": "Truncation order N of the series",
        "EPS": "Regularisation parameter ε for single-ε runs, in (0, 1/4]",
        "EPS_GRID": "Strictly decreasing ε values for convergence runs",
        "QUAD_TOL": "Relative tolerance of transport ODEs and s-quadrature",
        "ABS_TOL": "Absolute tolerance of transport ODEs and s-quadrature",
        "MZV_TOL": "Accuracy of multiple zeta values",
        "OUT": "Directory receiving JSON reports and CSV tables",
        "SEED": "Seed of the randomised property suites",
        "FORMAT": "json, or csv to also write convergence tables",
        "A": "Free parameter a ≠ 0 of the catalog paths",
        "DEBUG": "Print debug output and timings",
        "LAST_REPORT": "Path of the last report written",
    }
    return descriptions.get(var, "User-defined variable")


def print_help_for_command(command, state):
    """Display usage information for a specific command."""
    match command:
        case "set":
            print("Usage: set <VARIABLE> <value>")
            print("Available variables:")
            for var in state.variables.keys():
                print(f"  {var}")
            return
        case "show":
            print("Usage: show [variables|paths|config|report [file]]")
            print("Display variables, the path catalog, the run configuration or a saved report.")
            return
        case "config":
            print("Usage: config <file.json>")
            print("Load variables from one JSON document, e.g. {\"order\": 3, \"eps_grid\": [0.1, 0.01]}.")
            return
        case "debug":
            print("Usage: debug [on|off]")
            print("Toggle debug output; no argument toggles the current state.")
            return
        case "mzv":
            print(f"Usage: mzv [index ...] {RUN_FLAGS_USAGE}")
            print("Example: mzv 2 3 2,1")
            print("Golden values and a ζ table from nested sums and iterated integrals.")
            return
        case "associator":
            print(f"Usage: associator {RUN_FLAGS_USAGE}")
            print("Φ_KZ from MZVs, from the 𝓘 integrals and from finite-ε transport.")
            return
        case "paths":
            print(f"Usage: paths {RUN_FLAGS_USAGE}")
            print("Build every catalog 1-path and 2-path at EPS and check puncture clearance.")
            return
        case "transport":
            print(f"Usage: transport [1-path ...] {RUN_FLAGS_USAGE}")
            print("Transports, globularity of every 2-path and the BRW relation.")
            return
        case "holonomy":
            print(f"Usage: holonomy [2-path ...] {RUN_FLAGS_USAGE}")
            print("Example: holonomy P_V Q_VI --eps-grid 1e-1,1e-2,1e-3 --csv")
            print("Grade-2 2-holonomies against their predicted values over EPS_GRID.")
            return
        case "flatness-check":
            print(f"Usage: flatness-check {RUN_FLAGS_USAGE}")
            print("Fake flatness and 2-flatness at 100 random points, all τ-pullbacks.")
            return
        case "dpartial-check":
            print(f"Usage: dpartial-check {RUN_FLAGS_USAGE}")
            print("∂(value) = source − target for every modification builder.")
            return
        case "hexagon-check":
            print(f"Usage: hexagon-check {RUN_FLAGS_USAGE}")
            print("Infinitesimal hexagonator: exact grade 2 and the 2-holonomy limit.")
            return
        case "breen-check":
            print(f"Usage: breen-check {RUN_FLAGS_USAGE}")
            print("Breen equation: symbolic grade 2 and the geometric 2-loop.")
            return
        case "all":
            print(f"Usage: all {RUN_FLAGS_USAGE}")
            print("Run every batch command in parallel workers.")
            return
        case "clear":
            print("Usage: clear")
            print("Clear the terminal screen.")
            return
        case "help":
            print("Usage: help [command]")
            print("Show general help or help for a specific command.")
            return


def cmd_debug(args, state):
    """Toggle debug output or set it explicitly.

    With no arguments the current debug flag is inverted. Supplying
    ``on``/``off`` (or truthy equivalents) forces the flag to the
    desired state.
    """
    current_debug = state.get_variable("DEBUG")

    if not args:
        new_debug = not current_debug
    else:
        arg = args[0].lower()
        if arg in ["on", "true", "1", "yes"]:
            new_debug = True
        elif arg in ["off", "false", "0", "no"]:
            new_debug = False
        else:
            return print_help_for_command("debug", state)

    state.set_variable("DEBUG", "true" if new_debug else "false")
    sync_debug_with_state(state)
    print(f"🐛 Debug mode: {'ON' if new_debug else 'OFF'}")


def cmd_help(args, state):
    """Show help information."""
    if args:
        return print_help_for_command(args[0], state)
    print("\n" + "=" * 60)
    print("HEXAGONATOR CLI - COMMAND REFERENCE")
    print("=" * 60)
    print("State Management:")
    print("  set <VAR> <value>     Set a variable (ORDER, EPS, EPS_GRID, ...)")
    print("  show [target]         Show variables, paths, config or a report")
    print("  config <file.json>    Load variables from a JSON config")
    print()
    print("Verification:")
    print("  mzv [index ...]       Multiple zeta values")
    print("  associator            Φ_KZ three ways")
    print("  paths                 Catalog 1-paths and 2-paths")
    print("  transport [path ...]  Transports, globularity, BRW relation")
    print("  holonomy [2-path ...] 2-holonomy limits over EPS_GRID")
    print("  flatness-check        Fake flatness and 2-flatness")
    print("  dpartial-check        ∂-contracts of the modification series")
    print("  hexagon-check         Infinitesimal hexagonator")
    print("  breen-check           Breen equation")
    print("  all                   Every command above")
    print()
    print("Utility:")
    print("  help [command]        Show this help or help for specific command")
    print("  debug [on|off]        Toggle debug output")
    print("  clear                 Clear the screen")
    print("  exit, quit            Exit the application")
    print()
    print("Variables:")
    for var in state.variables.keys():
        print(f"  {var:12} - {_get_var_description(var)}")
    print("=" * 60)
