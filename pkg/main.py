import argparse
import sys

try:
    import readline  # noqa: F401  (line editing and history in the REPL)
except ImportError:
    pass

from constants import BATCH_COMMANDS, get_commands
from state import CLIState
from utils.core import debug_print, set_debug

# Global state instance
state = CLIState()

# Get commands from constants
COMMANDS = get_commands(state)

# argparse destination -> state variable
FLAG_VARIABLES = {
    "order": "ORDER",
    "eps": "EPS",
    "eps_grid": "EPS_GRID",
    "quad_tol": "QUAD_TOL",
    "abs_tol": "ABS_TOL",
    "mzv_tol": "MZV_TOL",
    "out": "OUT",
    "seed": "SEED",
    "a": "A",
    "fmt": "FORMAT",
}


# Command parsing and execution
def parse_command(input_line):
    """Parse command line input into command and arguments."""
    parts = input_line.strip().split()
    if not parts:
        return None, []

    command = parts[0].lower()
    args = parts[1:] if len(parts) > 1 else []
    return command, args


def execute_command(command, args):
    """Execute a command with given arguments; returns the command's result."""
    if command in COMMANDS:
        try:
            return COMMANDS[command](args)
        except KeyboardInterrupt:
            print("\n⚠️  Command interrupted")
        except Exception as e:
            print(f"❌ Command error: {e}")
            from utils.core import DEBUG

            if DEBUG:
                import traceback

                traceback.print_exc()
        return False
    else:
        print(f"❌ Unknown command: {command}")
        print("💡 Type 'help' for available commands")
        return False


def build_parser():
    parser = argparse.ArgumentParser(
        description="Hexagonator CLI - CMKZ 2-holonomy and hexagonator verification"
    )
    parser.add_argument("action", nargs="?", choices=["run"], help="Run one command and exit")
    parser.add_argument("command", nargs="?", choices=BATCH_COMMANDS + ["all"])
    parser.add_argument("targets", nargs="*", help="Command targets (indices or path keys)")
    parser.add_argument(
        "--debug", dest="debug", action="store_true", help="Enable debug output"
    )
    parser.add_argument("--config", help="JSON config file (flags override it)")
    parser.add_argument("--order", type=int, help="Truncation order N")
    parser.add_argument("--eps", type=float, help="Single ε in (0, 1/4]")
    parser.add_argument("--eps-grid", dest="eps_grid", help="Comma-separated decreasing ε grid")
    parser.add_argument("--quad-tol", dest="quad_tol", type=float, help="Relative quadrature tolerance")
    parser.add_argument("--abs-tol", dest="abs_tol", type=float, help="Absolute quadrature tolerance")
    parser.add_argument("--mzv-tol", dest="mzv_tol", type=float, help="MZV accuracy")
    parser.add_argument("--out", help="Report directory")
    parser.add_argument("--seed", type=int, help="Seed of the randomised suites")
    parser.add_argument("--a", help="Free path parameter a")
    fmt = parser.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    parser.set_defaults(debug=False)
    return parser


def apply_arguments(args):
    """Defaults < config file < command-line flags."""
    if args.config:
        state.load_config(args.config)
    for dest, variable in FLAG_VARIABLES.items():
        value = getattr(args, dest)
        if value is not None:
            state.set_variable(variable, value)
    if args.debug:
        set_debug(True, state)
    else:
        set_debug(state.get_variable("DEBUG"), state)


def run_batch(args):
    debug_print(f"Batch run: {args.command} {args.targets}")
    ok = execute_command(args.command, list(args.targets))
    return 0 if ok else 1


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.action == "run" and not args.command:
        parser.error("run needs a command")
    if args.targets and args.action != "run":
        parser.error("targets are only accepted with 'run <command>'")

    try:
        apply_arguments(args)
    except (OSError, ValueError) as e:
        parser.error(str(e))

    if args.action == "run":
        return run_batch(args)

    print("🔷 Welcome to the Hexagonator CLI")
    print("💡 Type 'help' for available commands")

    while True:
        try:
            context = generate_prompt_context("informational")
            prompt = f"hexagonator {context} > "

            user_input = input(prompt).strip()
            if not user_input:
                continue

            command, cmd_args = parse_command(user_input)
            if command:
                debug_print(f"Executing command: {command} with args: {cmd_args}")
                execute_command(command, cmd_args)

        except KeyboardInterrupt:
            print("\n⚠️  Use 'exit' or 'quit' to leave the application")
        except EOFError:
            print("\nGoodbye.")
            return 0


def generate_prompt_context(kind="informational"):
    """Generate context for the command prompt based on current state."""
    match kind:
        case "informational":
            order = state.get_variable("ORDER")
            eps = state.get_variable("EPS")
            debug = state.get_variable("DEBUG")
            c1 = " 🐛" if debug else " 🐞"
            return f"[N={order} ε={eps}{c1}]"
        case "report":
            report = state.get_variable("LAST_REPORT")
            return f"[{report[-30:]}]" if report else "[~]"
        case _:
            return "[~]"


if __name__ == "__main__":
    sys.exit(main())
