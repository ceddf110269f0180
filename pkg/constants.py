VERSION = "0.3.0"

DEFAULT_ORDER = 2
DEFAULT_EPS = 0.05
DEFAULT_EPS_GRID = [1e-1, 3e-2, 1e-2]
DEFAULT_REL_TOL = 1e-8
DEFAULT_ABS_TOL = 1e-10
DEFAULT_MZV_TOL = 1e-12
DEFAULT_SEED = 0
DEFAULT_OUT = "reports"
DEFAULT_A = 1.0

# Order used by the symbolic suites when the run order is lower.
SYMBOLIC_ORDER = 4
FLATNESS_POINTS = 100
GLOBULARITY_EPS = 0.05
BRW_RELATION_EPS = [0.1, 0.05, 0.01]

# Batch commands in the order `all` runs them.
BATCH_COMMANDS = [
    "mzv",
    "associator",
    "paths",
    "transport",
    "holonomy",
    "flatness-check",
    "dpartial-check",
    "hexagon-check",
    "breen-check",
]

# The six 2-paths with a predicted ε → 0 limit of their grade-2 part.
LIMIT_2PATHS = ["P_V", "P_III", "P_IV", "Q_VI", "Q_V", "Q_IV"]

CSV_COLUMNS = [
    "eps",
    "grade",
    "term_key",
    "predicted_re",
    "predicted_im",
    "computed_re",
    "computed_im",
    "abs_err",
]


def get_commands(state):
    """Build a mapping of command names to callable handlers.

    The command modules import ``constants`` themselves, so they are
    imported here rather than at module level. Each command
    name is associated with a ``lambda`` that injects the shared
    ``state`` object when invoking the real implementation.
    """
    from commands.core import cmd_clear, cmd_config, cmd_set, cmd_show
    from commands.common import cmd_help, cmd_debug
    from commands.mzv import cmd_mzv
    from commands.associator import cmd_associator
    from commands.paths import cmd_paths
    from commands.transport import cmd_holonomy, cmd_transport
    from commands.checks import (
        cmd_breen_check,
        cmd_dpartial_check,
        cmd_flatness_check,
        cmd_hexagon_check,
    )
    from commands.run import cmd_all

    return {
        "all": lambda args: cmd_all(args, state),
        "associator": lambda args: cmd_associator(args, state),
        "breen-check": lambda args: cmd_breen_check(args, state),
        "clear": lambda args: cmd_clear(args),
        "config": lambda args: cmd_config(args, state),
        "debug": lambda args: cmd_debug(args, state),
        "dpartial-check": lambda args: cmd_dpartial_check(args, state),
        "flatness-check": lambda args: cmd_flatness_check(args, state),
        "help": lambda args: cmd_help(args, state),
        "hexagon-check": lambda args: cmd_hexagon_check(args, state),
        "holonomy": lambda args: cmd_holonomy(args, state),
        "mzv": lambda args: cmd_mzv(args, state),
        "paths": lambda args: cmd_paths(args, state),
        "set": lambda args: cmd_set(args, state),
        "show": lambda args: cmd_show(args, state),
        "transport": lambda args: cmd_transport(args, state),
        # Aliases
        "vars": lambda args: cmd_show(["variables"], state),
        "ls": lambda args: cmd_show(["variables"], state),
        "exit": lambda args: exit(0),
        "quit": lambda args: exit(0),
        "q": lambda args: exit(0),
    }
