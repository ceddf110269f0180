from functools import wraps

# Flags shared by every batch command and the variables they set.
RUN_FLAGS = {
    "--order": "ORDER",
    "--eps": "EPS",
    "--eps-grid": "EPS_GRID",
    "--quad-tol": "QUAD_TOL",
    "--abs-tol": "ABS_TOL",
    "--mzv-tol": "MZV_TOL",
    "--out": "OUT",
    "--seed": "SEED",
    "--a": "A",
}
FORMAT_FLAGS = {"--json": "json", "--csv": "csv"}


def parse_run_flags(args):
    """Split command arguments into positional targets and variable overrides.

    Parameters
    ----------
    args : list[str]
        Command arguments, e.g. ``["P_V", "--eps", "0.01"]``; ``--flag=value``
        is accepted too.

    Returns
    -------
    tuple[list[str], dict]
        Positional arguments and a ``{VARIABLE: value}`` mapping.

    Raises
    ------
    ValueError
        If a flag is unknown or lacks its value.
    """
    positional, overrides = [], {}
    items = list(args)
    i = 0
    while i < len(items):
        arg = items[i]
        if arg.startswith("--"):
            flag, _, inline = arg.partition("=")
            if flag in FORMAT_FLAGS:
                overrides["FORMAT"] = FORMAT_FLAGS[flag]
            elif flag in RUN_FLAGS:
                if inline:
                    value = inline
                elif i + 1 < len(items):
                    i += 1
                    value = items[i]
                else:
                    raise ValueError(f"Flag {flag} needs a value")
                overrides[RUN_FLAGS[flag]] = value
            else:
                raise ValueError(f"Unknown flag '{flag}'")
        else:
            positional.append(arg)
        i += 1
    return positional, overrides


def _targets(known, kind):
    def validate(args):
        positional, overrides = parse_run_flags(args)
        unknown = [p for p in positional if p not in known]
        if unknown:
            raise ValueError(f"Unknown {kind}: {', '.join(unknown)}")
        return {"targets": positional, "overrides": overrides}

    return validate


def validate_mzv_args(args):
    """Indices are comma-separated, e.g. ``mzv 2 3 2,1``."""
    positional, overrides = parse_run_flags(args)
    indices = []
    for text in positional:
        try:
            idx = tuple(int(s) for s in text.split(","))
        except ValueError:
            raise ValueError(f"Index '{text}' must be comma-separated integers") from None
        if not idx or idx[0] < 2 or any(s < 1 for s in idx):
            raise ValueError(f"Index {idx} is not admissible (s₁ ≥ 2, all sᵢ ≥ 1)")
        indices.append(idx)
    return {"targets": indices, "overrides": overrides}


def validate_plain_args(args):
    positional, overrides = parse_run_flags(args)
    if positional:
        raise ValueError(f"Unexpected arguments: {' '.join(positional)}")
    return {"targets": [], "overrides": overrides}


def validate_transport_args(args):
    from data.catalog import PATH_KEYS

    return _targets(PATH_KEYS, "1-path")(args)


def validate_holonomy_args(args):
    from data.catalog import TWO_PATH_KEYS

    return _targets(TWO_PATH_KEYS, "2-path")(args)


# Mapping of command names to validator functions
VALIDATORS = {
    "mzv": validate_mzv_args,
    "associator": validate_plain_args,
    "paths": validate_plain_args,
    "transport": validate_transport_args,
    "holonomy": validate_holonomy_args,
    "flatness_check": validate_plain_args,
    "dpartial_check": validate_plain_args,
    "hexagon_check": validate_plain_args,
    "breen_check": validate_plain_args,
    "all": validate_plain_args,
}


def validation_wrapper(func):
    """Factory that applies validation before executing a command function."""

    command_name = func.__name__.replace("cmd_", "", 1)
    validator = VALIDATORS.get(command_name)

    @wraps(func)
    def wrapped(args, state, *f_args, **f_kwargs):
        validated = None
        if validator:
            try:
                validated = validator(args)
            except ValueError as e:
                print(f"❌ {e}")
                from commands.common import print_help_for_command

                print_help_for_command(command_name.replace("_", "-"), state)
                return False
        return func(args, state, *f_args, validated=validated, **f_kwargs)

    return wrapped
