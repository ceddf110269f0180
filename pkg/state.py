"""
State management for the hexagonator CLI.
"""

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from constants import (
    DEFAULT_A,
    DEFAULT_ABS_TOL,
    DEFAULT_EPS,
    DEFAULT_EPS_GRID,
    DEFAULT_MZV_TOL,
    DEFAULT_ORDER,
    DEFAULT_OUT,
    DEFAULT_REL_TOL,
    DEFAULT_SEED,
)
from utils.core import debug_print
from utils.transport import QuadratureSpec

_FLOAT = r"[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?"


def parse_grid(value):
    """``"1e-1,3e-2"`` or a list of numbers -> list of floats."""
    if isinstance(value, (list, tuple)):
        return [float(x) for x in value]
    return [float(x) for x in str(value).replace(" ", "").split(",") if x]


@dataclass(frozen=True)
class RunConfig:
    """Immutable settings of one batch run."""

    order: int = DEFAULT_ORDER
    eps: float = DEFAULT_EPS
    eps_grid: tuple = tuple(DEFAULT_EPS_GRID)
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    output: Path = Path(DEFAULT_OUT)
    seed: int = DEFAULT_SEED
    fmt: str = "json"
    a: complex = DEFAULT_A
    mzv_tol: float = DEFAULT_MZV_TOL

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("order must be non-negative")
        if not 0 < self.eps <= 0.25:
            raise ValueError(f"eps must lie in (0, 1/4], got {self.eps}")
        if not self.eps_grid:
            raise ValueError("eps grid must not be empty")
        if any(not 0 < e <= 0.25 for e in self.eps_grid):
            raise ValueError("eps grid values must lie in (0, 1/4]")
        if any(b >= a for a, b in zip(self.eps_grid, self.eps_grid[1:])):
            raise ValueError("eps grid must be strictly decreasing")
        if self.a == 0:
            raise ValueError("a must be non-zero")
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"Unknown output format '{self.fmt}'")


class CLIState:
    """Global state manager for the CLI application."""

    def __init__(self):
        self.variables = {
            "ORDER": str(DEFAULT_ORDER),
            "EPS": str(DEFAULT_EPS),
            "EPS_GRID": ",".join(f"{e:g}" for e in DEFAULT_EPS_GRID),
            "QUAD_TOL": f"{DEFAULT_REL_TOL:g}",
            "ABS_TOL": f"{DEFAULT_ABS_TOL:g}",
            "MZV_TOL": f"{DEFAULT_MZV_TOL:g}",
            "OUT": DEFAULT_OUT,
            "SEED": str(DEFAULT_SEED),
            "FORMAT": "json",
            "A": f"{DEFAULT_A:g}",
            "DEBUG": "false",
            "LAST_REPORT": "",
        }
        self.last_reports = {}

        # Variables that should be returned as booleans
        self.boolean_variables = {"DEBUG"}

        self.valid_variable_formats = {
            "ORDER": r"^\d+$",
            "EPS": rf"^{_FLOAT}$",
            "EPS_GRID": rf"^{_FLOAT}(,{_FLOAT})*$",
            "QUAD_TOL": rf"^{_FLOAT}$",
            "ABS_TOL": rf"^{_FLOAT}$",
            "MZV_TOL": rf"^{_FLOAT}$",
            "SEED": r"^\d+$",
            "FORMAT": r"^(json|csv)$",
            "A": r"^[-+]?[\d.eEj+\-]+$",
            "DEBUG": r"^(true|false)$",
            "LAST_REPORT": r"^[\w\-./ ]+\.json$",
        }

    def set_variable(self, name, value):
        name = name.upper()
        if name in self.variables:
            old_value = self.variables[name]
            if name == "EPS_GRID" and isinstance(value, (list, tuple)):
                value = ",".join(f"{float(e):g}" for e in value)
            self.variables[name] = str(value) if value is not None else ""
            debug_print(
                f"❤️Variable {name} changed from '{old_value}' to '{self.variables[name]}'"
            )
            return True
        else:
            debug_print(f"💙Unknown variable: {name}")
            return False

    def get_variable(self, name):
        name = name.upper()
        value = self.variables.get(name, "")

        # Convert boolean variables to actual booleans
        if name in self.boolean_variables:
            return value.lower() in ["true", "1", "yes", "on"]

        return value

    def get_raw_variable(self, name):
        """Get the raw string value without boolean conversion."""
        name = name.upper()
        return self.variables.get(name, "")

    def list_variables(self):
        print("\n" + "=" * 50)
        print("CURRENT VARIABLES")
        print("=" * 50)
        for name, value in self.variables.items():
            status = "✅ SET" if value else "❌ UNSET"
            display_value = str(value)
            display_value = (
                display_value[:40] + "..." if len(display_value) > 40 else display_value
            )
            print(f"{name:20} = {display_value:45} [{status}]")
        print("=" * 50)

    def validate_required_vars(self, required_vars):
        missing = []
        invalid = []
        for var in required_vars:
            if not self.get_raw_variable(var):
                missing.append(var)
                continue

            if var in self.valid_variable_formats:
                if not re.match(
                    self.valid_variable_formats[var], self.get_raw_variable(var)
                ):
                    invalid.append(var)

        if missing:
            print(f"❌ Missing required variables: {', '.join(missing)}")
        if invalid:
            print(f"❌ Invalid variables: {', '.join(invalid)}")
        else:
            debug_print("All required variables are set.")

        return missing, invalid

    def load_config(self, path):
        """Set variables from one JSON document; returns the names applied."""
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
        if not isinstance(document, dict):
            raise ValueError(f"Config {path} must hold a JSON object")
        applied = []
        for key, value in document.items():
            if isinstance(value, bool):
                value = "true" if value else "false"
            if self.set_variable(key, value):
                applied.append(key.upper())
        debug_print(f"Config {path}: applied {', '.join(applied) or 'nothing'}")
        return applied

    def run_config(self):
        """Validate the variables and freeze them into a :class:`RunConfig`."""
        names = [n for n in self.variables if n not in ("LAST_REPORT", "DEBUG")]
        missing, invalid = self.validate_required_vars(names)
        if missing or invalid:
            raise ValueError(
                f"Cannot build run configuration ({', '.join(missing + invalid)})"
            )
        return RunConfig(
            order=int(self.get_variable("ORDER")),
            eps=float(self.get_variable("EPS")),
            eps_grid=tuple(parse_grid(self.get_variable("EPS_GRID"))),
            quad=QuadratureSpec(
                rel_tol=float(self.get_variable("QUAD_TOL")),
                abs_tol=float(self.get_variable("ABS_TOL")),
            ),
            output=Path(self.get_variable("OUT")),
            seed=int(self.get_variable("SEED")),
            fmt=self.get_variable("FORMAT"),
            a=complex(self.get_variable("A")),
            mzv_tol=float(self.get_variable("MZV_TOL")),
        )
