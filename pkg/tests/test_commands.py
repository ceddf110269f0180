import json
import os
from pathlib import Path
from unittest.mock import MagicMock
import pytest

# ensure commands module is importable from repo root
import sys

sys.path.append(str(Path(__file__).resolve().parent.parent))

import numpy as np

from commands import core as commands
from commands import common as debug_cmd
from commands import mzv as mzv_cmd
from commands import run as run_cmd
from utils import cache as cache_utils
from utils import validation as validation_utils
from utils.errors import QuadratureError

FAKE_ROW = {
    "eps": 0.1,
    "grade": 2,
    "term_key": "P_V:L",
    "predicted_re": -1.0,
    "predicted_im": 0.0,
    "computed_re": -0.9,
    "computed_im": 0.0,
    "abs_err": 0.1,
}


@pytest.fixture
def mock_state():
    state = MagicMock()
    state.get_variable = MagicMock(return_value=None)
    state.set_variable = MagicMock()
    return state


@pytest.fixture
def cli_state():
    from state import CLIState

    return CLIState()


@pytest.fixture
def fake_builders(monkeypatch):
    """Replace every batch builder by a cheap one that records its calls."""
    calls = []

    def build(name):
        def builder(cfg, targets):
            calls.append((name, cfg.order, list(targets)))
            check = {"name": f"{name} check", "pass": True, "rows": [FAKE_ROW]}
            return run_cmd.assemble([check], order=cfg.order)

        return builder

    from constants import BATCH_COMMANDS

    monkeypatch.setattr(run_cmd, "_builders", lambda: {n: build(n) for n in BATCH_COMMANDS})
    return calls


# ----- state tests -----


def test_run_config_defaults(cli_state):
    cfg = cli_state.run_config()
    assert cfg.order == 2
    assert cfg.eps_grid == (0.1, 0.03, 0.01)
    assert cfg.quad.rel_tol == 1e-8
    assert cfg.a == 1


@pytest.mark.parametrize(
    "name, value",
    [("EPS", "0.5"), ("EPS_GRID", "0.01,0.1"), ("A", "0"), ("ORDER", "two")],
)
def test_run_config_rejects_bad_values(cli_state, name, value):
    cli_state.set_variable(name, value)
    with pytest.raises(ValueError):
        cli_state.run_config()


def test_set_variable_joins_grids(cli_state):
    assert cli_state.set_variable("eps_grid", [0.1, 0.01])
    assert cli_state.get_variable("EPS_GRID") == "0.1,0.01"
    assert not cli_state.set_variable("URL", "x")


def test_load_config(tmp_path, cli_state):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"order": 3, "eps_grid": [0.1, 0.05], "debug": False}))
    applied = cli_state.load_config(config)
    assert applied == ["ORDER", "EPS_GRID", "DEBUG"]
    assert cli_state.run_config().eps_grid == (0.1, 0.05)
    assert cli_state.get_variable("DEBUG") is False


def test_load_config_rejects_lists(tmp_path, cli_state):
    config = tmp_path / "run.json"
    config.write_text("[1, 2]")
    with pytest.raises(ValueError):
        cli_state.load_config(config)


# ----- validation utils tests -----


def test_parse_run_flags():
    positional, overrides = validation_utils.parse_run_flags(
        ["P_V", "--eps", "0.01", "--order=3", "--csv"]
    )
    assert positional == ["P_V"]
    assert overrides == {"EPS": "0.01", "ORDER": "3", "FORMAT": "csv"}


def test_parse_run_flags_errors():
    with pytest.raises(ValueError):
        validation_utils.parse_run_flags(["--colour", "red"])
    with pytest.raises(ValueError):
        validation_utils.parse_run_flags(["--eps"])


def test_validate_mzv_args():
    result = validation_utils.validate_mzv_args(["2", "2,1", "--seed", "4"])
    assert result == {"targets": [(2,), (2, 1)], "overrides": {"SEED": "4"}}
    with pytest.raises(ValueError):
        validation_utils.validate_mzv_args(["1,2"])
    with pytest.raises(ValueError):
        validation_utils.validate_mzv_args(["two"])


def test_validate_holonomy_args():
    assert validation_utils.validate_holonomy_args(["Q_VI"])["targets"] == ["Q_VI"]
    assert validation_utils.validate_holonomy_args([])["targets"] == []
    with pytest.raises(ValueError):
        validation_utils.validate_holonomy_args(["Q_VII"])


def test_validate_plain_args_rejects_targets():
    with pytest.raises(ValueError):
        validation_utils.validate_plain_args(["extra"])


def test_validation_wrapper_prints_help(cli_state, capsys):
    assert mzv_cmd.cmd_mzv(["0"], cli_state) is False
    out = capsys.readouterr().out
    assert "not admissible" in out
    assert "Usage: mzv" in out


# ----- cache utils tests -----


def test_to_jsonable():
    value = {"z": 1 + 2j, "n": np.int64(3), "ok": np.bool_(True), "path": Path("a/b")}
    assert cache_utils.to_jsonable(value) == {
        "z": {"re": 1.0, "im": 2.0},
        "n": 3,
        "ok": True,
        "path": "a/b",
    }


def test_save_report_is_reproducible(tmp_path, cli_state, capsys):
    cli_state.set_variable("OUT", str(tmp_path))
    cfg = cli_state.run_config()
    first = cache_utils.save_report("mzv", {"pass": True, "value": 0.5j}, cfg, cli_state)
    text = first.read_text()
    second = cache_utils.save_report("mzv", {"pass": True, "value": 0.5j}, cfg)
    assert second.read_text() == text
    assert cli_state.get_variable("LAST_REPORT") == str(first)
    metadata, report = cache_utils.load_report(first)
    assert metadata["command"] == "mzv"
    assert metadata["eps_grid"] == [0.1, 0.03, 0.01]
    assert report["value"] == {"re": 0.0, "im": 0.5}
    assert "Report written to" in capsys.readouterr().out


def test_load_report_missing_file(tmp_path):
    assert cache_utils.load_report(tmp_path / "none.json") == ({}, {})


def test_save_table_columns(tmp_path, cli_state):
    cli_state.set_variable("OUT", str(tmp_path))
    out = cache_utils.save_table("holonomy", [FAKE_ROW], cli_state.run_config())
    header, row = out.read_text().splitlines()
    assert header == "eps,grade,term_key,predicted_re,predicted_im,computed_re,computed_im,abs_err"
    assert row.startswith("0.1,2,P_V:L,-1,")


# ----- runner tests -----


def test_config_with_overrides_restores_state(cli_state):
    cfg = run_cmd.config_with_overrides(cli_state, {"ORDER": "4"})
    assert cfg.order == 4
    assert cli_state.get_variable("ORDER") == "2"


def test_config_with_bad_override_restores_state(cli_state):
    with pytest.raises(ValueError):
        run_cmd.config_with_overrides(cli_state, {"EPS": "0.9"})
    assert cli_state.get_variable("EPS") == "0.05"


def test_guarded_turns_numeric_failures_into_reports():
    def fail():
        raise QuadratureError("did not converge")

    report = run_cmd.guarded("quadrature", fail)
    assert report["pass"] is False
    assert "QuadratureError" in report["error"]


def test_guarded_lets_programming_errors_through():
    with pytest.raises(ZeroDivisionError):
        run_cmd.guarded("bug", lambda: 1 / 0)


def test_assemble():
    report = run_cmd.assemble([{"pass": True}, {"pass": False}], order=2)
    assert report["pass"] is False
    assert report["order"] == 2


def test_run_report_writes_json_and_csv(tmp_path, cli_state, fake_builders, capsys):
    ok = mzv_cmd.cmd_mzv(["2,1", "--out", str(tmp_path), "--csv", "--order", "3"], cli_state)
    assert ok is True
    assert fake_builders == [("mzv", 3, [(2, 1)])]
    assert (tmp_path / "mzv.json").exists()
    assert (tmp_path / "mzv.csv").exists()
    assert cli_state.last_reports["mzv"]["pass"]
    out = capsys.readouterr().out
    assert "1/1 checks passed" in out


def test_cmd_all_runs_every_command(tmp_path, monkeypatch, cli_state, fake_builders, capsys):
    monkeypatch.setattr(run_cmd.multiprocessing, "cpu_count", lambda: 1)
    cli_state.set_variable("OUT", str(tmp_path))
    assert run_cmd.cmd_all([], cli_state) is True
    from constants import BATCH_COMMANDS

    assert [name for name, _, _ in fake_builders] == BATCH_COMMANDS
    assert sorted(p.stem for p in tmp_path.glob("*.json")) == sorted(BATCH_COMMANDS)
    assert "All commands passed" in capsys.readouterr().out


# ----- cmd_set tests -----


def test_cmd_set_order(mock_state, capsys):
    mock_state.set_variable.return_value = True
    mock_state.validate_required_vars.return_value = ([], [])
    commands.cmd_set(["ORDER", "3"], mock_state)
    mock_state.set_variable.assert_called_once_with("ORDER", "3")
    assert "ORDER => 3" in capsys.readouterr().out


def test_cmd_set_invalid_value_warns(cli_state, capsys):
    commands.cmd_set(["EPS", "small"], cli_state)
    out = capsys.readouterr().out
    assert "Invalid variables: EPS" in out
    assert "rejected by the next run" in out


def test_cmd_set_unknown_variable(cli_state, capsys):
    commands.cmd_set(["URL", "x"], cli_state)
    assert "Unknown variable: URL" in capsys.readouterr().out


# ----- cmd_show tests -----


def test_cmd_show_variables(mock_state):
    commands.cmd_show([], mock_state)
    mock_state.list_variables.assert_called_once()


def test_cmd_show_paths(cli_state, capsys):
    commands.cmd_show(["paths"], cli_state)
    out = capsys.readouterr().out
    assert "q_searrow" in out
    assert "P_v=a" in out


def test_cmd_show_report(tmp_path, cli_state, capsys):
    cli_state.set_variable("OUT", str(tmp_path))
    report = run_cmd.assemble([{"name": "golden values", "pass": True}])
    cache_utils.save_report("mzv", report, cli_state.run_config(), cli_state)
    capsys.readouterr()
    commands.cmd_show(["report"], cli_state)
    out = capsys.readouterr().out
    assert "golden values" in out
    assert "PASS" in out


def test_cmd_show_report_none_yet(cli_state, capsys):
    commands.cmd_show(["report"], cli_state)
    assert "No report yet" in capsys.readouterr().out


# ----- cmd_config tests -----


def test_cmd_config_loads_file(tmp_path, cli_state, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"eps": 0.01, "seed": 7}))
    commands.cmd_config([str(config)], cli_state)
    assert cli_state.get_variable("SEED") == "7"
    assert "Loaded 2 variables" in capsys.readouterr().out


def test_cmd_config_missing_file(tmp_path, cli_state, capsys):
    commands.cmd_config([str(tmp_path / "none.json")], cli_state)
    assert "Config file not found" in capsys.readouterr().out


# ----- cmd_clear test -----


def test_cmd_clear(monkeypatch):
    call = MagicMock()
    monkeypatch.setattr(os, "system", call)
    monkeypatch.setattr(os, "name", "posix", raising=False)
    commands.cmd_clear([])
    call.assert_called_once_with("clear")


# ----- cmd_debug tests -----


def test_cmd_debug_toggle_on(monkeypatch, mock_state, capsys):
    mock_state.get_variable.return_value = False
    monkeypatch.setattr(debug_cmd, "sync_debug_with_state", MagicMock())
    debug_cmd.cmd_debug([], mock_state)
    mock_state.set_variable.assert_called_once_with("DEBUG", "true")
    assert "Debug mode: ON" in capsys.readouterr().out


def test_cmd_debug_set_off(monkeypatch, mock_state, capsys):
    mock_state.get_variable.return_value = True
    monkeypatch.setattr(debug_cmd, "sync_debug_with_state", MagicMock())
    debug_cmd.cmd_debug(["off"], mock_state)
    mock_state.set_variable.assert_called_once_with("DEBUG", "false")
    assert "Debug mode: OFF" in capsys.readouterr().out


# ----- cmd_help test -----


def test_cmd_help_output(cli_state, capsys):
    debug_cmd.cmd_help([], cli_state)
    out = capsys.readouterr().out
    assert "COMMAND REFERENCE" in out
    assert "breen-check" in out


def test_cmd_help_for_command(cli_state, capsys):
    debug_cmd.cmd_help(["holonomy"], cli_state)
    assert "Usage: holonomy" in capsys.readouterr().out


# ----- main tests -----


def test_parse_command():
    import main

    assert main.parse_command("  MZV 2 3 ") == ("mzv", ["2", "3"])
    assert main.parse_command("   ") == (None, [])


def test_batch_run_exit_codes(tmp_path, fake_builders):
    import main

    assert main.main(["run", "holonomy", "Q_VI", "--out", str(tmp_path), "--order", "2"]) == 0
    assert fake_builders[-1] == ("holonomy", 2, ["Q_VI"])
    assert main.main(["run", "holonomy", "Q_VII"]) == 1


def test_batch_run_argument_errors():
    import main

    with pytest.raises(SystemExit):
        main.main(["run"])
    with pytest.raises(SystemExit):
        main.main(["run", "mzv", "--json", "--csv"])
    with pytest.raises(SystemExit):
        main.main(["holonomy", "P_V"])
