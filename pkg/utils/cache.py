import json
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd

from constants import CSV_COLUMNS, VERSION
from utils.core import debug_print


def to_jsonable(value):
    """Reports may hold series, coefficients, complex and numpy values."""
    if hasattr(value, "to_json"):
        return value.to_json()
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        return {"re": value.real, "im": value.imag}
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, Path):
        return str(value)
    return value


def _metadata(name, cfg):
    return {
        "command": name,
        "order": cfg.order,
        "eps": cfg.eps,
        "eps_grid": list(cfg.eps_grid),
        "quad_tol": cfg.quad.rel_tol,
        "abs_tol": cfg.quad.abs_tol,
        "seed": cfg.seed,
        "a": to_jsonable(complex(cfg.a)),
        "version": VERSION,
    }


def report_path(name, cfg):
    return Path(cfg.output) / f"{name}.json"


def save_report(name, payload, cfg, state=None):
    """Write ``{"metadata", "report"}`` to ``OUT/<name>.json``.

    The file carries no wall-clock data, so equal configurations give
    byte-identical reports.
    """
    out = report_path(name, cfg)
    out.parent.mkdir(parents=True, exist_ok=True)
    document = {"metadata": _metadata(name, cfg), "report": to_jsonable(payload)}
    try:
        with open(out, "w", encoding="utf-8") as f:
            json.dump(document, f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write("\n")
    except Exception as e:
        debug_print(f"Error writing report to {out}: {e}")
        raise
    if state is not None:
        state.set_variable("LAST_REPORT", str(out))
    print(f"✅ Report written to {out} at {datetime.now().strftime('%H:%M:%S')}")
    debug_print(f"Report metadata: {document['metadata']}")
    return out


def load_report(path):
    """(metadata, report) of a saved report; empty dicts when unreadable."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
        if isinstance(document, dict) and "metadata" in document and "report" in document:
            return document["metadata"], document["report"]
        return {}, document
    except (FileNotFoundError, json.JSONDecodeError, KeyError) as e:
        debug_print(f"Error loading report {path}: {e}")
        return {}, {}


def save_table(name, rows, cfg):
    """Plot-ready convergence table ``OUT/<name>.csv``."""
    out = Path(cfg.output) / f"{name}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(rows, columns=CSV_COLUMNS)
    frame.to_csv(out, index=False, float_format="%.12g")
    print(f"✅ Table written to {out} ({len(frame)} rows)")
    return out
