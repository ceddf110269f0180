from commands.run import assemble, guarded, run_report
from data.catalog import PATH_KEYS, TWO_PATH_KEYS, make_2path, make_path
from data.geometry import TAU_MAPS, tau_transform
from utils.core import debug_print
from utils.validation import validation_wrapper


def _point(p):
    return {"z": p.z, "v": p.v}


def _path_report(key, params):
    path = make_path(key, params)
    return {
        "name": f"1-path {key}",
        "start": _point(path.start),
        "end": _point(path.end),
        "clearance": path.clearance(),
        "pass": True,
    }


def _2path_report(key, params):
    P = make_2path(key, params)
    images = {}
    for tau in TAU_MAPS:
        image = guarded(f"τ{tau}{key}", tau_transform, tau, P)
        images[tau] = image.clearance() if not isinstance(image, dict) else None
    debug_print(f"τ images of {key}: {images}")
    return {
        "name": f"2-path {key}",
        "source": [_point(P.source.start), _point(P.source.end)],
        "clearance": P.clearance(),
        "tau_image_clearance": images,
        "pass": True,
    }


def build_paths(cfg, targets):
    """Every catalog path is built at the configured ε and checked against the punctures."""
    params = {"eps": cfg.eps, "a": cfg.a}
    checks = [guarded(f"1-path {key}", _path_report, key, params) for key in PATH_KEYS]
    checks += [guarded(f"2-path {key}", _2path_report, key, params) for key in TWO_PATH_KEYS]
    return assemble(checks, eps=cfg.eps)


@validation_wrapper
def cmd_paths(args, state, validated=None):
    return run_report("paths", state, validated)
