"""
Named 1-paths and 2-paths of the contractible hexagon and its fillers.

Every entry is parametrised by ``eps`` ∈ (0, 1/4] and the free parameter
``a`` ≠ 0. Curves in the z-plane are the BRW curves c_I … c_VI; the
2-paths are vertically interpolative (head, vertical midsection, tail)
except the congruence 2-path and the straight homotopies.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from data.geometry import (
    Patch,
    Path2,
    Sheet,
    SINGULAR_THRESHOLD,
    path_chain,
    path_reparametrize,
    smooth_path,
    static_patch,
    tau_transform,
)
from utils.core import debug_print
from utils.errors import PunctureError

DEFAULT_PARAMS = {"eps": 0.05, "a": 1.0}


@dataclass(frozen=True)
class Curve:
    f: Callable
    df: Callable


def _params(params):
    merged = {**DEFAULT_PARAMS, **(params or {})}
    eps, a = float(merged["eps"]), complex(merged["a"])
    if not 0 < eps <= 0.25:
        raise ValueError(f"eps must lie in (0, 1/4], got {eps}")
    if a == 0:
        raise ValueError("The parameter a must be nonzero")
    merged["eps"], merged["a"] = eps, a
    return merged


def curves(eps):
    """The z-plane curves with their derivatives, vectorised in r."""
    k = 1.0 - 2.0 * eps
    rho = 1.0 / eps - 0.5

    def c_I(r):
        return eps + np.asarray(r) * k + 0j

    def dc_I(r):
        return np.full(np.shape(r), k, dtype=complex)

    def c_II(r):
        e = np.exp(1j * np.pi * np.asarray(r))
        return (2 - eps - eps * e) / (2 - eps + eps * e)

    def dc_II(r):
        e = np.exp(1j * np.pi * np.asarray(r))
        return -2j * np.pi * eps * (2 - eps) * e / (2 - eps + eps * e) ** 2

    def c_III(r):
        return 1.0 / (1.0 - c_I(r))

    def dc_III(r):
        return k / (1.0 - c_I(r)) ** 2

    def c_IV(r):
        return 0.5 + rho * np.exp(-1j * np.pi * np.asarray(r))

    def dc_IV(r):
        return -1j * np.pi * rho * np.exp(-1j * np.pi * np.asarray(r))

    def c_V_iota(r):
        c = c_I(r)
        return c / (c - 1.0)

    def dc_V_iota(r):
        return -k / (c_I(r) - 1.0) ** 2

    def c_VI(u):
        e = np.exp(-1j * np.pi * np.asarray(u))
        return 2 * eps / (eps - (2 - eps) * e)

    def dc_VI(u):
        e = np.exp(-1j * np.pi * np.asarray(u))
        return -2j * np.pi * eps * (2 - eps) * e / (eps - (2 - eps) * e) ** 2

    def c_VI_iota(r):
        return c_VI(1.0 - np.asarray(r))

    def dc_VI_iota(r):
        return -dc_VI(1.0 - np.asarray(r))

    def q_se(r):
        e = np.exp(1j * np.pi * np.asarray(r))
        return 2 * eps / (eps + (eps - 2) * e)

    def dq_se(r):
        e = np.exp(1j * np.pi * np.asarray(r))
        return -2j * np.pi * eps * (eps - 2) * e / (eps + (eps - 2) * e) ** 2

    return {
        "c_I": Curve(c_I, dc_I),
        "c_II": Curve(c_II, dc_II),
        "c_III": Curve(c_III, dc_III),
        "c_IV": Curve(c_IV, dc_IV),
        "c_V_iota": Curve(c_V_iota, dc_V_iota),
        "c_VI": Curve(c_VI, dc_VI),
        "c_VI_iota": Curve(c_VI_iota, dc_VI_iota),
        "q_searrow_z": Curve(q_se, dq_se),
    }


def _const(value):
    return lambda r: np.full(np.shape(r), value, dtype=complex)


def horizontal(key, curve, v0, params, shift=0.0):
    """(c(r + shift), v0): v is constant."""
    return smooth_path(
        key,
        lambda r: curve.f(np.asarray(r) + shift),
        _const(v0),
        lambda r: curve.df(np.asarray(r) + shift),
        _const(0.0),
        params,
    )


# ----- 1-paths -----


def _build_path(key, p):
    eps, a = p["eps"], p["a"]
    C = curves(eps)
    c_I, c_IV, c_V, c_VIi = C["c_I"], C["c_IV"], C["c_V_iota"], C["c_VI_iota"]
    k = 1.0 - 2.0 * eps
    match key:
        case "c_I" | "c_II" | "c_III" | "c_IV" | "c_V_iota" | "c_VI" | "c_VI_iota":
            return horizontal(key, C[key], a, p)
        case "p_I":
            return smooth_path(
                key,
                lambda r: c_I.f(1.0 - np.asarray(r)),
                _const(a),
                lambda r: -c_I.df(1.0 - np.asarray(r)),
                _const(0.0),
                p,
            )
        case "p_II":
            return horizontal(key, C["c_II"], a, p)
        case "p_III":
            # τ_(12)3 (c_I(r), a/(ε−1))
            return smooth_path(
                key,
                C["c_III"].f,
                lambda r: (1.0 - c_I.f(r)) / (1.0 - eps) * a,
                C["c_III"].df,
                lambda r: -c_I.df(r) / (1.0 - eps) * a,
                p,
            )
        case "p_IV":
            return horizontal(key, c_IV, a * eps / (1.0 - eps), p)
        case "p_V":
            # τ_1(23) ([c_I∘ι](r), a/(ε−1))
            return smooth_path(
                key,
                c_V.f,
                lambda r: (1.0 - c_I.f(r)) / (1.0 - eps) * a,
                c_V.df,
                lambda r: -c_I.df(r) / (1.0 - eps) * a,
                p,
            )
        case "p_VI":
            return horizontal(key, c_VIi, a, p)
        case "q_IV":
            # τ12 (c_II(r+1), −a)
            return smooth_path(
                key,
                c_IV.f,
                lambda r: a / (c_IV.f(r) - 1.0),
                c_IV.df,
                lambda r: -a * c_IV.df(r) / (c_IV.f(r) - 1.0) ** 2,
                p,
            )
        case "q_V":
            # τ12 (c_I, −a)
            return smooth_path(
                key, c_V.f, lambda r: (c_I.f(r) - 1.0) * a, c_V.df, lambda r: c_I.df(r) * a, p
            )
        case "q_VI":
            # τ_(12)3 (c_IV∘ι, −aε)
            return smooth_path(
                key,
                c_VIi.f,
                lambda r: a * eps / c_VIi.f(r),
                c_VIi.df,
                lambda r: -a * eps * c_VIi.df(r) / c_VIi.f(r) ** 2,
                p,
            )
        case "q_searrow":
            half = 1.0 - eps / 2.0
            return smooth_path(
                key,
                C["q_searrow_z"].f,
                lambda r: (eps / 2.0 + half * np.exp(1j * np.pi * np.asarray(r))) * a,
                C["q_searrow_z"].df,
                lambda r: 1j * np.pi * half * np.exp(1j * np.pi * np.asarray(r)) * a,
                p,
            )
        case "q_down1":
            z1 = complex(c_IV.f(1.0))
            return smooth_path(
                key,
                _const(z1),
                lambda u: a / (c_IV.f(u) - 1.0),
                _const(0.0),
                lambda u: -a * c_IV.df(u) / (c_IV.f(u) - 1.0) ** 2,
                p,
            )
        case "p_down1":
            z1 = complex(c_V.f(1.0))
            return smooth_path(
                key,
                _const(z1),
                lambda u: (1.0 - c_I.f(u)) / (1.0 - eps) * a,
                _const(0.0),
                _const(-k / (1.0 - eps) * a),
                p,
            )
        case _:
            raise KeyError(f"Unknown path '{key}'")


PATH_KEYS = (
    "c_I", "c_II", "c_III", "c_IV", "c_V_iota", "c_VI", "c_VI_iota",
    "p_I", "p_II", "p_III", "p_IV", "p_V", "p_VI",
    "q_IV", "q_V", "q_VI", "q_searrow", "q_down1", "p_down1",
)


def make_path(key, params=None, check=True):
    """Catalog 1-path, checked against the punctures on a 1000-point grid."""
    p = _params(params)
    path = _build_path(key, p)
    if check:
        path.check_punctures()
    return path


# ----- 2-paths -----


def _interpolative(key, head, tail, Z, dZ, V, V_s, V_u, layout, params, source=None):
    """Head at double speed, vertical midsection z = Z(s), then the tail.

    ``short``: head on [0, s/2], mid on [s/2, s], tail(r) on [s, 1].
    ``long``: head on [0, s/2], mid on [s/2, (1+s)/2], tail(2r−1) beyond.
    """
    mid_hi = (lambda s: s) if layout == "short" else (lambda s: (1.0 + s) / 2.0)
    if layout == "short":
        tail_patch = static_patch(tail, mid_hi, lambda s: 1.0, lambda s, r: r)
    else:
        tail_patch = static_patch(tail, mid_hi, lambda s: 1.0, lambda s, r: 2.0 * r - 1.0)
    head_patch = static_patch(head, lambda s: 0.0, lambda s: s / 2.0, lambda s, r: 2.0 * r)

    def u(s, r):
        return 2.0 * np.asarray(r) - s

    mid = Patch(
        lambda s: s / 2.0,
        mid_hi,
        lambda s, r: np.full(np.shape(r), complex(Z(s)), dtype=complex),
        lambda s, r: V(s, u(s, r)),
        lambda s, r: np.full(np.shape(r), complex(dZ(s)), dtype=complex),
        lambda s, r: V_s(s, u(s, r)) - V_u(s, u(s, r)),
        lambda s, r: np.zeros(np.shape(r), dtype=complex),
        lambda s, r: 2.0 * V_u(s, u(s, r)),
    )
    return Path2(key, [Sheet(0.0, 1.0, (head_patch, mid, tail_patch))], params, source=source)


def _zero_s(s, u):
    return np.zeros(np.shape(u), dtype=complex)


def _build_2path(key, p):
    eps, a = p["eps"], p["a"]
    C = curves(eps)
    c_I, c_IV, c_V, c_VI, c_VIi = C["c_I"], C["c_IV"], C["c_V_iota"], C["c_VI"], C["c_VI_iota"]
    c_III = C["c_III"]

    def drop(s, u):
        return (1.0 - c_I.f(u)) / (1.0 - eps) * a

    def drop_u(s, u):
        return -c_I.df(u) / (1.0 - eps) * a

    match key:
        case "P_V":
            return _interpolative(
                key, horizontal("c_V_iota", c_V, a, p), _build_path("p_V", p),
                c_V.f, c_V.df, drop, _zero_s, drop_u, "short", p, _build_path("p_V", p),
            )
        case "P_III":
            return _interpolative(
                key, horizontal("c_III", c_III, a, p), _build_path("p_III", p),
                c_III.f, c_III.df, drop, _zero_s, drop_u, "short", p, _build_path("p_III", p),
            )
        case "P_IV":
            return _interpolative(
                key, horizontal("c_IV", c_IV, a, p), _build_path("p_IV", p),
                c_IV.f, c_IV.df, drop, _zero_s, drop_u, "long", p,
            )
        case "Q_VI":
            return _interpolative(
                key, _build_path("p_VI", p), _build_path("q_VI", p),
                c_VIi.f, c_VIi.df,
                lambda s, u: a * eps / c_VIi.f(u),
                _zero_s,
                lambda s, u: -a * eps * c_VIi.df(u) / c_VIi.f(u) ** 2,
                "short", p, _build_path("q_VI", p),
            )
        case "Q_V":
            scale = a * eps / (1.0 - eps)
            return _interpolative(
                key, _build_path("p_V", p), _build_path("q_V", p),
                c_V.f, c_V.df,
                lambda s, u: scale * (1.0 - c_I.f(s)) / c_VIi.f(u),
                lambda s, u: -scale * c_I.df(s) / c_VIi.f(u),
                lambda s, u: -scale * (1.0 - c_I.f(s)) * c_VIi.df(u) / c_VIi.f(u) ** 2,
                "long", p,
            )
        case "Q_IV":
            return _interpolative(
                key, _build_path("p_IV", p), _build_path("q_IV", p),
                c_IV.f, c_IV.df,
                lambda s, u: a / (c_IV.f(u) - 1.0),
                _zero_s,
                lambda s, u: -a * c_IV.df(u) / (c_IV.f(u) - 1.0) ** 2,
                "short", p, _build_path("q_IV", p),
            )
        case "P_L":
            return _congruence_left(p)
        case "P_R":
            return tau_transform("13", _congruence_left(p))
        case "P_v=a":
            return horizontal_filler(p)
        case "harmless":
            target = path_reparametrize(
                _build_path("p_III", p), lambda r: r**2, lambda r: 2.0 * r, "p_III∘r²"
            )
            return straight_homotopy("harmless", _build_path("p_III", p), target, params=p)
        case _:
            raise KeyError(f"Unknown 2-path '{key}'")


def _congruence_left(p):
    """(c_VI, (ε−1)a) q_VI ⇛ q↘ (c_VI(r+1), a)."""
    eps, a = p["eps"], p["a"]
    C = curves(eps)
    c_VI, c_IV = C["c_VI"], C["c_IV"]
    q_vi, q_se = _build_path("q_VI", p), _build_path("q_searrow", p)

    def u(s, r):
        return 2.0 * np.asarray(r) + 2.0 * s - 1.0

    mid = Patch(
        lambda s: (1.0 - s) / 2.0,
        lambda s: 1.0 - s / 2.0,
        lambda s, r: c_VI.f(u(s, r)),
        lambda s, r: np.full(np.shape(r), complex(c_IV.f(s - 1.0)) * eps * a, dtype=complex),
        lambda s, r: 2.0 * c_VI.df(u(s, r)),
        lambda s, r: np.full(np.shape(r), complex(c_IV.df(s - 1.0)) * eps * a, dtype=complex),
        lambda s, r: 2.0 * c_VI.df(u(s, r)),
        lambda s, r: np.zeros(np.shape(r), dtype=complex),
    )
    head = static_patch(q_vi, lambda s: 0.0, lambda s: (1.0 - s) / 2.0, lambda s, r: 2.0 * r)
    tail = static_patch(q_se, lambda s: 1.0 - s / 2.0, lambda s: 1.0, lambda s, r: 2.0 * r - 1.0)
    source = path_chain(q_vi, horizontal("c_VI", c_VI, (eps - 1.0) * a, p))
    target = path_chain(horizontal("c_VI(r+1)", c_VI, a, p, shift=1.0), q_se)
    return Path2("P_L", [Sheet(0.0, 1.0, (head, mid, tail))], p, source, target)


def straight_homotopy(key, source, target, bend=0.0, params=None):
    """(1−s)·source + s·target in (z, v), with z bent by −iκ s(1−s) sin(πr)."""
    if not (source.start.close_to(target.start) and source.end.close_to(target.end)):
        raise PunctureError(f"'{source.key}' and '{target.key}' do not share endpoints")
    corners = sorted(set(source.corners) | set(target.corners))
    kappa = complex(bend)

    def make(lo, hi):
        def z(s, r):
            return (1 - s) * source.z(r) + s * target.z(r) - 1j * kappa * s * (1 - s) * np.sin(np.pi * r)

        def v(s, r):
            return (1 - s) * source.v(r) + s * target.v(r)

        def zs(s, r):
            return target.z(r) - source.z(r) - 1j * kappa * (1 - 2 * s) * np.sin(np.pi * r)

        def vs(s, r):
            return target.v(r) - source.v(r)

        def zr(s, r):
            return (1 - s) * source.dz(r) + s * target.dz(r) - 1j * kappa * s * (1 - s) * np.pi * np.cos(np.pi * r)

        def vr(s, r):
            return (1 - s) * source.dv(r) + s * target.dv(r)

        return Patch(lambda s: lo, lambda s: hi, z, v, zs, vs, zr, vr)

    patches = tuple(make(lo, hi) for lo, hi in zip(corners, corners[1:]))
    return Path2(key, [Sheet(0.0, 1.0, patches)], params, source, target)


def horizontal_filler(params=None, bends=None):
    """The purely horizontal 2-path between the two halves of the hexagon at v = a.

    The straight homotopy crosses z = 1, so it is bent into the lower
    half-plane; the first bend clearing 0 and 1 by ε/2 is kept.
    """
    p = _params(params)
    eps, a = p["eps"], p["a"]
    C = curves(eps)
    source = path_chain(
        _build_path("p_I", p), _build_path("p_VI", p), horizontal("c_V_iota", C["c_V_iota"], a, p)
    )
    target = path_chain(
        _build_path("p_II", p), horizontal("c_III", C["c_III"], a, p), horizontal("c_IV", C["c_IV"], a, p)
    )
    for kappa in bends or (4.0 / eps, 8.0 / eps, 16.0 / eps):
        filler = straight_homotopy("P_v=a", source, target, kappa, p)
        clearance = filler.clearance()
        debug_print(f"P_v=a bend κ={kappa:.1f}: clearance {clearance:.3e}")
        if clearance > eps / 2.0:
            filler.params["bend"] = kappa
            return filler
    raise PunctureError("No bend of the horizontal filler avoids the punctures")


TWO_PATH_KEYS = ("P_V", "P_III", "P_IV", "Q_VI", "Q_V", "Q_IV", "P_L", "P_R", "P_v=a", "harmless")


def make_2path(key, params=None, check=True):
    """Catalog 2-path with puncture clearance and boundary conditions checked."""
    p = _params(params)
    path = _build_2path(key, p)
    if check:
        clearance = path.clearance()
        if clearance < SINGULAR_THRESHOLD:
            raise PunctureError(f"2-path '{key}' comes within {clearance:.2e} of a puncture")
        path.check_boundary()
        debug_print(f"2-path {key}: clearance {clearance:.3e}")
    return path
