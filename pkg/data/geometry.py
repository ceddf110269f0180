"""
Geometry of the configuration space ℂ^{××} × ℂ^×: points, piecewise-smooth
1-paths and 2-paths with closed-form derivatives, the S₃ maps τ, and the
KZ / CMKZ connections evaluated on tangent vectors.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from utils.core import debug_print
from utils.dk2 import (
    DK2,
    GENERATOR_OF,
    MOD_IMAGES,
    PAIR_OF,
    TWO_LETTER,
    AlgebraSeries,
    BimoduleSeries,
    Generator,
    compose_labels,
    normalize_label,
)
from utils.coeffring import NUM
from utils.errors import EndpointMismatchError, PunctureError

SINGULAR_THRESHOLD = 1e-9
MATCH_TOL = 1e-9
GRID = 1000


def _as_array(r):
    return np.atleast_1d(np.asarray(r, dtype=float))


def _unwrap(values, scalar):
    return values[0] if scalar else values


@dataclass(frozen=True)
class Point:
    z: complex
    v: complex

    def distance_to_punctures(self):
        return min(abs(self.z), abs(self.z - 1), abs(self.v))

    def check(self, threshold=SINGULAR_THRESHOLD):
        if self.distance_to_punctures() < threshold:
            raise PunctureError(f"Point (z={self.z}, v={self.v}) is on a singular locus")
        return self

    def close_to(self, other, tol=MATCH_TOL):
        scale = max(1.0, abs(self.z), abs(self.v))
        return abs(self.z - other.z) <= tol * scale and abs(self.v - other.v) <= tol * scale


# ----- 1-paths -----


@dataclass(frozen=True)
class Segment:
    """Smooth piece of a 1-path on [r0, r1]; callables take the global r."""

    r0: float
    r1: float
    z: Callable
    v: Callable
    dz: Callable
    dv: Callable


class Path1:
    """Piecewise-smooth path r ↦ (z(r), v(r)) on [0, 1]."""

    def __init__(self, key, segments, params=None):
        self.key = key
        self.segments = tuple(s for s in segments if s.r1 > s.r0)
        self.params = dict(params or {})
        if not self.segments:
            raise ValueError(f"Path '{key}' has no segments")

    @property
    def corners(self):
        return tuple([s.r0 for s in self.segments] + [self.segments[-1].r1])

    def _dispatch(self, r, attr):
        scalar = np.ndim(r) == 0
        rs = _as_array(r)
        out = np.empty(rs.shape, dtype=complex)
        done = np.zeros(rs.shape, dtype=bool)
        for seg in self.segments:
            mask = (~done) & (rs >= seg.r0 - 1e-15) & (rs <= seg.r1 + 1e-15)
            if mask.any():
                out[mask] = getattr(seg, attr)(rs[mask])
                done |= mask
        if not done.all():
            raise ValueError(f"Parameter outside [0, 1] for path '{self.key}'")
        return _unwrap(out, scalar)

    def z(self, r):
        return self._dispatch(r, "z")

    def v(self, r):
        return self._dispatch(r, "v")

    def dz(self, r):
        return self._dispatch(r, "dz")

    def dv(self, r):
        return self._dispatch(r, "dv")

    def evaluate(self, r):
        return self.z(r), self.v(r)

    def tangent(self, r):
        return self.dz(r), self.dv(r)

    def point(self, r):
        return Point(complex(self.z(float(r))), complex(self.v(float(r))))

    @property
    def start(self):
        return self.point(0.0)

    @property
    def end(self):
        return self.point(1.0)

    def sample(self, n=GRID):
        rs = np.linspace(0.0, 1.0, n)
        return rs, self.z(rs), self.v(rs)

    def clearance(self, n=GRID):
        _, zs, vs = self.sample(n)
        return float(min(np.min(np.abs(zs)), np.min(np.abs(zs - 1)), np.min(np.abs(vs))))

    def check_punctures(self, n=GRID, threshold=SINGULAR_THRESHOLD):
        clearance = self.clearance(n)
        if clearance < threshold:
            raise PunctureError(
                f"Path '{self.key}' comes within {clearance:.2e} of a puncture"
            )
        debug_print(f"Path {self.key}: clearance {clearance:.3e}")
        return clearance

    def __repr__(self):
        return f"Path1({self.key!r}, corners={self.corners})"


def smooth_path(key, z, v, dz, dv, params=None):
    return Path1(key, [Segment(0.0, 1.0, z, v, dz, dv)], params)


def _rescaled(seg, lo, hi):
    """Copy of ``seg`` moved from [0,1]-local time into [lo, hi]."""
    width = hi - lo

    def local(r):
        return (r - lo) / width

    return Segment(
        lo + seg.r0 * width,
        lo + seg.r1 * width,
        lambda r: seg.z(local(r)),
        lambda r: seg.v(local(r)),
        lambda r: seg.dz(local(r)) / width,
        lambda r: seg.dv(local(r)) / width,
    )


def _check_meet(first, second):
    if not first.end.close_to(second.start):
        raise EndpointMismatchError(
            f"Path '{first.key}' ends at {first.end} but '{second.key}' starts at {second.start}"
        )


def path_concat(q, p):
    """The path ``qp``: first ``p`` at double speed, then ``q``."""
    return path_chain(p, q, key=f"{q.key}∘{p.key}")


def path_chain(*paths, key=None):
    """Paste paths in traversal order, each taking an equal share of [0, 1]."""
    for first, second in zip(paths, paths[1:]):
        _check_meet(first, second)
    share = 1.0 / len(paths)
    segments = []
    for i, path in enumerate(paths):
        segments.extend(_rescaled(seg, i * share, (i + 1) * share) for seg in path.segments)
    params = {}
    for path in paths:
        params.update(path.params)
    return Path1(key or "·".join(p.key for p in reversed(paths)), segments, params)


def path_reverse(p):
    segments = [
        Segment(
            1.0 - seg.r1,
            1.0 - seg.r0,
            lambda r, s=seg: s.z(1.0 - r),
            lambda r, s=seg: s.v(1.0 - r),
            lambda r, s=seg: -s.dz(1.0 - r),
            lambda r, s=seg: -s.dv(1.0 - r),
        )
        for seg in reversed(p.segments)
    ]
    return Path1(f"{p.key}⁻¹", segments, p.params)


def path_reparametrize(p, phi, dphi, key=None):
    """p∘φ for a smooth increasing bijection φ of [0, 1] (smooth paths only)."""
    if len(p.segments) != 1:
        raise ValueError("Reparametrisation is supported for smooth paths only")
    seg = p.segments[0]
    return smooth_path(
        key or f"{p.key}∘φ",
        lambda r: seg.z(phi(r)),
        lambda r: seg.v(phi(r)),
        lambda r: seg.dz(phi(r)) * dphi(r),
        lambda r: seg.dv(phi(r)) * dphi(r),
        p.params,
    )


def constant_path(point, key="const"):
    return smooth_path(
        key,
        lambda r: np.full(np.shape(r), point.z, dtype=complex),
        lambda r: np.full(np.shape(r), point.v, dtype=complex),
        lambda r: np.zeros(np.shape(r), dtype=complex),
        lambda r: np.zeros(np.shape(r), dtype=complex),
    )


# ----- 2-paths -----


@dataclass(frozen=True)
class Patch:
    """Smooth piece of a 2-path on lo(s) ≤ r ≤ hi(s).

    Callables take a scalar ``s`` and an array ``r``. ``static`` marks
    pieces with ∂/∂s ≡ 0, where the 2-form integrand vanishes.
    """

    lo: Callable
    hi: Callable
    z: Callable
    v: Callable
    zs: Callable
    vs: Callable
    zr: Callable
    vr: Callable
    static: bool = False


@dataclass(frozen=True)
class Sheet:
    s0: float
    s1: float
    patches: tuple


def _zeros(s, r):
    return np.zeros(np.shape(r), dtype=complex)


def static_patch(path, lo, hi, inner):
    """Patch following ``path`` at the local parameter ``inner(r)`` (affine in r)."""
    slope = lambda s: (inner(s, 1.0) - inner(s, 0.0))  # noqa: E731
    return Patch(
        lo,
        hi,
        lambda s, r: path.z(inner(s, r)),
        lambda s, r: path.v(inner(s, r)),
        _zeros,
        _zeros,
        lambda s, r: path.dz(inner(s, r)) * slope(s),
        lambda s, r: path.dv(inner(s, r)) * slope(s),
        static=True,
    )


class Path2:
    """Piecewise-smooth 2-path (s, r) ↦ (z, v) on [0, 1]²."""

    def __init__(self, key, sheets, params=None, source=None, target=None):
        self.key = key
        self.sheets = tuple(sheets)
        self.params = dict(params or {})
        self.declared_source = source
        self.declared_target = target

    @property
    def s_corners(self):
        return tuple(sorted({sh.s0 for sh in self.sheets} | {sh.s1 for sh in self.sheets}))

    def sheet_at(self, s):
        for sheet in self.sheets:
            if sheet.s0 - 1e-15 <= s <= sheet.s1 + 1e-15:
                return sheet
        raise ValueError(f"s = {s} outside [0, 1] for 2-path '{self.key}'")

    def active_patches(self, s):
        """(lo, hi, patch) for every patch with nonempty r-range at ``s``."""
        out = []
        for patch in self.sheet_at(s).patches:
            lo, hi = float(patch.lo(s)), float(patch.hi(s))
            if hi - lo > 1e-14:
                out.append((lo, hi, patch))
        return out

    def cross_section(self, s):
        segments = [
            Segment(
                lo,
                hi,
                lambda r, p=patch: p.z(s, r),
                lambda r, p=patch: p.v(s, r),
                lambda r, p=patch: p.zr(s, r),
                lambda r, p=patch: p.vr(s, r),
            )
            for lo, hi, patch in self.active_patches(s)
        ]
        return Path1(f"{self.key}[s={s:g}]", segments, self.params)

    @property
    def source(self):
        return self.cross_section(0.0)

    @property
    def target(self):
        return self.cross_section(1.0)

    def evaluate(self, s, r):
        return self.cross_section(s).evaluate(r)

    def partials(self, s, r):
        """(∂z/∂s, ∂v/∂s, ∂z/∂r, ∂v/∂r) at a single (s, r)."""
        for lo, hi, patch in self.active_patches(s):
            if lo - 1e-15 <= r <= hi + 1e-15:
                rr = np.array([r])
                return tuple(
                    complex(f(s, rr)[0]) for f in (patch.zs, patch.vs, patch.zr, patch.vr)
                )
        raise ValueError(f"r = {r} outside [0, 1]")

    def clearance(self, n=60):
        worst = np.inf
        for s in np.linspace(0.0, 1.0, n):
            worst = min(worst, self.cross_section(s).clearance(n))
        return float(worst)

    def check_boundary(self, n=40, tol=1e-8):
        """Boundary conditions: fixed endpoints in s, declared source/target at s = 0, 1."""
        start = self.cross_section(0.0).start
        end = self.cross_section(0.0).end
        for s in np.linspace(0.0, 1.0, n):
            section = self.cross_section(s)
            if not (section.start.close_to(start, tol) and section.end.close_to(end, tol)):
                raise EndpointMismatchError(
                    f"2-path '{self.key}' moves its endpoints at s = {s:.3f}"
                )
            for (_, hi, a), (lo, _, b) in zip(
                self.active_patches(s), self.active_patches(s)[1:]
            ):
                pa = Point(complex(a.z(s, np.array([hi]))[0]), complex(a.v(s, np.array([hi]))[0]))
                pb = Point(complex(b.z(s, np.array([lo]))[0]), complex(b.v(s, np.array([lo]))[0]))
                if not pa.close_to(pb, tol):
                    raise EndpointMismatchError(
                        f"2-path '{self.key}' is discontinuous at s = {s:.3f}, r = {hi:.3f}"
                    )
        rs = np.linspace(0.0, 1.0, n)
        for declared, s in ((self.declared_source, 0.0), (self.declared_target, 1.0)):
            if declared is None:
                continue
            section = self.cross_section(s)
            for r in rs:
                if not section.point(r).close_to(declared.point(r), tol):
                    raise EndpointMismatchError(
                        f"2-path '{self.key}' does not match its declared "
                        f"{'source' if s == 0 else 'target'} at r = {r:.3f}"
                    )

    def __repr__(self):
        return f"Path2({self.key!r}, s_corners={self.s_corners})"


def path2_restrict(P, s0, s1, key=None):
    """P on s ∈ [s0, s1], reparametrised to [0, 1] (single-sheet 2-paths)."""
    if len(P.sheets) != 1:
        raise ValueError("Restriction is supported for single-sheet 2-paths")
    width = s1 - s0
    patches = [
        Patch(
            lambda s, p=p: p.lo(s0 + width * s),
            lambda s, p=p: p.hi(s0 + width * s),
            lambda s, r, p=p: p.z(s0 + width * s, r),
            lambda s, r, p=p: p.v(s0 + width * s, r),
            lambda s, r, p=p: p.zs(s0 + width * s, r) * width,
            lambda s, r, p=p: p.vs(s0 + width * s, r) * width,
            lambda s, r, p=p: p.zr(s0 + width * s, r),
            lambda s, r, p=p: p.vr(s0 + width * s, r),
            p.static,
        )
        for p in P.sheets[0].patches
    ]
    return Path2(key or f"{P.key}|[{s0:g},{s1:g}]", [Sheet(0.0, 1.0, tuple(patches))], P.params)


def _sheet_in_s(sheet, lo, hi):
    width = hi - lo

    def local(s):
        return (s - lo) / width

    patches = tuple(
        Patch(
            lambda s, p=p: p.lo(local(s)),
            lambda s, p=p: p.hi(local(s)),
            lambda s, r, p=p: p.z(local(s), r),
            lambda s, r, p=p: p.v(local(s), r),
            lambda s, r, p=p: p.zs(local(s), r) / width,
            lambda s, r, p=p: p.vs(local(s), r) / width,
            lambda s, r, p=p: p.zr(local(s), r),
            lambda s, r, p=p: p.vr(local(s), r),
            p.static,
        )
        for p in sheet.patches
    )
    return Sheet(lo + sheet.s0 * width, lo + sheet.s1 * width, patches)


def path2_vconcat(Q, P, key=None):
    """Vertical composite: first P (s ∈ [0, ½]), then Q; target(P) must be source(Q)."""
    p_target, q_source = P.target, Q.source
    for r in np.linspace(0.0, 1.0, 50):
        if not p_target.point(r).close_to(q_source.point(r), 1e-8):
            raise EndpointMismatchError(
                f"Target of '{P.key}' differs from source of '{Q.key}' at r = {r:.3f}"
            )
    sheets = [_sheet_in_s(sh, 0.0, 0.5) for sh in P.sheets]
    sheets += [_sheet_in_s(sh, 0.5, 1.0) for sh in Q.sheets]
    return Path2(key or f"{Q.key}⊙{P.key}", sheets, {**P.params, **Q.params})


def path2_hconcat(Q, P, key=None):
    """Horizontal composite (QP)(s, r): P on r ∈ [0, ½], Q on [½, 1]."""
    if len(P.sheets) != 1 or len(Q.sheets) != 1:
        raise ValueError("Horizontal pasting is supported for single-sheet 2-paths")
    for s in np.linspace(0.0, 1.0, 50):
        if not P.cross_section(s).end.close_to(Q.cross_section(s).start, 1e-8):
            raise EndpointMismatchError(
                f"'{P.key}'(s, 1) differs from '{Q.key}'(s, 0) at s = {s:.3f}"
            )

    def moved(p, lo):
        return Patch(
            lambda s: lo + 0.5 * p.lo(s),
            lambda s: lo + 0.5 * p.hi(s),
            lambda s, r: p.z(s, 2 * (r - lo)),
            lambda s, r: p.v(s, 2 * (r - lo)),
            lambda s, r: p.zs(s, 2 * (r - lo)),
            lambda s, r: p.vs(s, 2 * (r - lo)),
            lambda s, r: 2 * p.zr(s, 2 * (r - lo)),
            lambda s, r: 2 * p.vr(s, 2 * (r - lo)),
            p.static,
        )

    patches = tuple(moved(p, 0.0) for p in P.sheets[0].patches)
    patches += tuple(moved(p, 0.5) for p in Q.sheets[0].patches)
    return Path2(key or f"{Q.key}∘{P.key}", [Sheet(0.0, 1.0, patches)], {**P.params, **Q.params})


# ----- S₃ maps -----


@dataclass(frozen=True)
class TauMap:
    """(z, v) ↦ (Z(z), V(z, v)) with its Jacobian entries."""

    key: str
    label: str
    Z: Callable
    V: Callable
    dZ_dz: Callable
    dV_dz: Callable
    dV_dv: Callable


TAU_MAPS = {
    "12": TauMap(
        "12", "213",
        lambda z: z / (z - 1), lambda z, v: (1 - z) * v,
        lambda z: -1 / (z - 1) ** 2, lambda z, v: -v, lambda z, v: 1 - z,
    ),
    "23": TauMap(
        "23", "132",
        lambda z: 1 / z, lambda z, v: z * v,
        lambda z: -1 / z**2, lambda z, v: v, lambda z, v: z,
    ),
    "13": TauMap(
        "13", "321",
        lambda z: 1 - z, lambda z, v: -v,
        lambda z: -np.ones_like(z), lambda z, v: np.zeros_like(v), lambda z, v: -np.ones_like(v),
    ),
    "(12)3": TauMap(
        "(12)3", "231",
        lambda z: 1 / (1 - z), lambda z, v: (z - 1) * v,
        lambda z: 1 / (1 - z) ** 2, lambda z, v: v, lambda z, v: z - 1,
    ),
    "1(23)": TauMap(
        "1(23)", "312",
        lambda z: (z - 1) / z, lambda z, v: -z * v,
        lambda z: 1 / z**2, lambda z, v: -v, lambda z, v: -z,
    ),
}
TAU_LABEL = {key: tau.label for key, tau in TAU_MAPS.items()}


def tau_point(key, z, v):
    tau = TAU_MAPS[key]
    return tau.Z(z), tau.V(z, v)


def tau_push(key, z, v, dz, dv):
    """Push a tangent (dz, dv) at (z, v) forward along τ."""
    tau = TAU_MAPS[key]
    return tau.dZ_dz(z) * dz, tau.dV_dz(z, v) * dz + tau.dV_dv(z, v) * dv


def _tau_segment(key, seg):
    return Segment(
        seg.r0,
        seg.r1,
        lambda r: tau_point(key, seg.z(r), seg.v(r))[0],
        lambda r: tau_point(key, seg.z(r), seg.v(r))[1],
        lambda r: tau_push(key, seg.z(r), seg.v(r), seg.dz(r), seg.dv(r))[0],
        lambda r: tau_push(key, seg.z(r), seg.v(r), seg.dz(r), seg.dv(r))[1],
    )


def _tau_patch(key, p):
    def push(s, r, which, kind):
        z, v = p.z(s, r), p.v(s, r)
        dz, dv = (p.zs(s, r), p.vs(s, r)) if kind == "s" else (p.zr(s, r), p.vr(s, r))
        return tau_push(key, z, v, dz, dv)[which]

    return Patch(
        p.lo,
        p.hi,
        lambda s, r: tau_point(key, p.z(s, r), p.v(s, r))[0],
        lambda s, r: tau_point(key, p.z(s, r), p.v(s, r))[1],
        lambda s, r: push(s, r, 0, "s"),
        lambda s, r: push(s, r, 1, "s"),
        lambda s, r: push(s, r, 0, "r"),
        lambda s, r: push(s, r, 1, "r"),
        p.static,
    )


def tau_transform(key, path, check=True):
    """Image of a 1-path or 2-path under τ_key, checked against the punctures."""
    if key not in TAU_MAPS:
        raise ValueError(f"Unknown τ map '{key}'")
    if isinstance(path, Path1):
        image = Path1(
            f"τ{key}{path.key}", [_tau_segment(key, seg) for seg in path.segments], path.params
        )
    else:
        sheets = [
            Sheet(sh.s0, sh.s1, tuple(_tau_patch(key, p) for p in sh.patches))
            for sh in path.sheets
        ]
        image = Path2(f"τ{key}{path.key}", sheets, path.params)
    if check:
        clearance = image.clearance()
        if clearance < SINGULAR_THRESHOLD:
            raise PunctureError(f"τ{key} image of '{path.key}' touches a puncture")
    return image


# ----- connections -----

# Position of the relabelled generator for every label.
_GENERATOR_PERMUTATION = {
    label: [
        int(GENERATOR_OF[tuple(sorted((int(label[i - 1]), int(label[j - 1]))))])
        for (i, j) in (PAIR_OF[g] for g in Generator)
    ]
    for label in MOD_IMAGES
}


def relabel_nabla(values, label):
    out = np.zeros(3, dtype=complex)
    for g, target in enumerate(_GENERATOR_PERMUTATION[label]):
        out[target] += values[g]
    return out


def relabel_delta(values, label):
    out = np.zeros(2, dtype=complex)
    for letter, images in enumerate(MOD_IMAGES[label]):
        for image, sign in images:
            out[int(image)] += sign * values[letter]
    return out


@dataclass(frozen=True)
class Connection:
    """The CMKZ 2-connection (∇, Δ) on ℂ^{××}×ℂ^×, optionally relabelled.

    ``∇[u] = (u_z/z) t12 + (u_z/(z−1)) t23 + (u_v/v) Λ`` and
    ``Δ = 2(𝓛/(zv) + 𝓡/((z−1)v)) dz∧dv`` with ``dz∧dv[u,w] = ½(u_z w_v − u_v w_z)``.
    ``label`` applies the coherent relabelling to both values; the
    pullback along τ is the relabelled connection.
    """

    label: str = "123"
    kind: str = "cmkz"
    alphabet: object = field(default=DK2)

    def nabla(self, z, v, dz, dv):
        """Generator coefficients of ∇[(dz, dv)] at (z, v)."""
        alpha, beta, gamma = dz / z, dz / (z - 1), dv / v
        values = np.array([alpha + gamma, gamma, beta + gamma], dtype=complex)
        return relabel_nabla(values, self.label) if self.label != "123" else values

    def delta(self, z, v, u, w):
        """(𝓛, 𝓡) coefficients of Δ[u, w] for tangents u = (u_z, u_v), w = (w_z, w_v)."""
        wedge = u[0] * w[1] - u[1] * w[0]
        values = np.array([wedge / (z * v), wedge / ((z - 1) * v)], dtype=complex)
        return relabel_delta(values, self.label) if self.label != "123" else values

    # closed-form partial derivatives of the coefficient functions

    def nabla_partials(self, z, v):
        """(∂_z ∇_v − ∂_v ∇_z) coefficients: both components are closed, so zero."""
        return np.zeros(3, dtype=complex)

    def delta_gradient(self, z, v):
        """∂_z, ∂_v of the (𝓛, 𝓡) coefficients of Δ[∂z, ∂v] (relabelled)."""
        dz = np.array([-1 / (z**2 * v), -1 / ((z - 1) ** 2 * v)], dtype=complex)
        dv = np.array([-1 / (z * v**2), -1 / ((z - 1) * v**2)], dtype=complex)
        if self.label != "123":
            dz, dv = relabel_delta(dz, self.label), relabel_delta(dv, self.label)
        return dz, dv


@dataclass(frozen=True)
class KZ2Connection:
    """Two-letter KZ connection Γ = A dz/z + B dz/(z−1) (no 2-form)."""

    alphabet: object = field(default=TWO_LETTER)
    kind: str = "kz2"
    label: str = "123"

    def nabla(self, z, v, dz, dv):
        return np.array([dz / z, dz / (z - 1)], dtype=complex)

    def delta(self, z, v, u, w):
        return np.zeros(2, dtype=complex)


@dataclass(frozen=True)
class PulledBackConnection:
    """τ*c evaluated geometrically: c at τ(x) on tangents pushed along τ."""

    base: Connection
    tau_key: str
    kind: str = "pullback"

    @property
    def alphabet(self):
        return self.base.alphabet

    @property
    def label(self):
        return compose_labels(TAU_LABEL[self.tau_key], self.base.label)

    def nabla(self, z, v, dz, dv):
        Z, V = tau_point(self.tau_key, z, v)
        dZ, dV = tau_push(self.tau_key, z, v, dz, dv)
        return self.base.nabla(Z, V, dZ, dV)

    def delta(self, z, v, u, w):
        Z, V = tau_point(self.tau_key, z, v)
        pu = tau_push(self.tau_key, z, v, *u)
        pw = tau_push(self.tau_key, z, v, *w)
        return self.base.delta(Z, V, pu, pw)


def tau_pullback(key, c):
    """τ*c realised by relabelling the coefficients."""
    if key not in TAU_MAPS:
        raise ValueError(f"Unknown τ map '{key}'")
    return Connection(compose_labels(TAU_LABEL[key], normalize_label(c.label)))


def connection_eval(c, point, u, w, order=2):
    """∇[u] as a grade-1 AlgebraSeries and Δ[u, w] as a grade-2 BimoduleSeries."""
    point.check()
    nabla = c.nabla(point.z, point.v, u[0], u[1])
    delta = c.delta(point.z, point.v, u, w)
    a = AlgebraSeries(
        {(g,): complex(x) for g, x in enumerate(nabla)}, order, c.alphabet, NUM
    )
    m = BimoduleSeries(
        {((), x, ()): complex(val) for x, val in enumerate(delta)}, order, DK2, NUM
    )
    return a, m
