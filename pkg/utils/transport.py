"""
Parallel transport and surface holonomy of (∇, Δ) with values in truncated
series, plus the flatness, globularity and derivative verifiers.

Transports solve dW/dr = ∇[ṗ]·W as a grade-propagating linear ODE on dense
per-grade arrays (word index: first letter most significant). The surface
holonomy of a 2-path Σ is

    W^Σ = ∫₀¹ ds ∫₀¹ dr W_{1r}(s) Δ[∂Σ/∂s, ∂Σ/∂r] W_{r0}(s),

computed as W_{10}(s)·J(s) with J(s) = ∫ W_{r0}⁻¹ Δ W_{r0} dr integrated
alongside the transport, and an adaptive outer quadrature in s.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.integrate import quad_vec, solve_ivp

from data.geometry import (
    SINGULAR_THRESHOLD,
    Connection,
    Point,
    PulledBackConnection,
    TAU_MAPS,
    tau_pullback,
)
from utils.coeffring import NUM
from utils.core import debug_print, time_execution
from utils.dk2 import (
    DK2,
    MOD_GRADE,
    AlgebraSeries,
    BimoduleSeries,
    coboundary,
    commutator,
    triangle_act,
)
from utils.errors import PunctureError, QuadratureError

MOD_LETTERS = 2


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for the r-ODE and the outer s-quadrature.

    ``max_depth`` caps bisection depth of the s-quadrature (at most
    2**max_depth subintervals); ``rule`` is a scipy ``quad_vec`` rule.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_depth: int = 12
    rule: str = "gk21"

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("Quadrature tolerances must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.rule not in ("gk15", "gk21", "trapezoid"):
            raise ValueError(f"Unknown quadrature rule '{self.rule}'")

    @property
    def ode_rtol(self):
        return 0.1 * self.rel_tol

    @property
    def ode_atol(self):
        return 0.1 * self.abs_tol


DEFAULT_QUAD = QuadratureSpec()


# ----- dense layout -----


class _Layout:
    """Offsets of W, W⁻¹ and J blocks inside the flat ODE state."""

    def __init__(self, d, depth, inverse=False, module=False):
        self.d = d
        self.depth = depth
        self.inverse = inverse
        self.module = module
        offset = 0
        self.w = {}
        for k in range(1, depth + 1):
            self.w[k] = slice(offset, offset + d**k)
            offset += d**k
        self.winv = {}
        if inverse:
            for k in range(1, depth + 1):
                self.winv[k] = slice(offset, offset + d**k)
                offset += d**k
        self.j = {}
        if module:
            for x in range(MOD_LETTERS):
                for i in range(depth + 1):
                    for j in range(depth + 1 - i):
                        self.j[(x, i, j)] = (slice(offset, offset + d ** (i + j)), (d**i, d**j))
                        offset += d ** (i + j)
        self.size = offset

    def initial(self):
        return np.zeros(self.size, dtype=complex)

    def grades(self, y, block):
        out = [np.ones(1, dtype=complex)]
        for k in range(1, self.depth + 1):
            out.append(y[block[k]])
        return out


def _near_puncture(z, v):
    return min(abs(z), abs(z - 1), abs(v)) < SINGULAR_THRESHOLD


def _rhs_factory(layout, c, z_of, v_of, zr_of, vr_of, zs_of=None, vs_of=None):
    """RHS of the augmented r-ODE for one smooth piece."""

    def rhs(r, y):
        rr = np.array([r])
        z, v = complex(z_of(rr)[0]), complex(v_of(rr)[0])
        if _near_puncture(z, v):
            raise PunctureError(f"Transport reached a puncture at (z={z}, v={v})")
        zr, vr = complex(zr_of(rr)[0]), complex(vr_of(rr)[0])
        a = np.asarray(c.nabla(z, v, zr, vr), dtype=complex)
        dy = np.zeros_like(y)
        W = layout.grades(y, layout.w)
        for k in range(1, layout.depth + 1):
            dy[layout.w[k]] = np.outer(a, W[k - 1]).ravel()
        if layout.inverse:
            Winv = layout.grades(y, layout.winv)
            for k in range(1, layout.depth + 1):
                dy[layout.winv[k]] = -np.outer(Winv[k - 1], a).ravel()
        if layout.module and zs_of is not None:
            zs, vs = complex(zs_of(rr)[0]), complex(vs_of(rr)[0])
            delta = np.asarray(c.delta(z, v, (zs, vs), (zr, vr)), dtype=complex)
            if np.any(delta != 0):
                for (x, i, j), (sl, _) in layout.j.items():
                    if delta[x] != 0:
                        dy[sl] = delta[x] * np.outer(Winv[i], W[j]).ravel()
        return dy

    return rhs


def _integrate(rhs, r0, r1, y0, q):
    if r1 - r0 <= 0:
        return y0
    sol = solve_ivp(
        rhs, (r0, r1), y0, method="DOP853", rtol=q.ode_rtol, atol=q.ode_atol
    )
    if not sol.success:
        raise QuadratureError(f"Transport ODE failed on [{r0:.4f}, {r1:.4f}]: {sol.message}")
    return sol.y[:, -1]


# ----- dense <-> series -----


def _words(d, k):
    return list(product(range(d), repeat=k))


def dense_to_algebra(grades, order, alphabet):
    terms = {}
    for k, values in enumerate(grades[: order + 1]):
        for word, value in zip(_words(alphabet.size, k), values):
            if value != 0:
                terms[word] = complex(value)
    return AlgebraSeries(terms, order, alphabet, NUM)


def algebra_to_dense(a):
    """Per-grade arrays of a numeric AlgebraSeries."""
    d = a.alphabet.size
    grades = [np.zeros(d**k, dtype=complex) for k in range(a.order + 1)]
    for word, value in a.terms.items():
        index = 0
        for letter in word:
            index = index * d + letter
        grades[len(word)][index] += complex(value)
    return grades


def dense_to_bimodule(blocks, order, d=3):
    """``blocks[(x, i, j)]`` of shape (d^i, d^j) as a BimoduleSeries."""
    terms = {}
    for (x, i, j), block in blocks.items():
        if MOD_GRADE + i + j > order:
            continue
        for (li, left), (ri, right) in product(
            enumerate(_words(d, i)), enumerate(_words(d, j))
        ):
            value = block[li, ri]
            if value != 0:
                terms[(left, x, right)] = complex(value)
    return BimoduleSeries(terms, order, DK2, NUM)


# ----- 1-path transport -----


def _transport_dense(path, c, depth, q, r0=0.0, r1=1.0):
    layout = _Layout(c.alphabet.size, depth)
    y = layout.initial()
    for seg in path.segments:
        lo, hi = max(seg.r0, r0), min(seg.r1, r1)
        if hi <= lo:
            continue
        rhs = _rhs_factory(layout, c, seg.z, seg.v, seg.dz, seg.dv)
        y = _integrate(rhs, lo, hi, y, q)
    return layout.grades(y, layout.w)


def partial_transport(path, c, N, q=DEFAULT_QUAD, r0=0.0, r1=1.0):
    """W from r₀ to r₁ along ``path`` (W(r₀) = 1), truncated at grade N."""
    if not 0.0 <= r0 <= r1 <= 1.0:
        raise ValueError(f"Need 0 ≤ r0 ≤ r1 ≤ 1, got {r0}, {r1}")
    path.point(r0).check()
    path.point(r1).check()
    grades = _transport_dense(path, c, N, q, r0, r1)
    return dense_to_algebra(grades, N, c.alphabet)


def parallel_transport(path, c, N, q=DEFAULT_QUAD):
    """Truncated path-ordered exponential of ∇ along a 1-path."""
    return time_execution(
        f"transport {path.key} (N={N})", partial_transport, path, c, N, q, 0.0, 1.0
    )


# ----- surface holonomy -----


def _cross_section(P, c, depth, s, q):
    """W_{10}(s) and W_{10}(s)·J(s) as dense blocks."""
    layout = _Layout(DK2.size, depth, inverse=True, module=True)
    y = layout.initial()
    for lo, hi, patch in P.active_patches(s):
        rhs = _rhs_factory(
            layout,
            c,
            lambda r, p=patch: p.z(s, r),
            lambda r, p=patch: p.v(s, r),
            lambda r, p=patch: p.zr(s, r),
            lambda r, p=patch: p.vr(s, r),
            None if patch.static else (lambda r, p=patch: p.zs(s, r)),
            None if patch.static else (lambda r, p=patch: p.vs(s, r)),
        )
        y = _integrate(rhs, lo, hi, y, q)
    W = layout.grades(y, layout.w)
    WJ = {}
    for (x, i, j), (sl, shape) in layout.j.items():
        J = y[sl].reshape(shape)
        for k in range(depth + 1 - i - j):
            key = (x, i + k, j)
            block = np.kron(W[k][:, None], J)
            WJ[key] = WJ[key] + block if key in WJ else block
    return W, WJ, layout


def _flatten(WJ, layout):
    return np.concatenate([WJ[key].ravel() for key in sorted(layout.j)])


def _unflatten(vector, layout):
    blocks, offset = {}, 0
    for key in sorted(layout.j):
        _, shape = layout.j[key]
        size = shape[0] * shape[1]
        blocks[key] = vector[offset : offset + size].reshape(shape)
        offset += size
    return blocks


def _holonomy_dense(P, c, N, q, s0, s1):
    depth = N - MOD_GRADE
    layout = _Layout(DK2.size, depth, inverse=True, module=True)

    def integrand(s):
        _, WJ, _ = _cross_section(P, c, depth, float(s), q)
        return _flatten(WJ, layout)

    points = [s for s in P.s_corners if s0 < s < s1]
    result, error, info = quad_vec(
        integrand,
        s0,
        s1,
        epsabs=q.abs_tol,
        epsrel=q.rel_tol,
        limit=2**q.max_depth,
        points=points or None,
        quadrature=q.rule,
        full_output=True,
    )
    if info.status != 0:
        raise QuadratureError(
            f"Surface holonomy of '{P.key}' did not reach tolerance "
            f"(status {info.status}, error {error:.2e})"
        )
    debug_print(f"holonomy {P.key}: {info.intervals.shape[0]} s-intervals, error {error:.2e}")
    return _unflatten(result, layout)


def surface_holonomy(P, c, N, q=DEFAULT_QUAD, s_range=(0.0, 1.0)):
    """W^P as a numeric BimoduleSeries; zero below grade 2."""
    if N < MOD_GRADE:
        return BimoduleSeries.zero(N, DK2, NUM)
    s0, s1 = s_range
    blocks = time_execution(
        f"holonomy {P.key} (N={N})", _holonomy_dense, P, c, N, q, s0, s1
    )
    return dense_to_bimodule(blocks, N)


def surface_holonomy_pieces(P, c, N, q=DEFAULT_QUAD, cuts=(0.5,)):
    """Holonomies over the s-intervals between ``cuts``; they sum to W^P."""
    edges = [0.0, *sorted(cuts), 1.0]
    return [surface_holonomy(P, c, N, q, (lo, hi)) for lo, hi in zip(edges, edges[1:])]


# ----- checks -----


def max_abs(series):
    return max((abs(complex(v)) for v in series.terms.values()), default=0.0)


def per_grade_max(series):
    out = {}
    for key, value in series.terms.items():
        g = series.grade_of(key)
        out[g] = max(out.get(g, 0.0), abs(complex(value)))
    return out


def globularity_check(P, c, N, q=DEFAULT_QUAD, holonomy=None):
    """Report on ∂W^P − (W^{source} − W^{target}) per grade."""
    H = holonomy if holonomy is not None else surface_holonomy(P, c, N, q)
    W_src = parallel_transport(P.source, c, N, q)
    W_tgt = parallel_transport(P.target, c, N, q)
    difference = W_src - W_tgt
    residual = coboundary(H) - difference
    scale = max(1.0, max_abs(difference))
    grades = {g: value / scale for g, value in per_grade_max(residual).items()}
    worst = max(grades.values(), default=0.0)
    return {
        "name": f"globularity {P.key}",
        "order": N,
        "params": {k: (str(v) if isinstance(v, complex) else v) for k, v in P.params.items()},
        "grades": {str(g): grades.get(g, 0.0) for g in range(N + 1)},
        "max_abs_residual": worst,
        "pass": bool(worst < 10 * q.rel_tol),
    }


def _random_tangent(rng):
    return tuple(complex(*rng.normal(size=2)) for _ in range(2))


def random_points(n, seed=0):
    """Sample points of ℂ^{××}×ℂ^× well away from the punctures."""
    rng = np.random.default_rng(seed)
    points = []
    while len(points) < n:
        z = complex(*rng.uniform(-2.0, 3.0, size=2))
        v = complex(*rng.uniform(-2.0, 2.0, size=2))
        point = Point(z, v)
        if point.distance_to_punctures() > 0.05:
            points.append(point)
    return points


def _as_series(c, point, u, order=2):
    nabla = c.nabla(point.z, point.v, *u)
    return AlgebraSeries({(g,): complex(x) for g, x in enumerate(nabla)}, order, DK2, NUM)


def _delta_series(values, order=3):
    return BimoduleSeries({((), x, ()): complex(val) for x, val in enumerate(values)}, order, DK2, NUM)


def _wedge(u, w):
    return u[0] * w[1] - u[1] * w[0]


def flatness_checks(c, sample, seed=0):
    """Fake flatness [∇u, ∇w] = ∂Δ[u, w] and vanishing 2-curvature at each point.

    Both exterior derivatives are taken in closed form: the ∇ coefficients
    are closed, and dΔ comes from ``delta_gradient``.
    """
    rng = np.random.default_rng(seed)
    fake, curvature = 0.0, 0.0
    for point in sample:
        point.check()
        u, w, x = (_random_tangent(rng) for _ in range(3))
        A_u, A_w = _as_series(c, point, u), _as_series(c, point, w)
        d_nabla = np.asarray(c.nabla_partials(point.z, point.v)) * _wedge(u, w)
        F = commutator(A_u, A_w) + AlgebraSeries(
            {(g,): complex(val) for g, val in enumerate(d_nabla)}, 2, DK2, NUM
        )
        dD = coboundary(_delta_series(c.delta(point.z, point.v, u, w), 2))
        fake = max(fake, max_abs(F - dD))

        grad_z, grad_v = c.delta_gradient(point.z, point.v)
        G = BimoduleSeries.zero(3, DK2, NUM)
        for a, b, e in ((u, w, x), (w, x, u), (x, u, w)):
            directional = (a[0] * np.asarray(grad_z) + a[1] * np.asarray(grad_v)) * _wedge(b, e)
            G = G + _delta_series(directional)
            G = G + triangle_act(
                _as_series(c, point, a, 3), _delta_series(c.delta(point.z, point.v, b, e))
            )
        curvature = max(curvature, max_abs(G))
    return {
        "name": f"flatness {c.label}",
        "points": len(sample),
        "fake_flatness": fake,
        "two_curvature": curvature,
        "max_abs_residual": max(fake, curvature),
        "pass": bool(max(fake, curvature) < 1e-10),
    }


def pullback_consistency(key, sample, seed=0, base=None):
    """Geometric τ*c against the relabelled connection on random tangents."""
    base = base or Connection()
    geometric = PulledBackConnection(base, key)
    relabelled = tau_pullback(key, base)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for point in sample:
        u, w = _random_tangent(rng), _random_tangent(rng)
        worst = max(
            worst,
            float(np.max(np.abs(geometric.nabla(point.z, point.v, *u) - relabelled.nabla(point.z, point.v, *u)))),
            float(np.max(np.abs(geometric.delta(point.z, point.v, u, w) - relabelled.delta(point.z, point.v, u, w)))),
        )
    return {
        "name": f"pullback τ{key}",
        "label": relabelled.label,
        "max_abs_residual": worst,
        "pass": bool(worst < 1e-10),
    }


def flatness_suite(n=100, seed=0):
    """Flatness of (∇, Δ) and of every τ-pullback, plus pullback consistency."""
    sample = random_points(n, seed)
    reports = [flatness_checks(Connection(), sample, seed)]
    for key in TAU_MAPS:
        reports.append(flatness_checks(tau_pullback(key, Connection()), sample, seed))
        reports.append(pullback_consistency(key, sample, seed))
    return reports


def transport_derivative_check(P, c, N, s, q=DEFAULT_QUAD, h=1e-4):
    """d/ds W_{10}(s) by central differences against −∂(W_{10}(s)·J(s))."""
    depth = N - MOD_GRADE
    if depth < 0:
        raise ValueError("The derivative check needs N ≥ 2")
    _, WJ, _ = _cross_section(P, c, depth, s, q)
    predicted = -coboundary(dense_to_bimodule(WJ, N))
    plus = dense_to_algebra(_cross_section(P, c, N, s + h, q)[0], N, DK2)
    minus = dense_to_algebra(_cross_section(P, c, N, s - h, q)[0], N, DK2)
    finite = (plus - minus).scale(1.0 / (2.0 * h))
    residual = max_abs(finite - predicted)
    scale = max(1.0, max_abs(predicted))
    return {
        "name": f"transport derivative {P.key} at s={s:g}",
        "max_abs_residual": residual / scale,
        "pass": bool(residual / scale < 1e-5),
    }
