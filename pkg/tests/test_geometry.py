import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parent.parent))

from data.catalog import (
    PATH_KEYS,
    TWO_PATH_KEYS,
    curves,
    horizontal_filler,
    make_2path,
    make_path,
    straight_homotopy,
)
from data.geometry import (
    TAU_MAPS,
    Connection,
    Point,
    PulledBackConnection,
    connection_eval,
    constant_path,
    path2_hconcat,
    path2_restrict,
    path2_vconcat,
    path_chain,
    path_concat,
    path_reparametrize,
    path_reverse,
    smooth_path,
    tau_point,
    tau_pullback,
    tau_push,
    tau_transform,
)
from utils.errors import EndpointMismatchError, PunctureError

H = 1e-6


def _segment(key, z0, z1, v=1.0):
    return smooth_path(
        key,
        lambda r: z0 + (z1 - z0) * np.asarray(r) + 0j,
        lambda r: np.full(np.shape(r), v, dtype=complex),
        lambda r: np.full(np.shape(r), z1 - z0, dtype=complex),
        lambda r: np.zeros(np.shape(r), dtype=complex),
    )


@pytest.fixture
def params():
    return {"eps": 0.1, "a": 1.0}


# ----- point and 1-path tests -----


def test_point_checks_punctures():
    assert Point(0.5, 1.0).distance_to_punctures() == pytest.approx(0.5)
    with pytest.raises(PunctureError):
        Point(1.0, 2.0).check()
    with pytest.raises(PunctureError):
        Point(0.5, 0.0).check()


def test_chain_and_reverse():
    first, second = _segment("a", 0.2, 0.4), _segment("b", 0.4, 0.8)
    chained = path_chain(first, second)
    assert chained.corners == (0.0, 0.5, 1.0)
    assert chained.point(0.75).close_to(Point(0.6, 1.0))
    # double speed on each half
    assert chained.dz(0.25) == pytest.approx(0.4)
    reverse = path_reverse(chained)
    assert reverse.start.close_to(chained.end)
    assert reverse.dz(0.1) == pytest.approx(-0.8)
    assert path_concat(second, first).key == "b∘a"


def test_chain_rejects_gaps():
    with pytest.raises(EndpointMismatchError):
        path_chain(_segment("a", 0.2, 0.4), _segment("b", 0.5, 0.8))


def test_constant_path_has_zero_tangent():
    path = constant_path(Point(0.5, 2.0))
    assert path.dz(0.3) == 0
    assert path.end.close_to(Point(0.5, 2.0))


def test_segment_through_a_puncture_is_rejected():
    with pytest.raises(PunctureError):
        _segment("bad", 0.0, 0.8).check_punctures()


# ----- catalog 1-path tests -----


def test_hexagon_curves_meet(params):
    eps = params["eps"]
    C = curves(eps)
    assert C["c_I"].f(0.0) == pytest.approx(eps)
    assert C["c_I"].f(1.0) == pytest.approx(C["c_II"].f(0.0))
    assert C["c_II"].f(1.0) == pytest.approx(C["c_III"].f(0.0))
    assert C["c_III"].f(1.0) == pytest.approx(C["c_IV"].f(0.0))
    assert C["c_VI"].f(0.0) == pytest.approx(C["c_V_iota"].f(0.0))
    assert C["c_VI"].f(1.0) == pytest.approx(eps)


@pytest.mark.parametrize("key", PATH_KEYS)
def test_catalog_paths_have_consistent_derivatives(params, key):
    path = make_path(key, params)
    for r in (0.2, 0.5, 0.8):
        dz = (path.z(r + H) - path.z(r - H)) / (2 * H)
        dv = (path.v(r + H) - path.v(r - H)) / (2 * H)
        assert abs(dz - path.dz(r)) < 1e-5 * max(1.0, abs(dz))
        assert abs(dv - path.dv(r)) < 1e-5 * max(1.0, abs(dv))


@pytest.mark.parametrize("key", PATH_KEYS)
def test_catalog_paths_avoid_punctures(key):
    assert make_path(key).clearance() > 1e-9


def test_catalog_parameter_errors():
    with pytest.raises(KeyError):
        make_path("c_VII")
    with pytest.raises(ValueError):
        make_path("c_I", {"eps": 0.3})
    with pytest.raises(ValueError):
        make_path("c_I", {"a": 0})


def test_paths_carry_their_parameters(params):
    path = make_path("p_IV", {**params, "a": 2.0})
    assert path.params["a"] == 2.0
    assert path.v(0.5) == pytest.approx(2.0 * 0.1 / 0.9)


# ----- catalog 2-path tests -----


@pytest.mark.parametrize("key", TWO_PATH_KEYS)
def test_catalog_2paths_are_valid(key):
    P = make_2path(key)
    assert P.clearance() > 1e-9
    assert P.source.start.close_to(P.target.start, 1e-8)
    assert P.source.end.close_to(P.target.end, 1e-8)


def test_declared_sources(params):
    P = make_2path("P_V", params)
    p_v = make_path("p_V", params)
    for r in np.linspace(0.0, 1.0, 11):
        assert P.source.point(r).close_to(p_v.point(r), 1e-8)


@pytest.mark.parametrize("key, s, r", [("Q_V", 0.4, 0.3), ("P_L", 0.4, 0.5), ("P_IV", 0.6, 0.5)])
def test_2path_partials_match_finite_differences(params, key, s, r):
    P = make_2path(key, params)
    zs, vs, zr, vr = P.partials(s, r)
    z_plus, v_plus = P.evaluate(s + H, r)
    z_minus, v_minus = P.evaluate(s - H, r)
    assert abs((z_plus - z_minus) / (2 * H) - zs) < 1e-5 * max(1.0, abs(zs))
    assert abs((v_plus - v_minus) / (2 * H) - vs) < 1e-5 * max(1.0, abs(vs))
    z_plus, v_plus = P.evaluate(s, r + H)
    z_minus, v_minus = P.evaluate(s, r - H)
    assert abs((z_plus - z_minus) / (2 * H) - zr) < 1e-5 * max(1.0, abs(zr))
    assert abs((v_plus - v_minus) / (2 * H) - vr) < 1e-5 * max(1.0, abs(vr))


def test_straight_homotopy_requires_shared_endpoints():
    with pytest.raises(PunctureError):
        straight_homotopy("bad", _segment("a", 0.2, 0.4), _segment("b", 0.2, 0.5))


def test_horizontal_filler_is_bent_clear_of_punctures(params):
    filler = horizontal_filler(params)
    assert filler.params["bend"] > 0
    assert filler.clearance() > params["eps"] / 2


def test_vertical_pasting_and_restriction():
    source = _segment("a", 0.2, 0.4)
    target = path_reparametrize(source, lambda r: r**2, lambda r: 2.0 * r)
    P = straight_homotopy("P", source, target)
    lower, upper = path2_restrict(P, 0.0, 0.5), path2_restrict(P, 0.5, 1.0)
    pasted = path2_vconcat(upper, lower)
    for s in (0.1, 0.6, 0.9):
        assert pasted.evaluate(s, 0.3) == pytest.approx(P.evaluate(s, 0.3))
    assert pasted.partials(0.3, 0.5)[0] == pytest.approx(P.partials(0.3, 0.5)[0])
    with pytest.raises(EndpointMismatchError):
        path2_vconcat(lower, lower)


def test_horizontal_pasting():
    first, second = _segment("a", 0.2, 0.4), _segment("b", 0.4, 0.8)
    P = straight_homotopy("P", first, path_reparametrize(first, lambda r: r**2, lambda r: 2.0 * r))
    Q = straight_homotopy("Q", second, path_reparametrize(second, lambda r: r**2, lambda r: 2.0 * r))
    pasted = path2_hconcat(Q, P)
    assert pasted.key == "Q∘P"
    for s in (0.0, 0.4, 1.0):
        assert pasted.evaluate(s, 0.2) == pytest.approx(P.evaluate(s, 0.4))
        assert pasted.evaluate(s, 0.7) == pytest.approx(Q.evaluate(s, 0.4))
    with pytest.raises(EndpointMismatchError):
        path2_hconcat(P, Q)


# ----- τ map tests -----


@pytest.mark.parametrize("key", ["12", "23", "13"])
def test_transpositions_are_involutions(key):
    z, v = 0.3 + 0.4j, 1.5 - 0.2j
    assert tau_point(key, *tau_point(key, z, v)) == pytest.approx((z, v))


def test_three_cycles_are_mutually_inverse():
    z, v = 0.3 + 0.4j, 1.5 - 0.2j
    assert tau_point("1(23)", *tau_point("(12)3", z, v)) == pytest.approx((z, v))


@pytest.mark.parametrize("key", list(TAU_MAPS))
def test_tau_push_is_the_jacobian(key):
    z, v, dz, dv = 0.3 + 0.4j, 1.5 - 0.2j, 0.7 - 0.1j, 0.2 + 0.9j
    plus = tau_point(key, z + H * dz, v + H * dv)
    minus = tau_point(key, z - H * dz, v - H * dv)
    pushed = tau_push(key, z, v, dz, dv)
    for p, m, d in zip(plus, minus, pushed):
        assert abs((p - m) / (2 * H) - d) < 1e-6


def test_tau_transform_moves_endpoints(params):
    path = make_path("c_I", params)
    image = tau_transform("13", path)
    assert image.start.close_to(Point(*tau_point("13", path.start.z, path.start.v)))
    with pytest.raises(ValueError):
        tau_transform("14", path)


# ----- connection tests -----


def test_connection_values():
    c = Connection()
    alpha_gamma, gamma, beta_gamma = c.nabla(0.5, 2.0, 1.0, 1.0)
    assert gamma == pytest.approx(0.5)
    assert alpha_gamma == pytest.approx(2.5)
    assert beta_gamma == pytest.approx(-1.5)
    u, w = (1.0, 0.0), (0.0, 1.0)
    assert np.allclose(c.delta(0.5, 2.0, u, w), [1.0, -1.0])
    assert np.allclose(c.delta(0.5, 2.0, w, u), [-1.0, 1.0])


@pytest.mark.parametrize("key", list(TAU_MAPS))
def test_pullback_is_the_relabelled_connection(key):
    base = Connection()
    geometric = PulledBackConnection(base, key)
    relabelled = tau_pullback(key, base)
    z, v = 0.3 + 0.4j, 1.5 - 0.2j
    u, w = (0.7 - 0.1j, 0.2 + 0.9j), (-0.4 + 0.3j, 1.1 + 0.0j)
    assert geometric.label == relabelled.label
    assert geometric.nabla(z, v, *u) == pytest.approx(relabelled.nabla(z, v, *u))
    assert geometric.delta(z, v, u, w) == pytest.approx(relabelled.delta(z, v, u, w))


def test_connection_eval_series():
    a, m = connection_eval(Connection(), Point(0.5, 2.0), (1.0, 0.0), (0.0, 1.0))
    assert complex(a.coeff("t12")) == pytest.approx(2.0)
    assert complex(m.coeff("L")) == pytest.approx(1.0)
    with pytest.raises(PunctureError):
        connection_eval(Connection(), Point(0.0, 2.0), (1.0, 0.0), (0.0, 1.0))
