import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parent.parent))

from data.catalog import TWO_PATH_KEYS, make_2path, make_path
from data.geometry import Connection, KZ2Connection, path_chain, path_reverse, smooth_path
from utils.coeffring import NUM
from utils.dk2 import DK2, AlgebraSeries, series_exp, symbol
from utils.transport import (
    QuadratureSpec,
    flatness_checks,
    flatness_suite,
    globularity_check,
    max_abs,
    parallel_transport,
    partial_transport,
    per_grade_max,
    random_points,
    surface_holonomy,
    surface_holonomy_pieces,
    transport_derivative_check,
)


@pytest.fixture
def params():
    return {"eps": 0.1, "a": 1.0}


def _vertical(v0, v1, z=0.5):
    return smooth_path(
        "vertical",
        lambda r: np.full(np.shape(r), z, dtype=complex),
        lambda r: v0 + (v1 - v0) * np.asarray(r) + 0j,
        lambda r: np.zeros(np.shape(r), dtype=complex),
        lambda r: np.full(np.shape(r), v1 - v0, dtype=complex),
    )


# ----- quadrature spec tests -----


def test_quadrature_spec_validation():
    spec = QuadratureSpec(rel_tol=1e-6, abs_tol=1e-8)
    assert spec.ode_rtol == pytest.approx(1e-7)
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_depth=0)
    with pytest.raises(ValueError):
        QuadratureSpec(rule="simpson")


# ----- 1-path transport tests -----


def test_kz_transport_along_the_real_segment(params):
    W = parallel_transport(make_path("c_I", params), KZ2Connection(), 2)
    log = math.log(0.9 / 0.1)
    assert complex(W.coeff("A")) == pytest.approx(log, rel=1e-7)
    assert complex(W.coeff("B")) == pytest.approx(-log, rel=1e-7)
    assert complex(W.coeff("A.A")) == pytest.approx(log**2 / 2, rel=1e-7)
    assert complex(W.coeff("B.B")) == pytest.approx(log**2 / 2, rel=1e-7)


def test_vertical_transport_is_the_lambda_exponential():
    W = parallel_transport(_vertical(1.0, 2.0), Connection(), 3)
    expected = series_exp(symbol("Lambda", 3, NUM).scale(math.log(2.0)))
    assert max_abs(W - expected) < 1e-7


def test_reversed_path_inverts_the_transport(params):
    path = make_path("p_III", params)
    c = Connection()
    product = parallel_transport(path_reverse(path), c, 3) * parallel_transport(path, c, 3)
    assert max_abs(product - AlgebraSeries.one(3, DK2, NUM)) < 1e-7


def test_transport_of_a_chain_is_the_product(params):
    first, second = make_path("c_I", params), make_path("c_II", params)
    c = Connection()
    chained = parallel_transport(path_chain(first, second), c, 3)
    product = parallel_transport(second, c, 3) * parallel_transport(first, c, 3)
    assert max_abs(chained - product) < 1e-7


def test_partial_transport_range():
    path = _vertical(1.0, 2.0)
    with pytest.raises(ValueError):
        partial_transport(path, Connection(), 2, r0=0.7, r1=0.2)
    half = partial_transport(path, Connection(), 1, r0=0.0, r1=0.5)
    assert complex(half.coeff("t13")) == pytest.approx(math.log(1.5), rel=1e-7)


# ----- surface holonomy tests -----


def test_holonomy_vanishes_below_grade_two(params):
    H = surface_holonomy(make_2path("P_V", params), Connection(), 1)
    assert H.is_zero()


def test_globularity_of_the_reparametrisation_2path(params):
    report = globularity_check(make_2path("harmless", params), Connection(), 2)
    assert report["pass"], report
    assert set(report["grades"]) == {"0", "1", "2"}


@pytest.mark.slow
def test_globularity_of_a_vertical_2path(params):
    report = globularity_check(make_2path("P_V", params), Connection(), 2)
    assert report["pass"], report


@pytest.mark.slow
@pytest.mark.parametrize("key", TWO_PATH_KEYS)
def test_globularity_of_every_catalog_2path(key):
    report = globularity_check(make_2path(key, {"eps": 0.05}), Connection(), 2)
    assert report["pass"], report


@pytest.mark.slow
def test_holonomy_pieces_add_up(params):
    P = make_2path("Q_VI", params)
    whole = surface_holonomy(P, Connection(), 2)
    lower, upper = surface_holonomy_pieces(P, Connection(), 2)
    assert max_abs(lower + upper - whole) < 1e-7


@pytest.mark.slow
def test_transport_derivative(params):
    report = transport_derivative_check(make_2path("Q_VI", params), Connection(), 2, 0.3)
    assert report["pass"], report


def test_transport_derivative_needs_a_module_grade(params):
    with pytest.raises(ValueError):
        transport_derivative_check(make_2path("Q_VI", params), Connection(), 1, 0.3)


# ----- flatness tests -----


def test_random_points_avoid_punctures():
    points = random_points(20, seed=4)
    assert len(points) == 20
    assert min(p.distance_to_punctures() for p in points) > 0.05
    assert points == random_points(20, seed=4)


def test_flatness_of_the_base_connection():
    report = flatness_checks(Connection(), random_points(10, seed=2), seed=2)
    assert report["fake_flatness"] < 1e-10
    assert report["two_curvature"] < 1e-10


def test_flatness_suite_covers_every_pullback():
    reports = flatness_suite(5, seed=1)
    assert len(reports) == 11
    assert all(r["pass"] for r in reports), [r["name"] for r in reports if not r["pass"]]


def test_per_grade_max():
    series = AlgebraSeries({(0,): 2.0, (0, 1): -3.0, (1, 1): 1.0}, 2, DK2, NUM)
    assert per_grade_max(series) == {1: 2.0, 2: 3.0}
