import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pointcharge.errors import ConfigError
from pointcharge.minkowski import (
    METRIC,
    FourVector,
    boost_worldline,
    catalog,
    circular_worldline,
    hyperbolic_worldline,
    inner,
    lower,
    minkowski_inner,
    parse_worldline,
    rest_worldline,
    validate_worldline,
)

TAU_GRID = np.linspace(-5.0, 5.0, 401)


def test_metric_signature():
    assert np.array_equal(METRIC, [1.0, -1.0, -1.0, -1.0])


def test_inner_known_values():
    assert inner([1, 0, 0, 0], [1, 0, 0, 0]) == 1.0
    assert inner([0, 1, 0, 0], [0, 1, 0, 0]) == -1.0
    # a null vector
    assert inner([1, 1, 0, 0], [1, 1, 0, 0]) == 0.0


def test_lower_is_involutive():
    a = np.array([1.0, 2.0, 3.0, 4.0])
    assert np.array_equal(lower(lower(a)), a)
    assert np.array_equal(lower(a), [1.0, -2.0, -3.0, -4.0])


def test_inner_broadcasts():
    a = np.ones((5, 4))
    b = np.ones((4,))
    assert inner(a, b).shape == (5,)


def test_four_vector_arithmetic():
    a = FourVector(1.0, 2.0, 3.0, 4.0)
    b = FourVector(0.5, 0.5, 0.5, 0.5)
    assert (a + b).x0 == 1.5
    assert (a - b).x3 == 3.5
    assert (2.0 * a).x1 == 4.0
    assert np.array_equal(a.spatial, [2.0, 3.0, 4.0])
    assert minkowski_inner(a, a) == pytest.approx(1 - 4 - 9 - 16)


@pytest.mark.parametrize("w", catalog(), ids=lambda w: w.label)
def test_catalog_eigentime_normalized(w):
    rep = validate_worldline(w, TAU_GRID)
    assert rep.passed, str(rep)


def test_rest_worldline_is_time_axis():
    w = rest_worldline()
    z = w.z(TAU_GRID)
    assert np.array_equal(z[:, 0], TAU_GRID)
    assert np.all(z[:, 1:] == 0)


def test_boost_worldline_velocity():
    w = boost_worldline(0.6)
    gamma = 1.25
    z = w.z(np.asarray(2.0))
    assert z[0] == pytest.approx(gamma * 2.0)
    assert z[1] == pytest.approx(gamma * 0.6 * 2.0)
    # coordinate velocity dx/dt = v
    zd = w.zdot(np.asarray(2.0))
    assert zd[1] / zd[0] == pytest.approx(0.6)


def test_hyperbolic_worldline_invariant():
    # constant proper acceleration: Zddot.Zddot = -a^2
    w = hyperbolic_worldline(1.0)
    zdd = w.zddot(TAU_GRID)
    assert np.allclose(inner(zdd, zdd), -1.0, atol=1e-12)


def test_circular_worldline_radius():
    w = circular_worldline(1.0, 0.5)
    z = w.z(TAU_GRID)
    r = np.linalg.norm(z[:, 1:3], axis=-1)
    assert np.allclose(r, 1.0, atol=1e-12)


@given(v=st.floats(min_value=-0.95, max_value=0.95))
@settings(max_examples=30, deadline=None)
def test_boost_normalized_for_any_speed(v):
    rep = validate_worldline(boost_worldline(v), np.linspace(-2, 2, 41))
    assert rep.passed


@pytest.mark.parametrize("spec,label", [
    ("rest", "rest"),
    ("boost(0.6)", "boost"),
    ("hyperbolic(1.0)", "hyperbolic"),
    ("circular(1.0, 0.5)", "circular"),
])
def test_parse_worldline(spec, label):
    assert parse_worldline(spec).label == label


@pytest.mark.parametrize("spec", ["warp(9)", "boost()", "boost(a)", "circular(1)"])
def test_parse_worldline_rejects_bad_specs(spec):
    with pytest.raises(ConfigError):
        parse_worldline(spec)


def test_validate_catches_bad_parametrization():
    # coordinate-time parametrization of a moving charge is not eigentime
    from pointcharge.minkowski import Worldline, _stack

    bad = Worldline(
        label="coordinate-time",
        z=lambda t: _stack(t, 0.6 * np.asarray(t), 0 * t, 0 * t),
        zdot=lambda t: _stack(np.ones_like(t), 0.6 * np.ones_like(t), 0 * t, 0 * t),
        zddot=lambda t: _stack(0 * t, 0 * t, 0 * t, 0 * t),
    )
    rep = validate_worldline(bad, TAU_GRID)
    assert not rep.passed
