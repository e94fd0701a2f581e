import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pointcharge.errors import OnWorldline, PointChargeError
from pointcharge.minkowski import catalog, inner, lower
from pointcharge.retarded import (
    div_K_fd,
    grad_tau_check,
    grad_xi,
    kinematics,
    kinematics_arrays,
    retarded_time,
    retarded_time_bisection,
)

RNG = np.random.default_rng(42)


def cloud(n=200, w=None):
    """Random observer points off the worldline, inside any horizon."""
    pts = np.empty((n, 4))
    pts[:, 0] = RNG.uniform(1.0, 6.0, size=n)
    pts[:, 1:] = RNG.uniform(-3.0, 3.0, size=(n, 3))
    if w is not None and w.label == "hyperbolic":
        # only points with X0 + X1 > 0 see the worldline
        pts[:, 1] = np.abs(pts[:, 1]) + pts[:, 0] * 0.1 + 0.5
    return pts


def test_rest_worldline_closed_form():
    from pointcharge.minkowski import rest_worldline

    w = rest_worldline()
    pts = cloud(500)
    tau = retarded_time(w, pts)
    expect = pts[:, 0] - np.linalg.norm(pts[:, 1:], axis=-1)
    assert np.abs(tau - expect).max() < 1e-12


@pytest.mark.parametrize("w", catalog(), ids=lambda w: w.label)
def test_null_residual_and_causality(w):
    pts = cloud(200, w)
    k = kinematics_arrays(w, pts)
    scale = np.maximum(1.0, (pts * pts).sum(axis=-1))
    assert np.abs(k["residual"]).max() <= 1e-9 * scale.max()
    # retarded, not advanced: R0 > 0
    assert (k["R"][:, 0] > 0).all()


@pytest.mark.parametrize("w", catalog(), ids=lambda w: w.label)
def test_agrees_with_bisection_oracle(w):
    pts = cloud(100, w)
    tau = retarded_time(w, pts)
    tau_b = retarded_time_bisection(w, pts)
    assert np.abs(tau - tau_b).max() <= 1e-10


@pytest.mark.parametrize("w", catalog(), ids=lambda w: w.label)
def test_kinematic_identities(w):
    pts = cloud(200, w)
    k = kinematics_arrays(w, pts)
    zdot = w.zdot(k["tau_r"])
    assert np.abs(inner(k["K"], zdot) - 1.0).max() <= 1e-9
    assert np.abs(inner(k["K"], k["K"])).max() <= 1e-9
    assert (k["xi"] > 0).all()


@pytest.mark.parametrize("w", catalog(), ids=lambda w: w.label)
def test_gradient_of_retarded_time_is_K(w):
    pts = cloud(30, w)
    assert grad_tau_check(w, pts, h=1e-4) <= 1e-4


@pytest.mark.parametrize("w", catalog(), ids=lambda w: w.label)
def test_gradient_of_xi_analytic_vs_fd(w):
    pts = cloud(30, w)
    G = lower(grad_xi(w, pts))
    h = 1e-4
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = h
        fd = (kinematics_arrays(w, pts + e)["xi"]
              - kinematics_arrays(w, pts - e)["xi"]) / (2 * h)
        assert np.abs(fd - G[:, mu]).max() <= 1e-4
    # nonvanishing gradient
    assert np.linalg.norm(G, axis=-1).min() > 0


@pytest.mark.parametrize("w", catalog(), ids=lambda w: w.label)
def test_divergence_of_K(w):
    pts = cloud(30, w)
    k = kinematics_arrays(w, pts)
    fd = div_K_fd(w, pts, h=1e-4)
    rel = np.abs(fd - 2.0 / k["xi"]) / np.abs(2.0 / k["xi"])
    assert rel.max() <= 1e-4


@pytest.mark.parametrize("w", catalog(), ids=lambda w: w.label)
def test_xi_eigentime_derivative_identity(w):
    # d/dtau of Zdot(tau).(X - Z(tau)) at tau_r equals xi*kappa - 1
    pts = cloud(30, w)
    k = kinematics_arrays(w, pts)
    h = 1e-5

    def xi_of_tau(tau):
        return inner(w.zdot(tau), pts - w.z(tau))

    fd = (xi_of_tau(k["tau_r"] + h) - xi_of_tau(k["tau_r"] - h)) / (2 * h)
    expect = k["xi"] * k["kappa"] - 1.0
    assert np.abs(fd - expect).max() <= 1e-6


def test_scalar_interface_returns_four_vectors():
    w = catalog()[1]
    k = kinematics(w, (3.0, 1.0, 0.5, 0.0))
    assert k.xi > 0
    assert abs(inner(k.K.as_array(), k.K.as_array())) <= 1e-9
    assert k.tau_r == pytest.approx(retarded_time(w, (3.0, 1.0, 0.5, 0.0)))


def test_on_worldline_rejected():
    from pointcharge.minkowski import rest_worldline

    with pytest.raises(OnWorldline):
        retarded_time(rest_worldline(), (2.0, 0.0, 0.0, 0.0))


def test_hyperbolic_horizon_has_no_retarded_time():
    from pointcharge.minkowski import hyperbolic_worldline

    # X0 + X1 <= 0 never intersects the backward light cone of the motion
    with pytest.raises(PointChargeError):
        retarded_time(hyperbolic_worldline(1.0), (1.0, -3.0, 0.0, 0.0))


@given(
    t=st.floats(min_value=0.5, max_value=5.0),
    x=st.floats(min_value=-2.0, max_value=2.0),
    y=st.floats(min_value=0.3, max_value=2.0),
)
@settings(max_examples=50, deadline=None)
def test_rest_retarded_time_property(t, x, y):
    from pointcharge.minkowski import rest_worldline

    tau = retarded_time(rest_worldline(), (t, x, y, 0.0))
    assert tau == pytest.approx(t - np.hypot(x, y), abs=1e-10)
