"""Retarded proper time and the kinematic quantities built on it.

For an observer point X and a worldline Z the retarded proper time tau_r
is the unique root of g(tau) = R.R with R = X - Z(tau) on the backward
light cone (R0 > 0).  Along the worldline, g > 0 before the retarded
crossing, negative between the retarded and advanced crossings, and
positive again afterwards, so any bracket [lo, hi] with g(lo) > 0,
g(hi) < 0 and hi at the simultaneous point Z0(hi) = X0 isolates tau_r.

All solver routines are vectorized over arrays of observer points of
shape (..., 4); FourVector inputs are accepted at the public surface.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, OnWorldline
from .minkowski import METRIC, FourVector, inner, lower

DEFAULT_TOL = 1e-12
MAX_ITER = 100

# spatial distance below this counts as "on the worldline"
ON_WORLDLINE_DIST = 1e-12


def _as_points(X):
    if isinstance(X, FourVector):
        return X.as_array(), True
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != 4:
        raise ValueError("observer points must have shape (..., 4)")
    return X, X.ndim == 1


def _g(w, X, tau):
    # evaluations far down the worldline may overflow (e.g. cosh); the
    # resulting nan/inf is treated as "not bracketed yet" by the callers
    with np.errstate(over="ignore", invalid="ignore"):
        R = X - w.z(tau)
        return inner(R, R)


def _worst_residual(w, X, tau):
    g = np.abs(_g(w, X, tau))
    return float(np.nanmax(g)) if not np.all(np.isnan(g)) else float("inf")


def _tau_simultaneous(w, X0):
    """Solve Z0(tau) = X0 per point; Z0 is strictly increasing (Zdot0 >= 1)."""
    X0 = np.asarray(X0, dtype=float)
    f = lambda t: w.z(t)[..., 0] - X0
    lo = X0.copy()
    hi = X0.copy()
    step = np.ones_like(X0)
    for _ in range(200):
        mask = f(lo) > 0
        if not mask.any():
            break
        lo = np.where(mask, lo - step, lo)
        step = np.where(mask, 2 * step, step)
    step = np.ones_like(X0)
    for _ in range(200):
        mask = f(hi) < 0
        if not mask.any():
            break
        hi = np.where(mask, hi + step, hi)
        step = np.where(mask, 2 * step, step)
    tau = 0.5 * (lo + hi)
    for _ in range(80):
        ft = f(tau)
        lo = np.where(ft < 0, tau, lo)
        hi = np.where(ft >= 0, tau, hi)
        newton = tau - ft / w.zdot(tau)[..., 0]
        inside = (newton > lo) & (newton < hi)
        tau = np.where(inside, newton, 0.5 * (lo + hi))
        if np.all(hi - lo < 1e-15 * np.maximum(1.0, np.abs(tau))):
            break
    return tau


def _initial_guess(w, X):
    """tau0 = X0 - |x - z(X0 as lab-time proxy)|; exact for the rest worldline."""
    X0 = X[..., 0]
    z = w.z(X0)
    d = np.linalg.norm(X[..., 1:] - z[..., 1:], axis=-1)
    return X0 - d


def _solve_array(w, X, tol):
    X0 = X[..., 0]
    scale = np.maximum(1.0, (X * X).sum(axis=-1))

    hi = _tau_simultaneous(w, X0)
    zs = w.z(hi)
    spatial_dist = np.linalg.norm(X[..., 1:] - zs[..., 1:], axis=-1)
    if np.any(spatial_dist < ON_WORLDLINE_DIST * np.sqrt(scale)):
        raise OnWorldline("observer point lies on the worldline")

    # expand the bracket downward from the simultaneous point; the lab-time
    # guess can overshoot into overflow territory for accelerated worldlines
    guess = _initial_guess(w, X)
    lo = hi - 1.0
    step = np.ones_like(hi)
    for _ in range(200):
        mask = ~(_g(w, X, lo) > 0)  # nan counts as not bracketed
        if not mask.any():
            break
        lo = np.where(mask, lo - step, lo)
        step = np.where(mask, 2 * step, step)
    else:
        # no past bracket exists, e.g. behind the horizon of an
        # eternally accelerated worldline
        raise NoConvergence(200, _worst_residual(w, X, lo))

    tau = np.clip(guess, lo, hi)
    converged = np.zeros(tau.shape, dtype=bool)
    g = None
    for it in range(MAX_ITER):
        g = _g(w, X, tau)
        lo = np.where(g > 0, tau, lo)
        hi = np.where(g < 0, tau, hi)
        R = X - w.z(tau)
        xi = inner(w.zdot(tau), R)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = tau + g / (2.0 * xi)
        bad = ~np.isfinite(newton) | (newton <= lo) | (newton >= hi) | (xi <= 0)
        new_tau = np.where(bad, 0.5 * (lo + hi), newton)
        step_size = np.abs(new_tau - tau)
        tau = new_tau
        converged = (np.abs(g) <= tol * scale) & (step_size <= tol * np.maximum(1.0, np.abs(tau)))
        if converged.all():
            break
    if not converged.all():
        raise NoConvergence(MAX_ITER, float(np.abs(g)[~converged].max()))
    return tau


def retarded_time(w, X, tol=DEFAULT_TOL):
    """Retarded proper time tau_r(X) for worldline w.

    Newton iteration on g(tau) = R.R using dg/dtau = -2*xi, with a
    bisection fallback whenever the Newton step leaves the bracket.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    pts, scalar = _as_points(X)
    tau = _solve_array(w, pts, tol)
    return float(tau) if scalar else tau


def retarded_time_bisection(w, X, tol=1e-12, bracket_width=None):
    """Independent bisection oracle for tau_r; no Newton steps involved.

    By default the lower bracket end is found by doubling steps down from
    the simultaneous point (R.R evaluated very deep in the past of a
    strongly accelerated worldline cancels catastrophically in floats, so
    the bracket should be no deeper than necessary).  Pass bracket_width
    to use the fixed bracket [hi - width, hi] instead.
    """
    pts, scalar = _as_points(X)
    X0 = pts[..., 0]
    hi = _tau_simultaneous(w, X0)
    if bracket_width is None:
        lo = hi - 1.0
        step = np.ones_like(hi)
    else:
        lo = hi - bracket_width
        step = np.asarray(bracket_width, dtype=float) * np.ones_like(hi)
    for _ in range(200):
        mask = ~(_g(w, pts, lo) > 0)
        if not mask.any():
            break
        lo = np.where(mask, lo - step, lo)
        step = np.where(mask, 2 * step, step)
    else:
        raise NoConvergence(200, _worst_residual(w, pts, lo))
    for _ in range(200):
        tau = 0.5 * (lo + hi)
        g = _g(w, pts, tau)
        lo = np.where(g > 0, tau, lo)
        hi = np.where(g <= 0, tau, hi)
        if np.all(hi - lo <= tol):
            break
    tau = 0.5 * (lo + hi)
    return float(tau) if scalar else tau


@dataclass(frozen=True)
class RetardedKinematics:
    tau_r: float
    R: FourVector
    xi: float
    K: FourVector
    kappa: float
    residual: float


def kinematics_arrays(w, X, tol=DEFAULT_TOL):
    """Batched kinematics; returns a dict of arrays keyed by quantity."""
    pts, _ = _as_points(X)
    tau = _solve_array(w, pts, tol)
    R = pts - w.z(tau)
    zdot = w.zdot(tau)
    zddot = w.zddot(tau)
    xi = inner(zdot, R)
    K = R / xi[..., None]
    kappa = inner(zddot, K)
    return {
        "tau_r": tau,
        "R": R,
        "xi": xi,
        "K": K,
        "kappa": kappa,
        "zdot": zdot,
        "zddot": zddot,
        "residual": inner(R, R),
    }


def kinematics(w, X, tol=DEFAULT_TOL):
    """Retarded kinematics R, xi, K, kappa at a single observer point."""
    pts, scalar = _as_points(X)
    k = kinematics_arrays(w, pts, tol)
    if not scalar:
        return k
    return RetardedKinematics(
        tau_r=float(k["tau_r"]),
        R=FourVector.from_array(k["R"]),
        xi=float(k["xi"]),
        K=FourVector.from_array(k["K"]),
        kappa=float(k["kappa"]),
        residual=float(k["residual"]),
    )


def grad_tau_check(w, X, h=1e-4, tol=DEFAULT_TOL):
    """Max componentwise gap between central differences of tau_r and K.

    The analytic gradient with respect to the coordinates X^mu is the
    lowered K vector; the finite-difference error is O(h^2).
    """
    pts, _ = _as_points(X)
    k = kinematics_arrays(w, pts, tol)
    K_low = lower(k["K"])
    worst = 0.0
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = h
        fd = (retarded_time(w, pts + e, tol) - retarded_time(w, pts - e, tol)) / (2 * h)
        worst = max(worst, float(np.abs(fd - K_low[..., mu]).max()))
    return worst


def grad_xi(w, X, tol=DEFAULT_TOL):
    """Analytic gradient of the retarded distance.

    Returned as a contravariant FourVector G = Zdot + (xi*kappa - 1) K,
    so that d(xi)/dX^mu equals the lowered components of G.  Never zero.
    """
    pts, scalar = _as_points(X)
    k = kinematics_arrays(w, pts, tol)
    G = k["zdot"] + (k["xi"] * k["kappa"] - 1.0)[..., None] * k["K"]
    return FourVector.from_array(G) if scalar else G


def div_K_fd(w, X, h=1e-4, tol=DEFAULT_TOL):
    """Coordinate divergence sum_mu dK^mu/dX^mu by central differences."""
    pts, _ = _as_points(X)
    total = 0.0
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = h
        Kp = kinematics_arrays(w, pts + e, tol)["K"][..., mu]
        Km = kinematics_arrays(w, pts - e, tol)["K"][..., mu]
        total = total + (Kp - Km) / (2 * h)
    return total
