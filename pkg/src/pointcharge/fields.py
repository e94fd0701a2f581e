"""Generating function Phi, its d'Alembertian, and the rest-frame statics.

Phi_a(X) = (e/2) * R_a * H_eps(xi) evaluated at the retarded time.  Its
wave operator splits into the Lienard-Wiechert part Lambda_a = -e Zdot_a/xi
times H(xi), plus a shell-supported remainder

    Psi_a = e K_a * ((3 xi kappa - 2) H'(xi) + (xi kappa - 1/2) xi H''(xi)).

The H'' coefficient follows from (grad xi).(grad xi) = 2 xi kappa - 1
(grad xi = Zdot + (xi kappa - 1) K, with K null and K.Zdot = 1); the
finite-difference cross-check below converges to this coefficient and
not to the variant with (xi kappa - 1).

All components are stored contravariant; the d'Alembertian acts on the
coordinates as d0^2 - d1^2 - d2^2 - d3^2.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SmoothnessRequired
from .minkowski import FourVector
from .retarded import DEFAULT_TOL, _as_points, kinematics_arrays


def phi_arrays(w, fam, X, eps, e=1.0, tol=DEFAULT_TOL):
    """Batched Phi; X has shape (..., 4)."""
    kin = kinematics_arrays(w, X, tol)
    H = fam.H(kin["xi"], eps)
    return 0.5 * e * kin["R"] * np.asarray(H)[..., None]


def phi_alpha(w, fam, X, eps, e=1.0, tol=DEFAULT_TOL):
    """Phi at a single observer point, as a FourVector."""
    pts, scalar = _as_points(X)
    out = phi_arrays(w, fam, pts, eps, e, tol)
    return FourVector.from_array(out) if scalar else out


def box_phi_arrays(w, fam, X, eps, e=1.0, tol=DEFAULT_TOL, kin=None):
    """Batched analytic d'Alembertian; returns (Lambda, Psi, total)."""
    if kin is None:
        kin = kinematics_arrays(w, X, tol)
    xi, kappa = kin["xi"], kin["kappa"]
    need_shell = bool(np.any((xi > eps) & (xi < 2.0 * eps)))
    if need_shell and not fam.smooth:
        raise SmoothnessRequired(
            "xi falls inside the transition shell; H'' of a piecewise family "
            "is not a function"
        )
    H = np.asarray(fam.H(xi, eps))
    dH = np.asarray(fam.dH(xi, eps))
    d2H = np.asarray(fam.d2H(xi, eps)) if need_shell else np.zeros_like(dH)
    lam = -e * kin["zdot"] / xi[..., None]
    coeff = e * ((3.0 * xi * kappa - 2.0) * dH + (xi * kappa - 0.5) * xi * d2H)
    psi = coeff[..., None] * kin["K"]
    total = lam * H[..., None] + psi
    return lam, psi, total


def box_phi_analytic(w, fam, X, eps, e=1.0, tol=DEFAULT_TOL):
    """Analytic box Phi at one point: (Lambda, Psi, total) FourVectors."""
    pts, scalar = _as_points(X)
    lam, psi, total = box_phi_arrays(w, fam, pts, eps, e, tol)
    if scalar:
        return (FourVector.from_array(lam), FourVector.from_array(psi),
                FourVector.from_array(total))
    return lam, psi, total


def fd_steps(X, xi, eps, shell_factor=40.0):
    """Per-point step for the 9-point stencil: eps/40 inside the widened
    shell, 1e-3*|X| far away, and in between small enough that the stencil
    cannot reach back into the transition shell (the light-cone distance
    moves by at most a few step lengths across the stencil)."""
    X = np.asarray(X, dtype=float)
    scale = np.maximum(1.0, np.linalg.norm(X, axis=-1))
    return np.minimum(5e-4 * scale,
                      np.maximum(eps / shell_factor, (xi - 2.0 * eps) / 20.0))


def box_phi_fd(w, fam, X, eps, h=None, e=1.0, tol=DEFAULT_TOL):
    """d'Alembertian of Phi by central second differences (oracle path)."""
    pts, scalar = _as_points(X)
    if h is None:
        xi = kinematics_arrays(w, pts, tol)["xi"]
        h = fd_steps(pts, xi, eps)
    h = np.asarray(h, dtype=float) * np.ones(pts.shape[:-1])
    center = phi_arrays(w, fam, pts, eps, e, tol)
    total = np.zeros_like(center)
    sign = (1.0, -1.0, -1.0, -1.0)
    for mu in range(4):
        shift = np.zeros_like(pts)
        shift[..., mu] = h
        plus = phi_arrays(w, fam, pts + shift, eps, e, tol)
        minus = phi_arrays(w, fam, pts - shift, eps, e, tol)
        total += sign[mu] * (plus - 2.0 * center + minus) / (h * h)[..., None]
    return FourVector.from_array(total) if scalar else total


@dataclass(frozen=True)
class StaticField:
    x: np.ndarray
    phi: float
    E: np.ndarray
    rho: float
    eps: float


def static_phi(fam, r, eps, e=1.0):
    """Regularized Coulomb potential e*H_eps(r)/r (vectorized in r)."""
    r = np.asarray(r, dtype=float)
    return e * np.asarray(fam.H(r, eps)) / r


def static_E_radial(fam, r, eps, e=1.0):
    """Radial component of E = -grad phi."""
    r = np.asarray(r, dtype=float)
    return e * (np.asarray(fam.H(r, eps)) / (r * r) - np.asarray(fam.dH(r, eps)) / r)


def static_rho(fam, r, eps, e=1.0):
    """Charge density from 4*pi*rho = div E = -e H''(r)/r."""
    r = np.asarray(r, dtype=float)
    return -e * np.asarray(fam.d2H(r, eps)) / (4.0 * np.pi * r)


def static_field(fam, x, eps, e=1.0):
    """phi, E and rho of the charge at rest, at a single spatial point."""
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r <= 0.0:
        raise ValueError("static field needs |x| > 0")
    phi = float(static_phi(fam, r, eps, e))
    E = float(static_E_radial(fam, r, eps, e)) * x / r
    rho = float(static_rho(fam, r, eps, e)) if fam.smooth else None
    if rho is None:
        raise SmoothnessRequired("rho needs H''; use a smooth family")
    return StaticField(x=x, phi=phi, E=E, rho=rho, eps=eps)
