"""Minkowski-space primitives: metric, four-vectors, worldline catalog.

Conventions: signature (+,-,-,-), geometric units c = 1, all stored
components are contravariant.  Worldlines are parametrized by eigentime,
so zdot . zdot = 1 and zdot . zddot = 0 identically.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

METRIC = np.array([1.0, -1.0, -1.0, -1.0])


def inner(a, b):
    """Lorentz inner product a0*b0 - a1*b1 - a2*b2 - a3*b3.

    Accepts arrays of shape (..., 4); broadcasts over leading axes.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (METRIC * a * b).sum(axis=-1)


def lower(a):
    """Lower the index: componentwise metric application g_{mu nu} a^nu."""
    return METRIC * np.asarray(a, dtype=float)


@dataclass(frozen=True)
class FourVector:
    x0: float
    x1: float
    x2: float
    x3: float

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float)
        return cls(*(float(c) for c in arr))

    def as_array(self):
        return np.array([self.x0, self.x1, self.x2, self.x3])

    @property
    def spatial(self):
        return np.array([self.x1, self.x2, self.x3])

    def __add__(self, other):
        return FourVector.from_array(self.as_array() + other.as_array())

    def __sub__(self, other):
        return FourVector.from_array(self.as_array() - other.as_array())

    def __mul__(self, scalar):
        return FourVector.from_array(self.as_array() * float(scalar))

    __rmul__ = __mul__


def minkowski_inner(a, b):
    """Inner product of two FourVectors (or (...,4) arrays)."""
    if isinstance(a, FourVector):
        a = a.as_array()
    if isinstance(b, FourVector):
        b = b.as_array()
    return float(inner(a, b)) if np.ndim(a) == 1 and np.ndim(b) == 1 else inner(a, b)


@dataclass(frozen=True)
class Worldline:
    """Eigentime-parametrized worldline with exact analytic derivatives.

    The evaluators map an array of eigentimes with shape S to position /
    velocity / acceleration arrays of shape S + (4,).
    """

    label: str
    z: callable
    zdot: callable
    zddot: callable
    params: dict = field(default_factory=dict)

    def eval(self, tau):
        """Z, Zdot, Zddot at scalar eigentime tau, as FourVectors."""
        t = np.asarray(float(tau))
        return (
            FourVector.from_array(self.z(t)),
            FourVector.from_array(self.zdot(t)),
            FourVector.from_array(self.zddot(t)),
        )


def _stack(*comps):
    comps = [np.asarray(c, dtype=float) for c in comps]
    return np.stack(np.broadcast_arrays(*comps), axis=-1)


def rest_worldline():
    zero = lambda tau: np.zeros_like(tau, dtype=float)
    return Worldline(
        label="rest",
        z=lambda tau: _stack(np.asarray(tau, dtype=float), zero(tau), zero(tau), zero(tau)),
        zdot=lambda tau: _stack(np.ones_like(tau, dtype=float), zero(tau), zero(tau), zero(tau)),
        zddot=lambda tau: _stack(zero(tau), zero(tau), zero(tau), zero(tau)),
    )


def boost_worldline(v):
    """Constant velocity v along x1."""
    if not abs(v) < 1.0:
        raise ConfigError(f"boost speed must satisfy |v| < 1, got {v}")
    g = 1.0 / np.sqrt(1.0 - v * v)
    zero = lambda tau: np.zeros_like(tau, dtype=float)
    return Worldline(
        label="boost",
        z=lambda tau: _stack(g * tau, g * v * tau, zero(tau), zero(tau)),
        zdot=lambda tau: _stack(
            np.full_like(np.asarray(tau, dtype=float), g),
            np.full_like(np.asarray(tau, dtype=float), g * v),
            zero(tau), zero(tau),
        ),
        zddot=lambda tau: _stack(zero(tau), zero(tau), zero(tau), zero(tau)),
        params={"v": v},
    )


def hyperbolic_worldline(a):
    """Uniform proper acceleration a in the (x0, x1) plane."""
    if a == 0:
        raise ConfigError("hyperbolic worldline needs a != 0")
    zero = lambda tau: np.zeros_like(tau, dtype=float)
    return Worldline(
        label="hyperbolic",
        z=lambda tau: _stack(np.sinh(a * tau) / a, np.cosh(a * tau) / a, zero(tau), zero(tau)),
        zdot=lambda tau: _stack(np.cosh(a * tau), np.sinh(a * tau), zero(tau), zero(tau)),
        zddot=lambda tau: _stack(a * np.sinh(a * tau), a * np.cosh(a * tau), zero(tau), zero(tau)),
        params={"a": a},
    )


def circular_worldline(r, omega):
    """Circular motion of radius r and lab angular frequency omega.

    Lab time is rescaled by gamma so that the parameter is eigentime.
    """
    v = r * omega
    if not abs(v) < 1.0:
        raise ConfigError(f"circular worldline needs |r*omega| < 1, got {v}")
    g = 1.0 / np.sqrt(1.0 - v * v)
    w = omega * g  # angular frequency in eigentime
    zero = lambda tau: np.zeros_like(tau, dtype=float)
    return Worldline(
        label="circular",
        z=lambda tau: _stack(g * tau, r * np.cos(w * tau), r * np.sin(w * tau), zero(tau)),
        zdot=lambda tau: _stack(
            np.full_like(np.asarray(tau, dtype=float), g),
            -r * w * np.sin(w * tau),
            r * w * np.cos(w * tau),
            zero(tau),
        ),
        zddot=lambda tau: _stack(
            zero(tau),
            -r * w * w * np.cos(w * tau),
            -r * w * w * np.sin(w * tau),
            zero(tau),
        ),
        params={"r": r, "omega": omega},
    )


def worldline_eval(w, tau):
    return w.eval(tau)


def catalog():
    """Default instances of the four catalog worldlines."""
    return [
        rest_worldline(),
        boost_worldline(0.6),
        hyperbolic_worldline(1.0),
        circular_worldline(1.0, 0.5),
    ]


def parse_worldline(spec):
    """Parse 'rest', 'boost(v)', 'hyperbolic(a)' or 'circular(r, omega)'."""
    spec = spec.strip()
    if spec == "rest":
        return rest_worldline()
    for name, maker, nargs in (
        ("boost", boost_worldline, 1),
        ("hyperbolic", hyperbolic_worldline, 1),
        ("circular", circular_worldline, 2),
    ):
        if spec.startswith(name + "(") and spec.endswith(")"):
            args = [s.strip() for s in spec[len(name) + 1 : -1].split(",")]
            if len(args) != nargs:
                raise ConfigError(f"{name} takes {nargs} argument(s), got {spec!r}")
            try:
                return maker(*(float(s) for s in args))
            except ValueError as exc:
                raise ConfigError(f"bad worldline spec {spec!r}: {exc}") from None
    raise ConfigError(f"unknown worldline spec {spec!r}")


@dataclass(frozen=True)
class WorldlineReport:
    label: str
    max_norm_residual: float
    max_ortho_residual: float
    min_zdot0: float
    worst_norm_tau: float
    worst_ortho_tau: float
    passed: bool
    failures: tuple

    def __str__(self):
        status = "pass" if self.passed else "fail"
        lines = [
            f"worldline {self.label}: {status}",
            f"  max |Zdot.Zdot - 1| = {self.max_norm_residual:.3e} at tau = {self.worst_norm_tau:g}",
            f"  max |Zdot.Zddot|    = {self.max_ortho_residual:.3e} at tau = {self.worst_ortho_tau:g}",
            f"  min Zdot0           = {self.min_zdot0:.6g}",
        ]
        lines += [f"  violated: {f}" for f in self.failures]
        return "\n".join(lines)


def validate_worldline(w, tau_grid, tol=1e-10):
    """Check eigentime normalization, orthogonality and future-direction."""
    tau = np.asarray(tau_grid, dtype=float)
    if tau.size == 0:
        raise ValueError("tau_grid must be nonempty")
    zd = w.zdot(tau)
    zdd = w.zddot(tau)
    norm_res = np.abs(inner(zd, zd) - 1.0)
    ortho_res = np.abs(inner(zd, zdd))
    zdot0 = zd[..., 0]
    failures = []
    if norm_res.max() > tol:
        failures.append(f"|Zdot.Zdot - 1| = {norm_res.max():.3e} at tau = {tau[norm_res.argmax()]:g}")
    if ortho_res.max() > tol:
        failures.append(f"|Zdot.Zddot| = {ortho_res.max():.3e} at tau = {tau[ortho_res.argmax()]:g}")
    if zdot0.min() <= 0:
        failures.append(f"Zdot0 = {zdot0.min():.3e} at tau = {tau[zdot0.argmin()]:g}")
    return WorldlineReport(
        label=w.label,
        max_norm_residual=float(norm_res.max()),
        max_ortho_residual=float(ortho_res.max()),
        min_zdot0=float(zdot0.min()),
        worst_norm_tau=float(tau[norm_res.argmax()]),
        worst_ortho_tau=float(tau[ortho_res.argmax()]),
        passed=not failures,
        failures=tuple(failures),
    )
