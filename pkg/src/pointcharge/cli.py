"""Command-line front end.

Configuration is a line-oriented ini file (key = value, with sections);
all keys live under [run] except observer points ([points]) and the
test-function geometry ([testfunction]).  Every numeric output is printed
with 17 significant digits so repeated runs are byte-identical.

Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 config/parse error.
"""

import argparse
import configparser
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import distalg
from .association import CLAIM_NAMES, association_suite, bump_test_function
from .errors import ConfigError, OutOfRange, PointChargeError
from .fields import box_phi_arrays, box_phi_fd, phi_arrays
from .minkowski import catalog, inner, parse_worldline, validate_worldline
from .regularization import family_check, geometric_grid, make_family, \
    parse_mollifier
from .retarded import kinematics_arrays, retarded_time, retarded_time_bisection
from .selfenergy import divergence_bound_check, mass_renormalize, u_ele, u_mag


def _fmt(x):
    return f"{float(x):.17g}"


def parse_eps_grid(spec):
    """'geometric(start, ratio, count)' or a brace/comma list of values."""
    spec = spec.strip()
    if spec.startswith("geometric(") and spec.endswith(")"):
        args = [s.strip() for s in spec[len("geometric("):-1].split(",")]
        if len(args) != 3:
            raise ConfigError(f"geometric takes 3 arguments, got {spec!r}")
        try:
            start, ratio, count = float(args[0]), float(args[1]), int(args[2])
        except ValueError as exc:
            raise ConfigError(f"bad epsilon_grid {spec!r}: {exc}") from None
        grid = geometric_grid(start, ratio, count)
    else:
        body = spec.strip("{}")
        try:
            grid = np.array([float(s) for s in body.split(",")])
        except ValueError as exc:
            raise ConfigError(f"bad epsilon_grid {spec!r}: {exc}") from None
    if grid.size < 1 or np.any(grid <= 0) or np.any(grid > 1):
        raise ConfigError("epsilon_grid out of (0,1]")
    if np.any(np.diff(grid) >= 0):
        raise ConfigError("epsilon_grid must be strictly decreasing")
    return grid


DEFAULT_POINTS = (
    (3.0, 1.0, 0.0, 0.0),
    (3.0, 0.0, 1.0, 0.0),
    (3.0, 0.5, 0.5, 0.5),
)


@dataclass
class RunConfig:
    worldline: str = "rest"
    mollifier: str = "bump"
    epsilon_grid: str = "geometric(0.1, 0.5, 6)"
    e: float = 1.0
    mu: float = 1.0
    mc2: float = 10.0
    tolerance: float = 1e-3
    max_delta_order: int = 3
    points: tuple = DEFAULT_POINTS
    tf_center: tuple = None
    tf_radius: float = 1.0

    w: object = field(init=False, default=None)
    fam: object = field(init=False, default=None)
    grid: object = field(init=False, default=None)

    def resolve(self):
        self.w = parse_worldline(self.worldline)
        self.fam = make_family(parse_mollifier(self.mollifier))
        self.grid = parse_eps_grid(self.epsilon_grid)
        return self


def load_config(path=None):
    cfg = RunConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        try:
            read = parser.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from None
        if not read:
            raise ConfigError(f"config file not found: {path}")
        run = parser["run"] if parser.has_section("run") else {}
        for key in ("worldline", "mollifier", "epsilon_grid"):
            if key in run:
                setattr(cfg, key, run[key])
        for key in ("e", "mu", "mc2", "tolerance", "tf_radius"):
            if key in run:
                try:
                    setattr(cfg, key, float(run[key]))
                except ValueError:
                    raise ConfigError(f"bad numeric value for {key}") from None
        if "max_delta_order" in run:
            cfg.max_delta_order = int(run["max_delta_order"])
        if parser.has_section("points"):
            pts = []
            for _, val in parser.items("points"):
                comps = [s.strip() for s in val.split(",")]
                if len(comps) != 4:
                    raise ConfigError(f"point needs 4 components, got {val!r}")
                pts.append(tuple(float(s) for s in comps))
            if pts:
                cfg.points = tuple(pts)
        if parser.has_section("testfunction"):
            tf = parser["testfunction"]
            if "center" in tf:
                cfg.tf_center = tuple(float(s) for s in tf["center"].split(","))
            if "radius" in tf:
                cfg.tf_radius = float(tf["radius"])
    return cfg.resolve()


# ---------------------------------------------------------------------------
# subcommands (each returns the process exit status)


def cmd_kinematics(cfg, out):
    pts = np.array(cfg.points, dtype=float)
    k = kinematics_arrays(cfg.w, pts)
    for i in range(pts.shape[0]):
        rec = {
            "X": [float(v) for v in pts[i]],
            "tau_r": float(k["tau_r"][i]),
            "xi": float(k["xi"][i]),
            "K": [float(v) for v in k["K"][i]],
            "kappa": float(k["kappa"][i]),
            "residual": float(k["residual"][i]),
        }
        out.write(json.dumps(rec, sort_keys=True) + "\n")
    return 0


FIELDS_HEADER = ("X0,X1,X2,X3,eps,"
                 "Phi0,Phi1,Phi2,Phi3,"
                 "Lambda0,Lambda1,Lambda2,Lambda3,"
                 "Psi0,Psi1,Psi2,Psi3,"
                 "BoxPhi0,BoxPhi1,BoxPhi2,BoxPhi3")


def cmd_fields_eval(cfg, out):
    pts = np.array(cfg.points, dtype=float)
    out.write(FIELDS_HEADER + "\n")
    for eps in cfg.grid:
        phi = phi_arrays(cfg.w, cfg.fam, pts, eps, cfg.e)
        lam, psi, tot = box_phi_arrays(cfg.w, cfg.fam, pts, eps, cfg.e)
        for i in range(pts.shape[0]):
            row = ([_fmt(v) for v in pts[i]] + [_fmt(eps)]
                   + [_fmt(v) for v in phi[i]] + [_fmt(v) for v in lam[i]]
                   + [_fmt(v) for v in psi[i]] + [_fmt(v) for v in tot[i]])
            out.write(",".join(row) + "\n")
    return 0


def cmd_associate(cfg, out, claim=None):
    phi4 = None
    if cfg.tf_center is not None:
        phi4 = bump_test_function(4, np.array(cfg.tf_center), cfg.tf_radius)
    if claim is not None and claim not in CLAIM_NAMES:
        raise ConfigError(f"unknown claim {claim!r}; "
                          f"choose from {list(CLAIM_NAMES)}")
    report = association_suite(cfg.w, cfg.fam, cfg.grid, cfg.e, phi4=phi4,
                               tolerance=cfg.tolerance,
                               claims=None if claim is None else (claim,))
    ok = True
    for name, res in report.results.items():
        rec = {
            "claim": name,
            "eps": [float(v) for v in res.eps],
            "pairing": [float(v) for v in res.values],
            "limit": float(res.limit),
            "order": None if not np.isfinite(res.order) else float(res.order),
            "target": float(res.target),
            "pass": bool(res.passed),
        }
        out.write(json.dumps(rec, sort_keys=True) + "\n")
        ok = ok and res.passed
    return 0 if ok else 1


def cmd_selfenergy(cfg, out):
    rep = divergence_bound_check(cfg.fam, cfg.grid, cfg.e, cfg.mu)
    out.write("eps,U_ele,U_mag,eps_Uele,eps3_Umag,c_eps,bound,pass\n")
    for i, eps in enumerate(rep.eps):
        row_ok = not any(f"eps={eps:g}" in v for v in rep.violations)
        row = [_fmt(eps), _fmt(rep.U_ele[i]), _fmt(rep.U_mag[i]),
               _fmt(rep.eps_U_ele[i]), _fmt(rep.eps3_U_mag[i]),
               _fmt(rep.c_eps[i]), _fmt(rep.lower_bound[i]),
               "true" if row_ok else "false"]
        out.write(",".join(row) + "\n")
    return 0 if rep.passed else 1


def cmd_renormalize(cfg, out, mc2=None):
    target = cfg.mc2 if mc2 is None else mc2
    try:
        eps0 = mass_renormalize(cfg.fam, cfg.e, cfg.mu, target)
    except OutOfRange as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    residual = u_ele(cfg.fam, cfg.e, eps0) + u_mag(cfg.fam, cfg.mu, eps0) - target
    out.write(json.dumps({"eps0": eps0, "residual": residual},
                         sort_keys=True) + "\n")
    return 0


def cmd_distalg_solve(cfg, out):
    particular, homogeneous = distalg.solve_euler_delta(cfg.max_delta_order)
    out.write(f"particular: {distalg.format_expr(particular)}\n")
    for h in homogeneous:
        out.write(f"homogeneous: {distalg.format_expr(h)}\n")
    return 0


def cmd_distalg_verify(cfg, out, expr_text):
    u = distalg.parse_expr(expr_text)
    result = distalg.euler_apply(u)
    out.write(f"{distalg.format_expr(result)}\n")
    return 0


def cmd_check(cfg, out):
    """Run every module's invariant suite and print one line per suite."""
    rng = np.random.default_rng(20260823)
    tau_grid = np.linspace(-3.0, 3.0, 601)
    verdicts = []

    def record(name, ok, detail=""):
        verdicts.append(ok)
        suffix = f"  ({detail})" if detail else ""
        out.write(f"{name}: {'pass' if ok else 'FAIL'}{suffix}\n")

    for w in catalog():
        rep = validate_worldline(w, tau_grid)
        record(f"worldline {w.label}", rep.passed,
               f"max |Zdot.Zdot-1| = {rep.max_norm_residual:.2e}")

    rep = family_check(cfg.fam, cfg.grid)
    record(f"family {cfg.fam.mollifier.label}", rep.passed,
           f"sup eps*H' = {rep.sup_eps_dH:.6g}")

    for w in catalog():
        pts = np.empty((50, 4))
        pts[:, 1:] = rng.uniform(-2.0, 2.0, size=(50, 3))
        pts[:, 0] = rng.uniform(2.5, 5.0, size=50)
        if w.label == "hyperbolic":
            pts[:, 1] = np.abs(pts[:, 1]) + 1.0  # stay inside the horizon
        tau = retarded_time(w, pts)
        tau_b = retarded_time_bisection(w, pts)
        k = kinematics_arrays(w, pts)
        x2 = np.maximum(np.einsum("ij,ij->i", pts, pts), 1.0)
        ok = (np.abs(k["residual"]) <= 1e-9 * x2).all() \
            and np.abs(tau - tau_b).max() <= 1e-10 \
            and (np.abs(inner(k["K"], w.zdot(tau)) - 1.0) <= 1e-9).all() \
            and (np.abs(inner(k["K"], k["K"])) <= 1e-9).all() \
            and (k["xi"] > 0).all()
        record(f"retarded kinematics {w.label}", bool(ok),
               f"max |R.R| = {np.abs(k['residual']).max():.2e}")

    eps = float(cfg.grid[0])
    for w in catalog():
        pts = np.empty((10, 4))
        d = rng.normal(size=(10, 3))
        d /= np.linalg.norm(d, axis=1)[:, None]
        z = w.z(np.asarray(1.0))
        r = rng.uniform(0.5, 1.5, size=10)
        pts[:, 0] = z[0] + 1.3 * r
        pts[:, 1:] = z[1:] + r[:, None] * d
        if cfg.fam.smooth:
            _, _, tot = box_phi_arrays(w, cfg.fam, pts, eps, cfg.e)
            fd = box_phi_fd(w, cfg.fam, pts, eps, e=cfg.e)
            rel = (np.abs(fd - tot).max(axis=-1)
                   / np.maximum(np.abs(tot).max(axis=-1), 1.0))
            record(f"box Phi fd oracle {w.label}", bool(rel.max() <= 1e-4),
                   f"max rel = {rel.max():.2e}")

    rep = divergence_bound_check(cfg.fam, cfg.grid, cfg.e, cfg.mu)
    record("self-energy bounds", rep.passed, f"c0 = {rep.c0:.6g}")

    try:
        particular, homogeneous = distalg.solve_euler_delta(cfg.max_delta_order)
        ok = (particular == distalg.DistExpr.atom(distalg.fp_plus(1))
              and len(homogeneous) == 2
              and distalg.upsilon() == distalg.DistExpr.atom(distalg.THETA))
        record("distribution algebra", ok,
               f"homogeneous dimension = {len(homogeneous)}")
    except PointChargeError as exc:
        record("distribution algebra", False, str(exc))

    return 0 if all(verdicts) else 1


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(
        prog="pointcharge",
        description="Regularized point charges: kinematics, fields, "
                    "weak limits, self-energies, distribution algebra.",
    )
    p.add_argument("-c", "--config", default=None,
                   help="ini-style config file (defaults apply if omitted)")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("kinematics", help="retarded kinematics at the "
                                      "configured points (JSON lines)")
    fields = sub.add_parser("fields", help="field evaluation")
    fields_sub = fields.add_subparsers(dest="fields_command", required=True)
    fields_sub.add_parser("eval", help="Phi, Lambda, Psi, box Phi as CSV")
    assoc = sub.add_parser("associate", help="weak-limit claims (JSON lines)")
    assoc.add_argument("--claim", default=None,
                       help="run a single claim by name")
    sub.add_parser("selfenergy", help="self-energy scaling table (CSV)")
    ren = sub.add_parser("renormalize", help="solve for eps0 at a target mc^2")
    ren.add_argument("--mc2", type=float, default=None)
    da = sub.add_parser("distalg", help="distribution algebra")
    da_sub = da.add_subparsers(dest="distalg_command", required=True)
    da_sub.add_parser("solve", help="solve t*u' + u = delta")
    verify = da_sub.add_parser("verify", help="apply the Euler operator")
    verify.add_argument("expr", help="expression, e.g. 'tplus^-1 + delta^(0)'")
    sub.add_parser("check", help="run the full invariant suite")
    return p


def run(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "kinematics":
            return cmd_kinematics(cfg, out)
        if args.command == "fields":
            return cmd_fields_eval(cfg, out)
        if args.command == "associate":
            return cmd_associate(cfg, out, claim=args.claim)
        if args.command == "selfenergy":
            return cmd_selfenergy(cfg, out)
        if args.command == "renormalize":
            return cmd_renormalize(cfg, out, mc2=args.mc2)
        if args.command == "distalg":
            if args.distalg_command == "solve":
                return cmd_distalg_solve(cfg, out)
            return cmd_distalg_verify(cfg, out, args.expr)
        if args.command == "check":
            return cmd_check(cfg, out)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PointChargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
