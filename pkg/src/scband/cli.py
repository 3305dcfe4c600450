"""Command-line reports: deterministic CSV or JSON tables for every module."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from typing import Any, Sequence

import numpy as np

from scband import acceptance, extremal, hypersurface, smoothing, torus
from scband.errors import DomainError, NumericalFailure

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


class Report:
    def __init__(self, command: str, params: dict, columns: Sequence[str]):
        self.command = command
        self.params = params
        self.columns = list(columns)
        self.rows: list[dict[str, Any]] = []

    def add(self, ref: str, **values):
        missing = set(self.columns) - set(values)
        if missing:
            raise KeyError(f"missing columns {sorted(missing)}")
        self.rows.append({**values, "paper_ref": ref})


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.12g}") if math.isfinite(x) else _fmt(x)
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def render(report: Report, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(report.columns)
        for row in report.rows:
            w.writerow([_fmt(row[c]) for c in report.columns])
        return buf.getvalue()
    refs = sorted({row["paper_ref"] for row in report.rows})
    doc = {
        "command": report.command,
        "params": {k: _json_value(v) for k, v in sorted(report.params.items())},
        "rows": [{k: _json_value(v) for k, v in row.items()} for row in report.rows],
        "paper_refs": refs,
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".scband-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise DomainError(f"cannot parse number list {text!r}") from exc


def _need(args, *names):
    for name in names:
        if getattr(args, name.replace("-", "_")) is None:
            raise DomainError(f"--{name} is required for {args.command}")


# -- commands ---------------------------------------------------------------


def cmd_width(args) -> Report:
    _need(args, "n", "sigma")
    rep = Report("width", {"class": args.band_class, "n": args.n, "sigma": args.sigma},
                 ["class", "n", "sigma", "width_bound"])
    w = extremal.width_bound(args.band_class, args.n, args.sigma)
    rep.add("width <= k pi sqrt((n-1)/(sigma n))", **{"class": args.band_class, "n": args.n,
                                                     "sigma": args.sigma, "width_bound": w})
    return rep


def cmd_riccati(args) -> Report:
    _need(args, "n", "sigma")
    spec = extremal.BandSpec.constant(args.n, args.sigma)
    lo, hi = extremal.blow_up_interval(spec, f0=args.f0)
    length = None if lo is None or hi is None else hi - lo
    rep = Report("riccati", {"n": args.n, "sigma": args.sigma, "f0": args.f0},
                 ["n", "sigma", "f0", "t_low", "t_high", "length"])
    rep.add("-2 f' - n f^2 = sigma/(n-1), poles of f", n=args.n, sigma=args.sigma, f0=args.f0,
            t_low=lo, t_high=hi, length=length)
    return rep


def cmd_band(args) -> Report:
    _need(args, "n", "sigma")
    spec = extremal.BandSpec.constant(args.n, args.sigma, args.m_minus, args.m_plus)
    res = extremal.max_band_width(spec)
    rep = Report("band", {"n": args.n, "sigma": args.sigma, "m_minus": args.m_minus, "m_plus": args.m_plus},
                 ["n", "sigma", "m_minus", "m_plus", "status", "width"])
    rep.add("f(-l) <= -M-/(n-1), f(l) >= M+/(n-1)", n=args.n, sigma=args.sigma, m_minus=args.m_minus,
            m_plus=args.m_plus, status=res.status, width=res.width)
    return rep


def cmd_torus(args) -> Report:
    if args.resolution is not None:
        _need(args, "n")
        node = torus.build(args.n)
        est = torus.brute_force_focal_radius(torus.embed_and_sample(node, args.resolution))
        rep = Report("torus", {"n": args.n, "resolution": args.resolution},
                     ["n", "resolution", "r_recursion", "r_sampled", "rel_error"])
        rep.add("sampled normal injectivity radius", n=args.n, resolution=args.resolution,
                r_recursion=node.focal_radius, r_sampled=est, rel_error=est / node.focal_radius - 1)
        return rep
    n_max = args.table if args.table is not None else 64
    table = torus.focal_radius_table(n_max)
    rep = Report("torus", {"table": n_max}, ["n", "r", "r_n_pow_1_5"])
    for n, r in table.items():
        if n <= 3:
            ref = "unit circle, r = 1" if n == 2 else "round torus about the unit circle, r = 1/3"
        elif n % 2 == 0:
            ref = "r(2n) = r(n)/(2 sqrt 2 + r(n))"
        else:
            ref = "r(n) = r'/(2 + r'), r' = r1 r2/sqrt(r1^2 + r2^2)"
        rep.add(ref, n=n, r=r, r_n_pow_1_5=r * n**1.5)
    return rep


def cmd_lipschitz(args) -> Report:
    _need(args, "n", "sigma", "width")
    val = torus.lipschitz_lower_bound(args.n, args.sigma, args.width)
    rep = Report("lipschitz", {"n": args.n, "sigma": args.sigma, "width": args.width},
                 ["n", "sigma", "width", "lipschitz_bound"])
    rep.add("Lip >= (d/2pi) sqrt(sigma n/(n-1))", n=args.n, sigma=args.sigma, width=args.width, lipschitz_bound=val)
    return rep


def cmd_gauss(args) -> Report:
    _need(args, "n")
    if args.curvatures is not None:
        vals = _floats(args.curvatures)
    elif args.rho is not None:
        if not 0 < args.rho <= 1:
            raise DomainError("rho must lie in (0, 1]")
        vals = [math.sqrt(1 - args.rho**2) / args.rho] * (args.n - 1)
    else:
        raise DomainError("gauss needs --curvatures or --rho")
    pc = hypersurface.PrincipalCurvatures(tuple(vals), args.n, args.ambient)
    rep = Report("gauss", {"n": args.n, "ambient": args.ambient, "curvatures": vals},
                 ["n", "ambient", "sum_c", "sum_c2", "sc"])
    c = np.asarray(vals)
    rep.add("Sc = (n-1)(n-2) + (sum c)^2 - sum c^2", n=args.n, ambient=args.ambient, sum_c=float(c.sum()),
            sum_c2=float((c * c).sum()), sc=hypersurface.gauss_scalar_curvature(pc))
    return rep


def cmd_bend(args) -> Report:
    h, a_new, a_old = _floats(args.h), _floats(args.a_new), _floats(args.a_old)
    params = {"h": h, "a_new": a_new, "a_old": a_old}
    if args.eps is None:
        coef = smoothing.bending_leading_coefficient(h, a_new, a_old)
        rep = Report("bend", params, ["eps", "sc_mid", "eps_sc_mid", "fitted_coefficient"])
        for e in smoothing.EPS_LADDER:
            sc = smoothing.bending_scalar_curvature(smoothing.BendingFamily(h, a_new, a_old, e), e / 2)
            rep.add("Sc = -trace(A_old - A_new)/eps + O(1)", eps=e, sc_mid=sc, eps_sc_mid=e * sc,
                    fitted_coefficient=coef)
        return rep
    fam = smoothing.BendingFamily(h, a_new, a_old, args.eps)
    rep = Report("bend", {**params, "eps": args.eps}, ["t", "sc", "eps_sc", "ricci_tt"])
    for t in np.linspace(0.05, 0.95, 19) * args.eps:
        sc = smoothing.bending_scalar_curvature(fam, t)
        rep.add("h + t A_new + t^2 (A_old - A_new)/(2 eps)", t=t, sc=sc, eps_sc=args.eps * sc,
                ricci_tt=smoothing.weyl_ricci_check(fam, t))
    return rep


def cmd_round(args) -> Report:
    _need(args, "eps")
    theta = 0.0 if args.theta is None else args.theta
    rho = 1.0 if args.rho is None else args.rho
    prob = smoothing.RoundingProblem(args.m, rho, args.eps, theta)
    closed = smoothing.rounding_tube(prob)
    fd = smoothing.rounding_tube_fd(prob)
    rep = Report("round", {"m": args.m, "rho": rho, "eps": args.eps, "theta": theta},
                 ["m", "rho", "eps", "theta", "lambda_i", "lambda_n", "sc", "eps_sc", "sc_fd_rel_error"])
    rep.add("Sc = (sum lambda)^2 - sum lambda^2, lambda_n = 1/eps", m=args.m, rho=rho, eps=args.eps, theta=theta,
            lambda_i=float(closed.lambdas[0]), lambda_n=closed.lambda_n, sc=closed.sc, eps_sc=args.eps * closed.sc,
            sc_fd_rel_error=abs(fd.sc - closed.sc) / max(1.0, abs(closed.sc)))
    return rep


def cmd_decay(args) -> Report:
    _need(args, "alpha")
    radius = 10.0 if args.radius is None else args.radius
    mn, bound = smoothing.quadratic_decay_profile(args.alpha, radius)
    rep = Report("decay", {"alpha": args.alpha, "radius": radius}, ["alpha", "radius", "min_sc", "bound_4pi2"])
    rep.add("min Sc = 2 alpha (1 - alpha)/R^2 <= 4 pi^2/R^2", alpha=args.alpha, radius=radius, min_sc=mn,
            bound_4pi2=bound)
    return rep


def cmd_verify_all(args) -> Report:
    rep = Report("verify-all", {}, ["criterion", "name", "passed", "detail"])
    for res in acceptance.run_all():
        rep.add(res.formula, criterion=res.number, name=res.name, passed=res.passed, detail=res.detail)
    return rep


COMMANDS = {
    "width": (cmd_width, "width bound for a band class", "columns: class, n, sigma, width_bound = k pi sqrt((n-1)/(sigma n))"),
    "riccati": (cmd_riccati, "existence interval of the extremal Riccati profile",
                "columns: n, sigma, f0, t_low, t_high (poles of f = phi'/phi), length"),
    "band": (cmd_band, "maximal width under mean-curvature boundary conditions",
             "columns: n, sigma, m_minus, m_plus, status (feasible|unbounded|degenerate|infeasible), width"),
    "torus": (cmd_torus, "focal radii of the recursive tori",
              "columns: n, r (focal radius of Y(n)), r_n_pow_1_5 = r n^(3/2); with --resolution: "
              "r_recursion, r_sampled (point-cloud estimate), rel_error"),
    "lipschitz": (cmd_lipschitz, "Lipschitz lower bound for maps to the sphere",
                  "columns: n, sigma, width (d), lipschitz_bound = (d/2pi) sqrt(sigma n/(n-1))"),
    "gauss": (cmd_gauss, "intrinsic scalar curvature from principal curvatures",
              "columns: n, ambient, sum_c, sum_c2, sc = [(n-1)(n-2)] + (sum c)^2 - sum c^2"),
    "bend": (cmd_bend, "scalar curvature of a bending family",
             "columns without --eps: eps, sc_mid = Sc(eps/2), eps_sc_mid, fitted_coefficient of 1/eps; "
             "with --eps: t, sc, eps_sc, ricci_tt"),
    "round": (cmd_round, "principal curvatures of a rounded corner",
              "columns: m, rho, eps, theta, lambda_i = cos(theta)/(rho - eps + eps cos(theta)), lambda_n = 1/eps, "
              "sc, eps_sc, sc_fd_rel_error (finite-difference check)"),
    "decay": (cmd_decay, "scalar curvature of dt^2 + t^(2 alpha) dtheta^2",
              "columns: alpha, radius, min_sc = 2 alpha (1 - alpha)/R^2, bound_4pi2 = 4 pi^2/R^2"),
    "verify-all": (cmd_verify_all, "run every acceptance criterion", "columns: criterion, name, passed, detail"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scband", description="Scalar-curvature band toolkit reports.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_, cols) in COMMANDS.items():
        p = sub.add_parser(name, help=help_, description=help_, epilog=cols)
        p.add_argument("--n", type=int)
        p.add_argument("--sigma", type=float)
        p.add_argument("--class", dest="band_class", default="overtorical", choices=sorted(extremal.BAND_CLASSES))
        p.add_argument("--alpha", type=float)
        p.add_argument("--eps", type=float)
        p.add_argument("--theta", type=float)
        p.add_argument("--rho", type=float)
        p.add_argument("--m-minus", type=float, default=-math.inf)
        p.add_argument("--m-plus", type=float, default=-math.inf)
        p.add_argument("--table", type=int, metavar="N")
        p.add_argument("--resolution", type=int, metavar="K")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--f0", type=float, default=0.0, help="initial value f(0) for riccati")
        p.add_argument("--width", type=float, help="band width d for lipschitz")
        p.add_argument("--radius", type=float, help="ball radius R for decay")
        p.add_argument("--m", type=int, default=3, help="dimension of V for round")
        p.add_argument("--ambient", choices=("sphere", "euclidean"), default="sphere")
        p.add_argument("--curvatures", help="comma-separated principal curvatures for gauss")
        p.add_argument("--h", default="1,1,1", help="comma-separated initial fiber metric for bend")
        p.add_argument("--a-new", default="0,0,0")
        p.add_argument("--a-old", default="1,0,0")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    try:
        report = COMMANDS[args.command][0](args)
        text = render(report, args.format)
    except DomainError as exc:
        print(f"scband: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalFailure as exc:
        print(f"scband: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    if args.command == "verify-all" and not all(r["passed"] for r in report.rows):
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
