"""Command line interface: ``randexp <subcommand> ...``.

Exit status: 0 on success, 1 for invalid input (including an unknown
subcommand), 2 when a computation fails at run time.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import adaptive, cone, criteria, experiments, hyperbolic, orbit, render
from .errors import InvalidParameterError, RandExpError
from .seq import load_sequence


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _complex(text):
    try:
        parts = [float(v) for v in str(text).split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected re,im but got {text!r}") from exc
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected re,im but got {text!r}")
    return complex(parts[0], parts[1])


def _pair(text):
    z = _complex(text)
    return z.real, z.imag


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _csv(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([r[c] for c in columns])
    return buf.getvalue()


def cmd_render(a):
    seq = load_sequence(a.seq)
    spec = render.GridSpec(a.center, a.width, a.height or a.width, a.nx, a.ny or a.nx)
    cfg = orbit.EscapeConfig(re_threshold=a.threshold, max_iter=a.cap)
    grid = render.classify_grid(seq, spec, cfg, n1=a.start, threads=a.threads)
    if a.out.lower().endswith(".png"):
        render.write_png(grid, a.out)
    else:
        render.write_pgm(grid, a.out)
    info = {"out": a.out, "escaped_fraction": grid.escaped_fraction()}
    if "error" in grid.metadata:
        info["error"] = grid.metadata["error"]
    print(json.dumps(info, sort_keys=True))
    return 0


def cmd_orbit(a):
    seq = load_sequence(a.seq)
    cfg = orbit.EscapeConfig(re_threshold=a.threshold, max_iter=a.max_iter)
    n1 = seq.start_index - 1 if a.start is None else a.start
    state, traj = orbit.run(seq, a.z0, n1, cfg, record=True)
    lams = seq.values(n1 + 1, state.n) if state.n else np.empty(0)
    ld = np.concatenate(([0.0], np.cumsum(np.log(lams) + traj[:-1].real)))
    rows = []
    for k, z in enumerate(traj):
        st = state.status.name.lower() if k == len(traj) - 1 else "active"
        rows.append({"step": k, "re": repr(float(z.real)), "im": repr(float(z.imag)),
                     "log_deriv": repr(float(ld[k])), "status": st})
    _emit(_csv(rows, ["step", "re", "im", "log_deriv", "status"]), a.out)
    return 0


def cmd_criterion(a):
    if a.check == "cbound":
        cb = criteria.max_admissible_C(a.horizon)
        doc = {"check": "cbound", "C": cb.value, "argmin": cb.argmin, "horizon": cb.horizon,
               "asymptotic": cb.asymptotic}
    elif a.check == "fatou":
        if a.seq is None:
            raise InvalidParameterError("--seq is required for the fatou check")
        seq = load_sequence(a.seq)
        n1 = seq.start_index - 1 if a.start is None else a.start
        v = criteria.fatou_criterion(seq, n1, a.horizon)
        doc = {"check": "fatou", "holds": v.holds, "violated_at": v.violated_at,
               "horizon": v.horizon, "max_value": v.max_value, "note": v.note}
    else:
        if a.delta is None:
            raise InvalidParameterError("--delta is required for the runs check")
        crit = criteria.compute_run_criterion(a.delta)
        doc = {"check": "runs", "delta": crit.delta, "alpha": crit.alpha, "beta": crit.beta,
               "L": crit.L, "eps": crit.eps, "p": crit.p, "q": crit.q}
        if a.seq is not None:
            seq = load_sequence(a.seq)
            doc["runs"] = criteria.run_detector(seq, a.delta, crit, a.horizon)
    _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", a.out)
    return 0


def cmd_verify(a):
    if a.n_min < 1 or a.n_max < a.n_min:
        raise InvalidParameterError("need 1 <= n-min <= n-max")
    rows = hyperbolic.verify_chain(range(a.n_min, a.n_max + 1), samples=a.samples)
    cols = ["n", "eps", "beta_margin", "alpha_margin", "C_n", "delta_n", "product_ok"]
    _emit(_csv(rows, cols), a.out)
    return 0


def cmd_mc(a):
    if a.experiment == "escape":
        rep = experiments.mc_escape_probability(a.delta, a.trials, a.cap, a.seed,
                                                workers=a.workers)
    elif a.experiment == "borel":
        if a.cdf is None:
            raise InvalidParameterError("--cdf is required for the borel experiment")
        spec = json.loads(a.cdf) if a.cdf.strip().startswith(("{", "[")) else json.load(open(a.cdf))
        rep = experiments.borel_mc(spec, a.trials, a.cap, a.seed, delta=a.delta,
                                   workers=a.workers)
    else:
        rep = experiments.mc_run_frequency(a.delta, a.L, a.horizon, a.trials, a.seed)
    rep.write(a.csv, a.json)
    print(rep.summary_json())
    return 0


def cmd_cone(a):
    p = math.inf if a.p is None else a.p
    start = a.start if a.p is not None else max(a.start, 2)
    if a.sweep_grid:
        nx, ny = (int(v) for v in a.sweep_grid.split(","))
        rows = cone.sweep(a.theta, p, a.re_range, a.im_range, nx, ny, a.max_iter, start)
    else:
        res = cone.cone_exit_time(a.z0, p, a.theta, start, a.max_iter)
        rows = [{"z0_re": a.z0.real, "z0_im": a.z0.imag, "exit_step": res.step,
                 "final_modulus": res.modulus}]
    _emit(cone.rows_to_csv(rows, ["z0_re", "z0_im", "exit_step", "final_modulus"]), a.out)
    return 0


def cmd_construct(a):
    cloud = adaptive.default_cloud(a.rect, a.grid)
    seq, state = adaptive.adaptive_escape_seq(cloud, blocks=a.blocks, eps0=a.eps0,
                                              min_gap=a.min_gap)
    checks = adaptive.block_critical_values(seq)
    rows = [{"k": k + 1, "M_k": m, "lambda_Mk": repr(lam), "critical_value_check": repr(c)}
            for k, (m, lam, c) in enumerate(zip(state.boundaries, state.lambdas, checks))]
    _emit(_csv(rows, ["k", "M_k", "lambda_Mk", "critical_value_check"]), a.out)
    print(f"# {state.notes}", file=sys.stderr)
    return 0


def build_parser():
    p = _Parser(prog="randexp", description="Non-autonomous iteration of lambda*exp(z).")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    r = sub.add_parser("render", help="escape-time image of a rectangle")
    r.add_argument("--seq", required=True, help="sequence JSON text or file")
    r.add_argument("--center", type=_complex, default=0j)
    r.add_argument("--width", type=float, default=4.0)
    r.add_argument("--height", type=float, default=None)
    r.add_argument("--nx", type=int, default=400)
    r.add_argument("--ny", type=int, default=None)
    r.add_argument("--cap", type=int, default=200)
    r.add_argument("--threshold", type=float, default=50.0)
    r.add_argument("--start", type=int, default=None, help="n1, index offset")
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--out", required=True, help=".pgm (or .png)")
    r.set_defaults(func=cmd_render)

    o = sub.add_parser("orbit", help="trajectory of one point as CSV")
    o.add_argument("--seq", required=True)
    o.add_argument("--z0", type=_complex, default=0j)
    o.add_argument("--start", type=int, default=None)
    o.add_argument("--max-iter", type=int, default=1000)
    o.add_argument("--threshold", type=float, default=50.0)
    o.add_argument("--out", default=None)
    o.set_defaults(func=cmd_orbit)

    c = sub.add_parser("criterion", help="Fatou criterion, C-bound or run criterion")
    c.add_argument("--seq", default=None)
    c.add_argument("--check", choices=["fatou", "cbound", "runs"], required=True)
    c.add_argument("--horizon", type=int, default=10_000)
    c.add_argument("--start", type=int, default=None)
    c.add_argument("--delta", type=float, default=None)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_criterion)

    v = sub.add_parser("verify", help="table of the sqrt(n)-rate constants")
    v.add_argument("--n-min", type=int, default=1)
    v.add_argument("--n-max", type=int, default=1000)
    v.add_argument("--samples", type=int, default=2500)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("mc", help="Monte Carlo experiments")
    m.add_argument("--experiment", choices=["escape", "runs", "borel"], default="escape")
    m.add_argument("--delta", type=float, default=0.1)
    m.add_argument("--trials", type=int, default=1000)
    m.add_argument("--cap", type=int, default=10_000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--cdf", default=None, help="CDF JSON text or file (borel)")
    m.add_argument("--L", type=int, default=3)
    m.add_argument("--horizon", type=int, default=10_000)
    m.add_argument("--workers", type=int, default=1)
    m.add_argument("--csv", default=None, help="per-trial CSV path")
    m.add_argument("--json", default=None, help="summary JSON path")
    m.set_defaults(func=cmd_mc)

    k = sub.add_parser("cone", help="exit times from the cone S_theta")
    k.add_argument("--theta", type=float, default=math.pi / 4)
    k.add_argument("--p", type=float, default=1.0, help="omit the push with --no-push")
    k.add_argument("--no-push", dest="p", action="store_const", const=None)
    k.add_argument("--z0", type=_complex, default=complex(-0.5, 0.05))
    k.add_argument("--sweep-grid", default=None, help="nx,ny")
    k.add_argument("--re-range", type=_pair, default=(-1.0, -0.1))
    k.add_argument("--im-range", type=_pair, default=(0.0, 0.3))
    k.add_argument("--max-iter", type=int, default=100_000)
    k.add_argument("--start", type=int, default=1)
    k.add_argument("--out", default=None)
    k.set_defaults(func=cmd_cone)

    a = sub.add_parser("construct", help="adaptive sequence boundaries as CSV")
    a.add_argument("--blocks", type=int, default=3)
    a.add_argument("--eps0", type=float, default=1e-3)
    a.add_argument("--rect", type=lambda s: tuple(float(v) for v in s.split(",")),
                   default=adaptive.DEFAULT_RECT, help="x0,x1,y0,y1")
    a.add_argument("--grid", type=int, default=5)
    a.add_argument("--min-gap", type=int, default=1)
    a.add_argument("--out", default=None)
    a.set_defaults(func=cmd_construct)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except (InvalidParameterError, ValueError, json.JSONDecodeError) as exc:
        print(f"randexp {args.command}: invalid input: {exc}", file=sys.stderr)
        return 1
    except (RandExpError, OSError, ArithmeticError) as exc:
        print(f"randexp {args.command}: failed: {exc}", file=sys.stderr)
        return 2


cli_main = main


if __name__ == "__main__":
    sys.exit(main())
