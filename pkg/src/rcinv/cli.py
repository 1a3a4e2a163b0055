"""Command-line interface.

Exit codes: 0 success (an empty set is a valid outcome), 1 invalid input,
2 iteration or resources exhausted, 3 failed certificate or closed-loop
violation.
"""

import argparse
import logging
import sys as _sys
import time

import numpy as np

from . import model_io, plotting
from .controller import POLICIES, simulate
from .errors import (
    CertificateError,
    InputError,
    InvarianceViolation,
    NumericError,
    RcinvError,
    ResourceError,
)
from .invariance import NOT_TERMINATED, check_rci, inner_approximation
from .nullctrl import outer_approximation
from .region import inflate

EXIT_OK, EXIT_INPUT, EXIT_UNFINISHED, EXIT_CERT = 0, 1, 2, 3

log = logging.getLogger("rcinv")


def _fail(stage, err, code):
    print(f"rcinv {stage}: {err}", file=_sys.stderr)
    return code


def _trace_meta(trace, with_timings):
    meta = {"iterations": trace.iterations, "piece_counts": trace.piece_counts}
    if with_timings:
        meta["wall_ms"] = [round(s["wall_ms"], 3) for s in trace.stats]
    if trace.verdict == NOT_TERMINATED:
        meta["last_gap"] = trace.last_gap
    return meta


def cmd_outer(args):
    sys, cons = model_io.load_model(args.model)
    t0 = time.perf_counter()
    res = outer_approximation(sys, cons, args.epsilon, args.window, args.max_iter)
    meta = {"mode": "outer", "n": sys.n, "epsilon": res.epsilon, "delta": res.delta,
            "c": res.c, "stop_index": res.stop_index, "verdict": res.verdict,
            **_trace_meta(res.trace, args.record_timings)}
    model_io.save_result(args.out, res.R, meta)
    log.info("outer: verdict %s, stop index %s, delta %.6g, %.0f ms", res.verdict,
             res.stop_index, res.delta, 1e3 * (time.perf_counter() - t0))
    if res.verdict == NOT_TERMINATED:
        return _fail("outer", f"no termination within {args.max_iter} iterations; "
                     f"current gap {res.trace.last_gap:.6g}", EXIT_UNFINISHED)
    if res.contained is False:
        return _fail("outer", "assembled set is not inside X + delta*B", EXIT_CERT)
    return EXIT_OK


def cmd_inner(args):
    sys, cons = model_io.load_model(args.model)
    res = inner_approximation(sys, cons, args.rho, args.max_iter)
    meta = {"mode": "inner", "n": sys.n, "rho": res.rho, "delta": 0.0,
            "stop_index": res.stop_index, "verdict": res.verdict,
            **_trace_meta(res.trace, args.record_timings)}
    model_io.save_result(args.out, res.R, meta)
    log.info("inner: verdict %s, stop index %s", res.verdict, res.stop_index)
    if res.verdict == NOT_TERMINATED:
        gap = res.trace.last_gap
        return _fail("inner", f"no termination within {args.max_iter} iterations; "
                     f"current gap {gap if gap is None else format(gap, '.6g')}",
                     EXIT_UNFINISHED)
    return EXIT_OK


def _input_set(cons, delta):
    if delta is None or delta == 0:
        return cons.U
    if delta < 0:
        raise InputError("input inflation must be nonnegative")
    return inflate(cons.U, delta)


def cmd_check(args):
    sys, cons = model_io.load_model(args.model)
    R, _ = model_io.load_result(args.set, dim=sys.n)
    verdict = check_rci(sys, R, _input_set(cons, args.input_inflation))
    if verdict.passed:
        print("pass")
        return EXIT_OK
    print(f"fail: residual {verdict.residual:.9g}")
    return EXIT_CERT


def _parse_vector(text, n, name):
    try:
        v = np.array([float(s) for s in text.replace(" ", "").split(",") if s], dtype=float)
    except ValueError as e:
        raise InputError(f"{name} must be comma-separated numbers") from e
    if v.size != n:
        raise InputError(f"{name} has {v.size} entries, expected {n}")
    return v


def _write_trajectory(path, traj):
    n, m = traj.states.shape[1], traj.inputs.shape[1]
    cols = (["t"] + [f"x{i}" for i in range(n)] + [f"u{j}" for j in range(m)]
            + [f"w{i}" for i in range(n)] + ["in_set"])
    lines = [",".join(cols)]
    for t in range(traj.steps):
        vals = [*traj.states[t], *traj.inputs[t], *traj.disturbances[t]]
        lines.append(",".join([str(t)] + [repr(float(v)) for v in vals]
                              + [str(int(traj.in_set[t]))]))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def cmd_simulate(args):
    sys, cons = model_io.load_model(args.model)
    R, meta = model_io.load_result(args.set, dim=sys.n)
    delta = args.input_inflation
    if delta is None:
        delta = meta.get("delta") or 0.0
    x0 = _parse_vector(args.x0, sys.n, "x0")
    try:
        traj = simulate(sys, R, _input_set(cons, delta), x0, args.steps, args.policy, args.seed)
    except InvarianceViolation as e:
        if e.trajectory is not None:
            _write_trajectory(args.out, e.trajectory)
        return _fail("simulate", e, EXIT_CERT)
    _write_trajectory(args.out, traj)
    return EXIT_OK


def cmd_plot(args):
    dims = [int(s) for s in args.dims.split(",")]
    fixed = plotting.parse_slice(args.slice)
    layers = []
    for k, path in enumerate(args.set):
        S, _ = model_io.load_result(path)
        if S.is_empty():
            continue
        layers.append((f"set{k}", plotting.polygons(S, dims, fixed)))
    if args.out.endswith(".csv"):
        text = plotting.to_csv(layers)
    elif args.out.endswith(".svg"):
        text = plotting.to_svg(layers, dims)
    else:
        raise InputError("plot output must end in .svg or .csv")
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return EXIT_OK


def _positive(kind):
    def parse(text):
        try:
            v = kind(text)
        except ValueError as e:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from e
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return parse


def build_parser():
    p = argparse.ArgumentParser(prog="rcinv", description="Robust controlled invariant sets.")
    p.add_argument("-q", "--quiet", action="store_true", help="only log warnings")
    sub = p.add_subparsers(dest="command", required=True)

    o = sub.add_parser("outer", help="outer approximation with relaxed constraints")
    o.add_argument("--model", required=True)
    o.add_argument("--epsilon", type=_positive(float), required=True)
    o.add_argument("--window", type=_positive(int))
    o.add_argument("--max-iter", type=_positive(int), default=500)
    o.add_argument("--record-timings", action="store_true",
                   help="store per-iteration wall times (output is then not byte-stable)")
    o.add_argument("--out", required=True)
    o.set_defaults(func=cmd_outer)

    i = sub.add_parser("inner", help="inner approximation with margin rho")
    i.add_argument("--model", required=True)
    i.add_argument("--rho", type=_positive(float), required=True)
    i.add_argument("--max-iter", type=_positive(int), default=500)
    i.add_argument("--record-timings", action="store_true")
    i.add_argument("--out", required=True)
    i.set_defaults(func=cmd_inner)

    c = sub.add_parser("check", help="one-step invariance certificate")
    c.add_argument("--model", required=True)
    c.add_argument("--set", required=True)
    c.add_argument("--input-inflation", type=float, default=0.0)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("simulate", help="closed-loop simulation")
    s.add_argument("--model", required=True)
    s.add_argument("--set", required=True)
    s.add_argument("--x0", required=True, help='initial state, e.g. "40,35"')
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--policy", default="center",
                   help=f"disturbance policy: {', '.join(POLICIES)}")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--input-inflation", type=float,
                   help="defaults to the delta stored in the set file")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    g = sub.add_parser("plot", help="planar figure of one or more sets")
    g.add_argument("--set", action="append", required=True)
    g.add_argument("--dims", default="0,1")
    g.add_argument("--slice", default="", help='fixed coordinates, e.g. "2=0,3=0"')
    g.add_argument("--out", required=True, help="path ending in .svg or .csv")
    g.set_defaults(func=cmd_plot)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=_sys.stderr)
    try:
        return args.func(args)
    except InputError as e:
        return _fail(args.command, e, EXIT_INPUT)
    except (CertificateError, InvarianceViolation) as e:
        return _fail(args.command, e, EXIT_CERT)
    except (ResourceError, NumericError) as e:
        return _fail(args.command, e, EXIT_UNFINISHED)
    except RcinvError as e:
        return _fail(args.command, e, EXIT_INPUT)
    except OSError as e:
        return _fail(args.command, f"cannot write output: {e}", EXIT_INPUT)


def entry():
    _sys.exit(main())


if __name__ == "__main__":
    entry()
