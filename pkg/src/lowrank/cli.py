"""Command-line front end.

Subcommands: solve, rip, phase-grid, image-recover, hankel, ensemble-dump.
Flags can also come from a JSON file via ``--config``; explicit flags win.
All randomness flows from one ``--seed`` (default 2009, fixed so bare
invocations reproduce). Exit codes: 0 success, 1 usage error, 2 runtime
failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import harness, rip, solvers
from .measurement import ENSEMBLE_KINDS, EnsembleSpec, sample

DEFAULT_SEED = 2009


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_solve(args):
    if args.m is not None and args.m != args.n:
        raise ValueError("solve currently handles square problems: --m must "
                         "equal --n")
    rec = harness.run_trial(args.n, args.p, args.rank, args.seed,
                            ensemble=args.ensemble, solver=args.solver,
                            success_tol=args.success_tol)
    _write_json(args.out, {
        "command": "solve",
        "n": rec.n, "p": rec.p, "rank": rec.r, "seed": rec.seed,
        "ensemble": args.ensemble, "solver": args.solver,
        "rel_error": rec.rel_error, "success": rec.success,
        "status": rec.status,
    })
    return 0


def _cmd_rip(args):
    op = sample(EnsembleSpec(args.ensemble, args.m, args.n, args.p, args.seed))
    est = rip.estimate_delta_lower(op, args.r, trials=args.trials,
                                   seed=args.seed, refine=args.refine)
    _write_json(args.out, {
        "command": "rip",
        "m": args.m, "n": args.n, "p": args.p, "r": est.r,
        "ensemble": args.ensemble, "seed": args.seed,
        "trials": est.trials, "refined": est.refined,
        "delta_lower": est.delta_lower,
    })
    return 0


def _cmd_phase_grid(args):
    if args.p_values:
        p_values = [int(t) for t in args.p_values.split(",")]
    else:
        step = max(1, args.n * args.n // 20)
        p_values = list(range(step, args.n * args.n + 1, step))
    spec = harness.PhaseGridSpec(n=args.n, p_values=p_values,
                                 trials_per_cell=args.trials,
                                 ensemble=args.ensemble, solver=args.solver,
                                 base_seed=args.seed,
                                 success_tol=args.success_tol)
    result = harness.run_phase_grid(spec, csv_path=args.out, jobs=args.jobs)
    sys.stdout.write(f"wrote {len(result.records)} records to {args.out}\n")
    return 0


def _cmd_image_recover(args):
    image = harness.load_image(args.image) if args.image \
        else harness.logo_fixture()
    p_values = [int(t) for t in args.p_values.split(",")]
    curve = harness.run_image_recovery(image, p_values,
                                       ensemble=args.ensemble,
                                       solver=args.solver, seed=args.seed)
    _write_json(args.out, {
        "command": "image-recover",
        "rows": image.shape[0], "cols": image.shape[1],
        "ensemble": args.ensemble, "solver": args.solver, "seed": args.seed,
        "curve": [{"p": p, "rel_error": e} for p, e in curve],
    })
    return 0


def _cmd_hankel(args):
    report = harness.run_hankel_demo(args.order, args.N, args.p,
                                     seed=args.seed, solver=args.solver)
    report["command"] = "hankel"
    _write_json(args.out, report)
    return 0


def _cmd_ensemble_dump(args):
    op = sample(EnsembleSpec(args.ensemble, args.m, args.n, args.p, args.seed))
    payload = {
        "command": "ensemble-dump",
        "ensemble": args.ensemble, "m": op.m, "n": op.n, "p": op.p,
        "seed": args.seed, "variant": op.variant,
    }
    if op.variant == "dense":
        payload["matrix"] = op.matrix.tolist()
    elif op.variant == "sampling":
        payload["indices"] = op.indices.tolist()
    else:
        payload["us"] = op.us.tolist()
        payload["vs"] = op.vs.tolist()
    _write_json(args.out, payload)
    return 0


def _add_common(p, *, seed=True, out=True, ensemble=True, solver=False):
    if seed:
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help="master RNG seed (default %(default)s)")
    if out:
        p.add_argument("--out", default=None,
                       help="output file (default: stdout)")
    if ensemble:
        p.add_argument("--ensemble", default="gaussian",
                       choices=ENSEMBLE_KINDS,
                       help="measurement ensemble (default %(default)s)")
    if solver:
        p.add_argument("--solver", default="alm",
                       choices=["alm", "subgradient"],
                       help="nuclear-norm solver (default %(default)s)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lowrank",
        description="Low-rank matrix recovery via nuclear-norm minimization")
    parser.add_argument("--config", default=None,
                        help="JSON file supplying the command and flags")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("solve", help="recover a planted low-rank matrix")
    p.add_argument("--m", type=int, default=None,
                   help="rows (defaults to --n; square problems only)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--p", type=int, required=True, help="measurement count")
    p.add_argument("--success-tol", type=float, default=1e-3)
    _add_common(p, solver=True)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("rip", help="lower-bound the restricted isometry constant")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--refine", action="store_true",
                   help="locally refine the worst sample by gradient ascent")
    _add_common(p)
    p.set_defaults(func=_cmd_rip)

    p = sub.add_parser("phase-grid", help="phase-transition sweep over (p, r)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p-values", default=None,
                   help="comma-separated p values (default: n^2/20 steps)")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--success-tol", type=float, default=1e-3)
    p.add_argument("--jobs", type=int,
                   default=int(os.environ.get("LOWRANK_JOBS", "1")),
                   help="parallel workers (default $LOWRANK_JOBS or 1)")
    _add_common(p, out=False, solver=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_phase_grid)

    p = sub.add_parser("image-recover",
                       help="error-vs-measurements curve for a fixed image")
    p.add_argument("--image", default=None,
                   help="text matrix or PGM file (default: built-in rank-5 "
                        "fixture)")
    p.add_argument("--p-values", required=True,
                   help="comma-separated measurement counts")
    _add_common(p, solver=True)
    p.set_defaults(func=_cmd_image_recover)

    p = sub.add_parser("hankel", help="minimum-order LTI realization demo")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--N", type=int, required=True, help="observation horizon")
    p.add_argument("--p", type=int, required=True, help="input experiments")
    _add_common(p, ensemble=False, solver=True)
    p.set_defaults(func=_cmd_hankel)

    p = sub.add_parser("ensemble-dump", help="serialize a sampled operator")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_ensemble_dump)

    return parser


def _argv_from_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read config {path}: {exc}") from exc
    if "command" not in cfg:
        raise ValueError(f"config {path} is missing the 'command' key")
    argv = [str(cfg["command"])]
    for key, value in cfg.items():
        if key == "command":
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        else:
            argv.extend([flag, str(value)])
    return argv


def main(argv=None):
    parser = build_parser()
    try:
        args, rest = parser.parse_known_args(argv)
        if args.config:
            args = parser.parse_args(_argv_from_config(args.config) + rest)
        elif rest:
            parser.error(f"unrecognized arguments: {' '.join(rest)}")
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    if args.command is None:
        parser.print_help()
        return 1
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except Exception as exc:  # solver/runtime failures
        sys.stderr.write(f"runtime failure: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
