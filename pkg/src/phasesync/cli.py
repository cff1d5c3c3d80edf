"""Command line front end: ``phasesync generate|solve|sweep|verify``.

Exit status: 0 when every applicable check passed, 2 when at least one
applicable check failed, 1 on operational errors (bad arguments, I/O,
solver failures).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .gpm import GpmConfig, IterateTrace, TRACE_COLUMNS
from .harness import (SweepConfigError, default_jobs, load_sweep_config, result_row, run_sweep, solve_instance,
                      write_rows, write_sweep_outputs)
from .diagnostics import verify_run
from .instance import GroundTruth, InstanceFileError, build_instance, load_instance, noise_stats, save_instance

log = logging.getLogger("phasesync")

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for failed checks here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {s}")
    return v


def _nonneg_float(s: str) -> float:
    v = float(s)
    if not v >= 0 or math.isinf(v):
        raise argparse.ArgumentTypeError(f"must be a finite nonnegative number, got {s}")
    return v


def _seed(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2^64), got {s}")
    return v


def _add_instance_args(p, required: bool):
    p.add_argument("--n", type=_positive_int, required=required, help="dimension")
    p.add_argument("--sigma", type=_nonneg_float, required=required, help="noise level")
    p.add_argument("--mode", choices=[m.value for m in GroundTruth], default=GroundTruth.RANDOM_PHASES.value)


def _add_solver_args(p):
    p.add_argument("--alpha", default=None, help="step parameter in [2, inf]; 'inf' for the pure power step")
    p.add_argument("--max-iter", type=_positive_int, default=None)
    p.add_argument("--rho-tol", type=float, default=None)
    p.add_argument("--step-tol", type=float, default=None)
    p.add_argument("--zero-policy", default=None, choices=["unit-one", "previous-iterate", "random-unit"])


def _solver_overrides(args) -> dict:
    keys = {"alpha": args.alpha, "max_iter": args.max_iter, "rho_tol": args.rho_tol,
            "step_tol": args.step_tol, "zero_policy": args.zero_policy}
    return {k: v for k, v in keys.items() if v is not None}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="phasesync", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write instance files")
    _add_instance_args(g, required=True)
    g.add_argument("--seed", type=_seed, nargs="+", required=True)
    g.add_argument("--out", help="output file (single seed) or directory (several seeds)")

    s = sub.add_parser("solve", help="v_C start + GPM + bound verification on one instance")
    s.add_argument("--instance", help="instance file; otherwise --n/--sigma/--seed")
    _add_instance_args(s, required=False)
    s.add_argument("--seed", type=_seed, default=None)
    _add_solver_args(s)
    s.add_argument("--no-iterates", action="store_true", help="do not store iterates in trace.json")
    s.add_argument("--out-dir", default="solve-out")

    w = sub.add_parser("sweep", help="run an (n, sigma, alpha, seed) grid from a JSON config")
    w.add_argument("config")
    w.add_argument("--output-dir", default=None, help="overrides the config's output_dir")
    w.add_argument("--max-runs", type=_positive_int, default=None)
    w.add_argument("--jobs", type=_positive_int, default=None, help="worker processes (env PHASESYNC_JOBS)")

    v = sub.add_parser("verify", help="re-verify a stored trace against its instance")
    v.add_argument("trace", help="trace.json, or a trace CSV together with --alpha")
    v.add_argument("instance")
    v.add_argument("--alpha", default=None, help="step parameter; required for CSV traces")
    v.add_argument("--init-kind", default="eigenvector", help="start used for a CSV trace")
    v.add_argument("--out", default=None, help="write the report JSON here")
    return ap


def _exit_for(report) -> int:
    return EXIT_FAILED if report.failed else EXIT_OK


def cmd_generate(args) -> int:
    seeds = args.seed
    out = Path(args.out) if args.out else None
    for seed in seeds:
        inst = build_instance(args.n, args.sigma, seed, args.mode)
        name = f"instance-n{args.n}-sigma{args.sigma:g}-seed{seed}.json"
        if out is None:
            path = Path(name)
        elif len(seeds) == 1 and out.suffix == ".json":
            path = out
        else:
            out.mkdir(parents=True, exist_ok=True)
            path = out / name
        save_instance(inst, path)
        st = noise_stats(inst)
        flags = " ".join(f"{k}={int(v)}" for k, v in st.assumptions.items())
        print(f"{path}: n={inst.n} sigma={inst.sigma:g} seed={seed} ||Delta||_op={st.delta_op:.6g} "
              f"||Delta z*||_inf={st.delta_zstar_inf:.6g} lambda_min={st.lambda_min:.6g} {flags}")
    return EXIT_OK


def cmd_solve(args) -> int:
    if args.instance:
        inst = load_instance(args.instance)
    else:
        if args.n is None or args.sigma is None or args.seed is None:
            raise UsageError("solve needs --instance or all of --n, --sigma, --seed")
        inst = build_instance(args.n, args.sigma, args.seed, args.mode)
    cfg = GpmConfig.from_dict({"record_iterates": not args.no_iterates, **_solver_overrides(args)})
    res = solve_instance(inst, cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    res.trace.to_csv(out / "trace.csv")
    res.trace.to_json(out / "trace.json", extra={"noise": res.stats.to_dict()})
    res.report.to_json(out / "report.json")
    write_rows(out / "row.csv", [result_row(inst, res)])
    text = res.report.summary()
    (out / "report.txt").write_text(text + "\n")
    print(text)
    return _exit_for(res.report)


def _trace_from_csv(path, inst, alpha, init_kind) -> IterateTrace:
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        if tuple(rd.fieldnames or ()) != TRACE_COLUMNS:
            raise ValueError(f"{path}: expected columns {TRACE_COLUMNS}")
        rows = list(rd)
    if not rows:
        raise ValueError(f"{path}: empty trace")
    col = {c: np.array([float(r[c]) for r in rows]) for c in TRACE_COLUMNS[1:]}
    cfg = GpmConfig(alpha=alpha)
    rho_ok = col["rho"][-1] <= cfg.rho_tol * inst.n
    reason = "rho_tol" if rho_ok else "max_iter"
    nan = np.full(inst.n, np.nan + 0j)
    # scalar-only trace: z_final is unknown, so checks on the end point are skipped
    return IterateTrace(config=cfg, f=col["f"], d2=col["d2"], dinf=col["dinf"], rho=col["rho"],
                        step_norm=col["step_norm"], z_init=nan, z_final=nan, termination_reason=reason,
                        init_kind=init_kind, n=inst.n)


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    path = Path(args.trace)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    if path.suffix == ".csv":
        if args.alpha is None:
            raise UsageError("a CSV trace needs --alpha")
        trace = _trace_from_csv(path, inst, GpmConfig(alpha=args.alpha).alpha, args.init_kind)
        report = verify_run(inst, trace)
    else:
        try:
            trace = IterateTrace.from_json(path)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"{path}: not a trace file ({exc!r})") from exc
        if args.alpha is not None and GpmConfig(alpha=args.alpha).alpha != trace.config.alpha:
            raise ValueError("--alpha disagrees with the alpha stored in the trace")
        report = verify_run(inst, trace)
    if args.out:
        report.to_json(args.out)
    print(report.summary())
    return _exit_for(report)


def cmd_sweep(args) -> int:
    overrides = {"output_dir": args.output_dir, "max_runs": args.max_runs}
    cfg = load_sweep_config(args.config, overrides)
    jobs = args.jobs if args.jobs is not None else default_jobs()
    rows, timings = run_sweep(cfg, jobs)
    out = write_sweep_outputs(cfg.output_dir, rows, timings, cfg)
    errors = sum(1 for r in rows if r["error"])
    failed = sum(1 for r in rows if not r["error"] and r["failed_checks"])
    print(f"{len(rows)} runs -> {out}: {failed} with failed checks, {errors} errors")
    if failed:
        return EXIT_FAILED
    return EXIT_ERROR if errors else EXIT_OK


COMMANDS = {"generate": cmd_generate, "solve": cmd_solve, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"phasesync: error: {exc}", file=sys.stderr)
    except (InstanceFileError, SweepConfigError, OSError, ValueError, ArithmeticError, RuntimeError,
            AssertionError) as exc:
        print(f"phasesync {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
