"""Single solves, parameter sweeps and their CSV/JSON reports.

Sweep config (JSON, ``schema_version`` 1)::

    {
      "schema_version": 1,
      "n": [100, 200],
      "sigma": {"rule": "sqrt", "c": [0.0208]},   # or {"values": [0.1, 0.5]}
      "alpha": [4, "inf"],
      "seeds": {"start": 0, "stop": 50},          # or an explicit list
      "mode": "random-phases",
      "solver": {"rho_tol": 1e-12, "max_iter": 10000},
      "output_dir": "sweep-out",
      "max_runs": 100000
    }

Sigma rules scale with n: ``sqrt`` gives c sqrt(n), ``quarter`` c n^(1/4),
``sixth`` c n^(1/6). The rows file has the fixed column order of
``ROW_COLUMNS``; wall-clock times go to a separate timings file so that
re-running a sweep reproduces the rows file byte for byte.
"""

from __future__ import annotations

import csv
import dataclasses
import itertools
import json
import logging
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .core import dist_l2, dist_linf
from .diagnostics import BoundReport, verify_run
from .gpm import GpmConfig, IterateTrace, run_gpm
from .instance import GroundTruth, Instance, NoiseStats, build_instance, noise_stats
from .spectral import eigenvector_estimator

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_MAX_RUNS = 100_000
SIGMA_RULES = {"sqrt": 0.5, "quarter": 0.25, "sixth": 1 / 6}
ROW_COLUMNS = ("n", "sigma", "alpha", "seed", "delta_op", "thm1_ok", "thm3_ok", "prop_ebcrit_ok",
               "iterations", "termination_reason", "f_final", "d2_final", "dinf_final", "rho_final",
               "lambda_hat", "failed_checks", "bound_verdicts", "error")
AGG_STATS = ("d2_final", "dinf_final", "rho_final", "iterations", "lambda_hat")


class SweepConfigError(ValueError):
    pass


@dataclasses.dataclass
class RunResult:
    stats: NoiseStats
    trace: IterateTrace
    report: BoundReport


def solve_instance(inst: Instance, cfg: GpmConfig, stats: NoiseStats | None = None) -> RunResult:
    """v_C start, GPM run and full bound verification."""
    stats = noise_stats(inst) if stats is None else stats
    trace = run_gpm(inst, eigenvector_estimator(inst.C), cfg, init_kind="eigenvector", stats=stats)
    report = verify_run(inst, trace, cfg, stats=stats)
    return RunResult(stats, trace, report)


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def result_row(inst: Instance, res: RunResult) -> dict:
    tr, rep, st = res.trace, res.report, res.stats
    return {"n": inst.n, "sigma": inst.sigma, "alpha": tr.config.alpha, "seed": inst.seed,
            "delta_op": st.delta_op, "thm1_ok": st.thm1_ok, "thm3_ok": st.thm3_ok,
            "prop_ebcrit_ok": st.prop_ebcrit_ok, "iterations": tr.iterations,
            "termination_reason": tr.termination_reason, "f_final": float(tr.f[-1]),
            "d2_final": dist_l2(tr.z_final, inst.z_star).value,
            "dinf_final": dist_linf(tr.z_final, inst.z_star).value, "rho_final": float(tr.rho[-1]),
            "lambda_hat": rep.lambda_hat, "failed_checks": len(rep.failed),
            "bound_verdicts": ";".join(f"{c.name}={c.verdict}" for c in rep.checks), "error": ""}


def format_row(row: dict) -> list[str]:
    return [row[c] if isinstance(row[c], str) else _num(row[c]) for c in ROW_COLUMNS]


def write_rows(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(ROW_COLUMNS)
        for r in rows:
            wr.writerow(format_row(r))


def _parse_value(col: str, s: str):
    if s == "":
        return None
    if col in ("termination_reason", "bound_verdicts", "error"):
        return s
    if col in ("thm1_ok", "thm3_ok", "prop_ebcrit_ok"):
        return s == "1"
    if col in ("n", "seed", "iterations", "failed_checks"):
        return int(s)
    return float(s)


def read_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        if tuple(rd.fieldnames or ()) != ROW_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {rd.fieldnames}")
        return [{c: _parse_value(c, r[c]) for c in ROW_COLUMNS} for r in rd]


# ---------------------------------------------------------------- sweep config


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    n_list: tuple[int, ...]
    sigma_spec: dict
    alpha_list: tuple[float, ...]
    seeds: tuple[int, ...]
    solver: dict
    output_dir: str
    mode: str = GroundTruth.RANDOM_PHASES.value
    max_runs: int = DEFAULT_MAX_RUNS

    def sigmas_for(self, n: int) -> list[float]:
        if "values" in self.sigma_spec:
            return [float(v) for v in self.sigma_spec["values"]]
        power = SIGMA_RULES[self.sigma_spec["rule"]]
        cs = self.sigma_spec["c"]
        cs = cs if isinstance(cs, list) else [cs]
        return [float(c) * n ** power for c in cs]

    def runs(self) -> list[tuple[int, float, float, int]]:
        out = []
        for n in self.n_list:
            for sigma, alpha, seed in itertools.product(self.sigmas_for(n), self.alpha_list, self.seeds):
                out.append((n, sigma, alpha, seed))
        return out

    def gpm_config(self, alpha: float) -> GpmConfig:
        return GpmConfig.from_dict({**self.solver, "alpha": alpha})


def _alpha(v) -> float:
    if isinstance(v, str) and v.lower() in ("inf", "infinity"):
        return math.inf
    return float(v)


def parse_sweep_config(doc: dict, overrides: dict | None = None) -> SweepConfig:
    """Validate a sweep document; ``overrides`` (from CLI flags) win over file values."""
    doc = {**doc, **{k: v for k, v in (overrides or {}).items() if v is not None}}
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SweepConfigError(f"schema_version must be {SCHEMA_VERSION}, got {doc.get('schema_version')!r}")
    known = {"schema_version", "n", "sigma", "alpha", "seeds", "mode", "solver", "output_dir", "max_runs"}
    unknown = set(doc) - known
    if unknown:
        raise SweepConfigError(f"unknown keys {sorted(unknown)}")
    try:
        n_list = tuple(int(n) for n in doc["n"])
        sigma = dict(doc["sigma"])
        alpha_list = tuple(_alpha(a) for a in doc.get("alpha", [4]))
        seeds = doc["seeds"]
        seeds = tuple(range(int(seeds["start"]), int(seeds["stop"]))) if isinstance(seeds, dict) \
            else tuple(int(s) for s in seeds)
    except (KeyError, TypeError, ValueError) as exc:
        raise SweepConfigError(f"bad sweep config: {exc!r}") from exc
    if not n_list or any(n < 1 for n in n_list):
        raise SweepConfigError("n must be a nonempty list of positive integers")
    if ("values" in sigma) == ("rule" in sigma):
        raise SweepConfigError("sigma needs exactly one of 'values' or 'rule'")
    if "rule" in sigma and (sigma["rule"] not in SIGMA_RULES or "c" not in sigma):
        raise SweepConfigError(f"sigma rule must be one of {sorted(SIGMA_RULES)} with a 'c' factor")
    if not alpha_list or not seeds:
        raise SweepConfigError("alpha and seeds must be nonempty")
    solver = dict(doc.get("solver", {}))
    solver.pop("alpha", None)
    cfg = SweepConfig(n_list=n_list, sigma_spec=sigma, alpha_list=alpha_list, seeds=seeds, solver=solver,
                      output_dir=str(doc.get("output_dir", "sweep-out")),
                      mode=str(GroundTruth(doc.get("mode", GroundTruth.RANDOM_PHASES.value)).value),
                      max_runs=int(doc.get("max_runs", DEFAULT_MAX_RUNS)))
    for a in alpha_list:
        try:
            cfg.gpm_config(a)
        except ValueError as exc:
            raise SweepConfigError(str(exc)) from exc
    if any(s < 0 for n in n_list for s in cfg.sigmas_for(n)):
        raise SweepConfigError("sigma values must be nonnegative")
    total = len(cfg.runs())
    if total > cfg.max_runs:
        raise SweepConfigError(f"sweep has {total} runs, above the cap of {cfg.max_runs}")
    return cfg


def load_sweep_config(path, overrides: dict | None = None) -> SweepConfig:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SweepConfigError(f"{path}: {exc}") from exc
    return parse_sweep_config(doc, overrides)


# ---------------------------------------------------------------- execution


def _one_run(args) -> tuple[dict, float]:
    n, sigma, alpha, seed, mode, solver = args
    t0 = time.perf_counter()
    try:
        inst = build_instance(n, sigma, seed, mode)
        cfg = GpmConfig.from_dict({**solver, "alpha": alpha})
        row = result_row(inst, solve_instance(inst, cfg))
    except Exception as exc:  # recorded per row; the sweep goes on
        row = {c: None for c in ROW_COLUMNS}
        row.update(n=n, sigma=sigma, alpha=alpha, seed=seed, error=f"{type(exc).__name__}: {exc}",
                   termination_reason="", bound_verdicts="")
    return row, time.perf_counter() - t0


def default_jobs() -> int:
    env = os.environ.get("PHASESYNC_JOBS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_sweep(cfg: SweepConfig, jobs: int | None = None) -> tuple[list[dict], list[float]]:
    jobs = default_jobs() if jobs is None else max(1, int(jobs))
    tasks = [(n, s, a, seed, cfg.mode, cfg.solver) for n, s, a, seed in cfg.runs()]
    if jobs == 1:
        out = [_one_run(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            out = list(ex.map(_one_run, tasks, chunksize=1))
    return [r for r, _ in out], [t for _, t in out]


def aggregate(rows: list[dict]) -> list[dict]:
    """Per (n, sigma, alpha) summaries; a pure function of the rows."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault((r["n"], r["sigma"], r["alpha"]), []).append(r)
    out = []
    for (n, sigma, alpha), rs in groups.items():
        ok = [r for r in rs if not r["error"]]
        entry = {"n": n, "sigma": sigma, "alpha": "inf" if math.isinf(alpha) else alpha, "runs": len(rs),
                 "errors": len(rs) - len(ok),
                 "runs_with_violations": sum(1 for r in ok if r["failed_checks"]),
                 "gate_pass": {g: sum(1 for r in ok if r[g]) for g in ("thm1_ok", "thm3_ok", "prop_ebcrit_ok")}}
        for col in AGG_STATS:
            vals = [float(r[col]) for r in ok if r[col] is not None]
            entry[col] = {"mean": statistics.fmean(vals) if vals else None,
                          "median": statistics.median(vals) if vals else None}
        fails: dict[str, int] = {}
        for r in ok:
            for item in r["bound_verdicts"].split(";"):
                name, _, verdict = item.partition("=")
                if verdict == "fail":
                    fails[name] = fails.get(name, 0) + 1
        entry["violations_by_check"] = dict(sorted(fails.items()))
        out.append(entry)
    return out


def write_sweep_outputs(out_dir, rows: list[dict], timings: list[float], cfg: SweepConfig | None = None) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_rows(out / "rows.csv", rows)
    # round-trip through the CSV so the aggregates match what a reader recomputes
    agg = aggregate(read_rows(out / "rows.csv"))
    doc = {"schema_version": SCHEMA_VERSION, "groups": agg}
    if cfg is not None:
        doc["config"] = {"n": list(cfg.n_list), "sigma": cfg.sigma_spec,
                         "alpha": ["inf" if math.isinf(a) else a for a in cfg.alpha_list],
                         "seeds": list(cfg.seeds), "mode": cfg.mode, "solver": cfg.solver}
    with open(out / "aggregates.json", "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
    with open(out / "timings.csv", "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(("n", "sigma", "alpha", "seed", "wall_seconds"))
        for r, t in zip(rows, timings):
            wr.writerow([_num(r["n"]), _num(r["sigma"]), _num(r["alpha"]), _num(r["seed"]), f"{t:.6f}"])
    return out
