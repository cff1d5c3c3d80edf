"""The generalized power method z <- normalize((I + (alpha/n) C) z).

``run_gpm`` records, at every iterate z^k, the objective, the quotient
distances to the ground truth, the fixed-point residual rho(z^k) and the
length of the step the method takes from z^k. The step is computed for the
final iterate too, so every record is complete.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math

import numpy as np

from . import diagnostics
from .core import ZeroPolicy, as_phase_vector, dist_l2, dist_linf, normalize_entrywise, objective
from .instance import Instance, NoiseStats, decode_array, encode_array, instance_checksum, noise_stats
from .spectral import eigenvector_estimator

log = logging.getLogger(__name__)

INFINITY = math.inf
TRACE_COLUMNS = ("k", "f", "d2", "dinf", "rho", "step_norm")
TERMINATION_REASONS = ("rho_tol", "step_tol", "max_iter")


class ConfigError(ValueError):
    pass


class NumericalError(ArithmeticError):
    def __init__(self, msg, iteration):
        super().__init__(f"{msg} at iteration {iteration}")
        self.iteration = iteration


class AscentViolation(AssertionError):
    pass


def _parse_alpha(alpha) -> float:
    if isinstance(alpha, str):
        if alpha.lower() in ("inf", "infinity"):
            return INFINITY
        alpha = float(alpha)
    return float(alpha)


@dataclasses.dataclass(frozen=True)
class GpmConfig:
    """Step size and stopping rules.

    ``step_tol=None`` means 1e-13 sqrt(n). A tolerance of 0 switches that
    criterion off in practice (only an exact fixed point triggers it).
    """

    alpha: float = 4.0
    max_iter: int = 10_000
    rho_tol: float = 1e-12
    step_tol: float | None = None
    zero_policy: ZeroPolicy = ZeroPolicy.PREVIOUS_ITERATE
    record_iterates: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alpha", _parse_alpha(self.alpha))
        object.__setattr__(self, "zero_policy", ZeroPolicy(self.zero_policy))
        if math.isnan(self.alpha) or not self.alpha >= 2:
            raise ConfigError(f"alpha must lie in [2, inf], got {self.alpha}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigError(f"max_iter must be a positive integer, got {self.max_iter}")
        if self.rho_tol < 0 or (self.step_tol is not None and self.step_tol < 0):
            raise ConfigError("tolerances must be nonnegative")

    def step_tol_for(self, n: int) -> float:
        return 1e-13 * math.sqrt(n) if self.step_tol is None else self.step_tol

    def to_dict(self) -> dict:
        return {"alpha": "inf" if math.isinf(self.alpha) else self.alpha, "max_iter": self.max_iter,
                "rho_tol": self.rho_tol, "step_tol": self.step_tol,
                "zero_policy": self.zero_policy.value, "record_iterates": self.record_iterates}

    @classmethod
    def from_dict(cls, d: dict) -> "GpmConfig":
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - fields
        if unknown:
            raise ConfigError(f"unknown solver options: {sorted(unknown)}")
        return cls(**d)


def gpm_step(C, z, alpha, zero_policy: ZeroPolicy | str = ZeroPolicy.PREVIOUS_ITERATE) -> np.ndarray:
    """One GPM update; ``alpha=inf`` gives the pure power update C z / |C z|."""
    C = np.asarray(C)
    z = np.asarray(z, dtype=complex)
    n = z.size
    if C.shape != (n, n):
        raise ValueError(f"dimension mismatch: matrix {C.shape} vs vector length {n}")
    alpha = _parse_alpha(alpha)
    if not alpha >= 2:
        raise ValueError(f"alpha must lie in [2, inf], got {alpha}")
    cz = C @ z
    w = cz if math.isinf(alpha) else z + (alpha / n) * cz
    return normalize_entrywise(w, zero_policy, previous=z)


@dataclasses.dataclass
class IterateTrace:
    """Per-iterate diagnostics of one GPM run (record k describes z^k)."""

    config: GpmConfig
    f: np.ndarray
    d2: np.ndarray
    dinf: np.ndarray
    rho: np.ndarray
    step_norm: np.ndarray
    z_init: np.ndarray
    z_final: np.ndarray
    termination_reason: str
    init_kind: str = "custom"
    iterates: np.ndarray | None = None
    instance_checksum: str | None = None
    n: int = 0

    @property
    def iterations(self) -> int:
        return len(self.f) - 1

    @property
    def k(self) -> np.ndarray:
        return np.arange(len(self.f))

    def rows(self) -> list[dict]:
        return [{"k": int(k), "f": float(self.f[k]), "d2": float(self.d2[k]), "dinf": float(self.dinf[k]),
                 "rho": float(self.rho[k]), "step_norm": float(self.step_norm[k])} for k in self.k]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(TRACE_COLUMNS)
            for r in self.rows():
                wr.writerow([r["k"]] + [repr(r[c]) for c in TRACE_COLUMNS[1:]])

    def to_dict(self) -> dict:
        d = {"n": self.n, "config": self.config.to_dict(), "init_kind": self.init_kind,
             "termination_reason": self.termination_reason, "iterations": self.iterations,
             "instance_checksum": self.instance_checksum,
             "rows": self.rows(), "z_init": encode_array(self.z_init), "z_final": encode_array(self.z_final),
             "iterates": None if self.iterates is None else encode_array(self.iterates)}
        return d

    def to_json(self, path, extra: dict | None = None) -> None:
        d = self.to_dict()
        if extra:
            d.update(extra)
        with open(path, "w") as fh:
            json.dump(d, fh, indent=1)
            fh.write("\n")

    @classmethod
    def from_dict(cls, d: dict) -> "IterateTrace":
        n = int(d["n"])
        rows = d["rows"]
        col = {c: np.array([float(r[c]) for r in rows]) for c in TRACE_COLUMNS[1:]}
        its = d.get("iterates")
        return cls(config=GpmConfig.from_dict(d["config"]), f=col["f"], d2=col["d2"], dinf=col["dinf"],
                   rho=col["rho"], step_norm=col["step_norm"], z_init=decode_array(d["z_init"], (n,)),
                   z_final=decode_array(d["z_final"], (n,)), termination_reason=d["termination_reason"],
                   init_kind=d.get("init_kind", "custom"),
                   iterates=None if its is None else decode_array(its, (len(rows), n)),
                   instance_checksum=d.get("instance_checksum"), n=n)

    @classmethod
    def from_json(cls, path) -> "IterateTrace":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _ascent_gate(stats: NoiseStats | None, alpha: float) -> bool:
    if stats is None:
        return False
    return stats.lambda_min + (0.0 if math.isinf(alpha) else stats.n / alpha) >= 0


def run_gpm(inst: Instance, init, cfg: GpmConfig = GpmConfig(), *, init_kind: str = "custom",
            stats: NoiseStats | None = None) -> IterateTrace:
    """Iterate from ``init`` until rho, step or iteration-count criterion fires.

    With ``stats`` supplied and alpha <= n/||Delta||_op, a drop of f by more
    than 1e-9 n^2 raises ``AscentViolation``; otherwise drops are only logged.
    """
    z = as_phase_vector(init, tol=1e-10).copy()
    C, n, alpha = inst.C, inst.n, cfg.alpha
    if z.size != n:
        raise ValueError(f"init has length {z.size}, instance has n={n}")
    step_tol = cfg.step_tol_for(n)
    enforce_ascent = _ascent_gate(stats, alpha)
    cols = {c: [] for c in TRACE_COLUMNS[1:]}
    its = [] if cfg.record_iterates else None
    z_init = z.copy()
    reason = "max_iter"
    k = 0
    while True:
        z_next = gpm_step(C, z, alpha, cfg.zero_policy)
        vals = {"f": objective(C, z), "d2": dist_l2(z, inst.z_star).value,
                "dinf": dist_linf(z, inst.z_star).value, "rho": diagnostics.rho(C, z, alpha),
                "step_norm": float(np.linalg.norm(z_next - z))}
        if not all(math.isfinite(v) for v in vals.values()) or not np.all(np.isfinite(z_next)):
            raise NumericalError("non-finite value", k)
        if cols["f"] and vals["f"] < cols["f"][-1] - 1e-9 * n * n:
            msg = f"objective decreased from {cols['f'][-1]:.12g} to {vals['f']:.12g} at k={k}"
            if enforce_ascent:
                raise AscentViolation(msg)
            log.info(msg)
        for c, v in vals.items():
            cols[c].append(v)
        if its is not None:
            its.append(z.copy())
        if vals["rho"] <= cfg.rho_tol * n:
            reason = "rho_tol"
            break
        if vals["step_norm"] <= step_tol:
            reason = "step_tol"
            break
        if k >= cfg.max_iter:
            break
        z = z_next
        k += 1
    return IterateTrace(config=cfg, **{c: np.array(v) for c, v in cols.items()}, z_init=z_init, z_final=z,
                        termination_reason=reason, init_kind=init_kind,
                        iterates=None if its is None else np.array(its),
                        instance_checksum=instance_checksum(inst), n=n)


@dataclasses.dataclass
class Solution:
    z: np.ndarray
    certified: bool
    trace: IterateTrace
    stats: NoiseStats
    criticality: diagnostics.CriticalityReport

    @property
    def label(self) -> str:
        return "certified" if self.certified else "candidate"


def solve_to_maximizer(inst: Instance, cfg: GpmConfig = GpmConfig(), stats: NoiseStats | None = None) -> Solution:
    """v_C initialization followed by GPM to a tight residual.

    The end point is labelled certified (the global maximizer up to phase)
    only when the noise gates of the linear-convergence result hold, alpha
    lies in [4, n/||Delta||_op), the run stopped on the residual test and
    the point passes the second-order check.
    """
    stats = noise_stats(inst) if stats is None else stats
    v = eigenvector_estimator(inst.C)
    trace = run_gpm(inst, v, cfg, init_kind="eigenvector", stats=stats)
    alpha = cfg.alpha if math.isfinite(cfg.alpha) else 4.0
    crit = diagnostics.second_order_check(inst.C, trace.z_final, alpha=alpha)
    certified = (stats.thm3_ok and 4 <= cfg.alpha and stats.alpha_below_cap(cfg.alpha)
                 and trace.termination_reason == "rho_tol" and crit.is_second_order)
    return Solution(trace.z_final, bool(certified), trace, stats, crit)
