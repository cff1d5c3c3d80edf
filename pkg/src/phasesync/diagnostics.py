"""Certificates and bound evaluators for GPM runs.

rho(z) = ||(Diag(|C~ z|) - C~) z||_2 with C~ = C + (n/alpha) I vanishes
exactly at fixed points of the GPM map; under small noise it also bounds
the distance to the global maximizer by (8/n) rho(z).
"""

from __future__ import annotations

import dataclasses
import json
import math
from typing import TYPE_CHECKING

import numpy as np

from .core import dist_l2, objective_gap

if TYPE_CHECKING:
    from .gpm import GpmConfig, IterateTrace
    from .instance import Instance, NoiseStats


def _shift(n: int, alpha: float) -> float:
    return 0.0 if math.isinf(alpha) else n / alpha


def rho(C, z, alpha) -> float:
    C = np.asarray(C)
    z = np.asarray(z, dtype=complex)
    n = z.size
    if C.shape != (n, n):
        raise ValueError(f"dimension mismatch: matrix {C.shape} vs vector length {n}")
    ctz = C @ z + _shift(n, float(alpha)) * z
    return float(np.linalg.norm(np.abs(ctz) * z - ctz))


def error_bound_to_maximizer(rho_val: float, n: int) -> float:
    """Certified d_2 distance to the global maximizer: 8 rho / n.

    Valid only under the caller's hypotheses (small noise, alpha in
    [4, n/||Delta||_op), the point within sqrt(n)/2 of the truth).
    """
    return 8.0 * rho_val / n


def criticality_matrix(C, z) -> np.ndarray:
    """S(z) = Re{Diag(diag(C z z^H))} - C."""
    C = np.asarray(C)
    z = np.asarray(z, dtype=complex)
    d = ((C @ z) * z.conj()).real
    S = -np.array(C, dtype=complex)
    S[np.diag_indices_from(S)] += d
    return S


def tangent_form(C, z) -> np.ndarray:
    """Real symmetric M with t^T M t = w^H S(z) w for w = i Diag(z) t, t real."""
    z = np.asarray(z, dtype=complex)
    S = criticality_matrix(C, z)
    M = (z.conj()[:, None] * S * z[None, :]).real
    return 0.5 * (M + M.T)


def _drop_phase_direction(M: np.ndarray) -> np.ndarray:
    """Restrict M to the complement of the all-ones vector (global phase).

    M 1 = 0 holds for every z, so this direction carries a trivial zero
    eigenvalue; a Householder reflection mapping 1/sqrt(n) to e_1 removes it.
    """
    n = M.shape[0]
    u = np.full(n, 1 / math.sqrt(n))
    u[0] -= 1.0
    c = float(u @ u)
    if c == 0:
        return M[1:, 1:]
    Mu = M @ u
    uMu = float(u @ Mu)
    H = M - (2 / c) * (np.outer(u, Mu) + np.outer(Mu, u)) + (4 * uMu / c ** 2) * np.outer(u, u)
    H = H[1:, 1:]
    return 0.5 * (H + H.T)


@dataclasses.dataclass(frozen=True)
class CriticalityReport:
    rho: float
    min_tangent_eig: float
    min_tangent_eig_full: float
    is_first_order: bool
    is_second_order: bool


def second_order_check(C, z, tol: float = 1e-8, alpha: float = 4.0) -> CriticalityReport:
    """First- and second-order criticality of z in T^n.

    ``min_tangent_eig`` is the smallest eigenvalue of the tangent form on
    directions orthogonal to the global-phase direction (the quotient);
    ``min_tangent_eig_full`` includes that direction and is therefore never
    above zero by more than rounding. Both thresholds scale with n.
    """
    z = np.asarray(z, dtype=complex)
    n = z.size
    M = tangent_form(C, z)
    try:
        full = float(np.linalg.eigvalsh(M)[0])
        q = float(np.linalg.eigvalsh(_drop_phase_direction(M))[0]) if n > 1 else math.inf
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"symmetric eigensolve failed: {exc}") from exc
    r = rho(C, z, alpha)
    first = r <= tol * n
    return CriticalityReport(rho=r, min_tangent_eig=q, min_tangent_eig_full=full,
                             is_first_order=first, is_second_order=first and min(q, full) >= -tol * n)


@dataclasses.dataclass(frozen=True)
class BoundParams:
    n: int
    alpha: float
    delta_op: float
    delta_zstar_inf: float
    mu: float
    nu: float
    gamma: float
    zeta: float
    omega: float
    a1_cap: float
    a2_cap: float
    a0: float | None = None
    lambda_nominal: float | None = None
    a_nominal: float | None = None

    @property
    def mu_below_one(self) -> bool:
        return self.mu < 1

    @property
    def gamma_over_mu(self) -> float:
        """n / (alpha ||Delta||_op + n), in closed form so that it is exactly 1 without noise."""
        if math.isinf(self.alpha):
            return 0.0
        return self.n / (self.alpha * self.delta_op + self.n)

    @property
    def linf_degenerate(self) -> bool:
        """gamma/mu >= 1 (no noise): the l_inf closed form divides by zero."""
        return self.gamma_over_mu >= 1

    @property
    def l2_limit_factor(self) -> float:
        """nu / (1 - mu): asymptotic multiplier of 8 ||Delta||_op / sqrt(n)."""
        return self.nu / (1 - self.mu) if self.mu < 1 else math.inf

    def l2_offset(self) -> float:
        return 8 * self.delta_op / math.sqrt(self.n)

    def l2_recursion(self, d_prev: float) -> float:
        return self.mu * d_prev + self.nu * self.l2_offset()

    def l2_trajectory(self, k_next: int, d0: float) -> float:
        """Bound on d_2(z^{k_next}, z*) for k_next >= 1."""
        return self.mu ** k_next * d0 + self.l2_limit_factor * self.l2_offset()

    def linf_trajectory(self, k_next: int, dinf0: float) -> float:
        """Bound on d_inf(z^{k_next}, z*) for k_next >= 1."""
        k = k_next - 1
        if self.linf_degenerate:
            return math.inf
        mid = self.zeta * self.mu ** k / (1 - self.gamma_over_mu)
        return self.gamma ** k_next * dinf0 + mid + self.omega / (1 - self.gamma)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["alpha"] = "inf" if math.isinf(self.alpha) else self.alpha
        d.update(mu_below_one=self.mu_below_one, gamma_over_mu=self.gamma_over_mu,
                 linf_degenerate=self.linf_degenerate)
        return d


def bound_params(n: int, alpha: float, delta_op: float, delta_zstar_inf: float,
                 a0: float | None = None) -> BoundParams:
    """Contraction constants of the l_2 / l_inf error recursions and rate caps.

    ``alpha=inf`` takes the limits of every formula. ``a0`` (the smallest
    eigenvalue of Delta + (n/alpha) I) is needed for the nominal linear rate
    and is left to the caller because it requires Delta's spectrum.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not alpha >= 2:
        raise ValueError(f"alpha must be >= 2, got {alpha}")
    d = delta_op
    if math.isinf(alpha):
        mu = 16 * d / (7 * n)
        nu = 2 / 7
        gamma = 0.0
        pre = 16 / 7
    else:
        den = 7 * alpha + 8
        mu = 16 * (alpha * d + n) / (den * n)
        nu = 2 * alpha / den
        gamma = 16 / den
        pre = 16 * alpha / den
    zeta = pre * 8 * d * d / n ** 1.5
    limit = nu / (1 - mu) if mu < 1 else math.inf
    omega = pre * (limit * 8 * d * d / n ** 1.5 + delta_zstar_inf / n) if mu < 1 else math.inf
    a1, a2 = 3.0 * n, 1.5 * n ** 1.25
    lam = a_nom = None
    if a0 is not None and a0 > 0:
        a_prime = 64 * a1 * a2 * a2 / (a0 * n * n)
        lam = (a_prime - 1) / a_prime if a_prime > 1 else 0.0
        a_nom = math.sqrt(64 * a2 * a2 / (a0 * n * n))
    return BoundParams(n=n, alpha=float(alpha), delta_op=d, delta_zstar_inf=delta_zstar_inf, mu=mu, nu=nu,
                       gamma=gamma, zeta=zeta, omega=omega, a1_cap=a1, a2_cap=a2, a0=a0,
                       lambda_nominal=lam, a_nominal=a_nom)


# ---------------------------------------------------------------- run verification

PASS, FAIL, NOT_APPLICABLE = "pass", "fail", "not applicable"


@dataclasses.dataclass
class CheckResult:
    name: str
    hypotheses: str
    verdict: str
    worst_margin: float | None = None
    evaluated: int = 0
    note: str = ""

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclasses.dataclass
class BoundReport:
    n: int
    sigma: float
    seed: int
    params: BoundParams
    noise: dict
    checks: list[CheckResult]
    lambda_hat: float | None
    extra: dict = dataclasses.field(default_factory=dict)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def failed(self) -> list[str]:
        return [c.name for c in self.checks if c.verdict == FAIL]

    @property
    def ok(self) -> bool:
        return not self.failed

    def verdicts(self) -> dict[str, str]:
        return {c.name: c.verdict for c in self.checks}

    def to_dict(self) -> dict:
        return {"n": self.n, "sigma": self.sigma, "seed": self.seed, "params": self.params.to_dict(),
                "noise": self.noise, "lambda_hat": self.lambda_hat,
                "lambda_nominal": self.params.lambda_nominal, "extra": self.extra,
                "checks": [c.to_dict() for c in self.checks]}

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")

    def summary(self) -> str:
        p = self.params
        lines = [f"n={self.n} sigma={self.sigma:g} seed={self.seed} alpha={p.alpha:g}",
                 f"||Delta||_op={p.delta_op:.6g} ||Delta z*||_inf={p.delta_zstar_inf:.6g} "
                 + " ".join(f"{k}={self.noise[k]}" for k in ("thm1_ok", "thm3_ok", "prop_ebcrit_ok")),
                 f"mu={p.mu:.6g} nu={p.nu:.6g} gamma={p.gamma:.6g} zeta={p.zeta:.6g} omega={p.omega:.6g}",
                 f"lambda_hat={_fmt(self.lambda_hat)} lambda_nominal={_fmt(p.lambda_nominal)}", ""]
        w = max(len(c.name) for c in self.checks)
        for c in self.checks:
            margin = "" if c.worst_margin is None else f" worst margin {c.worst_margin:.3e}"
            lines.append(f"{c.name:<{w}}  {c.verdict:<14}{margin}  [{c.hypotheses}]"
                         + (f" {c.note}" if c.note else ""))
        return "\n".join(lines)


def _fmt(x) -> str:
    return "n/a" if x is None else f"{x:.6g}"


def _margins(name, hyp, applicable, lhs, rhs, note="") -> CheckResult:
    if not applicable:
        return CheckResult(name, hyp, NOT_APPLICABLE, note=note)
    lhs, rhs = np.atleast_1d(np.asarray(lhs, float)), np.atleast_1d(np.asarray(rhs, float))
    if lhs.size == 0:
        return CheckResult(name, hyp, NOT_APPLICABLE, note="nothing to evaluate")
    m = rhs - lhs
    worst = float(np.min(m))
    return CheckResult(name, hyp, PASS if worst >= 0 else FAIL, worst, int(m.size), note)


def cost_to_go(C, zhat, z, alpha) -> float:
    """f(zhat) - f(z) for z on the torus and a fixed point zhat, as a quadratic form.

    For a fixed point zhat, f(zhat) - f(z) = e^H (Diag(|C~ zhat|) - C~) e with
    e = z' - zhat and z' the copy of z phase-aligned to zhat. Unlike the
    difference of the two objective values, this keeps full relative
    accuracy when z is close to zhat. If zhat is only approximately a fixed
    point the form is off by at most 2 ||e||_2 rho(zhat).
    """
    C = np.asarray(C)
    zhat = np.asarray(zhat, dtype=complex)
    z = np.asarray(z, dtype=complex)
    n = z.size
    ctz = C @ zhat + _shift(n, alpha) * zhat
    inner = np.vdot(zhat, z)
    e = (z * np.conj(inner / abs(inner)) if inner != 0 else z) - zhat
    Se = np.abs(ctz) * e - (C @ e + _shift(n, alpha) * e)
    return float(np.vdot(e, Se).real)


def envelope_rate(gaps) -> float:
    """Smallest lambda with gap[k+1] <= lambda gap[k] along the sequence."""
    g = np.asarray(gaps, float)
    if g.size < 2:
        return math.nan
    return float((g[1:] / g[:-1]).max())


def fit_rate(gaps, floor: float = 0.0) -> float:
    """exp of the least-squares slope of log(gap + floor) against k."""
    g = np.asarray(gaps, float)
    if g.size < 2:
        return math.nan
    k = np.arange(g.size)
    slope = np.polyfit(k, np.log(g + floor), 1)[0]
    return float(math.exp(slope))


def rate_window(gaps) -> tuple[int, int]:
    """Index range [lo, hi) of the fitted tail of a cost-to-go sequence.

    The resolvable part is the leading run of strictly positive gaps (the
    end point itself has gap 0); the tail is its last max(10, 20%) entries.
    """
    g = np.asarray(gaps, float)
    nonpos = np.flatnonzero(g <= 0)
    hi = int(nonpos[0]) if nonpos.size else g.size
    length = max(10, int(math.ceil(0.2 * hi)))
    return max(0, hi - length), hi


def _tilde(C, n, alpha):
    return C + _shift(n, alpha) * np.eye(n)


def verify_run(inst: "Instance", trace: "IterateTrace", cfg: "GpmConfig | None" = None,
               stats: "NoiseStats | None" = None) -> BoundReport:
    """Evaluate every bound whose numeric hypotheses hold for this run.

    Checks whose hypotheses fail are reported "not applicable", never
    "fail". Scalar inequalities use the stored trace values; those that
    need the iterates (distances to the end point) are skipped when the
    trace does not carry them, and end-point checks are skipped when
    ``trace.z_final`` is not finite (a trace rebuilt from CSV scalars).
    """
    from .gpm import gpm_step
    from .instance import instance_checksum, noise_stats

    cfg = trace.config if cfg is None else cfg
    n = inst.n
    if trace.n != n or trace.z_final.size != n:
        raise ValueError(f"trace is for n={trace.n}, instance has n={n}")
    if trace.instance_checksum is not None and trace.instance_checksum != instance_checksum(inst):
        raise ValueError("trace was produced on a different instance")
    stats = noise_stats(inst) if stats is None else stats
    alpha = cfg.alpha
    C = inst.C
    sn = math.sqrt(n)
    a0 = stats.lambda_min + _shift(n, alpha)
    p = bound_params(n, alpha, stats.delta_op, stats.delta_zstar_inf, a0=a0)

    f, d2, dinf, rh, step = trace.f, trace.d2, trace.dinf, trace.rho, trace.step_norm
    K = trace.iterations
    its = trace.iterates
    zf = trace.z_final
    is_vc = trace.init_kind == "eigenvector"
    has_end = bool(np.all(np.isfinite(zf)))  # scalar-only traces carry no end point
    converged = trace.termination_reason in ("rho_tol", "step_tol") and has_end
    dist_floor = 1e-13 * sn
    rho_floor = 1e-13 * n ** 1.5
    fslack = 1e-9 * n * n

    h1 = stats.thm1_ok and alpha >= 2 and is_vc
    h3 = stats.thm3_ok and alpha >= 4 and stats.alpha_below_cap(alpha) and is_vc
    hasc = a0 >= 0
    h1s = "||Delta||_op<=n/16, alpha>=2, z0=v_C"
    h3s = "||Delta||_op<=n^(3/4)/312, ||Delta z*||_inf<=n/24, 4<=alpha<n/||Delta||_op, z0=v_C"
    checks: list[CheckResult] = []
    # alpha ||Delta||_op / n: how close alpha sits to the strict cap n/||Delta||_op
    extra: dict = {"a0": a0, "alpha_cap_ratio": alpha * stats.delta_op / n if stats.delta_op else 0.0}

    if its is not None:
        rec_f = np.array([float(np.vdot(z, C @ z).real) for z in its])
        rec_d2 = np.array([dist_l2(z, inst.z_star).value for z in its])
        rec_rho = np.array([rho(C, z, alpha) for z in its])
        nxt = [gpm_step(C, z, alpha, cfg.zero_policy) for z in its]
        rec_step = np.array([np.linalg.norm(zn - z) for zn, z in zip(nxt, its)])
        map_err = np.array([np.linalg.norm(its[k + 1] - nxt[k]) for k in range(K)])
        dev = np.concatenate([np.abs(rec_f - f) / (1e-9 * n * n), np.abs(rec_d2 - d2) / (1e-9 * sn),
                              np.abs(rec_rho - rh) / (1e-9 * n + 1e-6 * rh),
                              np.abs(rec_step - step) / (1e-9 * sn), map_err / (1e-12 * sn),
                              [np.linalg.norm(its[-1] - zf) / (1e-15 + 1e-12 * sn)]])
        checks.append(_margins("trace_consistency", "iterates recorded", True, dev, np.ones_like(dev),
                               "stored scalars and GPM map recomputed from the iterates"))
    else:
        checks.append(CheckResult("trace_consistency", "iterates recorded", NOT_APPLICABLE,
                                  note="iterates not recorded"))

    # v_C comes from an eigenvector accurate to a residual of 1e-10 ||C||_F, not an exact one
    eig_floor = 1e-8 * sn
    checks.append(_margins("initializer_distance", h1s, h1, d2[:1], 8 * stats.delta_op / sn * (1 + 1e-9) + eig_floor))
    checks.append(_margins("l2_recursion", h1s, h1 and K > 0, d2[1:],
                           p.mu * d2[:-1] + p.nu * p.l2_offset() + dist_floor))
    checks.append(_margins("mu_bound", h1s + ", alpha=4", h1 and alpha == 4, [p.mu], [5 / 9]))
    kk = np.arange(1, K + 1)
    traj_ok = h1 and p.mu_below_one and K > 0
    linf_ok = h1 and K > 0 and not p.linf_degenerate
    checks.append(_margins("l2_trajectory", h1s, traj_ok, d2[1:],
                           [p.l2_trajectory(k, d2[0]) + dist_floor for k in kk] if traj_ok else []))
    checks.append(_margins("linf_trajectory", h1s, linf_ok, dinf[1:],
                           [p.linf_trajectory(k, dinf[0]) + 1e-10 + dist_floor for k in kk] if linf_ok else [],
                           "" if not p.linf_degenerate else "gamma/mu >= 1"))

    above_truth = has_end and objective_gap(C, zf, inst.z_star) >= 0
    d2_final = dist_l2(zf, inst.z_star).value if has_end else math.nan
    checks.append(_margins("maximizer_closeness", "f(z_final)>=f(z*)", above_truth,
                           [d2_final], [4 * stats.delta_op / sn + 1e-9]))

    dstep = step[:-1]
    checks.append(_margins("sufficient_ascent", "alpha<=n/||Delta||_op (a0>=0)", hasc and K > 0,
                           -(f[1:] - f[:-1]), -(a0 * dstep ** 2) + fslack))
    checks.append(_margins("monotone_ascent", "alpha<=n/||Delta||_op", hasc and K > 0, f[:-1], f[1:] + fslack))
    checks.append(_margins("safeguard", h3s, h3, rh, p.a2_cap * step + rho_floor))

    need = "stopped on a tolerance, iterates recorded"
    full = h3 and converged and its is not None
    gaps = d_end = None
    if its is not None:
        gaps = np.array([cost_to_go(C, zf, z, alpha) for z in its])
        d_end = np.array([dist_l2(z, zf).value for z in its])
    rho_final = rh[-1]
    if full:
        form_err = 2 * d_end * rho_final + 1e-12 * n * d_end ** 2
        checks.append(_margins("cost_to_go", h3s + "; " + need, True, gaps, p.a1_cap * d_end ** 2 + form_err))
        near = d2 <= sn / 2
        checks.append(_margins("error_bound", h3s + ", d2(z,z*)<=sqrt(n)/2; " + need, bool(near.any()),
                               d_end[near], 8 / n * (rh[near] + rho_final) + dist_floor,
                               "end point stands in for the maximizer; its own certified radius is added"))
    else:
        checks.append(CheckResult("cost_to_go", h3s + "; " + need, NOT_APPLICABLE))
        checks.append(CheckResult("error_bound", h3s + "; " + need, NOT_APPLICABLE))

    crit = None
    if h3 and converged:
        crit = second_order_check(C, zf, tol=1e-8, alpha=alpha)
        checks.append(_margins("second_order_final", h3s + "; converged", True,
                               [-crit.min_tangent_eig, crit.rho], [1e-8 * n, 1e-10 * n]))
        ct = _tilde(C, n, alpha)
        ctz = ct @ zf
        cz = C @ zf
        ident = [np.linalg.norm(np.abs(ctz) * zf - ctz), np.linalg.norm(np.abs(cz) * zf - cz),
                 abs(float(np.vdot(zf, cz).real) - float(np.abs(cz).sum()))]
        checks.append(_margins("critical_point_identities", "second-order critical end point", crit.is_second_order,
                               ident, [1e-10 * n, 1e-10 * n, 1e-8 * float(np.abs(cz).sum())]))
        extra["min_tangent_eig"] = crit.min_tangent_eig
        extra["a1_tight"] = float(np.abs(np.linalg.eigvalsh(ct)).max() + np.abs(ctz).max())
        if its is not None:
            extra["a2_tight"] = float(max(np.abs(ct @ z).max() for z in its))
    else:
        checks.append(CheckResult("second_order_final", h3s + "; converged", NOT_APPLICABLE))
        checks.append(CheckResult("critical_point_identities", "second-order critical end point", NOT_APPLICABLE))

    ebs = "||Delta||_op<=n^(2/3)/32768, ||Delta z*||_inf<=n/24, alpha>=4; second-order critical end point"
    if stats.prop_ebcrit_ok and alpha >= 4 and full and crit is not None and crit.is_second_order:
        near = d2 <= sn / 2
        checks.append(_margins("error_bound_second_order", ebs, bool(near.any()),
                               d_end[near], 8 / n * (rh[near] + rho_final) + dist_floor))
    else:
        checks.append(CheckResult("error_bound_second_order", ebs, NOT_APPLICABLE))

    lam_hat = None
    rate_hyp = h3s + "; " + need
    if full:
        lo, hi = rate_window(gaps)
        if hi - lo >= 2:
            tail = gaps[lo:hi]
            ratios = tail[1:] / tail[:-1]
            lam_hat = envelope_rate(tail)
            lam_ls = fit_rate(tail)
            lam_nom = p.lambda_nominal if p.lambda_nominal is not None else 1.0
            extra.update(rate_window=[lo, hi], rate_ratios=ratios.tolist(), lambda_ls=lam_ls,
                         ratios_above_ls=int(np.sum(ratios > lam_ls)))
            head = gaps[:hi + 1] if hi < gaps.size else gaps
            # ratios <= lambda_hat holds by construction; the content is lambda_hat < 1
            below_one = np.nextafter(1.0, 0.0)
            lhs = np.concatenate([ratios, ratios, [lam_hat], np.diff(head), [head.min()]])
            rhs = np.concatenate([np.full(ratios.size, lam_hat), np.full(ratios.size, lam_nom), [below_one],
                                  np.zeros(head.size - 1), [1e-10 * n * n]])
            checks.append(_margins("linear_rate", rate_hyp, True, lhs, rhs,
                                   f"tail k in [{lo},{hi}), lambda_hat={lam_hat:.6g}, "
                                   f"least-squares rate={lam_ls:.6g}"))
        else:
            checks.append(CheckResult("linear_rate", rate_hyp, NOT_APPLICABLE,
                                      note="fewer than two resolvable points"))
    else:
        checks.append(CheckResult("linear_rate", rate_hyp, NOT_APPLICABLE))
    if full and p.a_nominal is not None:
        kk = np.arange(gaps.size)
        checks.append(_margins("linear_rate_iterates", rate_hyp, True, d_end,
                               p.a_nominal * math.sqrt(max(gaps[0], 0.0)) * p.lambda_nominal ** (kk / 2)
                               + dist_floor))
    else:
        checks.append(CheckResult("linear_rate_iterates", rate_hyp, NOT_APPLICABLE))

    step_tol = cfg.step_tol_for(n)
    stopped = trace.termination_reason in ("rho_tol", "step_tol")
    checks.append(_margins("termination_residual", h3s + "; stopped on a tolerance", h3 and stopped,
                           [rho_final], [max(cfg.rho_tol * n, p.a2_cap * step_tol) + rho_floor]))

    return BoundReport(n=n, sigma=inst.sigma, seed=inst.seed, params=p, noise=stats.to_dict(),
                       checks=checks, lambda_hat=lam_hat, extra=extra)
