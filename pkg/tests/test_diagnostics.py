import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_phases
from phasesync.core import dist_l2
from phasesync.diagnostics import (FAIL, NOT_APPLICABLE, PASS, bound_params, cost_to_go, criticality_matrix,
                                   envelope_rate, error_bound_to_maximizer, fit_rate, rate_window, rho,
                                   second_order_check, tangent_form, verify_run)
from phasesync.gpm import GpmConfig, gpm_step, run_gpm
from phasesync.instance import build_instance, noise_stats
from phasesync.spectral import eigenvector_estimator

GATED_CHECKS = ("initializer_distance", "l2_recursion", "mu_bound", "l2_trajectory", "linf_trajectory",
                "safeguard", "cost_to_go", "error_bound", "second_order_final", "error_bound_second_order",
                "linear_rate", "linear_rate_iterates", "termination_residual")


def hermitian(rng, n):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return A + A.conj().T


def run(n, sigma, seed, **cfg):
    inst = build_instance(n, sigma, seed)
    cfg = GpmConfig(record_iterates=True, **cfg)
    tr = run_gpm(inst, eigenvector_estimator(inst.C), cfg, init_kind="eigenvector")
    return inst, tr, verify_run(inst, tr)


class TestRho:
    def test_noiseless_truth(self):
        inst = build_instance(30, 0.0, 0)
        assert rho(inst.C, inst.z_star, 4) <= 1e-9 * 30

    def test_naive_oracle(self):
        rng = np.random.default_rng(1)
        C, z = hermitian(rng, 6), random_phases(rng, 6)
        alpha = 5.0
        ct = [[C[j, m] + (6 / alpha if j == m else 0) for m in range(6)] for j in range(6)]
        ctz = [sum(ct[j][m] * z[m] for m in range(6)) for j in range(6)]
        ref = math.sqrt(sum(abs(abs(ctz[j]) * z[j] - ctz[j]) ** 2 for j in range(6)))
        assert rho(C, z, alpha) == pytest.approx(ref, rel=1e-12)

    def test_fixed_point_safeguard(self):
        inst = build_instance(256, 256 ** 0.25 / 936, 0)
        tr = run_gpm(inst, eigenvector_estimator(inst.C), GpmConfig(step_tol=0.0))
        z = tr.z_final
        step = np.linalg.norm(gpm_step(inst.C, z, 4) - z)
        assert rho(inst.C, z, 4) <= 1.5 * 256 ** 1.25 * step + 1e-13 * 256 ** 1.5

    def test_error_bound_scalar(self):
        assert error_bound_to_maximizer(0.0, 10) == 0
        assert error_bound_to_maximizer(2.0, 16) == 1.0


class TestCriticality:
    def test_noiseless_matrix(self):
        inst = build_instance(12, 0.0, 2)
        S = criticality_matrix(inst.C, inst.z_star)
        ref = 12 * np.eye(12) - np.outer(inst.z_star, inst.z_star.conj())
        assert np.allclose(S, ref, atol=1e-12)

    def test_hermitian(self):
        rng = np.random.default_rng(3)
        S = criticality_matrix(hermitian(rng, 5), random_phases(rng, 5))
        assert np.allclose(S, S.conj().T, atol=1e-13)

    def test_residual_two_ways(self):
        rng = np.random.default_rng(4)
        C, z = hermitian(rng, 9), random_phases(rng, 9)
        cz = C @ z
        direct = np.linalg.norm(np.abs(cz) * z - cz)
        assert rho(C, z, math.inf) == pytest.approx(direct, rel=1e-10)
        matrix_form = np.linalg.norm((np.diag(np.abs(cz)) - C) @ z)
        assert matrix_form == pytest.approx(direct, rel=1e-10)
        # at a fixed point C z = |C z| z, and then S(z) z vanishes as well
        inst = build_instance(9, 0.0, 1)
        assert np.linalg.norm(criticality_matrix(inst.C, inst.z_star) @ inst.z_star) <= 1e-10

    def test_noiseless_second_order(self):
        n = 20
        inst = build_instance(n, 0.0, 5)
        rep = second_order_check(inst.C, inst.z_star)
        assert rep.min_tangent_eig == pytest.approx(n, rel=1e-6)
        assert rep.is_first_order and rep.is_second_order
        assert rep.min_tangent_eig_full == pytest.approx(0, abs=1e-9)

    def test_bilinear_form_oracle(self):
        rng = np.random.default_rng(6)
        for n in (3, 8, 25):
            C, z = hermitian(rng, n), random_phases(rng, n)
            M, S = tangent_form(C, z), criticality_matrix(C, z)
            for _ in range(100):
                t = rng.standard_normal(n)
                w = 1j * z * t
                ref = np.vdot(w, S @ w)
                assert abs(ref.imag) <= 1e-10 * max(1, abs(ref.real))
                assert t @ M @ t == pytest.approx(ref.real, rel=1e-10, abs=1e-10)
                assert np.all(np.abs((w * z.conj()).real) <= 1e-15)

    def test_non_critical_point(self):
        rng = np.random.default_rng(7)
        inst = build_instance(15, 0.2, 0)
        rep = second_order_check(inst.C, random_phases(rng, 15))
        assert not rep.is_first_order and not rep.is_second_order


class TestBoundParams:
    def test_alpha_four(self):
        n = 1024
        p = bound_params(n, 4, n / 16, 0.0)
        assert p.mu <= 5 / 9 + 1e-15
        assert p.nu == pytest.approx(2 / 9)
        assert bound_params(n, 4, 1.0, 0.0).mu < 5 / 9

    def test_alpha_infinity(self):
        n = 400
        p = bound_params(n, math.inf, n / 16, 0.0)
        assert p.mu == pytest.approx(1 / 7)
        assert p.l2_limit_factor == pytest.approx(1 / 3)
        assert p.gamma == 0

    def test_alpha_infinity_is_limit(self):
        n, d, z = 300, 4.0, 7.0
        lim = bound_params(n, math.inf, d, z)
        far = bound_params(n, 1e12, d, z)
        for f in ("mu", "nu", "gamma", "zeta", "omega"):
            assert getattr(far, f) == pytest.approx(getattr(lim, f), rel=1e-9, abs=1e-10)

    def test_zero_noise_degenerate(self):
        n = 50
        p = bound_params(n, 2, 0.0, 0.0)
        assert p.mu == pytest.approx(8 / 11) and p.gamma == pytest.approx(8 / 11)
        assert p.gamma_over_mu == 1 and p.linf_degenerate
        assert p.linf_trajectory(3, 0.1) == math.inf

    def test_formulas(self):
        n, a, d, dz = 200, 6.0, 3.0, 5.0
        p = bound_params(n, a, d, dz)
        den = 7 * a + 8
        mu = 16 * (a * d + n) / (den * n)
        nu = 2 * a / den
        assert p.mu == pytest.approx(mu) and p.nu == pytest.approx(nu)
        assert p.gamma == pytest.approx(16 / den)
        assert p.zeta == pytest.approx(128 * a * d * d / (den * n ** 1.5))
        assert p.omega == pytest.approx(16 * a / den * (nu / (1 - mu) * 8 * d * d / n ** 1.5 + dz / n))
        assert p.a1_cap == 3 * n and p.a2_cap == pytest.approx(1.5 * n ** 1.25)

    def test_rate_constants(self):
        n = 100
        p = bound_params(n, 4, 1.0, 1.0, a0=10.0)
        a_prime = 64 * 3 * n * (1.5 * n ** 1.25) ** 2 / (10.0 * n * n)
        assert p.lambda_nominal == pytest.approx((a_prime - 1) / a_prime)
        assert 0 < p.lambda_nominal < 1
        assert bound_params(n, 4, 1.0, 1.0).lambda_nominal is None

    def test_invalid(self):
        with pytest.raises(ValueError):
            bound_params(10, 1.0, 0, 0)

    @given(st.integers(4, 10_000), st.floats(2, 1e6), st.floats(0, 1))
    @settings(max_examples=200, deadline=None)
    def test_mu_below_one_under_gate(self, n, alpha, frac):
        # with ||Delta||_op <= n/16 and alpha >= 2, mu stays below one
        p = bound_params(n, alpha, frac * n / 16, 0.0)
        assert p.mu < 1 and 0 < p.nu < 2 / 7 + 1e-12


class TestRateHelpers:
    def test_fit_rate_geometric(self):
        g = 3.0 * 0.25 ** np.arange(12)
        assert fit_rate(g) == pytest.approx(0.25, rel=1e-12)

    def test_envelope_bounds_every_ratio(self):
        g = np.array([1.0, 0.3, 0.05, 0.02, 0.001])
        lam = envelope_rate(g)
        assert lam == pytest.approx(0.4)
        assert np.all(g[1:] <= lam * g[:-1] * (1 + 1e-15))
        # a least-squares slope sits below the largest ratio
        assert fit_rate(g) < lam

    def test_rate_window_stops_at_zero(self):
        g = np.array([1.0, 0.1, 0.01, 0.001, 0.0])
        lo, hi = rate_window(g)
        assert hi == 4 and lo == 0

    def test_cost_to_go_matches_objective_gap(self):
        inst = build_instance(40, 0.1, 3)
        tr = run_gpm(inst, eigenvector_estimator(inst.C), GpmConfig(step_tol=0.0))
        zhat = tr.z_final
        z = random_phases(np.random.default_rng(0), 40)
        direct = float(np.vdot(zhat, inst.C @ zhat).real - np.vdot(z, inst.C @ z).real)
        assert cost_to_go(inst.C, zhat, z, 4) == pytest.approx(direct, rel=1e-8)


class TestVerify:
    def test_noiseless_all_pass(self):
        inst, tr, rep = run(50, 0.0, 1)
        assert rep.failed == []
        for c in rep.checks:
            if c.verdict == PASS:
                assert c.worst_margin >= 0

    def test_gated_gaussian_run(self):
        n = 100
        inst, tr, rep = run(n, math.sqrt(n) / 48, 2)
        assert noise_stats(inst).thm1_ok
        for name in ("initializer_distance", "l2_recursion", "mu_bound", "l2_trajectory", "linf_trajectory"):
            assert rep.check(name).verdict == PASS, name
        assert rep.check("error_bound").verdict == NOT_APPLICABLE  # thm3 gate is off at this noise

    def test_strict_gate_run(self):
        n = 256
        inst, tr, rep = run(n, n ** 0.25 / 936, 0, step_tol=0.0)
        assert rep.failed == []
        for name in ("cost_to_go", "error_bound", "second_order_final", "linear_rate", "safeguard"):
            assert rep.check(name).verdict == PASS, name
        assert rep.lambda_hat is not None and rep.lambda_hat < 1
        json.dumps(rep.to_dict())

    @pytest.mark.parametrize("sigma", [5.0, 40.0])
    def test_gating_soundness(self, sigma):
        inst, tr, rep = run(60, sigma, 3)
        for name in GATED_CHECKS:
            assert rep.check(name).verdict == NOT_APPLICABLE, name
        assert rep.check("trace_consistency").verdict == PASS

    def test_alpha_cap_ratio_logged(self):
        inst, tr, rep = run(60, 0.3, 1)
        st = noise_stats(inst)
        assert rep.extra["alpha_cap_ratio"] == pytest.approx(4 * st.delta_op / 60, rel=1e-15)
        assert (rep.extra["alpha_cap_ratio"] < 1) == st.alpha_below_cap(4)
        assert run(20, 0.0, 1)[2].extra["alpha_cap_ratio"] == 0.0

    def test_random_init_disables_gated_checks(self):
        inst = build_instance(100, 0.05, 0)
        tr = run_gpm(inst, random_phases(np.random.default_rng(0), 100), GpmConfig(record_iterates=True))
        rep = verify_run(inst, tr)
        assert rep.check("l2_recursion").verdict == NOT_APPLICABLE
        assert rep.check("sufficient_ascent").verdict == PASS

    def test_tampered_trace(self):
        inst, tr, _ = run(40, 0.05, 1)
        tr.f[1] -= 1.0
        rep = verify_run(inst, tr)
        assert rep.check("sufficient_ascent").verdict == FAIL
        assert rep.check("trace_consistency").verdict == FAIL

    def test_wrong_instance(self):
        _, tr, _ = run(30, 0.05, 1)
        with pytest.raises(ValueError):
            verify_run(build_instance(30, 0.05, 2), tr)
        with pytest.raises(ValueError):
            verify_run(build_instance(31, 0.05, 1), tr)

    def test_without_iterates(self):
        inst = build_instance(256, 256 ** 0.25 / 936, 1)
        tr = run_gpm(inst, eigenvector_estimator(inst.C), GpmConfig(step_tol=0.0), init_kind="eigenvector")
        rep = verify_run(inst, tr)
        assert rep.check("trace_consistency").verdict == NOT_APPLICABLE
        assert rep.check("error_bound").verdict == NOT_APPLICABLE
        assert rep.check("safeguard").verdict == PASS
        assert rep.failed == []

    def test_summary_lists_every_check(self):
        inst, tr, rep = run(30, 0.1, 0)
        text = rep.summary()
        for c in rep.checks:
            assert c.name in text

    def test_error_bound_perturbed_points(self):
        n = 256
        inst, tr, rep = run(n, n ** 0.25 / 936, 2, step_tol=0.0)
        zhat = tr.z_final
        rng = np.random.default_rng(0)
        for _ in range(20):
            u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            zp = zhat + 1e-3 * u
            zp /= np.abs(zp)
            assert dist_l2(zp, zhat).value <= 8 / n * (rho(inst.C, zp, 4) + tr.rho[-1]) + 1e-13 * math.sqrt(n)
