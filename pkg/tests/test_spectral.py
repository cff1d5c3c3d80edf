import math

import numpy as np
import pytest

from oracles import random_phases
from phasesync.core import dist_l2, is_phase_vector
from phasesync.instance import assemble, build_instance, noise_stats
from phasesync.spectral import (DegenerateFallbackError, PowerIterationError, eigenvector_estimator,
                                estimator_from_vector, leading_eigenvector)


class TestLeadingEigenvector:
    def test_rank_one(self):
        inst = build_instance(40, 0.0, 3)
        e = leading_eigenvector(inst.C)
        assert np.allclose(np.abs(e.vector), 1 / math.sqrt(40), atol=1e-9)
        assert abs(np.vdot(e.vector, inst.z_star)) == pytest.approx(math.sqrt(40), abs=1e-8)
        assert e.value == pytest.approx(40)

    def test_two_by_two(self):
        e = leading_eigenvector(np.array([[1, 1], [1, 1]], complex))
        assert e.value == pytest.approx(2)
        assert abs(np.vdot(e.vector, np.ones(2) / math.sqrt(2))) == pytest.approx(1, abs=1e-10)

    def test_matches_dense_eigensolver(self):
        inst = build_instance(30, 0.8, 5)
        e = leading_eigenvector(inst.C)
        w, U = np.linalg.eigh(inst.C)
        assert e.value == pytest.approx(w[-1], rel=1e-8)
        assert abs(np.vdot(U[:, -1], e.vector)) == pytest.approx(1, abs=1e-8)

    def test_algebraically_largest_not_largest_magnitude(self):
        C = np.diag([1.0, -5.0, 0.5]).astype(complex)
        e = leading_eigenvector(C)
        assert e.value == pytest.approx(1.0)
        assert abs(e.vector[0]) == pytest.approx(1, abs=1e-8)

    def test_residual_contract(self):
        inst = build_instance(25, 0.3, 1)
        e = leading_eigenvector(inst.C, tol=1e-10)
        r = np.linalg.norm(inst.C @ e.vector - e.value * e.vector)
        assert r <= 1e-10 * np.linalg.norm(inst.C)
        assert e.residual == pytest.approx(r, rel=1e-6, abs=1e-14)

    def test_failure_carries_best_iterate(self):
        inst = build_instance(30, 5.0, 0)
        with pytest.raises(PowerIterationError) as info:
            leading_eigenvector(inst.C, tol=1e-14, max_iter=3)
        err = info.value
        assert err.iterations == 3 and err.best_vector.shape == (30,) and err.residual > 0

    def test_bad_input(self):
        with pytest.raises(ValueError):
            leading_eigenvector(np.ones((2, 3)))
        with pytest.raises(ValueError):
            leading_eigenvector(np.eye(2), tol=0)


class TestEstimator:
    def test_noiseless_recovery(self):
        inst = build_instance(20, 0.0, 0, "all-ones")
        v = eigenvector_estimator(inst.C)
        assert dist_l2(v, inst.z_star).value <= 1e-8
        assert np.allclose(v, v[0])

    def test_plain_branch(self):
        rng = np.random.default_rng(1)
        u = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        v, mask = estimator_from_vector(u, np.ones(6))
        assert not mask.any()
        assert np.array_equal(v, u / np.abs(u))

    def test_fallback_branch(self):
        u = np.array([0.6, 1e-20, -0.8j])
        v, mask = estimator_from_vector(u, np.ones(3))
        ahu = np.vdot(np.ones(3), u)
        assert mask.tolist() == [False, True, False]
        assert v[1] == pytest.approx(ahu / abs(ahu))
        assert is_phase_vector(v)

    def test_degenerate_fallback(self):
        with pytest.raises(DegenerateFallbackError):
            estimator_from_vector(np.array([1.0, 0.0, -1.0]), np.ones(3))

    def test_default_retries_with_random_vector(self):
        # eigenvector (1, 0, -1)/sqrt(2) is orthogonal to the all-ones fallback
        C = np.diag([1.0, 0.0, 1.0]).astype(complex)
        C[0, 2] = C[2, 0] = -1.0
        v = eigenvector_estimator(C)
        assert is_phase_vector(v)
        assert v[0] == pytest.approx(-v[2])

    @pytest.mark.parametrize("seed", range(10))
    def test_initializer_bound(self, seed):
        n = 100
        inst = build_instance(n, math.sqrt(n) / 48, seed)
        st = noise_stats(inst)
        if not st.thm1_ok:
            pytest.skip("noise gate not met")
        v = eigenvector_estimator(inst.C)
        assert dist_l2(v, inst.z_star).value <= 8 * st.delta_op / math.sqrt(n) * (1 + 1e-9)

    def test_phase_covariance(self):
        inst = build_instance(30, 0.4, 2)
        rot = assemble(np.exp(1.3j) * inst.z_star, inst.W, inst.sigma)
        a = eigenvector_estimator(inst.C)
        b = eigenvector_estimator(rot.C)
        # rotating z* by a common phase leaves C unchanged up to rounding
        assert dist_l2(a, b).value <= 1e-8

    def test_output_on_torus(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            A = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
            assert is_phase_vector(eigenvector_estimator(A + A.conj().T))

    def test_explicit_tolerance(self):
        inst = build_instance(20, 0.1, 7)
        v = eigenvector_estimator(inst.C, tol=1e-10)
        assert dist_l2(v, eigenvector_estimator(inst.C)).value <= 1e-8

    def test_random_truth_entries(self):
        z = random_phases(np.random.default_rng(4), 15)
        inst = assemble(z, np.zeros((15, 15)), 0.0)
        assert dist_l2(eigenvector_estimator(inst.C), z).value <= 1e-10
