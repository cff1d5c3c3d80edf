"""Generalized power method for phase synchronization, with bound verification."""

from .core import (QuotientDistance, ZeroPolicy, as_phase_vector, dist_l2, dist_linf, hermitian_from_upper,
                   is_phase_vector, lq_norm, normalize_entrywise, objective, objective_gap)
from .diagnostics import (BoundParams, BoundReport, CriticalityReport, bound_params, criticality_matrix,
                          error_bound_to_maximizer, rho, second_order_check, verify_run)
from .gpm import INFINITY, GpmConfig, IterateTrace, Solution, gpm_step, run_gpm, solve_to_maximizer
from .instance import (Instance, NoiseStats, build_instance, load_instance, noise_stats, sample_ground_truth,
                       sample_wigner, save_instance)
from .spectral import EigResult, eigenvector_estimator, leading_eigenvector

__version__ = "0.1.0"

__all__ = [
    "BoundParams", "BoundReport", "CriticalityReport", "EigResult", "GpmConfig", "INFINITY", "Instance",
    "IterateTrace", "NoiseStats", "QuotientDistance", "Solution", "ZeroPolicy", "as_phase_vector", "bound_params",
    "build_instance", "criticality_matrix", "dist_l2", "dist_linf", "eigenvector_estimator",
    "error_bound_to_maximizer", "gpm_step", "hermitian_from_upper", "is_phase_vector", "leading_eigenvector",
    "load_instance", "lq_norm", "noise_stats", "normalize_entrywise", "objective", "objective_gap", "rho",
    "run_gpm", "sample_ground_truth", "sample_wigner", "save_instance", "second_order_check",
    "solve_to_maximizer", "verify_run",
]
