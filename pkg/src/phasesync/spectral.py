"""Leading eigenvector of C and the eigenvector estimator v_C."""

from __future__ import annotations

import dataclasses
import logging

import numpy as np

log = logging.getLogger(__name__)

ZERO_ENTRY_RTOL = 1e-14
FALLBACK_TOL = 1e-14
RETRY_SEED = 20170619
ESTIMATOR_TOL = 1e-13


class PowerIterationError(RuntimeError):
    def __init__(self, msg, best_vector, residual, iterations):
        super().__init__(msg)
        self.best_vector = best_vector
        self.residual = residual
        self.iterations = iterations


class DegenerateFallbackError(ValueError):
    """a^H u is numerically zero, so the fallback phase is undefined."""


@dataclasses.dataclass(frozen=True)
class EigResult:
    vector: np.ndarray
    value: float
    iterations: int
    residual: float


def default_max_iter(n: int) -> int:
    return 50 * n + 1000


def leading_eigenvector(C, tol: float = 1e-10, max_iter: int | None = None) -> EigResult:
    """Eigenpair of the algebraically largest eigenvalue of Hermitian ``C``.

    Power iteration on C + s I with s = ||C||_F (1 + 1e-3), which moves the
    whole spectrum to the positive axis so that the wanted eigenvalue is the
    dominant one. Stops once ||C u - lam u||_2 <= tol ||C||_F, where lam is
    the Rayleigh quotient.
    """
    C = np.asarray(C, dtype=complex)
    n = C.shape[0]
    if C.ndim != 2 or C.shape != (n, n) or n < 1:
        raise ValueError(f"expected a nonempty square matrix, got shape {C.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter is None:
        max_iter = default_max_iter(n)
    fro = float(np.linalg.norm(C))
    if fro == 0:
        u = np.ones(n, dtype=complex) / np.sqrt(n)
        return EigResult(u, 0.0, 0, 0.0)
    shift = fro * (1 + 1e-3)
    target = tol * fro

    # Deterministic start with no special alignment to any structured vector.
    gen = np.random.Generator(np.random.Philox(n))
    u = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    u /= np.linalg.norm(u)
    best = (np.inf, u, 0.0)
    for it in range(1, max_iter + 1):
        cu = C @ u
        lam = float(np.vdot(u, cu).real)
        res = float(np.linalg.norm(cu - lam * u))
        if res < best[0]:
            best = (res, u, lam)
        if res <= target:
            return EigResult(u, lam, it, res)
        v = cu + shift * u
        u = v / np.linalg.norm(v)
    raise PowerIterationError(
        f"power iteration did not reach residual {target:.3e} in {max_iter} iterations "
        f"(best residual {best[0]:.3e})", best[1], best[0], max_iter)


def estimator_from_vector(u, a) -> tuple[np.ndarray, np.ndarray]:
    """Apply the v_C normalization to a given eigenvector ``u``.

    Returns the phase vector and the boolean mask of entries that took the
    fallback phase a^H u / |a^H u|.
    """
    u = np.asarray(u, dtype=complex)
    a = np.asarray(a, dtype=complex)
    mod = np.abs(u)
    small = mod <= ZERO_ENTRY_RTOL * mod.max()
    v = np.empty_like(u)
    v[~small] = u[~small] / mod[~small]
    if small.any():
        ahu = np.vdot(a, u)
        if abs(ahu) <= FALLBACK_TOL:
            raise DegenerateFallbackError(f"|a^H u| = {abs(ahu):.3e}; pick another fallback vector")
        v[small] = ahu / abs(ahu)
    return v, small


def eigenvector_estimator(C, a=None, tol: float | None = None, max_iter: int | None = None) -> np.ndarray:
    """The eigenvector estimator v_C, a phase vector.

    With ``tol`` left as None the eigenvector is polished to a residual of
    ``ESTIMATOR_TOL`` ||C||_F; if that is out of reach within ``max_iter``,
    the best iterate is accepted as long as it meets the 1e-10 default.

    With ``a`` left as None the all-ones fallback is tried first and, if
    degenerate, a unit vector drawn from a Philox stream seeded with
    ``RETRY_SEED``. An explicit ``a`` is used as given.
    """
    if tol is not None:
        u = leading_eigenvector(C, tol, max_iter).vector
    else:
        try:
            u = leading_eigenvector(C, ESTIMATOR_TOL, max_iter).vector
        except PowerIterationError as exc:
            if exc.residual > 1e-10 * float(np.linalg.norm(C)):
                raise
            log.info("eigenvector polished only to residual %.3e", exc.residual)
            u = exc.best_vector
    if a is not None:
        v, small = estimator_from_vector(u, a)
    else:
        try:
            v, small = estimator_from_vector(u, np.ones(u.size))
        except DegenerateFallbackError:
            gen = np.random.Generator(np.random.Philox(RETRY_SEED))
            a = gen.standard_normal(u.size) + 1j * gen.standard_normal(u.size)
            a /= np.linalg.norm(a)
            log.info("all-ones fallback degenerate; retrying with seeded random vector")
            v, small = estimator_from_vector(u, a)
    if small.any():
        log.info("fallback phase used for entries %s", np.flatnonzero(small).tolist())
    return v
