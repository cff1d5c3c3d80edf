"""Algebra on the torus T^n = {z in C^n : |z_j| = 1}.

Phase vectors and Hermitian matrices are plain numpy arrays; the helpers
here validate them, compute quotient distances (distances modulo a common
global phase), normalize entrywise and evaluate the quadratic objective
f(z) = z^H C z.
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

import numpy as np

UNIT_TOL = 1e-12
LINF_GRID = 4096
LINF_XTOL = 1e-12
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class ZeroPolicy(str, enum.Enum):
    """What ``normalize_entrywise`` puts where the input entry is exactly zero."""

    UNIT_ONE = "unit-one"
    PREVIOUS_ITERATE = "previous-iterate"
    RANDOM_UNIT = "random-unit"


class QuotientDistance(NamedTuple):
    value: float
    theta: float


def _as_vector(v) -> np.ndarray:
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {a.shape}")
    return a


def _check_pair(w, z) -> tuple[np.ndarray, np.ndarray]:
    w, z = _as_vector(w), _as_vector(z)
    if w.shape != z.shape:
        raise ValueError(f"dimension mismatch: {w.shape[0]} vs {z.shape[0]}")
    if w.size == 0:
        raise ValueError("vectors must have length n >= 1")
    return w, z


def is_phase_vector(z, tol: float = UNIT_TOL) -> bool:
    z = np.asarray(z)
    return z.ndim == 1 and z.size >= 1 and bool(np.all(np.abs(np.abs(z) - 1.0) <= tol))


def as_phase_vector(z, tol: float = UNIT_TOL) -> np.ndarray:
    """Return ``z`` as a complex array, raising if it is not in T^n."""
    z = _as_vector(z)
    if z.size == 0:
        raise ValueError("phase vectors must have length n >= 1")
    dev = np.max(np.abs(np.abs(z) - 1.0))
    if dev > tol:
        raise ValueError(f"not a phase vector: max | |z_j| - 1 | = {dev:.3e} > {tol:g}")
    return z


def hermitian_from_upper(upper: np.ndarray) -> np.ndarray:
    """Mirror the strict upper triangle of a square array into a Hermitian matrix.

    The diagonal is kept as its real part; the lower triangle is overwritten
    with conjugates of the upper one, so the result is Hermitian exactly.
    """
    a = np.array(upper, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    iu = np.triu_indices(a.shape[0], 1)
    a[(iu[1], iu[0])] = np.conj(a[iu])
    np.fill_diagonal(a, a.diagonal().real)
    return a


def is_hermitian(m: np.ndarray) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and bool(np.array_equal(m, m.conj().T))


def lq_norm(v, q) -> float:
    """Plain l_q norm for q in {1, 2, inf}."""
    v = np.abs(_as_vector(v))
    if q == 1:
        return float(v.sum())
    if q == 2:
        return float(np.sqrt(np.dot(v, v)))
    if q == math.inf or q == "inf":
        return float(v.max()) if v.size else 0.0
    raise ValueError(f"unsupported norm order {q!r}")


def dist_l2(w, z) -> QuotientDistance:
    """min over theta of ||w - e^{i theta} z||_2.

    The minimizing angle is arg(z^H w). The value is computed as the norm of
    the aligned difference rather than through sqrt(|w|^2 + |z|^2 - 2|z^H w|),
    which loses all accuracy once the two points are close.
    """
    w, z = _check_pair(w, z)
    inner = np.vdot(z, w)
    theta = float(np.angle(inner)) if inner != 0 else 0.0
    value = float(np.linalg.norm(w - np.exp(1j * theta) * z))
    return QuotientDistance(value, theta % (2 * math.pi))


def _linf_profile(w, z, thetas: np.ndarray, chunk: int = 256) -> np.ndarray:
    out = np.empty(thetas.size)
    for start in range(0, thetas.size, chunk):
        rot = np.exp(1j * thetas[start:start + chunk])
        out[start:start + chunk] = np.abs(w[None, :] - rot[:, None] * z[None, :]).max(axis=1)
    return out


def _golden_min(fun, lo: float, hi: float, xtol: float) -> tuple[float, float]:
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = fun(c), fun(d)
    while hi - lo > xtol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = fun(d)
    return (c, fc) if fc <= fd else (d, fd)


def dist_linf(w, z, grid: int = LINF_GRID, xtol: float = LINF_XTOL) -> QuotientDistance:
    """min over theta of max_j |w_j - e^{i theta} z_j|.

    A uniform grid brackets the minimum; every grid-local minimum that could
    still beat the best grid value (given the Lipschitz constant of the
    profile in theta) is then refined by golden-section search.
    """
    w, z = _check_pair(w, z)
    h = 2 * math.pi / grid
    thetas = np.arange(grid) * h
    prof = _linf_profile(w, z, thetas)

    def fun(t: float) -> float:
        return float(np.abs(w - np.exp(1j * t) * z).max())

    is_local = (prof <= np.roll(prof, 1)) & (prof <= np.roll(prof, -1))
    slope = float(np.max(np.abs(w) * np.abs(z)))
    best = prof.min()
    cand = np.flatnonzero(is_local & (prof <= best + slope * h))
    cand = cand[np.argsort(prof[cand])][:16]

    best_t, best_v = float(thetas[prof.argmin()]), float(best)
    for i in cand:
        t, v = _golden_min(fun, thetas[i] - h, thetas[i] + h, xtol)
        if v < best_v:
            best_t, best_v = t, v
    return QuotientDistance(best_v, best_t % (2 * math.pi))


def dist(w, z, q) -> QuotientDistance:
    if q == 2:
        return dist_l2(w, z)
    if q == math.inf or q == "inf":
        return dist_linf(w, z)
    raise ValueError(f"quotient distance only provided for q in {{2, inf}}, got {q!r}")


def normalize_entrywise(w, policy: ZeroPolicy | str = ZeroPolicy.UNIT_ONE,
                        previous=None, rng: np.random.Generator | int | None = None) -> np.ndarray:
    """Entrywise w_j / |w_j|, with ``policy`` deciding the value at exact zeros.

    ``previous`` is required by the previous-iterate policy; ``rng`` (a
    Generator or a seed) feeds the random-unit policy.
    """
    w = _as_vector(w)
    if w.size == 0:
        raise ValueError("vectors must have length n >= 1")
    mod = np.abs(w)
    zero = mod == 0
    out = np.empty_like(w)
    with np.errstate(over="ignore", invalid="ignore"):
        out[~zero] = w[~zero] / mod[~zero]
    tiny = ~zero & (mod < np.finfo(float).tiny)
    if tiny.any():  # subnormal moduli: the division above over/underflows
        out[tiny] = np.exp(1j * np.angle(w[tiny]))
    if zero.any():
        policy = ZeroPolicy(policy)
        if policy is ZeroPolicy.UNIT_ONE:
            out[zero] = 1.0
        elif policy is ZeroPolicy.PREVIOUS_ITERATE:
            if previous is None:
                raise ValueError("previous-iterate policy needs the previous phase vector")
            prev = _as_vector(previous)
            if prev.shape != w.shape:
                raise ValueError("previous iterate has the wrong length")
            out[zero] = prev[zero]
        else:
            gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
            out[zero] = np.exp(2j * np.pi * gen.random(int(zero.sum())))
    return out


def _check_square(C, z) -> tuple[np.ndarray, np.ndarray]:
    C = np.asarray(C)
    z = _as_vector(z)
    if C.ndim != 2 or C.shape != (z.size, z.size):
        raise ValueError(f"dimension mismatch: matrix {C.shape} vs vector length {z.size}")
    return C, z


def objective(C, z) -> float:
    """f(z) = z^H C z for Hermitian C (real up to rounding)."""
    C, z = _check_square(C, z)
    val = np.vdot(z, C @ z)
    if abs(val.imag) > 1e-9 * z.size * max(1.0, abs(val.real) / z.size ** 2):
        raise ValueError(f"quadratic form has imaginary part {val.imag:.3e}; is C Hermitian?")
    return float(val.real)


def objective_gap(C, a, b) -> float:
    """f(a) - f(b), computed without cancellation.

    After aligning b to a by a global phase (f is invariant), the identity
    f(a) - f(b) = Re[(a - b)^H C (a + b)] keeps full relative accuracy even
    when a and b agree to many digits, where f(a) - f(b) taken directly
    would be pure rounding noise.
    """
    C, a = _check_square(C, a)
    b = _as_vector(b)
    if b.shape != a.shape:
        raise ValueError("dimension mismatch")
    inner = np.vdot(b, a)
    if inner != 0:
        b = b * (inner / abs(inner))
    return float(np.vdot(a - b, C @ (a + b)).real)
