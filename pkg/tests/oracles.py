"""Independent reference computations used by the tests.

Each oracle takes a route that shares no code with the package: dense grids,
explicit loops, closed forms, or a separate eigensolver.
"""

import math

import numpy as np


def _profile(w, z, q, th):
    diff = np.abs(w[None, :] - np.exp(1j * th)[:, None] * z[None, :])
    if q == math.inf:
        return diff.max(axis=1)
    return (diff ** q).sum(axis=1) ** (1 / q)


def theta_grid_dist(w, z, q, points=1_000_000, chunk=20_000, zoom=0):
    """min over a uniform theta grid of ||w - e^{i theta} z||_q.

    ``zoom`` > 0 adds a second uniform grid of that many points on the two
    cells around the coarse minimizer.
    """
    w, z = np.asarray(w, complex), np.asarray(z, complex)
    best, arg = math.inf, 0.0
    for start in range(0, points, chunk):
        th = 2 * np.pi * np.arange(start, min(points, start + chunk)) / points
        vals = _profile(w, z, q, th)
        i = int(vals.argmin())
        if vals[i] < best:
            best, arg = float(vals[i]), float(th[i])
    if zoom:
        h = 2 * np.pi / points
        best = min(best, float(_profile(w, z, q, np.linspace(arg - h, arg + h, zoom)).min()))
    return best


def arc_minimax_linf(w, z):
    """Exact d_inf for unit-modulus w and z.

    |w_j - e^{i t} z_j| = 2 |sin((phi_j - t)/2)| with phi_j = arg(w_j conj(z_j)),
    so the optimum centres t on the shortest arc covering every phi_j.
    """
    phi = np.sort(np.mod(np.angle(np.asarray(w) * np.conj(z)), 2 * np.pi))
    gaps = np.diff(np.concatenate([phi, [phi[0] + 2 * np.pi]]))
    cover = 2 * np.pi - gaps.max()
    return 2 * math.sin(cover / 4)


def naive_quadratic(C, z):
    n = len(z)
    total = 0j
    for j in range(n):
        for m in range(n):
            total += np.conj(z[j]) * C[j][m] * z[m]
    return total


def deflated_power_norm(H, iters=20_000, tol=1e-14, seed=0):
    """||H||_op for Hermitian H via power iteration on H^2 and one deflation step.

    Power iteration on H^2 gives the largest |eigenvalue|; deflating that pair
    and iterating again gives the runner-up, which is only used to make sure
    the first run was not fooled by a near tie.
    """
    rng = np.random.default_rng(seed)
    n = H.shape[0]

    def run(A):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x /= np.linalg.norm(x)
        lam = 0.0
        for _ in range(iters):
            y = A @ (A @ x)
            new = float(np.linalg.norm(y))
            if new == 0:
                return 0.0, x
            x = y / new
            if abs(new - lam) <= tol * new:
                break
            lam = new
        return math.sqrt(lam), x

    top, v = run(H)
    lam_v = float(np.vdot(v, H @ v).real)
    second, _ = run(H - lam_v * np.outer(v, v.conj()))
    return max(top, second)


def grid_max_n3(C, m=720):
    """max of z^H C z over z = (1, e^{ia}, e^{ib}) on an m x m grid."""
    t = np.exp(2j * np.pi * np.arange(m) / m)
    a = t[:, None]
    b = t[None, :]
    z = [np.ones_like(a * b), a * np.ones_like(b), b * np.ones_like(a)]
    f = np.zeros((m, m))
    for j in range(3):
        for m in range(3):
            f += (np.conj(z[j]) * C[j, m] * z[m]).real
    return float(f.max())


def random_phases(rng, n):
    return np.exp(2j * np.pi * rng.random(n))
