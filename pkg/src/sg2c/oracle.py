"""Brute-force cross-check oracles used by the test suite.

Everything here recomputes quantities by an independent method: dual RK4
integration for the modular-coordinates equivalence, eigenvalue tests
for stability, dense frequency grids for gains, finite differences for
Jacobians.  Nothing in the certification path depends on this module.
"""

import math

import numpy as np

from .compound_algebra import (PartitionedMatrix, decompose,
                               permutation_to_compound, vec_skew)

HURWITZ_MARGIN = 1e-9


def matrix_ode_check(A: PartitionedMatrix, X0: np.ndarray,
                     t_end: float = 1.0, step: float = 1e-3) -> float:
    """Max relative deviation between the matrix flow of
    Xdot = A X + X A^T on skew X and the stacked modular system.

    Both sides are integrated with the same fixed-step RK4; the stacked
    state is mapped back through the block permutation and compared with
    the vectorized skew part of X(t).
    """
    A_full = A.entries
    dec = decompose(A)
    curly = dec.assembled()
    S = permutation_to_compound(dec)
    X = np.asarray(X0, dtype=float).copy()
    y = S.T @ vec_skew(X)

    def fX(M):
        return A_full @ M + M @ A_full.T

    def fy(v):
        return curly @ v

    n_steps = int(round(t_end / step))
    scale = 0.0
    worst = 0.0
    for _ in range(n_steps + 1):
        ref = vec_skew(X)
        scale = max(scale, float(np.abs(ref).max()))
        worst = max(worst, float(np.abs(S @ y - ref).max()))
        k1 = fX(X)
        k2 = fX(X + 0.5 * step * k1)
        k3 = fX(X + 0.5 * step * k2)
        k4 = fX(X + step * k3)
        X = X + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        m1 = fy(y)
        m2 = fy(y + 0.5 * step * m1)
        m3 = fy(y + 0.5 * step * m2)
        m4 = fy(y + step * m3)
        y = y + (step / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4)
    return worst / max(scale, 1e-12) if scale > 0.0 else worst


def hurwitz(A) -> bool:
    """Strict stability: every eigenvalue real part below -1e-9."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return True
    return bool(np.linalg.eigvals(A).real.max() < -HURWITZ_MARGIN)


def schur_gain(A, B, n_grid: int = 2000) -> float:
    """Frequency-domain L2 gain sup_w sigma_max((jwI - A)^-1 B).

    Dense logarithmic grid on [1e-3, 1e3] plus w = 0, refined by
    golden-section around the best point.  Infinite when A is not
    Hurwitz; a lower-bound cross-check for the LMI gain.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    if B.size == 0 or not B.any():
        return 0.0
    if not hurwitz(A):
        return math.inf
    n = A.shape[0]
    eye = np.eye(n)

    def g(w: float) -> float:
        H = np.linalg.solve(1j * w * eye - A, B)
        return float(np.linalg.svd(H, compute_uv=False)[0])

    grid = np.concatenate([[0.0], np.logspace(-3.0, 3.0, n_grid)])
    vals = np.array([g(w) for w in grid])
    k = int(vals.argmax())
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    return max(vals[k], _golden_max(g, lo, hi))


def _golden_max(f, lo: float, hi: float, iters: int = 60) -> float:
    if hi <= lo:
        return f(lo)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return max(fc, fd)


def finite_difference_jacobian(field, x, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of a vector field at x."""
    x = np.asarray(x, dtype=float)
    n = x.size
    f0 = np.asarray(field(x), dtype=float)
    J = np.empty((f0.size, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        J[:, j] = (np.asarray(field(x + e)) - np.asarray(field(x - e))) / (2.0 * h)
    return J


def find_equilibrium(field, x0, damping: float = 0.5, tol: float = 1e-12,
                     max_iter: int = 200000) -> np.ndarray | None:
    """Damped fixed-point iteration x <- x + damping * f(x).

    Converges to stable equilibria for small enough damping; returns
    None when the residual fails to reach tol.
    """
    x = np.asarray(x0, dtype=float).copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_iter):
            f = np.asarray(field(x), dtype=float)
            if not np.isfinite(f).all():
                return None
            if np.abs(f).max() < tol:
                return x
            x = x + damping * f
            if not np.isfinite(x).all():
                return None
    return None
