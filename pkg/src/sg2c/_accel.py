"""Fixed-step RK4 trajectory kernels.

Two interchangeable implementations of the same kernel contract: a numba
nopython build and a vectorized numpy build.  Selection is by the
SG2C_DISABLE_NUMBA environment variable (any of "1", "true", "yes"
disables the compiled path); the active kernel is cached after first use.

Kernel contract
---------------
``kernel(system_id, param, x0, step, n_steps, guard_lo, guard_hi)``
returns ``(states, exit_code, exit_index)`` where ``states`` has shape
``(n_steps + 1, n)``, ``exit_code`` is 0 for a full run and 1 when the
state leaves the guard box or turns non-finite, and ``exit_index`` is
the first offending row (== ``n_steps`` for full runs).  Rows past
``exit_index`` are unspecified.
"""

import math
import os

import numpy as np

DISABLE_ENV = "SG2C_DISABLE_NUMBA"

# kernel ids
MULTISTABLE4 = 0
THOMAS_CYCLIC = 1

_cache: dict = {}


def numba_enabled() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() not in (
        "1", "true", "yes")


def trajectory_kernel(use_numba: bool | None = None):
    """Return the active RK4 kernel, building it on first use."""
    key = numba_enabled() if use_numba is None else bool(use_numba)
    if key not in _cache:
        _cache[key] = _build_numba() if key else _build_numpy()
    return _cache[key]


def _build_numba():
    from numba import njit

    @njit(cache=False)
    def field(system_id, param, x, out):
        n = x.shape[0]
        if system_id == MULTISTABLE4:
            out[0] = x[1]
            out[1] = -x[0] + math.atan(2.0 * x[0]) - 2.0 * x[1] + x[2]
            out[2] = -x[2] + x[3]
            out[3] = -param * x[0] - x[3]
        else:
            for i in range(n):
                j = i + 1 if i + 1 < n else 0
                out[i] = -param * x[i] + math.sin(x[j])

    @njit(cache=False)
    def kernel(system_id, param, x0, step, n_steps, guard_lo, guard_hi):
        n = x0.shape[0]
        states = np.empty((n_steps + 1, n))
        x = x0.copy()
        k1 = np.empty(n)
        k2 = np.empty(n)
        k3 = np.empty(n)
        k4 = np.empty(n)
        tmp = np.empty(n)
        for i in range(n):
            states[0, i] = x[i]
        for s in range(n_steps):
            field(system_id, param, x, k1)
            for i in range(n):
                tmp[i] = x[i] + 0.5 * step * k1[i]
            field(system_id, param, tmp, k2)
            for i in range(n):
                tmp[i] = x[i] + 0.5 * step * k2[i]
            field(system_id, param, tmp, k3)
            for i in range(n):
                tmp[i] = x[i] + step * k3[i]
            field(system_id, param, tmp, k4)
            for i in range(n):
                x[i] += (step / 6.0) * (
                    k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                states[s + 1, i] = x[i]
            for i in range(n):
                v = x[i]
                if not math.isfinite(v) or v < guard_lo[i] or v > guard_hi[i]:
                    return states, 1, s + 1
        return states, 0, n_steps

    return kernel


def _field_numpy(system_id: int, param: float, x: np.ndarray) -> np.ndarray:
    if system_id == MULTISTABLE4:
        return np.array([
            x[1],
            -x[0] + np.arctan(2.0 * x[0]) - 2.0 * x[1] + x[2],
            -x[2] + x[3],
            -param * x[0] - x[3],
        ])
    return -param * x + np.sin(np.roll(x, -1))


def _build_numpy():
    def kernel(system_id, param, x0, step, n_steps, guard_lo, guard_hi):
        n = x0.shape[0]
        states = np.empty((n_steps + 1, n))
        x = x0.astype(float).copy()
        states[0] = x
        for s in range(n_steps):
            k1 = _field_numpy(system_id, param, x)
            k2 = _field_numpy(system_id, param, x + 0.5 * step * k1)
            k3 = _field_numpy(system_id, param, x + 0.5 * step * k2)
            k4 = _field_numpy(system_id, param, x + step * k3)
            x = x + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            states[s + 1] = x
            if (not np.isfinite(x).all() or (x < guard_lo).any()
                    or (x > guard_hi).any()):
                return states, 1, s + 1
        return states, 0, n_steps

    return kernel
