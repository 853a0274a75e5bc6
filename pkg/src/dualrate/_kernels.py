"""Hot simulation kernels.

Both kernels advance the closed loop one step at a time, which cannot be
vectorized across time, so they dominate the runtime of parameter sweeps.
Each exists twice: a loop form compiled with numba, and a pure-numpy form
used as fallback. `fast_states` / `slow_states` point at whichever variant
the backend selected; the named variants stay importable for benchmarking.

Conventions shared by both kernels:
  - P is the row-normalized adjacency (neighbor-averaging matrix), float64.
  - States are returned as an array with one row per step, row 0 = x0.
  - Pre-start history is constant: any sample dated before t=0 reads x0.
"""
import numpy as np

from .backend import selected_backend


def _fast_states_loops(P, epsilon, h, N, x0, steps):
    # At fast time t the controller sees the newest sample x(lN) with
    # lN + h <= t; before the first arrival it holds the initial state.
    n = x0.shape[0]
    states = np.empty((steps + 1, n))
    for i in range(n):
        states[0, i] = x0[i]
    m = np.empty(n)
    last = -1
    for t in range(steps):
        idx = 0
        if t >= h:
            idx = ((t - h) // N) * N
        if idx != last:
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += P[i, j] * states[idx, j]
                m[i] = acc
            last = idx
        for i in range(n):
            states[t + 1, i] = (1.0 - epsilon) * states[t, i] + epsilon * m[i]
    return states


def fast_states_numpy(P, epsilon, h, N, x0, steps):
    """Pure-numpy variant of the fast-rate closed-loop recursion."""
    states = np.empty((steps + 1, x0.shape[0]))
    states[0] = x0
    m = P @ x0
    last = 0
    for t in range(steps):
        idx = ((t - h) // N) * N if t >= h else 0
        if idx != last:
            m = P @ states[idx]
            last = idx
        states[t + 1] = (1.0 - epsilon) * states[t] + epsilon * m
    return states


def _slow_states_loops(P, gamma, f0, f1, theta, x0, steps):
    # x(l+1) = (1-gamma) x(l) + gamma [f0 P x(l-theta) + f1 P x(l-theta-1)]
    # f0 == 0 exactly when theta == -1; skipping that term keeps the
    # would-be future index l+1 from ever being read.
    n = x0.shape[0]
    states = np.empty((steps + 1, n))
    for i in range(n):
        states[0, i] = x0[i]
    for l in range(steps):
        i0 = l - theta
        i1 = l - theta - 1
        for i in range(n):
            mix = 0.0
            if f0 != 0.0:
                acc = 0.0
                for j in range(n):
                    acc += P[i, j] * (states[i0, j] if i0 >= 0 else x0[j])
                mix += f0 * acc
            acc = 0.0
            for j in range(n):
                acc += P[i, j] * (states[i1, j] if i1 >= 0 else x0[j])
            mix += f1 * acc
            states[l + 1, i] = (1.0 - gamma) * states[l, i] + gamma * mix
    return states


def slow_states_numpy(P, gamma, f0, f1, theta, x0, steps):
    """Pure-numpy variant of the lifted (slow-rate) recursion."""
    states = np.empty((steps + 1, x0.shape[0]))
    states[0] = x0
    for l in range(steps):
        i1 = l - theta - 1
        mix = f1 * (P @ (states[i1] if i1 >= 0 else x0))
        if f0 != 0.0:
            i0 = l - theta
            mix += f0 * (P @ (states[i0] if i0 >= 0 else x0))
        states[l + 1] = (1.0 - gamma) * states[l] + gamma * mix
    return states


BACKEND = selected_backend()

if BACKEND == "numba":
    from numba import njit

    fast_states_jit = njit(cache=True)(_fast_states_loops)
    slow_states_jit = njit(cache=True)(_slow_states_loops)
    fast_states = fast_states_jit
    slow_states = slow_states_jit
else:
    fast_states_jit = None
    slow_states_jit = None
    fast_states = fast_states_numpy
    slow_states = slow_states_numpy
