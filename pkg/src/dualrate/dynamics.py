"""Closed-loop simulation at both rates, and empirical convergence search.

Agents are single integrators x_i(t+1) = x_i(t) + u_i(t) with unit control
period. Each agent mixes its own state with the neighbor average of the
most recent delivered samples:

    u_i(t) = epsilon * (avg_j a_ij m_j(t) / d_i - x_i(t))

where samples are taken every N steps and delivered h steps later. Folding
one sampling period into a single step gives the lifted recursion

    x(l+1) = (1-gamma) x(l) + gamma [f0 P x(l-theta) + f1 P x(l-theta-1)]

with P = D^-1 A. Both simulators use a constant pre-start history (every
sample dated before t=0 reads the initial state), which makes them agree
exactly at the sampling instants from step 0 on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._format import sig12
from .errors import NotConverged
from .graph import Graph


@dataclass(frozen=True)
class SystemParams:
    """Controller gain, delay, and sampling-period ratio.

    The control period is fixed at 1; the measurement period is N and the
    delivery delay is h, both in control-step units.
    """

    epsilon: float
    h: int
    N: int
    T: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.h < 0 or self.h != int(self.h):
            raise ValueError(f"h must be an integer >= 0, got {self.h}")
        if self.N < 1 or self.N != int(self.N):
            raise ValueError(f"N must be an integer >= 1, got {self.N}")
        if self.T != 1.0:
            raise ValueError("the control period is fixed at T=1")
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "h", int(self.h))
        object.__setattr__(self, "N", int(self.N))


@dataclass(frozen=True)
class DerivedQuantities:
    """Lifted-recursion coefficients induced by (epsilon, h, N).

    theta counts whole sampling periods of delay, tau the leftover steps
    (0 < tau <= N when h >= 1); f0 and f1 weight the newer and older
    sample and always sum to one. h = 0 is represented as theta = -1,
    tau = N, f0 = 0, f1 = 1, which reduces to the undelayed law.
    """

    theta: int
    tau: int
    gamma: float
    f0: float
    f1: float


@dataclass(frozen=True)
class Trace:
    """Time-indexed agent states from one simulation run."""

    kind: str                 # "fast" | "slow"
    states: np.ndarray        # (steps+1, n), row 0 == initial_state
    params: SystemParams
    initial_state: np.ndarray


def lifted_coefficients(epsilon: float, h: int, N: float):
    """(theta, tau, gamma, f0, f1) for gain epsilon, delay h, ratio N.

    N may be real (>= 1): theta stays an integer while tau becomes real.
    gamma is assembled as 1 - q^(N-tau) * q^tau so that f0 + f1 == 1 holds
    exactly in floating point.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if h < 0:
        raise ValueError(f"h must be >= 0, got {h}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if h == 0:
        theta = -1
    elif float(N).is_integer():
        theta = -(-int(h) // int(N)) - 1
    else:
        theta = math.ceil(h / N) - 1
    tau = h - theta * N
    q = 1.0 - epsilon
    newer = q ** (N - tau)
    older = q ** tau
    gamma = 1.0 - newer * older
    f0 = (1.0 - newer) / gamma
    f1 = 1.0 - f0
    return theta, tau, gamma, f0, f1


def derived_quantities(p: SystemParams) -> DerivedQuantities:
    """Lifted coefficients for integer parameters (tau is integral)."""
    theta, tau, gamma, f0, f1 = lifted_coefficients(p.epsilon, p.h, p.N)
    return DerivedQuantities(theta=theta, tau=int(tau), gamma=gamma, f0=f0, f1=f1)


def _neighbor_average_matrix(g: Graph) -> np.ndarray:
    return g.adjacency / g.degrees[:, None].astype(float)


def _as_state(g: Graph, x0) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (g.n,):
        raise ValueError(f"x0 must have shape ({g.n},), got {x0.shape}")
    return x0


def simulate_fast(g: Graph, p: SystemParams, x0, steps: int) -> Trace:
    """Run the fast-rate loop for `steps` control periods."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    x0 = _as_state(g, x0)
    states = _kernels.fast_states(
        _neighbor_average_matrix(g), p.epsilon, p.h, p.N, x0, int(steps)
    )
    states.setflags(write=False)
    return Trace(kind="fast", states=states, params=p, initial_state=x0)


def simulate_slow(g: Graph, p: SystemParams, x0, slow_steps: int) -> Trace:
    """Run the lifted recursion for `slow_steps` sampling periods."""
    if slow_steps < 1:
        raise ValueError(f"slow_steps must be >= 1, got {slow_steps}")
    x0 = _as_state(g, x0)
    dq = derived_quantities(p)
    states = _kernels.slow_states(
        _neighbor_average_matrix(g), dq.gamma, dq.f0, dq.f1, dq.theta,
        x0, int(slow_steps),
    )
    states.setflags(write=False)
    return Trace(kind="slow", states=states, params=p, initial_state=x0)


def check_fast_slow_equivalence(g: Graph, p: SystemParams, x0, slow_steps: int) -> float:
    """Max deviation between the fast trace at sampling instants and the slow trace.

    The two simulators are independent recursions; with matching constant
    pre-start histories they agree to rounding, so this doubles as a
    cross-check of both.
    """
    fast = simulate_fast(g, p, x0, slow_steps * p.N)
    slow = simulate_slow(g, p, x0, slow_steps)
    return float(np.max(np.abs(fast.states[:: p.N] - slow.states)))


def spread(trace: Trace) -> np.ndarray:
    """Per-step max_i x_i - min_i x_i."""
    return trace.states.max(axis=1) - trace.states.min(axis=1)


def convergence_step(trace: Trace, delta: float) -> int:
    """Smallest k with spread <= delta from step k to the end of the trace.

    Implemented as the step after the last up-crossing, so a spread that
    dips below delta and comes back does not count as converged. Raises
    NotConverged when the trace ends above delta.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    sp = spread(trace)
    above = np.flatnonzero(sp > delta)
    if above.size == 0:
        return 0
    k = int(above[-1]) + 1
    if k >= sp.size:
        raise NotConverged(
            f"N={trace.params.N}: spread still {sp[-1]:.3g} > {delta:.3g} "
            f"after {sp.size - 1} steps",
            N=trace.params.N,
            horizon=sp.size - 1,
        )
    return k


def empirical_optimal_N(
    g: Graph,
    epsilon: float,
    h: int,
    x0,
    delta: float,
    N_range,
    horizon: int = 5000,
):
    """Sampling ratio in N_range with the smallest convergence step.

    Every candidate is simulated for `horizon` control steps; convergence
    steps are compared in control-step units and ties break toward the
    smaller N (more communication). Raises NotConverged if any candidate
    fails to settle, since a truncated horizon would bias the comparison.
    """
    candidates = sorted({int(N) for N in N_range})
    if not candidates:
        raise ValueError("N_range must be nonempty")
    table: dict[int, int] = {}
    for N in candidates:
        p = SystemParams(epsilon=epsilon, h=h, N=N)
        table[N] = convergence_step(simulate_fast(g, p, x0, horizon), delta)
    best = min(candidates, key=lambda N: (table[N], N))
    return best, table


def trace_to_csv(trace: Trace, path) -> None:
    """Write `step,x_0,...,x_{n-1},spread` rows, one per step."""
    sp = spread(trace)
    n = trace.states.shape[1]
    header = "step," + ",".join(f"x_{i}" for i in range(n)) + ",spread"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        for k, row in enumerate(trace.states):
            cells = [str(k)] + [sig12(v) for v in row] + [sig12(sp[k])]
            fh.write(",".join(cells) + "\n")
