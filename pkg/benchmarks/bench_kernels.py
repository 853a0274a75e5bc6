"""Benchmark the simulation kernels: numba-jitted loops vs pure numpy.

Usage:
    python benchmarks/bench_kernels.py [--steps 200000] [--agents 12] [--repeat 5]

The jit variants are compiled (and warmed) before timing. Typical speedups
on small agent counts are 20-100x for the fast kernel, since per-step
Python/numpy dispatch dominates the fallback.
"""
import argparse
import time

import numpy as np

from dualrate import _kernels
from dualrate.dynamics import SystemParams, derived_quantities


def build_case(agents: int, seed: int = 42):
    rng = np.random.default_rng(seed)
    a = np.zeros((agents, agents))
    for v in range(1, agents):
        u = int(rng.integers(0, v))
        a[u, v] = a[v, u] = 1.0
    extra = np.triu(rng.random((agents, agents)) < 0.3, 1)
    a = np.where(extra | extra.T, 1.0, a)
    P = a / a.sum(axis=1)[:, None]
    x0 = rng.normal(size=agents)
    return P, x0


def time_best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=200_000)
    parser.add_argument("--agents", type=int, default=12)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    P, x0 = build_case(args.agents)
    p = SystemParams(epsilon=0.3, h=10, N=16)
    dq = derived_quantities(p)
    slow_steps = max(args.steps // p.N, 1)

    cases = []
    if _kernels.fast_states_jit is not None:
        _kernels.fast_states_jit(P, p.epsilon, p.h, p.N, x0, 10)  # compile
        _kernels.slow_states_jit(P, dq.gamma, dq.f0, dq.f1, dq.theta, x0, 10)
        cases.append(("fast", "numba", lambda: _kernels.fast_states_jit(
            P, p.epsilon, p.h, p.N, x0, args.steps), args.steps))
        cases.append(("slow", "numba", lambda: _kernels.slow_states_jit(
            P, dq.gamma, dq.f0, dq.f1, dq.theta, x0, slow_steps), slow_steps))
    else:
        print("numba backend unavailable; timing the numpy path only")
    cases.append(("fast", "numpy", lambda: _kernels.fast_states_numpy(
        P, p.epsilon, p.h, p.N, x0, args.steps), args.steps))
    cases.append(("slow", "numpy", lambda: _kernels.slow_states_numpy(
        P, dq.gamma, dq.f0, dq.f1, dq.theta, x0, slow_steps), slow_steps))

    print(f"agents={args.agents} steps={args.steps} (slow: {slow_steps}) "
          f"repeat={args.repeat}, best-of timings\n")
    print(f"{'kernel':<8} {'backend':<8} {'seconds':>10} {'steps/s':>12}")
    baselines = {}
    for kernel, backend, fn, steps in cases:
        seconds = time_best(fn, args.repeat)
        rate = steps / seconds
        print(f"{kernel:<8} {backend:<8} {seconds:>10.4f} {rate:>12.3e}")
        baselines[(kernel, backend)] = seconds
    for kernel in ("fast", "slow"):
        if (kernel, "numba") in baselines and (kernel, "numpy") in baselines:
            ratio = baselines[(kernel, "numpy")] / baselines[(kernel, "numba")]
            print(f"\n{kernel} kernel: numba is {ratio:.1f}x faster than numpy")


if __name__ == "__main__":
    main()
