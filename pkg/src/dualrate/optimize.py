"""Choosing the sampling-period ratio.

Modes with eigenvalue in (0, 1] decay faster the larger N is, so alone
they would say "never communicate". Modes in (1, 2] each have a unique
finite ratio minimizing their decay rate, found from a quadratic in
g = (1-epsilon)^N. The overall choice minimizes the worst per-mode decay
rate over N >= h; a finite minimizer exists iff the smallest nonzero mode
does not dominate the largest one in the large-N limit
(|1-lam_1| <= |1-lam_max|, equality only if all nonzero modes coincide).

Analytical results are reported next to empirical optima measured by
simulating until the state spread stays below a threshold.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ._format import sig12
from .demo import example_initial_state, matches_example_graph
from .dynamics import empirical_optimal_N
from .errors import NoFiniteMinimum, NotConverged
from .graph import Graph, Spectrum, spectrum
from .spectral import mode_curve, zbar


@dataclass(frozen=True)
class ModeMinimum:
    """Unique decay-rate minimum of one mode with eigenvalue in (1, 2].

    g1 is the smaller root of the critical quadratic (the minimizer in g),
    g2 the larger, g0 the point where the root half-sum changes sign;
    g1 <= g0 always. N_real is the real-valued minimizer and N_int the
    better of its two integer neighbors.
    """

    mode: float
    g0: float
    g1: float
    g2: float
    N_real: float
    N_int: int
    zbar_at_min: float


@dataclass(frozen=True)
class OptimizationReport:
    """Objective curve, minimizer, and per-mode diagnostics for one (epsilon, h)."""

    epsilon: float
    h: int
    eigenvalues: np.ndarray
    finite_exists: bool
    N_values: np.ndarray            # integer grid, starts at 1
    objective_values: np.ndarray
    within_constraint: np.ndarray   # N >= h mask (the constrained problem)
    n_star: float                   # integer value, or math.inf
    mode_minima: tuple
    conjecture_holds: bool
    conjecture_counterexample: tuple | None
    n_opt: int | None = None
    n_opt_geq_h: int | None = None


@dataclass(frozen=True)
class TableOne:
    """Analytical vs empirical optima across a gain grid, fixed delay."""

    epsilon_grid: tuple
    h: int
    delta: float
    horizon: int
    N_search: tuple                 # (lo, hi) inclusive
    n_star_row: tuple               # int or math.inf per epsilon
    n_opt_geq_h_row: tuple          # int, or None when not converged
    n_opt_row: tuple
    failures: tuple                 # human-readable per-cell failure notes


def mode_minimum(lambda_i: float, epsilon: float, h: int) -> ModeMinimum:
    """Locate the unique decay-rate minimum of a mode in (1, 2].

    Solves (1/4)((1+bc)g - b)^2 = g b (c-1) for g; the smaller root g1
    gives the minimizer N_real = log(g1)/log(1-epsilon). Raises
    NoFiniteMinimum for modes <= 1 (their decay rate only improves as N
    grows).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    if lambda_i > 2.0:
        raise ValueError(f"mode must lie in (1, 2], got {lambda_i}")
    if lambda_i <= 1.0:
        raise NoFiniteMinimum(f"mode {lambda_i} <= 1 decays monotonically in N")
    q = 1.0 - epsilon
    b = lambda_i - 1.0
    c = q ** (-h)
    # (1+bc)^2 g^2 - 2b(bc + 2c - 1) g + b^2 = 0, both roots positive
    quad_a = (1.0 + b * c) ** 2
    quad_b = -2.0 * b * (b * c + 2.0 * c - 1.0)
    quad_c = b * b
    disc = quad_b * quad_b - 4.0 * quad_a * quad_c
    root = math.sqrt(max(disc, 0.0))
    half = -0.5 * (quad_b + math.copysign(root, quad_b))
    g2 = half / quad_a
    g1 = quad_c / half
    g0 = b / (1.0 + b * c)
    n_real = math.log(g1) / math.log(q)
    lo, hi = math.floor(n_real), math.ceil(n_real)
    if lo == hi:
        n_int = lo
    else:
        z_lo = zbar(lambda_i, epsilon, h, float(lo))
        z_hi = zbar(lambda_i, epsilon, h, float(hi))
        n_int = lo if z_lo <= z_hi else hi
    # at g1 the discriminant vanishes, so the minimum value is exactly
    # sqrt(p2(g1)); re-evaluating through (1-eps)^N_real would lose half
    # the significant digits at the kink
    return ModeMinimum(
        mode=float(lambda_i), g0=g0, g1=g1, g2=g2,
        N_real=n_real, N_int=int(n_int),
        zbar_at_min=math.sqrt(b * g1 * (c - 1.0)),
    )


def finite_minimizer_exists(s: Spectrum, tol: float = 1e-9) -> bool:
    """Whether the min-max decay objective attains a finite minimizer.

    True iff |1 - lam_1| < |1 - lam_max|, or they are equal with
    lam_1 == lam_max (all nonzero modes coincide), both within tol.
    Expects a connected-graph spectrum (simple zero eigenvalue).
    """
    lams = s.eigenvalues
    if lams.size < 2:
        raise ValueError("need at least two modes")
    b_low = abs(1.0 - float(lams[1]))
    b_high = abs(1.0 - float(lams[-1]))
    if b_high - b_low > tol:
        return True
    return abs(b_high - b_low) <= tol and abs(float(lams[-1]) - float(lams[1])) <= tol


def _objective_modes(s: Spectrum) -> list[float]:
    # Modes in (0, 1] other than lam_1 are dominated by lam_1 and skipped;
    # the consensus mode enters through its deflated (second) root.
    lams = s.eigenvalues
    return [0.0, float(lams[1])] + [float(lam) for lam in lams[1:] if lam > 1.0]


def objective(N: float, s: Spectrum, epsilon: float, h: int) -> float:
    """Worst per-mode decay rate at ratio N.

    Defined by the constrained problem for N >= h; smaller N values are
    still evaluated (same formula) for the global-view reports, outside
    the regime the closed-form theory covers.
    """
    return max(zbar(lam, epsilon, h, N) for lam in _objective_modes(s))


def objective_curve(s: Spectrum, epsilon: float, h: int, N_values) -> np.ndarray:
    """Vectorized objective over a grid of ratios."""
    curves = [mode_curve(lam, epsilon, h, N_values) for lam in _objective_modes(s)]
    return np.max(np.vstack([c.values for c in curves]), axis=0)


def conjecture_check(s: Spectrum, epsilon: float, h: int, N_range):
    """Diagnostic: is the largest mode's decay rate the worst among modes > 1?

    Returns (holds, first_counterexample); the counterexample is
    (N, mode, value, top_value). Never used to prune the objective.
    """
    N_arr = np.asarray(list(N_range), dtype=float)
    if N_arr.size == 0:
        raise ValueError("N_range must be nonempty")
    lams = [float(lam) for lam in s.eigenvalues if lam > 1.0]
    if len(lams) <= 1:
        return True, None
    top = lams[-1]
    top_vals = mode_curve(top, epsilon, h, N_arr).values
    for lam in lams[:-1]:
        vals = mode_curve(lam, epsilon, h, N_arr).values
        bad = np.flatnonzero(top_vals < vals - 1e-10)
        if bad.size:
            k = int(bad[0])
            return False, (float(N_arr[k]), lam, float(vals[k]), float(top_vals[k]))
    return True, None


def solve_N_star(s: Spectrum, epsilon: float, h: int, N_max: int | None = None) -> OptimizationReport:
    """Minimize the worst decay rate over integer N >= h.

    When no finite minimizer exists the report carries n_star = inf and
    the (monotone) objective curve. The curve is also evaluated on
    [1, h) for the global view; those points are flagged as outside the
    constrained problem.
    """
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    minima = tuple(
        mode_minimum(float(lam), epsilon, h) for lam in s.eigenvalues if lam > 1.0
    )
    if N_max is None:
        if minima:
            N_max = min(200, 2 * max(math.ceil(m.N_real) for m in minima) + 10)
        else:
            N_max = 2 * h + 10
        N_max = max(N_max, h)
    if N_max < h:
        raise ValueError(f"N_max must be >= h, got {N_max} < {h}")
    finite = finite_minimizer_exists(s)
    N_values = np.arange(1, int(N_max) + 1)
    obj = objective_curve(s, epsilon, h, N_values)
    within = N_values >= h
    if finite:
        idx = int(np.argmin(obj[within]))  # first minimum: ties favor smaller N
        n_star: float = float(N_values[within][idx])
    else:
        n_star = math.inf
    holds, counterexample = conjecture_check(s, epsilon, h, N_values[within])
    obj.setflags(write=False)
    N_values.setflags(write=False)
    within.setflags(write=False)
    return OptimizationReport(
        epsilon=float(epsilon),
        h=int(h),
        eigenvalues=s.eigenvalues,
        finite_exists=finite,
        N_values=N_values,
        objective_values=obj,
        within_constraint=within,
        n_star=int(n_star) if finite else math.inf,
        mode_minima=minima,
        conjecture_holds=holds,
        conjecture_counterexample=counterexample,
    )


def _resolve_initial_state(g: Graph, x0) -> np.ndarray:
    if x0 is not None:
        x0 = np.asarray(x0, dtype=float)
        if x0.shape != (g.n,):
            raise ValueError(f"x0 must have shape ({g.n},), got {x0.shape}")
        return x0
    if matches_example_graph(g):
        return example_initial_state()
    raise ValueError("x0 is required unless the graph is one of the bundled examples")


def table_one(
    g: Graph,
    epsilon_grid,
    h: int,
    x0=None,
    delta: float = 1e-5,
    N_search_range: tuple = (1, 50),
    horizon: int = 5000,
) -> TableOne:
    """Analytical minimizer and empirical optima for every gain in the grid.

    Per gain: n_star from the decay-rate objective, plus the empirically
    fastest ratios over [lo, hi] and over [max(h, lo), hi], measured by
    the first step after which the spread stays below delta. One
    simulation sweep per gain feeds both empirical rows. Cells whose
    simulations do not converge in the horizon are reported as None with
    a note in failures.
    """
    epsilon_grid = tuple(float(e) for e in epsilon_grid)
    if not epsilon_grid:
        raise ValueError("epsilon grid must be nonempty")
    lo, hi = (int(v) for v in N_search_range)
    if lo < 1 or hi < lo:
        raise ValueError(f"bad N search range ({lo}, {hi})")
    if hi < h:
        raise ValueError(f"search range must reach h={h}, got upper bound {hi}")
    x0 = _resolve_initial_state(g, x0)
    s = spectrum(g)
    n_star_row, geq_row, opt_row, failures = [], [], [], []
    for eps in epsilon_grid:
        n_star_row.append(solve_N_star(s, eps, h).n_star)
        try:
            _, steps = empirical_optimal_N(
                g, eps, h, x0, delta, range(lo, hi + 1), horizon
            )
            opt_row.append(min(steps, key=lambda N: (steps[N], N)))
            geq = [N for N in steps if N >= h]
            geq_row.append(min(geq, key=lambda N: (steps[N], N)))
        except NotConverged as exc:
            failures.append(f"epsilon={eps:g}: {exc}")
            opt_row.append(None)
            geq_row.append(None)
    return TableOne(
        epsilon_grid=epsilon_grid,
        h=int(h),
        delta=float(delta),
        horizon=int(horizon),
        N_search=(lo, hi),
        n_star_row=tuple(n_star_row),
        n_opt_geq_h_row=tuple(geq_row),
        n_opt_row=tuple(opt_row),
        failures=tuple(failures),
    )


def _cell(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return str(int(value))


def table_to_csv(t: TableOne, path) -> None:
    """Write `epsilon,N_star,N_opt_geq_h,N_opt` rows; inf spelled out."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("epsilon,N_star,N_opt_geq_h,N_opt\n")
        for i, eps in enumerate(t.epsilon_grid):
            fh.write(
                f"{sig12(eps)},{_cell(t.n_star_row[i])},"
                f"{_cell(t.n_opt_geq_h_row[i])},{_cell(t.n_opt_row[i])}\n"
            )


def table_to_json_dict(t: TableOne) -> dict:
    return {
        "epsilon": [float(sig12(e)) for e in t.epsilon_grid],
        "h": t.h,
        "delta": t.delta,
        "horizon": t.horizon,
        "N_search": list(t.N_search),
        "N_star": [_cell(v) if v is None or math.isinf(v) else int(v) for v in t.n_star_row],
        "N_opt_geq_h": [None if v is None else int(v) for v in t.n_opt_geq_h_row],
        "N_opt": [None if v is None else int(v) for v in t.n_opt_row],
        "failures": list(t.failures),
    }


def report_to_json_dict(r: OptimizationReport) -> dict:
    def num(x):
        return float(sig12(x))

    return {
        "epsilon": num(r.epsilon),
        "h": r.h,
        "eigenvalues": [num(v) for v in r.eigenvalues],
        "finite_minimizer_exists": r.finite_exists,
        "N_star": "inf" if math.isinf(r.n_star) else int(r.n_star),
        "N": [int(v) for v in r.N_values],
        "objective": [num(v) for v in r.objective_values],
        "within_constraint": [bool(v) for v in r.within_constraint],
        "mode_minima": [
            {
                "mode": num(m.mode),
                "g0": num(m.g0),
                "g1": num(m.g1),
                "g2": num(m.g2),
                "N_real": num(m.N_real),
                "N_int": m.N_int,
                "zbar_at_min": num(m.zbar_at_min),
            }
            for m in r.mode_minima
        ],
        "conjecture_holds": r.conjecture_holds,
        "conjecture_counterexample": (
            None
            if r.conjecture_counterexample is None
            else [num(v) for v in r.conjecture_counterexample]
        ),
        "N_opt": r.n_opt,
        "N_opt_geq_h": r.n_opt_geq_h,
    }


def report_to_json(r: OptimizationReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(report_to_json_dict(r), fh, indent=2)
        fh.write("\n")
