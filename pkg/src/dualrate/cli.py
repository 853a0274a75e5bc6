"""Command-line front end: graph ingestion, experiments, CSV/JSON emission.

Exit codes: 0 success, 1 usage or input error, 2 partial numerical
failure (some table cells did not converge; the partial table is still
written).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import optimize as opt
from ._format import sig12
from .demo import example_initial_state
from .dynamics import SystemParams, convergence_step, simulate_fast, trace_to_csv
from .errors import DualRateError, NotConverged
from .graph import load_graph, spectrum
from .spectral import curves_to_csv, mode_curve


def _parse_epsilon(text: str) -> list[float]:
    """'0.3' or 'start:stop:step' (inclusive grid)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"epsilon grid must be start:stop:step, got {text!r}")
        lo, hi, step = (float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise ValueError(f"bad epsilon grid {text!r}")
        count = int(round((hi - lo) / step))
        values = [round(lo + k * step, 12) for k in range(count + 1)]
        values = [v for v in values if v <= hi + 1e-12]
    else:
        values = [float(text)]
    for v in values:
        if not 0.0 < v < 1.0:
            raise ValueError(f"epsilon values must be in (0, 1), got {v}")
    return values


def _parse_n_values(text: str) -> list[int]:
    """'16' or 'lo:hi' (inclusive)."""
    if ":" in text:
        lo_s, hi_s = text.split(":", 1)
        lo, hi = int(lo_s), int(hi_s)
        if lo < 1 or hi < lo:
            raise ValueError(f"bad N range {text!r}")
        return list(range(lo, hi + 1))
    value = int(text)
    if value < 1:
        raise ValueError(f"N must be >= 1, got {value}")
    return [value]


def _parse_x0(text: str, n: int) -> np.ndarray:
    if text == "paper":
        if n != 6:
            raise ValueError("--x0 paper is the bundled 6-agent state; graph has "
                             f"{n} vertices")
        return example_initial_state()
    values = np.array([float(v) for v in text.split(",")])
    if values.shape != (n,):
        raise ValueError(f"--x0 needs {n} comma-separated values, got {values.size}")
    return values


def _out_path(base: str, N: int, multiple: bool) -> Path:
    path = Path(base)
    if not multiple:
        return path
    return path.with_name(f"{path.stem}_N{N}{path.suffix}")


def cmd_spectrum(args) -> int:
    g = load_graph(args.graph)
    s = spectrum(g)
    finite = opt.finite_minimizer_exists(s)
    print("eigenvalues:", " ".join(sig12(v) for v in s.eigenvalues))
    print("finite minimizer exists:" if finite else "no finite minimizer:",
          f"|1-lam_1|={sig12(abs(1 - s.eigenvalues[1]))}",
          f"|1-lam_max|={sig12(abs(1 - s.eigenvalues[-1]))}")
    if args.out:
        if args.format == "json":
            payload = {
                "eigenvalues": [float(sig12(v)) for v in s.eigenvalues],
                "finite_minimizer_exists": finite,
            }
            Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        else:
            lines = ["index,eigenvalue"]
            lines += [f"{i},{sig12(v)}" for i, v in enumerate(s.eigenvalues)]
            Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def cmd_simulate(args) -> int:
    g = load_graph(args.graph)
    (eps,) = _single_epsilon(args)
    x0 = _parse_x0(args.x0, g.n)
    n_values = _parse_n_values(args.N)
    multiple = len(n_values) > 1
    for N in n_values:
        trace = simulate_fast(g, SystemParams(epsilon=eps, h=args.h, N=N), x0, args.horizon)
        try:
            step = convergence_step(trace, args.delta)
            print(f"N={N}: spread <= {args.delta:g} from step {step}")
        except NotConverged as exc:
            print(f"N={N}: not converged within horizon ({exc})")
        if args.out:
            path = _out_path(args.out, N, multiple)
            if args.format == "json":
                payload = {
                    "N": N,
                    "states": [[float(sig12(v)) for v in row] for row in trace.states],
                }
                path.write_text(json.dumps(payload) + "\n", encoding="utf-8")
            else:
                trace_to_csv(trace, path)
    return 0


def cmd_curves(args) -> int:
    g = load_graph(args.graph)
    (eps,) = _single_epsilon(args)
    s = spectrum(g)
    n_values = np.array(_parse_n_values(args.N), dtype=float)
    # index 0 is the consensus mode: use an exact zero for a clean label
    modes = [0.0] + [float(v) for v in s.eigenvalues[1:]]
    curves = [mode_curve(lam, eps, args.h, n_values) for lam in modes]
    objective = opt.objective_curve(s, eps, args.h, n_values)
    below = n_values < max(args.h, 1)
    if below.any():
        print(f"note: {int(below.sum())} grid points lie below the delay h={args.h} "
              "(outside the constrained problem)")
    constrained = n_values >= args.h
    if constrained.any():
        best = int(n_values[constrained][np.argmin(objective[constrained])])
        print(f"objective minimized at N={best} over the sampled N >= h")
    if args.out:
        if args.format == "json":
            payload = {
                "N": [int(v) for v in n_values],
                "modes": [float(sig12(c.mode)) for c in curves],
                "zbar": [[float(sig12(v)) for v in c.values] for c in curves],
                "objective": [float(sig12(v)) for v in objective],
            }
            Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        else:
            curves_to_csv(curves, args.out, extra={"objective": objective})
    return 0


def cmd_optimize(args) -> int:
    g = load_graph(args.graph)
    (eps,) = _single_epsilon(args)
    s = spectrum(g)
    n_max = max(_parse_n_values(args.N)) if args.N else None
    report = opt.solve_N_star(s, eps, args.h, N_max=n_max)
    star = "inf" if report.n_star == float("inf") else str(int(report.n_star))
    print(f"finite minimizer exists: {report.finite_exists}; N* = {star}")
    if args.out:
        if args.format == "json":
            opt.report_to_json(report, args.out)
        else:
            lines = ["N,objective,within_constraint"]
            for i, N in enumerate(report.N_values):
                lines.append(
                    f"{int(N)},{sig12(report.objective_values[i])},"
                    f"{int(report.within_constraint[i])}"
                )
            Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def cmd_table1(args) -> int:
    g = load_graph(args.graph)
    eps_grid = _parse_epsilon(args.epsilon)
    x0 = _parse_x0(args.x0, g.n) if args.x0 else None
    n_values = _parse_n_values(args.N)
    table = opt.table_one(
        g, eps_grid, args.h, x0=x0, delta=args.delta,
        N_search_range=(min(n_values), max(n_values)), horizon=args.horizon,
    )
    star = ["inf" if v == float("inf") else str(int(v)) for v in table.n_star_row]
    print("epsilon:    ", " ".join(f"{e:g}" for e in table.epsilon_grid))
    print("N_star:     ", " ".join(star))
    print("N_opt_geq_h:", " ".join("nan" if v is None else str(v) for v in table.n_opt_geq_h_row))
    print("N_opt:      ", " ".join("nan" if v is None else str(v) for v in table.n_opt_row))
    for note in table.failures:
        print("warning:", note, file=sys.stderr)
    if args.out:
        if args.format == "json":
            Path(args.out).write_text(
                json.dumps(opt.table_to_json_dict(table), indent=2) + "\n",
                encoding="utf-8",
            )
        else:
            opt.table_to_csv(table, args.out)
    return 2 if table.failures else 0


def _single_epsilon(args) -> list[float]:
    values = _parse_epsilon(args.epsilon)
    if len(values) != 1:
        raise ValueError("this command takes a single epsilon, not a grid")
    return values


def _add_common(sub, *, need_x0=False, x0_optional=False):
    sub.add_argument("--graph", required=True, help="graph JSON path")
    sub.add_argument("--epsilon", required=True, help="gain value or start:stop:step grid")
    sub.add_argument("--h", type=int, default=0, help="measurement delay in control steps")
    if need_x0:
        sub.add_argument("--x0", required=not x0_optional, default=None,
                         help="comma-separated initial state, or 'paper' for the bundled one")
    sub.add_argument("--delta", type=float, default=1e-5, help="convergence threshold on the spread")
    sub.add_argument("--horizon", type=int, default=5000, help="simulated control steps")
    sub.add_argument("--out", default=None, help="output file path")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualrate",
        description="Dual-rate consensus under measurement delay: simulate, "
                    "analyze per-mode decay, optimize the sampling ratio.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="normalized-Laplacian eigenvalues and minimizer verdict")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("simulate", help="fast-rate closed-loop traces")
    _add_common(p, need_x0=True)
    p.add_argument("--N", required=True, help="sampling ratio or lo:hi range (one output per N)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("curves", help="per-mode decay-rate curves and the objective")
    _add_common(p)
    p.add_argument("--N", required=True, help="sampling-ratio range lo:hi")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("optimize", help="minimize the worst per-mode decay rate over N")
    _add_common(p)
    p.add_argument("--N", default=None, help="optional lo:hi; the upper bound caps the search")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("table1", help="analytical vs empirical optima across a gain grid")
    _add_common(p, need_x0=True, x0_optional=True)
    p.add_argument("--N", default="1:50", help="empirical search range lo:hi")
    p.set_defaults(func=cmd_table1)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (DualRateError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: bad graph JSON: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
