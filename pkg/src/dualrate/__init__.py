"""Dual-rate consensus under measurement delay.

Simulation of single-integrator agents whose controllers update every
step while neighbor measurements arrive every N steps with a fixed delay,
per-mode convergence analysis through characteristic-polynomial root
magnitudes, and optimization of the sampling-period ratio.
"""
from .dynamics import (
    DerivedQuantities,
    SystemParams,
    Trace,
    check_fast_slow_equivalence,
    convergence_step,
    derived_quantities,
    empirical_optimal_N,
    simulate_fast,
    simulate_slow,
    spread,
    trace_to_csv,
)
from .graph import (
    Graph,
    Spectrum,
    from_adjacency,
    from_json,
    has_simple_zero,
    is_connected,
    load_graph,
    normalized_laplacian,
    spectrum,
)
from .optimize import (
    ModeMinimum,
    OptimizationReport,
    TableOne,
    conjecture_check,
    finite_minimizer_exists,
    mode_minimum,
    objective,
    objective_curve,
    solve_N_star,
    table_one,
    table_to_csv,
)
from .spectral import (
    CharPoly,
    ModeRootCurve,
    SubstitutionVars,
    char_poly,
    curves_to_csv,
    mode_curve,
    poly_roots,
    project_modes,
    substitution_vars,
    zbar,
    zbar_closed_form,
)

__all__ = [
    "CharPoly",
    "DerivedQuantities",
    "Graph",
    "ModeMinimum",
    "ModeRootCurve",
    "OptimizationReport",
    "Spectrum",
    "SubstitutionVars",
    "SystemParams",
    "TableOne",
    "Trace",
    "char_poly",
    "check_fast_slow_equivalence",
    "conjecture_check",
    "convergence_step",
    "curves_to_csv",
    "derived_quantities",
    "empirical_optimal_N",
    "finite_minimizer_exists",
    "from_adjacency",
    "from_json",
    "has_simple_zero",
    "is_connected",
    "load_graph",
    "mode_curve",
    "mode_minimum",
    "normalized_laplacian",
    "objective",
    "objective_curve",
    "poly_roots",
    "project_modes",
    "simulate_fast",
    "simulate_slow",
    "solve_N_star",
    "spectrum",
    "spread",
    "substitution_vars",
    "table_one",
    "table_to_csv",
    "trace_to_csv",
    "zbar",
    "zbar_closed_form",
]

__version__ = "0.1.0"
