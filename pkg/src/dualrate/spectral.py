"""Per-mode decay analysis via characteristic-polynomial root magnitudes.

Projecting the lifted recursion onto an eigenvector of the normalized
Laplacian gives a scalar difference equation per mode lam, with
characteristic polynomial

    P(z) = z^(theta+2) - (1-gamma) z^(theta+1)
           - (1-lam) gamma f0 z - (1-lam) gamma f1.

The magnitude of its dominant root is the mode's per-sampling-period decay
rate; for the consensus mode (lam = 0) the persistent root z = 1 is
deflated first and the second-largest magnitude is reported. In the
one-period-delay regime (1 <= h <= N) the polynomial is a quadratic with
closed-form root magnitudes, used both as a fast path and a cross-check
against the general solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._format import sig12
from .dynamics import DerivedQuantities, Trace, lifted_coefficients
from .errors import DimensionMismatch, OutOfRegime, RootSolverNoConvergence
from .graph import Spectrum

_ZERO_MODE_TOL = 1e-12


@dataclass(frozen=True)
class CharPoly:
    """Monic characteristic polynomial of one mode, dense descending coefficients."""

    mode: float
    coefficients: np.ndarray  # length degree+1, coefficients[0] == 1

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    def evaluate(self, z):
        return np.polyval(self.coefficients, z)


@dataclass(frozen=True)
class SubstitutionVars:
    """Variables of the quadratic-regime root formulas.

    g = (1-epsilon)^N, b = |1-lam|, c = (1-epsilon)^-h. The half-sum p1
    switches convention between the lam <= 1 and lam > 1 branches; p2 is
    the same on both.
    """

    g: float
    b: float
    c: float
    p1: float
    p2: float


@dataclass(frozen=True)
class ModeRootCurve:
    """Dominant root magnitude of one mode sampled over a range of ratios.

    quadratic_regime marks the samples where 1 <= h <= N (degree-2
    polynomial); outside it the value comes from the general solver.
    """

    mode: float
    N_values: np.ndarray
    values: np.ndarray
    quadratic_regime: np.ndarray


def _char_coeffs(lam: float, theta: int, gamma: float, f0: float, f1: float) -> np.ndarray:
    # Built additively: for theta <= 0 some powers coincide and their
    # coefficients must merge (degree is theta+2, down to 1 at theta=-1).
    degree = theta + 2
    c = np.zeros(degree + 1)
    c[0] += 1.0
    c[degree - (theta + 1)] += -(1.0 - gamma)
    c[degree - 1] += -(1.0 - lam) * gamma * f0
    c[degree] += -(1.0 - lam) * gamma * f1
    return c


def char_poly(lambda_i: float, dq: DerivedQuantities) -> CharPoly:
    """Characteristic polynomial of mode lambda_i under lifted coefficients dq."""
    if not -_ZERO_MODE_TOL <= lambda_i <= 2.0 + _ZERO_MODE_TOL:
        raise ValueError(f"mode must lie in [0, 2], got {lambda_i}")
    coeffs = _char_coeffs(lambda_i, dq.theta, dq.gamma, dq.f0, dq.f1)
    coeffs.setflags(write=False)
    return CharPoly(mode=float(lambda_i), coefficients=coeffs)


def _quadratic_roots(b: float, c: float) -> np.ndarray:
    """Both roots of z^2 + b z + c (real b, c), cancellation-free."""
    disc = b * b - 4.0 * c
    if disc >= 0.0:
        r = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(r, b))
        if q == 0.0:  # only when b == 0 and c == 0
            return np.zeros(2, dtype=complex)
        return np.array([q, c / q], dtype=complex)
    half = 0.5 * math.sqrt(-disc)
    return np.array([complex(-0.5 * b, half), complex(-0.5 * b, -half)])


def _durand_kerner(coeffs: np.ndarray, max_iter: int = 10000) -> np.ndarray:
    """All roots of a monic polynomial by simultaneous iteration.

    Deterministic: fixed starting circle, fixed perturbation schedule when
    the iteration stalls (clustered/multiple roots converge linearly).
    """
    c = np.asarray(coeffs, dtype=complex)
    deg = c.size - 1
    radius = 1.0 + float(np.max(np.abs(c[1:])))  # Cauchy bound
    k = np.arange(deg)
    z = radius * np.exp(2j * np.pi * k / deg + 0.4j)
    for it in range(max_iter):
        pz = np.polyval(c, z)
        diffs = z[:, None] - z[None, :]
        np.fill_diagonal(diffs, 1.0)
        denom = diffs.prod(axis=1)
        bad = denom == 0.0
        if bad.any():  # coincident iterates: nudge apart and retry
            z[bad] += 1e-8 * radius * np.exp(2j * np.pi * k[bad] / deg)
            continue
        step = pz / denom
        z = z - step
        if np.all(np.abs(step) <= 1e-14 * (1.0 + np.abs(z))):
            break
        if it and it % 2500 == 0:  # stall breaker
            z = z * (1.0 + 1e-9) + 1e-12 * np.exp(2j * np.pi * k / deg)
    residual = np.abs(np.polyval(c, z))
    bound = 1e-10 * (1.0 + np.abs(z)) ** deg
    if np.any(residual > bound):
        raise RootSolverNoConvergence(
            f"residual {residual.max():.2e} above bound for degree {deg}"
        )
    return z


def _roots_from_coeffs(coeffs: np.ndarray) -> np.ndarray:
    degree = coeffs.size - 1
    if degree < 1:
        return np.empty(0, dtype=complex)
    if degree == 1:
        return np.array([-coeffs[1]], dtype=complex)
    if degree == 2:
        return _quadratic_roots(float(coeffs[1]), float(coeffs[2]))
    return _durand_kerner(coeffs)


def poly_roots(p: CharPoly) -> np.ndarray:
    """All complex roots; closed form up to degree 2, simultaneous iteration above."""
    if p.degree < 1:
        raise ValueError("polynomial must have degree >= 1")
    return _roots_from_coeffs(p.coefficients)


def _deflate_unit_root(coeffs: np.ndarray) -> np.ndarray:
    """Synthetic division by (z - 1); the remainder P(1) is discarded."""
    return np.cumsum(coeffs)[:-1]


def zbar(lambda_i: float, epsilon: float, h: int, N: float) -> float:
    """Dominant decay rate of one mode: the largest root magnitude of its
    characteristic polynomial (second largest for the consensus mode,
    after deflating the exact root at 1).

    N may be real >= 1; the polynomial degree follows the induced
    whole-period delay count.
    """
    theta, _, gamma, f0, f1 = lifted_coefficients(epsilon, h, N)
    coeffs = _char_coeffs(lambda_i, theta, gamma, f0, f1)
    if abs(lambda_i) <= _ZERO_MODE_TOL:
        coeffs = _deflate_unit_root(coeffs)
        if coeffs.size < 2:
            return 0.0
    roots = _roots_from_coeffs(coeffs)
    return float(np.max(np.abs(roots)))


def substitution_vars(lambda_i: float, epsilon: float, h: int, N: float) -> SubstitutionVars:
    """Quadratic-regime variables with the branch-correct p1 convention."""
    q = 1.0 - epsilon
    g = q ** N
    b = abs(1.0 - lambda_i)
    c = q ** (-h)
    if lambda_i <= 1.0:
        p1 = 0.5 * ((1.0 - b * c) * g + b)
    else:
        p1 = 0.5 * ((1.0 + b * c) * g - b)
    p2 = b * g * (c - 1.0)
    return SubstitutionVars(g=g, b=b, c=c, p1=p1, p2=p2)


def zbar_closed_form(lambda_i: float, epsilon: float, h: int, N: float) -> float:
    """Closed-form dominant root magnitude, valid for 1 <= h <= N.

    lam <= 1: both roots are real and the larger is p1 + sqrt(p1^2 + p2).
    lam > 1: the roots are p1 +- sqrt(p1^2 - p2); a negative discriminant
    gives a conjugate pair of magnitude sqrt(p2), otherwise the larger
    magnitude is |p1| + sqrt(p1^2 - p2).
    """
    if not 0.0 < lambda_i <= 2.0:
        raise ValueError(f"mode must lie in (0, 2], got {lambda_i}")
    if h < 1 or N < h:
        raise OutOfRegime(f"closed form requires 1 <= h <= N, got h={h}, N={N}")
    sv = substitution_vars(lambda_i, epsilon, h, N)
    if lambda_i <= 1.0:
        return sv.p1 + math.sqrt(sv.p1 * sv.p1 + sv.p2)
    disc = sv.p1 * sv.p1 - sv.p2
    if disc < 0.0:
        return math.sqrt(sv.p2)
    return abs(sv.p1) + math.sqrt(disc)


def _zbar_quadratic_vec(lambda_i: float, epsilon: float, h: int, N_arr: np.ndarray) -> np.ndarray:
    """Vectorized zbar on the quadratic regime (1 <= h <= N elementwise).

    Uses gamma*f0 = 1 - g*c and gamma*f1 = g*(c-1), and the direct
    max-magnitude formulas for a real quadratic: (|b| + sqrt(disc))/2 for
    real roots, sqrt(c0) for a conjugate pair.
    """
    q = 1.0 - epsilon
    g = q ** N_arr
    c = q ** (-h)
    if abs(lambda_i) <= _ZERO_MODE_TOL:
        return g * (c - 1.0)  # deflated: remaining root is -gamma*f1
    one_m_lam = 1.0 - lambda_i
    b_coef = -(g + one_m_lam * (1.0 - g * c))   # z^1 coefficient
    c_coef = -one_m_lam * g * (c - 1.0)         # z^0 coefficient
    disc = b_coef * b_coef - 4.0 * c_coef
    real_part = 0.5 * (np.abs(b_coef) + np.sqrt(np.maximum(disc, 0.0)))
    pair_part = np.sqrt(np.maximum(c_coef, 0.0))
    return np.where(disc >= 0.0, real_part, pair_part)


def mode_curve(lambda_i: float, epsilon: float, h: int, N_values) -> ModeRootCurve:
    """zbar sampled over N_values (vectorized on the quadratic regime)."""
    N_arr = np.asarray(N_values, dtype=float)
    values = np.empty(N_arr.shape)
    quad = (N_arr >= h) & (h >= 1)
    if quad.any():
        values[quad] = _zbar_quadratic_vec(lambda_i, epsilon, h, N_arr[quad])
    for idx in np.flatnonzero(~quad):
        values[idx] = zbar(lambda_i, epsilon, h, float(N_arr[idx]))
    values.setflags(write=False)
    n_arr = N_arr.copy()
    n_arr.setflags(write=False)
    quad.setflags(write=False)
    return ModeRootCurve(
        mode=float(lambda_i), N_values=n_arr, values=values, quadratic_regime=quad
    )


def project_modes(s: Spectrum, trace: Trace) -> np.ndarray:
    """Per-mode coefficients alpha[l, i] = left_i . x(l) for every step l.

    The trace reconstructs as states = alpha @ right.T; for a slow trace
    each column follows the mode's scalar recursion.
    """
    n = s.eigenvalues.size
    if trace.states.shape[1] != n:
        raise DimensionMismatch(
            f"trace has {trace.states.shape[1]} agents, spectrum has {n}"
        )
    return trace.states @ s.left_eigenvectors.T


def curves_to_csv(curves: list[ModeRootCurve], path, extra: dict | None = None) -> None:
    """Write `N,zbar_lambda_<mode>,...` rows; optional named extra columns."""
    if not curves:
        raise ValueError("need at least one curve")
    base = curves[0].N_values
    for curve in curves[1:]:
        if not np.array_equal(curve.N_values, base):
            raise ValueError("all curves must share the same N grid")
    names = [f"zbar_lambda_{format(c.mode, '.6g')}" for c in curves]
    columns = [c.values for c in curves]
    if extra:
        names.extend(extra.keys())
        columns.extend(np.asarray(v, dtype=float) for v in extra.values())
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("N," + ",".join(names) + "\n")
        for row_idx, n_val in enumerate(base):
            cells = [sig12(n_val)] + [sig12(col[row_idx]) for col in columns]
            fh.write(",".join(cells) + "\n")
