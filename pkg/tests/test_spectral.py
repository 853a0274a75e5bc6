import numpy as np
import pytest

from dualrate.dynamics import (
    SystemParams,
    derived_quantities,
    lifted_coefficients,
    simulate_slow,
)
from dualrate.errors import DimensionMismatch, OutOfRegime
from dualrate.graph import spectrum
from dualrate.spectral import (
    CharPoly,
    char_poly,
    curves_to_csv,
    mode_curve,
    poly_roots,
    project_modes,
    substitution_vars,
    zbar,
    zbar_closed_form,
)


def dq_for(eps, h, N):
    return derived_quantities(SystemParams(epsilon=eps, h=h, N=N))


def random_mode_params(rng, h_max=12, N_max=20):
    eps = float(rng.uniform(0.05, 0.95))
    h = int(rng.integers(0, h_max + 1))
    N = int(rng.integers(1, N_max + 1))
    return eps, h, N


def assert_roots_match(got, expected, atol):
    # multiset comparison: complex sorting is unstable for conjugate pairs
    remaining = list(got)
    for e in expected:
        k = int(np.argmin(np.abs(np.array(remaining) - e)))
        assert abs(remaining.pop(k) - e) <= atol


class TestCharPoly:
    def test_one_period_delay_is_quadratic(self):
        dq = dq_for(0.3, 10, 16)
        p = char_poly(0.7, dq)
        expected = [1.0, -((1 - dq.gamma) + (1 - 0.7) * dq.gamma * dq.f0),
                    -(1 - 0.7) * dq.gamma * dq.f1]
        assert p.degree == 2
        assert np.allclose(p.coefficients, expected, rtol=1e-15)

    def test_zero_mode_factors_through_one(self):
        # for the consensus mode the quadratic is (z - 1)(z + gamma*f1)
        dq = dq_for(0.3, 10, 16)
        p = char_poly(0.0, dq)
        gf1 = dq.gamma * dq.f1
        assert np.allclose(p.coefficients, [1.0, gf1 - 1.0, -gf1], rtol=1e-12)

    def test_delay_equal_period(self):
        # h == N makes the newer-sample weight vanish
        dq = dq_for(0.4, 7, 7)
        assert dq.f0 == 0.0
        p = char_poly(1.3, dq)
        assert p.coefficients[1] == pytest.approx(-(1 - dq.gamma))
        assert p.coefficients[2] == pytest.approx(-(1 - 1.3) * dq.gamma)

    def test_zero_delay_collapses_to_linear(self):
        dq = dq_for(0.4, 0, 5)
        p = char_poly(0.8, dq)
        assert p.degree == 1
        assert p.coefficients[1] == pytest.approx(-((1 - dq.gamma) + (1 - 0.8) * dq.gamma))

    def test_value_at_one_is_gamma_times_mode(self, rng):
        for _ in range(300):
            eps, h, N = random_mode_params(rng)
            lam = float(rng.uniform(0.0, 2.0))
            dq = dq_for(eps, h, N)
            assert char_poly(lam, dq).evaluate(1.0) == pytest.approx(
                dq.gamma * lam, abs=1e-12
            )

    def test_mode_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            char_poly(2.5, dq_for(0.3, 2, 4))


class TestPolyRoots:
    def test_known_quadratic(self):
        p = CharPoly(mode=0.5, coefficients=np.array([1.0, -0.5, -0.5]))
        roots = sorted(poly_roots(p).real)
        assert roots == pytest.approx([-0.5, 1.0])

    def test_zero_mode_roots(self):
        dq = dq_for(0.45, 3, 9)
        roots = poly_roots(char_poly(0.0, dq))
        assert sorted(np.abs(roots)) == pytest.approx([dq.gamma * dq.f1, 1.0], abs=1e-12)

    def test_quartic_matches_companion_oracle(self):
        dq = dq_for(0.3, 5, 2)
        assert dq.theta == 2
        p = char_poly(1.5, dq)
        assert_roots_match(poly_roots(p), np.roots(p.coefficients), atol=1e-10)

    def test_randomized_against_companion_oracle(self, rng):
        for _ in range(200):
            eps, h, N = random_mode_params(rng)
            lam = float(rng.uniform(0.0, 2.0))
            p = char_poly(lam, dq_for(eps, h, N))
            assert_roots_match(poly_roots(p), np.roots(p.coefficients), atol=1e-8)

    def test_residuals_within_bound(self, rng):
        for _ in range(100):
            eps, h, N = random_mode_params(rng)
            lam = float(rng.uniform(0.0, 2.0))
            p = char_poly(lam, dq_for(eps, h, N))
            roots = poly_roots(p)
            residual = np.abs(np.polyval(p.coefficients, roots))
            assert np.all(residual <= 1e-10 * (1.0 + np.abs(roots)) ** p.degree)


class TestZbar:
    def test_zero_mode_value(self):
        # frozen: gamma*f1 for (0.3, 10, 16) from high-precision evaluation
        assert zbar(0.0, 0.3, 10, 16) == pytest.approx(0.1143257069430399, abs=1e-13)

    def test_zero_mode_matches_weight_product(self, rng):
        for _ in range(100):
            eps = float(rng.uniform(0.05, 0.95))
            h = int(rng.integers(1, 10))
            N = int(rng.integers(h, 25))
            dq = dq_for(eps, h, N)
            assert zbar(0.0, eps, h, N) == pytest.approx(dq.gamma * dq.f1, abs=1e-10)

    def test_unit_mode_leaves_only_undelayed_root(self, rng):
        for _ in range(50):
            eps, h, N = random_mode_params(rng)
            _, _, gamma, _, _ = lifted_coefficients(eps, h, N)
            assert zbar(1.0, eps, h, N) == pytest.approx(1.0 - gamma, abs=1e-12)

    def test_largest_bench_mode_has_interior_minimum(self, bench_graph):
        lam = spectrum(bench_graph).eigenvalues[-1]
        values = [zbar(lam, 0.3, 10, N) for N in range(10, 51)]
        k = int(np.argmin(values))
        assert 0 < k < len(values) - 1

    def test_root_magnitudes_bounded_sample(self, rng):
        for _ in range(150):
            eps, h, N = random_mode_params(rng)
            lam = float(rng.uniform(1e-6, 2.0))
            roots = poly_roots(char_poly(lam, dq_for(eps, h, N)))
            assert np.max(np.abs(roots)) < 1.0 + 1e-9


class TestClosedForm:
    def test_worked_conjugate_pair_case(self):
        # quadratic z^2 - 0.5 z + 0.5: conjugate roots of magnitude sqrt(1/2)
        got = zbar_closed_form(2.0, 0.5, 1, 1)
        oracle = max(abs(r) for r in np.roots([1.0, -0.5, 0.5]))
        assert got == pytest.approx(np.sqrt(0.5), abs=1e-15)
        assert got == pytest.approx(oracle, abs=1e-12)

    def test_large_ratio_limit_for_small_modes(self, rng):
        # once (1-eps)^N is negligible the dominant magnitude is |1-lam|
        for _ in range(50):
            eps = float(rng.uniform(0.2, 0.8))
            lam = float(rng.uniform(0.05, 1.0))
            h = int(rng.integers(1, 6))
            N = int(np.ceil(np.log(1e-8) / np.log(1.0 - eps))) + 1
            assert zbar_closed_form(lam, eps, h, N) == pytest.approx(abs(1 - lam), abs=1e-6)

    def test_continuous_at_branch_point(self):
        below = zbar_closed_form(1.0, 0.35, 3, 11)
        above = zbar_closed_form(1.0 + 1e-12, 0.35, 3, 11)
        assert above == pytest.approx(below, abs=1e-9)

    def test_out_of_regime_rejected(self):
        with pytest.raises(OutOfRegime):
            zbar_closed_form(1.5, 0.3, 8, 5)
        with pytest.raises(OutOfRegime):
            zbar_closed_form(1.5, 0.3, 0, 5)

    def test_matches_general_solver(self, rng):
        for _ in range(300):
            eps = float(rng.uniform(0.05, 0.95))
            h = int(rng.integers(1, 12))
            N = int(rng.integers(h, 30))
            lam = float(rng.uniform(1e-9, 2.0))
            assert zbar_closed_form(lam, eps, h, N) == pytest.approx(
                zbar(lam, eps, h, N), abs=1e-10
            )

    def test_monotone_decay_for_small_modes_sample(self, rng):
        for _ in range(100):
            eps = float(rng.uniform(0.05, 0.95))
            lam = float(rng.uniform(1e-6, 1.0))
            h = int(rng.integers(1, 10))
            n1 = float(rng.uniform(h, h + 30))
            n2 = n1 + float(rng.uniform(0.01, 20))
            assert zbar(lam, eps, h, n1) >= zbar(lam, eps, h, n2) - 1e-12

    def test_smaller_modes_decay_no_faster_sample(self, rng):
        for _ in range(100):
            eps = float(rng.uniform(0.05, 0.95))
            h = int(rng.integers(1, 10))
            N = int(rng.integers(h, 40))
            li, lj = sorted(rng.uniform(1e-6, 1.0, size=2))
            assert zbar(li, eps, h, N) >= zbar(lj, eps, h, N) - 1e-12


class TestSubstitutionVars:
    def test_fields_and_branches(self):
        sv_low = substitution_vars(0.6, 0.3, 4, 9)
        g, b, c = 0.7**9, abs(1 - 0.6), 0.7**-4
        assert sv_low.g == pytest.approx(g)
        assert sv_low.b == pytest.approx(b)
        assert sv_low.c == pytest.approx(c)
        assert sv_low.p1 == pytest.approx(0.5 * ((1 - b * c) * g + b))
        assert sv_low.p2 == pytest.approx(b * g * (c - 1))
        sv_high = substitution_vars(1.6, 0.3, 4, 9)
        b_high = 0.6
        assert sv_high.p1 == pytest.approx(0.5 * ((1 + b_high * c) * g - b_high))

    def test_invariants(self, rng):
        for _ in range(100):
            eps = float(rng.uniform(0.05, 0.95))
            h = int(rng.integers(0, 10))
            N = int(rng.integers(max(h, 1), 20))
            sv = substitution_vars(float(rng.uniform(0, 2)), eps, h, N)
            assert 0.0 < sv.g < 1.0
            assert sv.c >= 1.0
            assert (sv.c == 1.0) == (h == 0)
            assert sv.p2 >= 0.0


class TestModeCurve:
    def test_matches_scalar_everywhere(self, rng):
        grid = np.array([1.0, 2.0, 5.0, 7.0, 7.5, 10.0, 16.0, 30.0])
        for lam in [0.0, 0.45, 1.0, 1.3, 2.0]:
            curve = mode_curve(lam, 0.3, 7, grid)
            scalar = [zbar(lam, 0.3, 7, float(N)) for N in grid]
            assert np.allclose(curve.values, scalar, atol=1e-13)
            assert curve.quadratic_regime.tolist() == (grid >= 7).tolist()

    def test_zero_delay_grid_matches_scalar(self):
        grid = np.arange(1, 20, dtype=float)
        for lam in (0.0, 0.5, 1.3, 2.0):
            curve = mode_curve(lam, 0.35, 0, grid)
            scalar = [zbar(lam, 0.35, 0, float(N)) for N in grid]
            assert np.allclose(curve.values, scalar, atol=1e-14)
            assert not curve.quadratic_regime.any()

    def test_zero_mode_curve_decreases_to_zero(self):
        curve = mode_curve(0.0, 0.3, 10, np.arange(10, 80))
        assert np.all(np.diff(curve.values) < 0)
        assert curve.values[-1] < 1e-8

    def test_smallest_bench_mode_curve_decreases(self, bench_graph):
        lam = spectrum(bench_graph).eigenvalues[1]
        curve = mode_curve(lam, 0.3, 10, np.arange(10, 51))
        assert np.all(np.diff(curve.values) < 0)

    def test_csv_export(self, tmp_path):
        grid = np.arange(10, 15, dtype=float)
        curves = [mode_curve(lam, 0.3, 10, grid) for lam in (0.0, 1.877)]
        path = tmp_path / "curves.csv"
        curves_to_csv(curves, path, extra={"objective": np.ones(5)})
        lines = path.read_text().splitlines()
        assert lines[0] == "N,zbar_lambda_0,zbar_lambda_1.877,objective"
        assert len(lines) == 6
        row = lines[1].split(",")
        assert float(row[0]) == 10.0
        assert float(row[1]) == pytest.approx(curves[0].values[0])


class TestProjection:
    def test_consensus_state_hits_only_zero_mode(self, bench_graph):
        s = spectrum(bench_graph)
        x0 = np.full(6, 4.0)
        trace = simulate_slow(bench_graph, SystemParams(0.3, 10, 16), x0, 5)
        alphas = project_modes(s, trace)
        assert np.allclose(alphas[:, 1:], 0.0, atol=1e-9)
        assert np.allclose(alphas[:, 0], alphas[0, 0], atol=1e-12)

    def test_reconstruction_roundtrip(self, bench_graph, bench_x0):
        s = spectrum(bench_graph)
        trace = simulate_slow(bench_graph, SystemParams(0.3, 10, 16), bench_x0, 60)
        alphas = project_modes(s, trace)
        rebuilt = alphas @ s.right_eigenvectors.T
        assert np.max(np.abs(rebuilt - trace.states)) <= 1e-8

    def test_modes_follow_scalar_recursion(self, bench_graph, bench_x0, rng):
        # each projected coefficient must satisfy the per-mode difference
        # equation with the same constant pre-start history
        for eps, h, N in [(0.3, 10, 16), (0.55, 7, 3), (0.2, 0, 4)]:
            p = SystemParams(eps, h, N)
            dq = derived_quantities(p)
            s = spectrum(bench_graph)
            trace = simulate_slow(bench_graph, p, bench_x0, 50)
            alphas = project_modes(s, trace)
            hist = s.left_eigenvectors @ bench_x0

            def alpha(l, i):
                return alphas[l, i] if l >= 0 else hist[i]

            for i, lam in enumerate(s.eigenvalues):
                for l in range(50):
                    mix = dq.f1 * alpha(l - dq.theta - 1, i)
                    if dq.f0 != 0.0:
                        mix += dq.f0 * alpha(l - dq.theta, i)
                    predicted = (1 - dq.gamma) * alpha(l, i) + (1 - lam) * dq.gamma * mix
                    assert alphas[l + 1, i] == pytest.approx(predicted, abs=1e-8)

    def test_dimension_mismatch(self, bench_graph, k2):
        s = spectrum(k2)
        trace = simulate_slow(bench_graph, SystemParams(0.3, 10, 16), np.zeros(6), 3)
        with pytest.raises(DimensionMismatch):
            project_modes(s, trace)
