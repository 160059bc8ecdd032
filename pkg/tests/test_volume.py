import math
from fractions import Fraction

import numpy as np
import pytest

from ballrep import (
    EffectiveSampleSizeWarning,
    GeneralizedPolynomial,
    InfiniteVolumeError,
    closed_form_ball_moment,
    closed_form_ball_volume,
    euler_residual,
    finite_volume_test,
    grad_volume,
    hankel_diag_bound_check,
    ld_polynomial,
    moment,
    moment_matrix,
    moment_table,
    region_hash,
    volume,
)
from conftest import agree, random_feasible_quartic

DISK4 = GeneralizedPolynomial(2, 4, 1, {(4, 0): 1.0, (0, 4): 1.0, (2, 2): 2.0})
FIG1_QUARTIC = GeneralizedPolynomial(2, 4, 1, {(4, 0): 1.0, (0, 4): 1.0, (2, 2): -1.925})
FIG1_SEXTIC = GeneralizedPolynomial(2, 6, 1, {(6, 0): 1.0, (0, 6): 1.0, (3, 3): -1.925})


class TestClosedForms:
    def test_disk_volume_is_pi(self):
        assert closed_form_ball_volume(2, 2) == pytest.approx(math.pi, abs=1e-12)

    def test_cross_polytope_area(self):
        # {|x1| + |x2| <= 1} is a square with diagonal 2, elementary area 2
        assert closed_form_ball_volume(2, 1) == pytest.approx(2.0, abs=1e-12)

    def test_half_power_ball(self):
        assert closed_form_ball_volume(2, Fraction(1, 2)) == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_euclidean_ball_3d(self):
        assert closed_form_ball_volume(3, 2) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-12)

    def test_disk_axis_moment(self):
        # polar integration: int x1^2 over the unit disk = pi / 4
        assert closed_form_ball_moment(2, 2) == pytest.approx(math.pi / 4.0, rel=1e-12)

    def test_moment_is_volume_over_n_plus_d(self):
        for n, d in ((2, 4), (3, 2), (4, 6), (2, Fraction(1, 2))):
            ratio = closed_form_ball_moment(n, d) / closed_form_ball_volume(n, d)
            assert ratio == pytest.approx(1.0 / (n + float(Fraction(d))), rel=1e-12)

    def test_ball3_axis_moment(self):
        assert closed_form_ball_moment(3, 2) == pytest.approx((4 * math.pi / 3) / 5, rel=1e-12)

    def test_overflow_reported(self):
        with pytest.raises(OverflowError, match="overflows"):
            closed_form_ball_volume(2000, 1000)
        # the other extreme: high dimension with small degree loses the value to 0
        with pytest.raises(OverflowError, match="underflows"):
            closed_form_ball_volume(400, Fraction(1, 4))

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            closed_form_ball_volume(0, 2)
        with pytest.raises(ValueError):
            closed_form_ball_volume(2, 0)
        with pytest.raises(ValueError):
            closed_form_ball_moment(2, 2, axis=5)


class TestSphericalBackend:
    def test_disk_as_quartic_volume(self):
        est = volume(DISK4, budget=256)
        assert est.value == pytest.approx(math.pi, abs=1e-6)
        assert est.std_error == 0.0
        assert est.backend == "spherical"

    def test_quadratic_disk_volume(self):
        est = volume(ld_polynomial(2, 2), budget=256)
        assert est.value == pytest.approx(math.pi, abs=1e-9)

    def test_paper_example_moments(self):
        assert moment(DISK4, (4, 0), budget=512)[0] == pytest.approx(0.392699, abs=1e-5)
        assert moment(DISK4, (2, 2), budget=512)[0] == pytest.approx(0.130899, abs=1e-5)
        # exact oracle values: pi/8 and pi/24 by polar integration
        assert moment(DISK4, (4, 0), budget=512)[0] == pytest.approx(math.pi / 8, rel=1e-10)
        assert moment(DISK4, (2, 2), budget=512)[0] == pytest.approx(math.pi / 24, rel=1e-10)

    def test_axis_moment_consistency_with_closed_form(self):
        for d in (2, 4):
            g = ld_polynomial(2, d)
            got = moment(g, (d, 0), budget=4096)[0]
            assert got == pytest.approx(closed_form_ball_moment(2, d), rel=1e-9)

    def test_ball_volumes_match_closed_form(self):
        for n, d in ((2, 2), (2, 4), (3, 2), (3, 4)):
            est = volume(ld_polynomial(n, d), budget=16384)
            assert est.value == pytest.approx(closed_form_ball_volume(n, d), rel=1e-8)

    def test_generalized_half_power_volume(self):
        est = volume(ld_polynomial(2, Fraction(1, 2), q=2), budget=65536)
        assert est.value == pytest.approx(2.0 / 3.0, abs=1e-4)

    def test_infeasible_raises(self):
        bad = GeneralizedPolynomial(2, 4, 1, {(4, 0): 1.0, (0, 4): 1.0, (2, 2): -2.1})
        with pytest.raises(InfiniteVolumeError, match="sphere minimum"):
            volume(bad, budget=1024)

    def test_unsupported_dimension(self):
        with pytest.raises(ValueError, match="n in"):
            volume(ld_polynomial(4, 2), backend="spherical")


class TestSymmetryZeros:
    def test_even_support_odd_component_is_exact_zero(self):
        for backend in ("spherical", "monte_carlo", "grid_oracle"):
            value, err = moment(FIG1_QUARTIC, (3, 1), backend=backend, budget=10000, seed=1)
            assert value == 0.0 and err == 0.0

    def test_odd_total_degree_is_exact_zero(self):
        g = random_feasible_quartic(np.random.default_rng(0))
        assert moment(g, (1, 0), budget=128) == (0.0, 0.0)
        assert moment(g, (2, 1), budget=128) == (0.0, 0.0)

    def test_asymmetric_support_keeps_honest_odd_moments(self):
        g = GeneralizedPolynomial(
            2, 4, 1, {(4, 0): 1.0, (0, 4): 1.0, (3, 1): 0.35, (2, 2): 0.2}
        )
        sph = moment(g, (3, 1), budget=8192)[0]
        assert sph != 0.0
        grid = moment(g, (3, 1), backend="grid_oracle", budget=1_500_000, seed=5)
        assert agree(sph, 0.0, grid[0], grid[1])


class TestMomentTable:
    def test_zero_row_equals_volume(self):
        table = moment_table(DISK4, max_order=4, budget=512)
        zero = (0, 0)
        assert table.entries[zero][0] == table.normalization.value

    def test_covers_degree_slice_by_default(self):
        table = moment_table(DISK4, budget=256)
        assert set(table.entries) == {(4, 0), (3, 1), (2, 2), (1, 3), (0, 4)}

    def test_region_hash_tracks_polynomial(self):
        assert region_hash(DISK4) != region_hash(FIG1_QUARTIC)
        table = moment_table(DISK4, budget=128)
        assert table.region == region_hash(DISK4)

    def test_max_order_lattice_walk(self):
        g = ld_polynomial(2, Fraction(1, 2), q=8)
        table = moment_table(g, max_order=Fraction(1, 2), budget=4096)
        grades = {sum(a) for a in table.entries}
        assert grades == set(range(5))
        top = [a for a in table.entries if sum(a) == 4]
        assert len(top) == 5


class TestGradient:
    def test_disk_gradient_component(self):
        # -(n+d)/d * moment = -2 * pi/4 at the quadratic disk
        grads = grad_volume(ld_polynomial(2, 2), budget=2048)
        assert grads[(2, 0)] == pytest.approx(-math.pi / 2, rel=1e-9)
        assert grads[(1, 1)] == 0.0

    def test_matches_central_differences(self):
        rng = np.random.default_rng(42)
        eps = 1e-4
        for _ in range(3):
            g = random_feasible_quartic(rng)
            grads = grad_volume(g, budget=4096)
            for alpha, got in grads.items():
                plus = dict(g.terms)
                minus = dict(g.terms)
                plus[alpha] = plus.get(alpha, 0.0) + eps
                minus[alpha] = minus.get(alpha, 0.0) - eps
                fd = (
                    volume(GeneralizedPolynomial(2, 4, 1, plus), budget=4096).value
                    - volume(GeneralizedPolynomial(2, 4, 1, minus), budget=4096).value
                ) / (2 * eps)
                assert abs(got - fd) <= 1e-4 * max(abs(got), abs(fd)) + 1e-10

    def test_multinomial_chain_rule(self):
        mono = grad_volume(DISK4, budget=1024)
        multi = grad_volume(DISK4.to_convention("multinomial"), budget=1024)
        assert multi[(2, 2)] == pytest.approx(6.0 * mono[(2, 2)], rel=1e-12)


class TestEulerIdentity:
    def test_disk_values(self):
        g = ld_polynomial(2, 2)
        assert abs(euler_residual(g, budget=2048)) <= 1e-12
        table = moment_table(g, budget=2048)
        integral_g = table.value((2, 0)) + table.value((0, 2))
        assert integral_g == pytest.approx(math.pi / 2, rel=1e-9)

    def test_quartic_representation_of_disk(self):
        table = moment_table(DISK4, budget=2048)
        integral_g = (
            table.value((4, 0)) + table.value((0, 4)) + 2.0 * table.value((2, 2))
        )
        assert integral_g == pytest.approx(math.pi / 3, rel=1e-9)

    def test_residual_tiny_for_random_quartics(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            g = random_feasible_quartic(rng)
            vol = volume(g, budget=4096).value
            assert abs(euler_residual(g, budget=4096)) / vol <= 1e-12


class TestFeasibility:
    def test_figure_one_sphere_minimum(self):
        verdict = finite_volume_test(FIG1_QUARTIC)
        assert verdict.finite_volume
        assert verdict.sphere_minimum == pytest.approx(0.075 / 4.0, abs=1e-9)

    def test_infeasible_quartic(self):
        bad = GeneralizedPolynomial(2, 4, 1, {(4, 0): 1.0, (0, 4): 1.0, (2, 2): -2.1})
        verdict = finite_volume_test(bad)
        assert not verdict.finite_volume
        assert verdict.sphere_minimum == pytest.approx(-0.025, abs=1e-9)

    def test_constant_on_sphere(self):
        verdict = finite_volume_test(ld_polynomial(2, 2))
        assert verdict.sphere_minimum == pytest.approx(1.0, abs=1e-12)

    def test_three_dimensional_search(self):
        g = GeneralizedPolynomial(
            3, 4, 1,
            {(4, 0, 0): 1.0, (0, 4, 0): 1.0, (0, 0, 4): 1.0, (2, 2, 0): -1.9},
        )
        verdict = finite_volume_test(g, seed=1)
        # minimizing 0.1 t^4 + (1 - 2 t^2)^2 over 2 t^2 + z^2 = 1 gives exactly 1/41,
        # strictly below the in-plane value (2 - 1.9)/4 = 0.025
        assert verdict.sphere_minimum == pytest.approx(1.0 / 41.0, abs=1e-6)


class TestHomogeneityAndConvexity:
    @pytest.mark.parametrize("lam", [0.5, 2.0])
    def test_volume_scaling(self, lam):
        for g in (DISK4, FIG1_QUARTIC, ld_polynomial(2, Fraction(1, 2), q=2)):
            base = volume(g, budget=8192).value
            scaled = volume(g.rescale(lam), budget=8192).value
            n, d = g.n, g.degree_float
            assert scaled == pytest.approx(lam ** (-n / d) * base, rel=1e-6)

    def test_midpoint_strict_convexity(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            g, h = random_feasible_quartic(rng), random_feasible_quartic(rng)
            mid_terms = {
                a: 0.5 * (g.terms.get(a, 0.0) + h.terms.get(a, 0.0))
                for a in set(g.terms) | set(h.terms)
            }
            mid = GeneralizedPolynomial(2, 4, 1, mid_terms)
            fmid = volume(mid, budget=4096).value
            favg = 0.5 * (volume(g, budget=4096).value + volume(h, budget=4096).value)
            assert fmid < favg


class TestBackendAgreement:
    @pytest.mark.parametrize(
        "poly,floor",
        [
            (ld_polynomial(2, 2), 0.0),
            (DISK4, 0.0),
            (FIG1_QUARTIC, 0.0),
            # the generalized integrand has kinks on the axes, so the spherical
            # trapezoid carries an (unreported) truncation error at this budget
            (ld_polynomial(2, Fraction(1, 2), q=2), 1e-4),
        ],
        ids=["disk2", "disk4", "fig1", "half"],
    )
    def test_volume_three_backends(self, poly, floor):
        sph = volume(poly, budget=16384)
        mc = volume(poly, backend="monte_carlo", budget=400_000, seed=3)
        grid = volume(poly, backend="grid_oracle", budget=1_000_000, seed=3)
        assert agree(sph.value, sph.std_error, mc.value, mc.std_error, floor=floor)
        assert agree(sph.value, sph.std_error, grid.value, grid.std_error, floor=floor)
        assert agree(mc.value, mc.std_error, grid.value, grid.std_error, floor=floor)

    def test_moment_cross_check(self):
        sph = moment(FIG1_QUARTIC, (2, 2), budget=16384)
        mc = moment(FIG1_QUARTIC, (2, 2), backend="monte_carlo", budget=400_000, seed=2)
        grid = moment(FIG1_QUARTIC, (2, 2), backend="grid_oracle", budget=1_000_000, seed=2)
        assert agree(sph[0], sph[1], mc[0], mc[1])
        assert agree(sph[0], sph[1], grid[0], grid[1])


class TestMonteCarlo:
    def test_reproducible_given_seed(self):
        a = volume(FIG1_QUARTIC, backend="monte_carlo", budget=50_000, seed=9)
        b = volume(FIG1_QUARTIC, backend="monte_carlo", budget=50_000, seed=9)
        assert a == b
        c = volume(FIG1_QUARTIC, backend="monte_carlo", budget=50_000, seed=10)
        assert c.value != a.value

    def test_axis_power_weights_are_flat(self):
        est = volume(ld_polynomial(3, 4), backend="monte_carlo", budget=30_000, seed=4)
        assert est.value == pytest.approx(closed_form_ball_volume(3, 4), rel=1e-12)
        assert est.ess == pytest.approx(30_000.0)

    def test_ess_diagnostic_fires_for_infeasible_input(self):
        # negative on an open cone: no rescale can make the reference dominate
        bad = GeneralizedPolynomial(2, 4, 1, {(4, 0): 1.0, (0, 4): 1.0, (2, 2): -3.0})
        with pytest.warns(EffectiveSampleSizeWarning):
            est = volume(bad, backend="monte_carlo", budget=200_000, seed=0)
        assert est.ess < 0.01 * 200_000

    def test_higher_dimension_supported(self):
        g = ld_polynomial(4, 2)
        est = volume(g, backend="monte_carlo", budget=200_000, seed=6)
        assert est.value == pytest.approx(closed_form_ball_volume(4, 2), rel=1e-2)


class TestMomentMatrixAndHankel:
    def test_disk_matrix_is_quarter_pi_identity(self):
        mm = moment_matrix(ld_polynomial(2, 2), 1, budget=2048)
        np.testing.assert_allclose(mm.values, (math.pi / 4) * np.eye(2), atol=1e-9)

    def test_disk4_matrix_entries(self):
        mm = moment_matrix(DISK4, 2, budget=2048)
        assert mm.values[0, 0] == pytest.approx(0.392699, abs=1e-5)
        assert mm.values[0, 2] == pytest.approx(0.130899, abs=1e-5)
        assert mm.values[1, 1] == pytest.approx(0.130899, abs=1e-5)
        np.testing.assert_allclose(mm.values, mm.values.T)

    def test_matrix_is_positive_semidefinite(self):
        for g in (DISK4, FIG1_QUARTIC, ld_polynomial(2, 4)):
            mm = moment_matrix(g, 2, budget=8192)
            assert np.linalg.eigvalsh(mm.values).min() >= -1e-10

    def test_hankel_bound_on_balls(self):
        assert hankel_diag_bound_check(moment_matrix(ld_polynomial(2, 4), 2, budget=8192))
        assert hankel_diag_bound_check(moment_matrix(ld_polynomial(2, 2), 1, budget=2048))

    def test_hankel_bound_generalized(self):
        g = ld_polynomial(2, Fraction(1, 2), q=4)
        mm = moment_matrix(g, budget=65536)
        assert mm.values.shape == (2, 2)
        assert hankel_diag_bound_check(mm)

    def test_odd_half_lattice_needs_explicit_half_degree(self):
        g = ld_polynomial(2, 3, q=1)
        with pytest.raises(ValueError, match="half_degree"):
            moment_matrix(g)


class TestGridOracle:
    def test_half_ball_volume(self):
        est = volume(
            ld_polynomial(2, Fraction(1, 2), q=2),
            backend="grid_oracle", budget=1_400_000, seed=3,
        )
        assert est.value == pytest.approx(2.0 / 3.0, abs=1e-3)
        assert est.std_error > 0.0

    def test_infeasible_raises(self):
        bad = GeneralizedPolynomial(2, 4, 1, {(4, 0): 1.0, (0, 4): 1.0, (2, 2): -2.1})
        with pytest.raises(InfiniteVolumeError):
            volume(bad, backend="grid_oracle", budget=10_000)

    def test_sextic_figure_case(self):
        sph = volume(FIG1_SEXTIC, budget=16384)
        grid = volume(FIG1_SEXTIC, backend="grid_oracle", budget=1_000_000, seed=8)
        assert agree(sph.value, sph.std_error, grid.value, grid.std_error)
