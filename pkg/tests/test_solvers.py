import math
from fractions import Fraction

import numpy as np
import pytest

from ballrep import (
    GeneralizedPolynomial,
    GramForm,
    SolveConfig,
    closed_form_ball_volume,
    ld_polynomial,
    scale_to_target_volume,
    solve_p1,
    solve_p2,
    solve_p3,
    volume,
)


class TestScaleToTargetVolume:
    def test_halved_disk_recovers_unit_disk(self):
        doubled = ld_polynomial(2, 2).rescale(2.0)
        back = scale_to_target_volume(doubled, math.pi, budget=2048)
        assert back.terms[(2, 0)] == pytest.approx(1.0, rel=1e-9)
        assert back.terms[(0, 2)] == pytest.approx(1.0, rel=1e-9)

    def test_fixed_point(self):
        g = ld_polynomial(2, 4)
        rho = closed_form_ball_volume(2, 4)
        scaled = scale_to_target_volume(g, rho, budget=4096)
        assert scaled.terms[(4, 0)] == pytest.approx(1.0, rel=1e-9)

    def test_defining_property(self):
        g = GeneralizedPolynomial(2, 4, 1, {(4, 0): 1.3, (2, 2): 0.4, (0, 4): 0.9})
        target = 2.5
        scaled = scale_to_target_volume(g, target, budget=8192)
        assert volume(scaled, budget=8192).value == pytest.approx(target, rel=1e-9)

    def test_gram_form_scaling(self):
        gram = GramForm(2, 2, 2.0 * np.eye(2))
        back = scale_to_target_volume(gram, math.pi, budget=2048)
        np.testing.assert_allclose(back.Q, np.eye(2), rtol=1e-9)

    def test_rejects_bad_target(self):
        with pytest.raises(ValueError):
            scale_to_target_volume(ld_polynomial(2, 2), -1.0)


class TestLatticeValidation:
    def test_p1_odd_classical_degree_rejected(self):
        with pytest.raises(ValueError, match="even integer"):
            solve_p1(2, 3)

    def test_p1_generalized_half_lattice_hypothesis(self):
        # d * q / 2 must be an integer; d = 1/3 on the q = 3 lattice is not allowed
        with pytest.raises(ValueError, match="lattice"):
            solve_p1(2, Fraction(1, 3), q=3)

    def test_p2_lattice_hypothesis(self):
        with pytest.raises(ValueError, match="lattice"):
            solve_p2(2, Fraction(1, 3), q=2)

    def test_p3_odd_degree_rejected(self):
        with pytest.raises(ValueError, match="even degree"):
            solve_p3(2, 3)


class TestSolveP1:
    def test_quadratic_case(self):
        res = solve_p1(2, 2)
        assert res.converged
        assert res.objective == pytest.approx(2.0, abs=1e-6)
        assert res.solution.terms[(2, 0)] == pytest.approx(1.0, abs=1e-5)
        assert res.solution.terms[(1, 1)] == pytest.approx(0.0, abs=1e-5)
        assert res.certificate.passed

    def test_quartic_recovery(self):
        res = solve_p1(2, 4)
        expected = {(4, 0): 1.0, (3, 1): 0.0, (2, 2): 0.0, (1, 3): 0.0, (0, 4): 1.0}
        for alpha, want in expected.items():
            assert res.solution.terms.get(alpha, 0.0) == pytest.approx(want, abs=1e-2)
        assert res.objective == pytest.approx(2.0, abs=1e-2)
        assert res.converged

    def test_volume_normalization_at_exit(self):
        res = solve_p1(2, 4)
        rho = closed_form_ball_volume(2, 4)
        assert abs(res.volume - rho) / rho <= 1e-4

    def test_objective_trace_monotone(self):
        res = solve_p1(2, 4, config=SolveConfig(seed=3))
        objectives = [obj for obj, _ in res.iterations]
        assert all(b <= a + 1e-9 for a, b in zip(objectives, objectives[1:]))
        volumes = [vol for _, vol in res.iterations]
        assert all(b <= a + 1e-12 for a, b in zip(volumes, volumes[1:]))

    def test_explicit_start_supported(self):
        start = GeneralizedPolynomial(
            2, 4, 1, {(4, 0): 0.8, (3, 1): 0.1, (2, 2): 0.4, (1, 3): -0.1, (0, 4): 1.2}
        )
        res = solve_p1(2, 4, start=start)
        assert res.solution.terms[(4, 0)] == pytest.approx(1.0, abs=1e-2)
        assert res.converged

    def test_start_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="start"):
            solve_p1(2, 4, start=ld_polynomial(2, 2))

    def test_unconverged_flagged(self):
        res = solve_p1(2, 4, config=SolveConfig(max_iters=1))
        assert not res.converged

    def test_generalized_half_power(self):
        res = solve_p1(2, Fraction(1, 2), q=4, config=SolveConfig(budget=16384))
        assert res.solution.terms[(2, 0)] == pytest.approx(1.0, abs=1e-2)
        assert res.solution.terms.get((1, 1), 0.0) == pytest.approx(0.0, abs=1e-2)
        assert res.solution.terms[(0, 2)] == pytest.approx(1.0, abs=1e-2)
        assert res.problem == "p1q"
        assert res.certificate.passed

    def test_attached_certificate_passes(self):
        res = solve_p1(2, 4, config=SolveConfig(seed=11))
        assert res.certificate.passed
        assert res.certificate.kind == "p1_kkt"


class TestSolveP2:
    def test_quadratic_matches_p1(self):
        res = solve_p2(2, 2)
        assert res.solution.terms[(2, 0)] == pytest.approx(1.0, abs=1e-6)
        assert res.solution.terms[(1, 1)] == pytest.approx(0.0, abs=1e-6)
        assert res.solution.terms[(0, 2)] == pytest.approx(1.0, abs=1e-6)

    def test_quartic_worked_example(self):
        res = solve_p2(2, 4)
        assert res.solution.convention == "multinomial"
        assert res.solution.terms[(4, 0)] == pytest.approx(1.0, abs=2e-2)
        assert res.solution.terms[(2, 2)] == pytest.approx(1.0 / 3.0, abs=2e-2)
        assert res.objective == pytest.approx(8.0 / 3.0, abs=5e-2)
        assert res.volume == pytest.approx(math.pi, rel=1e-2)
        assert res.certificate.passed
        assert res.converged

    def test_three_dimensional_degree_four(self):
        res = solve_p2(3, 4, config=SolveConfig(budget=8192))
        square_of_sum = {}
        for i in range(3):
            axis = tuple(4 if j == i else 0 for j in range(3))
            square_of_sum[axis] = 1.0
        for pair in ((2, 2, 0), (2, 0, 2), (0, 2, 2)):
            square_of_sum[pair] = 1.0 / 3.0
        for alpha, want in square_of_sum.items():
            assert res.solution.terms.get(alpha, 0.0) == pytest.approx(want, abs=2e-2)
        for alpha, got in res.solution.terms.items():
            if alpha not in square_of_sum:
                assert got == pytest.approx(0.0, abs=2e-2)
        assert res.certificate.passed

    def test_attached_certificate_is_scale_invariant_check(self):
        res = solve_p2(2, 4, config=SolveConfig(seed=5))
        assert res.certificate.kind == "p2_moment"
        assert res.certificate.residuals["max_coefficient"] <= 1e-2


class TestSolveP3:
    def test_quadratic_identity(self):
        res = solve_p3(2, 2)
        np.testing.assert_allclose(res.solution.Q, np.eye(2), atol=1e-2)
        assert res.certificate.passed

    def test_quartic_beats_axis_power_trace(self):
        res = solve_p3(2, 4)
        assert res.converged
        assert res.certificate.passed
        assert res.objective < 2.0 - 0.01
        rho = closed_form_ball_volume(2, 4)
        assert abs(res.volume - rho) / rho <= 1e-4
        # the optimum is the rank-1 Gram of the scaled Euclidean ball quartic
        k = (math.pi / rho) ** 2
        expected = k * np.array([[1.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 1.0]])
        np.testing.assert_allclose(res.solution.Q, expected, atol=2e-2)

    def test_diagonal_start_descends(self):
        start = GramForm(2, 4, np.diag([1.0, 0.0, 1.0]))
        res = solve_p3(2, 4, start=start)
        objectives = [obj for obj, _ in res.iterations]
        assert objectives[-1] < objectives[0] - 0.05
        assert res.objective < 2.0 - 0.01

    def test_psd_maintained(self):
        res = solve_p3(2, 4, config=SolveConfig(seed=2))
        eigenvalues = np.linalg.eigvalsh(res.solution.Q)
        assert eigenvalues.min() >= -1e-10


class TestStochasticBackendSolve:
    def test_p1_with_monte_carlo_gradients(self):
        cfg = SolveConfig(
            backend="monte_carlo", budget=60_000, seed=1,
            max_iters=150, tol_objective=1e-7, cert_tol=2e-2,
        )
        res = solve_p1(2, 4, config=cfg)
        rho = closed_form_ball_volume(2, 4)
        assert res.solution.terms[(4, 0)] == pytest.approx(1.0, abs=2e-2)
        assert res.solution.terms[(0, 4)] == pytest.approx(1.0, abs=2e-2)
        assert abs(res.volume - rho) / rho <= 1e-2
        assert res.certificate.passed


class TestSeedRobustness:
    def test_p1_seeds_agree_pairwise(self):
        solutions = []
        for seed in range(3):
            res = solve_p1(2, 4, config=SolveConfig(seed=seed))
            solutions.append(res.solution)
        basis = [(4, 0), (3, 1), (2, 2), (1, 3), (0, 4)]
        for i in range(len(solutions)):
            for j in range(i + 1, len(solutions)):
                delta = max(
                    abs(solutions[i].terms.get(a, 0.0) - solutions[j].terms.get(a, 0.0))
                    for a in basis
                )
                assert delta <= 2e-2
