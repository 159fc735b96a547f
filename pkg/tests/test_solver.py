"""Tests for the three solver paths, the dual machinery and the KKT certificate."""

import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_channel
from model import (Beamformer, ChannelVector, InfeasibleInstance, RobustInstance,
                   with_epsilon, with_rate)
from solver import (BeamformerSolution, KKT_TOL, beta, dual_slope, energy_rate_tradeoff,
                    extract_beamformer, golden_section, lambda_max_2d, reduced_dual, solution_to_json,
                    solve, solve_closed_form, solve_dual_sdp, solve_grid_oracle, solve_nonrobust,
                    verify_kkt)


def dense_lambda_max(g_hat, h_hat, lam):
    g, h = g_hat.entries, h_hat.entries
    matrix = np.outer(g, g.conj()) + lam * np.outer(h, h.conj())
    return float(np.linalg.eigvalsh(matrix)[-1])


def relative(a, b):
    return abs(a - b) / max(1.0, abs(b))


class TestBeta:

    @pytest.mark.parametrize("epsilon, rate, expected", [
        (0.0, math.log2(10.0), 9.0),
        (1.0 / math.sqrt(10.0), math.log2(10.0), 16.0),
        (0.0, 0.0, 0.0),
    ])
    def test_values(self, epsilon, rate, expected):
        instance = RobustInstance(ChannelVector([2, 0]), ChannelVector([0, 2]), 10.0, 1.0,
                                  rate, epsilon)
        assert beta(instance) == pytest.approx(expected, rel=1e-12, abs=1e-15)


class TestLambdaMax:

    def test_orthogonal(self):
        assert lambda_max_2d(ChannelVector([0, 2]), ChannelVector([2, 0]), 2.0) == pytest.approx(8.0)

    def test_collinear(self):
        g = ChannelVector([2, 0])
        assert lambda_max_2d(g, g, 3.0) == pytest.approx(16.0, rel=1e-12)

    def test_matches_dense_eigensolver(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 9))
            g, h = random_channel(rng, n), random_channel(rng, n)
            lam = float(rng.exponential(2.0))
            assert lambda_max_2d(g, h, lam) == pytest.approx(dense_lambda_max(g, h, lam), rel=1e-10)

    def test_zero_channels(self):
        with pytest.raises(ValueError):
            lambda_max_2d(ChannelVector([0, 0]), ChannelVector([0, 0]), 1.0)


class TestReducedDual:

    def test_convex(self, random_instances):
        for instance in random_instances[:20]:
            lams = np.linspace(0.0, 10.0, 201)
            values = np.array([reduced_dual(instance, lam) for lam in lams])
            second = values[:-2] - 2 * values[1:-1] + values[2:]
            assert np.all(second >= -1e-9 * max(1.0, np.abs(values).max()))

    def test_slope_matches_finite_difference(self, random_instances):
        for instance in random_instances[:20]:
            lam, step = 0.7, 1e-6
            numeric = (reduced_dual(instance, lam + step) - reduced_dual(instance, lam - step)) / (2 * step)
            assert dual_slope(instance, lam) == pytest.approx(numeric, rel=1e-5, abs=1e-5)

    def test_golden_section(self):
        a, b = golden_section(lambda x: (x - 1.3) ** 2, 0.0, 5.0)
        assert 0.5 * (a + b) == pytest.approx(1.3, abs=1e-9)


class TestPinnedExamples:
    """Analytic optima of the orthogonal and collinear instances."""

    @pytest.mark.parametrize("solver", [solve_dual_sdp, solve_closed_form, solve_grid_oracle])
    def test_orthogonal_perfect_csi(self, solver, orthogonal_perfect):
        solution = solver(orthogonal_perfect)
        h_w = abs(orthogonal_perfect.h_hat.inner(solution.w)) ** 2
        tol = 1e-6 if solver is solve_grid_oracle else 1e-9
        assert solution.nominal_energy == pytest.approx(20.0, abs=tol)
        assert h_w == pytest.approx(20.0, abs=tol)
        assert solution.w.power == pytest.approx(10.0, rel=1e-12)

    @pytest.mark.parametrize("solver", [solve_dual_sdp, solve_closed_form])
    def test_orthogonal_robust(self, solver, orthogonal_robust):
        solution = solver(orthogonal_robust)
        assert abs(orthogonal_robust.h_hat.inner(solution.w)) == pytest.approx(4.0, rel=1e-9)
        assert solution.guaranteed_energy == pytest.approx((2 * math.sqrt(6) - 1) ** 2, rel=1e-9)
        assert solution.nominal_energy == pytest.approx(24.0, rel=1e-9)
        assert solution.lam == pytest.approx(1.0, rel=1e-7)
        assert solution.mu == pytest.approx(4.0, rel=1e-9)
        assert solution.duality_gap <= 1e-9

    def test_orthogonal_paths_agree_up_to_phase(self, orthogonal_perfect):
        dual = solve_dual_sdp(orthogonal_perfect)
        closed = solve_closed_form(orthogonal_perfect)
        assert_allclose(dual.w.w, closed.w.w, atol=1e-9)
        assert dual.nominal_energy == pytest.approx(closed.nominal_energy, abs=1e-9)

    def test_vacuous_constraint_is_matched_filter(self, rng):
        g = random_channel(rng, 4, 4.0)
        instance = RobustInstance(random_channel(rng, 4, 4.0), g, 10.0, 1.0, 0.0, 0.0)
        solution = solve_dual_sdp(instance)
        assert_allclose(solution.w.w, math.sqrt(10) * g.entries / g.norm, atol=1e-12)
        assert solution.nominal_energy == pytest.approx(40.0, rel=1e-12)
        assert solution.lam == 0.0

    def test_collinear(self):
        g = ChannelVector([1 + 1j, 1 - 1j])
        instance = RobustInstance(g, g, 10.0, 1.0, 2.0, 0.2)
        for solver in (solve_dual_sdp, solve_closed_form, solve_grid_oracle):
            solution = solver(instance)
            assert_allclose(solution.w.w, math.sqrt(10) * g.entries / g.norm, atol=1e-9)

    def test_margin_zero_boundary(self):
        h = ChannelVector([2, 0])
        instance = RobustInstance(h, ChannelVector([math.sqrt(2), math.sqrt(2)]), 10.0, 1.0,
                                  math.log2(41.0), 0.0)
        for solver in (solve_dual_sdp, solve_closed_form):
            solution = solver(instance)
            assert_allclose(np.abs(solution.w.w), [math.sqrt(10), 0.0], atol=1e-6)
            assert solution.nominal_energy == pytest.approx(20.0, rel=1e-6)

    @pytest.mark.parametrize("solver", [solve_dual_sdp, solve_closed_form, solve_grid_oracle])
    def test_infeasible(self, solver, infeasible_instance):
        with pytest.raises(InfeasibleInstance) as info:
            solver(infeasible_instance)
        assert info.value.margin < 0


class TestOracleTriangle:
    """Dual, closed-form and grid paths agree on random feasible instances."""

    def test_dual_matches_closed_form(self, random_instances):
        for instance in random_instances:
            dual = solve_dual_sdp(instance)
            closed = solve_closed_form(instance)
            assert relative(dual.guaranteed_energy, closed.guaranteed_energy) <= 1e-6
            assert relative(dual.nominal_energy, closed.nominal_energy) <= 1e-6

    def test_closed_form_matches_grid(self, random_instances):
        for instance in random_instances:
            closed = solve_closed_form(instance)
            grid = solve_grid_oracle(instance, 10_000)
            assert relative(grid.guaranteed_energy, closed.guaranteed_energy) <= 1e-3
            assert grid.guaranteed_energy <= closed.guaranteed_energy + 1e-9 * max(1.0, closed.guaranteed_energy)

    def test_grid_resolution_floor(self, orthogonal_perfect):
        with pytest.raises(ValueError):
            solve_grid_oracle(orthogonal_perfect, 99)


class TestOptimality:
    """KKT residuals, duality gap, full power and rank-one tightness."""

    def test_certificate(self, random_instances):
        for instance in random_instances:
            solution = solve_dual_sdp(instance)
            scale = max(1.0, solution.mu * instance.power)
            assert solution.kkt_residuals.max_residual() <= KKT_TOL * scale
            assert solution.duality_gap <= 1e-7
            assert solution.w.power == pytest.approx(instance.power, rel=1e-8)
            assert instance.g_hat.inner(solution.w).real >= 0.0
            _, defect = extract_beamformer(np.outer(solution.w.w, solution.w.w.conj()))
            assert defect <= 1e-9

    def test_robust_rate_met(self, random_instances):
        for instance in random_instances:
            solution = solve_dual_sdp(instance)
            received = abs(instance.h_hat.inner(solution.w)) - instance.epsilon * solution.w.norm
            threshold = math.sqrt(beta(instance)) - instance.epsilon * math.sqrt(instance.power)
            assert received >= threshold - 1e-6 * max(1.0, beta(instance))

    def test_perturbed_beamformer_fails_stationarity(self):
        instance = RobustInstance(ChannelVector([2, 0]),
                                  ChannelVector([math.sqrt(2), math.sqrt(2)]), 10.0, 1.0, 3.0, 0.0)
        solution = solve_dual_sdp(instance)
        w = solution.w.w
        # 1% step orthogonal to w, off the principal eigenvector of G + lam*H
        step = 0.01 * np.array([-np.conj(w[1]), np.conj(w[0])])
        assert verify_kkt(instance, solution).stationarity <= 1e-9
        nudged = BeamformerSolution(
            w=Beamformer(w + step),
            guaranteed_energy=solution.guaranteed_energy,
            nominal_energy=solution.nominal_energy,
            lam=solution.lam,
            mu=solution.mu,
            duality_gap=solution.duality_gap,
            kkt_residuals=solution.kkt_residuals,
            path=solution.path,
        )
        assert verify_kkt(instance, nudged).stationarity > 1e-4

    def test_zero_multipliers_violate_slackness(self, orthogonal_perfect):
        solution = solve_closed_form(orthogonal_perfect)
        stripped = BeamformerSolution(solution.w, solution.guaranteed_energy,
                                      solution.nominal_energy, 0.0, 0.0, 0.0,
                                      solution.kkt_residuals, solution.path)
        report = verify_kkt(orthogonal_perfect, stripped)
        assert report.dual_feas > 0.0
        assert report.stationarity > 0.0

    def test_smaller_epsilon_never_hurts(self, random_instances):
        for instance in random_instances[:30]:
            base = solve_closed_form(instance).guaranteed_energy
            tighter = solve_closed_form(with_epsilon(instance, instance.epsilon * 0.5))
            assert tighter.guaranteed_energy >= base - 1e-9

    def test_lower_rate_never_hurts(self, random_instances):
        for instance in random_instances[:30]:
            base = solve_closed_form(instance).guaranteed_energy
            for fraction in (0.0, 0.5, 0.9):
                relaxed = solve_closed_form(with_rate(instance, instance.rate_target * fraction))
                assert relaxed.guaranteed_energy >= base - 1e-9 * max(1.0, base)

    def test_unitary_equivariance(self, random_instances):
        rng = np.random.default_rng(np.random.SeedSequence(77))
        for instance in random_instances[:20]:
            n = instance.h_hat.n
            q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
            unitary = q * (np.diag(r) / np.abs(np.diag(r)))
            rotated = RobustInstance(ChannelVector(unitary @ instance.h_hat.entries),
                                     ChannelVector(unitary @ instance.g_hat.entries),
                                     instance.power, instance.sigma2, instance.rate_target,
                                     instance.epsilon)
            base = solve_dual_sdp(instance)
            moved = solve_dual_sdp(rotated)
            assert relative(moved.guaranteed_energy, base.guaranteed_energy) <= 1e-9

            expected = unitary @ base.w.w
            overlap = np.vdot(expected, moved.w.w)
            aligned = expected * overlap / abs(overlap)
            assert_allclose(moved.w.w, aligned, atol=1e-6 * math.sqrt(instance.power))


class TestNonrobust:

    def test_equals_closed_form_at_zero_epsilon(self, orthogonal_robust):
        nonrobust = solve_nonrobust(orthogonal_robust)
        reference = solve_closed_form(with_epsilon(orthogonal_robust, 0.0))
        assert_allclose(nonrobust.w.w, reference.w.w, atol=1e-12)

    def test_zero_rate_is_matched_filter(self):
        g = ChannelVector([1, 1j, 0])
        instance = RobustInstance(ChannelVector([0, 0, 1]), g, 10.0, 1.0, 0.0, 0.3)
        solution = solve_nonrobust(instance)
        assert_allclose(solution.w.w, math.sqrt(10) * g.entries / g.norm, atol=1e-12)

    def test_orthogonal_energy(self, orthogonal_perfect):
        instance = with_epsilon(orthogonal_perfect, 0.2)
        assert solve_nonrobust(instance).nominal_energy == pytest.approx(20.0, rel=1e-9)


class TestExtractBeamformer:

    def test_rank_one(self):
        e = np.array([1.0, 1j]) / math.sqrt(2)
        w, defect = extract_beamformer(10.0 * np.outer(e, e.conj()))
        assert defect == pytest.approx(0.0, abs=1e-15)
        assert abs(np.vdot(e, w.w)) == pytest.approx(math.sqrt(10), rel=1e-12)

    def test_identity(self):
        _, defect = extract_beamformer(np.eye(2))
        assert defect == pytest.approx(1.0)

    @pytest.mark.parametrize("matrix", [
        np.zeros((2, 2)),
        np.array([[1.0, 2.0], [0.0, 1.0]]),
        np.ones((2, 3)),
    ])
    def test_rejects(self, matrix):
        with pytest.raises(ValueError):
            extract_beamformer(matrix)


class TestDispatch:

    def test_solve_by_name(self, orthogonal_perfect):
        assert solve(orthogonal_perfect, "closed_form").path == "closed_form"
        with pytest.raises(ValueError):
            solve(orthogonal_perfect, "simplex")

    def test_tradeoff(self, orthogonal_perfect):
        curve = energy_rate_tradeoff(orthogonal_perfect, [0.0, 2.0, math.log2(21.0), 6.0])
        energies = [s.guaranteed_energy for _, s in curve if s is not None]
        assert curve[-1][1] is None
        assert energies == sorted(energies, reverse=True)
        assert energies[0] == pytest.approx(40.0, rel=1e-12)

    def test_solution_json(self, orthogonal_robust):
        doc = json.loads(solution_to_json(solve_closed_form(orthogonal_robust), note="x"))
        assert doc["lambda"] == pytest.approx(1.0, rel=1e-7)
        assert doc["note"] == "x"
        assert len(doc["w"]) == 2
        assert set(doc["kkt_residuals"]) == {"primal_feas", "dual_feas", "comp_slack_rate",
                                             "comp_slack_power", "stationarity"}
