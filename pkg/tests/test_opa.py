# ABOUTME: Tests for the optimal power allocation baseline
# ABOUTME: Exact eigen-solve, vectorized reduced objective, and paired dominance over selection

import math

import numpy as np
import pytest

from src.core.exceptions import ValidationError
from src.core.models import Gamma0Policy, NetworkConfig, OpaProblem
from src.simulation import opa
from src.simulation.opa import (
    compare_opa_vs_selection, paired_rates, reduced_objective, resolve_gamma0,
    selection_objective, solve_opa,
)

def random_problem(rng: np.random.Generator, relays: int, gamma0: float) -> OpaProblem:
    h_m = (rng.standard_normal(relays) + 1j * rng.standard_normal(relays)) / math.sqrt(2)
    h_e = (rng.standard_normal(relays) + 1j * rng.standard_normal(relays)) / math.sqrt(2)
    return OpaProblem(h_m=h_m, h_e=h_e, gamma0=gamma0)

class TestSolveOpa:

    def test_single_relay_closed_form(self):
        problem = OpaProblem(h_m=[2.0 + 0j], h_e=[0.5j], gamma0=3.0)
        solution = solve_opa(problem)
        assert solution.objective == pytest.approx((1 + 3 * 4.0) / (1 + 3 * 0.25))
        assert solution.rate == pytest.approx(math.log(solution.objective))

    def test_weights_meet_power_budget(self):
        problem = random_problem(np.random.default_rng(0), 4, 5.0)
        solution = solve_opa(problem)
        assert np.vdot(solution.w, solution.w).real == pytest.approx(5.0)
        assert problem.objective(solution.w) == pytest.approx(solution.objective, rel=1e-10)

    def test_beats_random_feasible_points(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            problem = random_problem(rng, int(rng.integers(2, 6)), float(rng.uniform(0.5, 20.0)))
            solution = solve_opa(problem)
            w = rng.standard_normal((2000, problem.size)) + 1j * rng.standard_normal((2000, problem.size))
            w *= math.sqrt(problem.gamma0) / np.linalg.norm(w, axis=1, keepdims=True)
            best = max(problem.objective(row) for row in w)
            assert solution.objective >= best * (1 - 1e-10)

    def test_identical_channels_give_zero_rate(self):
        h = np.array([1.0 + 1j, 0.5 - 0.2j])
        solution = solve_opa(OpaProblem(h_m=h, h_e=h, gamma0=2.0))
        assert solution.objective == pytest.approx(1.0)
        assert solution.rate == pytest.approx(0.0, abs=1e-12)

    def test_eavesdropper_dominant_uses_null_direction(self):
        problem = OpaProblem(h_m=[0.1, 0.0, 0.0], h_e=[5.0, 0.0, 0.0], gamma0=1.0)
        solution = solve_opa(problem)
        assert solution.objective == pytest.approx(1.0)
        assert problem.objective(solution.w) == pytest.approx(1.0)

    def test_common_phase_rotation_is_invariant(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            problem = random_problem(rng, 3, 4.0)
            rotation = np.exp(1j * rng.uniform(-np.pi, np.pi))
            rotated = OpaProblem(h_m=rotation * problem.h_m, h_e=rotation * problem.h_e, gamma0=4.0)
            assert solve_opa(rotated).objective == pytest.approx(solve_opa(problem).objective, rel=1e-10)

    def test_weights_solve_generalized_eigenproblem(self):
        rng = np.random.default_rng(6)
        for relays in (2, 3, 5):
            problem = random_problem(rng, relays, 3.0)
            solution = solve_opa(problem)
            identity = np.eye(relays)
            main = identity + 3.0 * np.outer(problem.h_m, problem.h_m.conj())
            eve = identity + 3.0 * np.outer(problem.h_e, problem.h_e.conj())
            residual = main @ solution.w - solution.objective * (eve @ solution.w)
            assert np.linalg.norm(residual) <= 1e-10 * solution.objective * np.linalg.norm(solution.w)

    def test_rejects_bad_power(self):
        with pytest.raises(ValidationError):
            OpaProblem(h_m=[1.0], h_e=[1.0], gamma0=0.0)

class TestVectorizedObjectives:

    def test_reduced_matches_exact_solve(self):
        rng = np.random.default_rng(2)
        problems = [random_problem(rng, 3, 4.0) for _ in range(30)]
        h_m = np.stack([p.h_m for p in problems])
        h_e = np.stack([p.h_e for p in problems])
        batch = reduced_objective(h_m, h_e, 4.0)
        exact = np.array([solve_opa(p).objective for p in problems])
        np.testing.assert_allclose(np.maximum(batch, 1.0), exact, rtol=1e-9)

    def test_reduced_never_below_selection(self):
        rng = np.random.default_rng(8)
        h_m = (rng.standard_normal((20000, 4)) + 1j * rng.standard_normal((20000, 4))) / math.sqrt(2)
        h_e = (rng.standard_normal((20000, 4)) + 1j * rng.standard_normal((20000, 4))) / math.sqrt(2)
        reduced = reduced_objective(h_m, h_e, 10.0)
        assert np.all(reduced >= selection_objective(h_m, h_e, 10.0) * (1.0 - 1e-12))

    def test_near_parallel_channels(self):
        h_m = np.array([1.0 + 0.5j, -0.3 + 2.0j, 0.7 - 0.1j])
        orthogonal = np.array([np.conj(h_m[1]), -np.conj(h_m[0]), 0.0])
        h_e = 1j * h_m + 1e-6 * orthogonal
        exact = solve_opa(OpaProblem(h_m=h_m, h_e=h_e, gamma0=5.0)).objective
        assert exact > 1.0
        assert reduced_objective(h_m, h_e, 5.0) == pytest.approx(exact, rel=1e-10)

    def test_selection_objective(self):
        h_m = np.array([[1.0, 2.0]])
        h_e = np.array([[1.0, 3.0]])
        np.testing.assert_allclose(selection_objective(h_m, h_e, 1.0), [1.0])

class TestPairedComparison:

    def test_gamma0_policies(self, inid_network):
        assert resolve_gamma0(inid_network, Gamma0Policy.RELAY_AVERAGE) == pytest.approx(
            np.mean(inid_network.gamma_avg))
        assert resolve_gamma0(inid_network, Gamma0Policy.TOTAL) == pytest.approx(
            np.sum(inid_network.gamma_avg))
        assert resolve_gamma0(inid_network, Gamma0Policy.FIXED, 7.0) == 7.0
        with pytest.raises(ValidationError):
            resolve_gamma0(inid_network, Gamma0Policy.FIXED)

    def test_single_relay_opa_equals_selection(self, single_relay):
        pairs = paired_rates(single_relay, 5000, seed=3, gamma0=1.0)
        np.testing.assert_array_equal(pairs[:, 0], pairs[:, 1])

    def test_opa_dominates_selection(self):
        network = NetworkConfig.iid(3, 0.1, 1.0)
        comparison = compare_opa_vs_selection(network, 100000, seed=2024)
        assert comparison.dominance_fraction == 1.0
        assert comparison.gap.mean > 3.0 * comparison.gap.std_error
        assert comparison.opa.mean > comparison.selection.mean

    def test_dominance_reflects_the_computed_optimum(self, monkeypatch):
        network = NetworkConfig.iid(3, 0.1, 1.0)
        monkeypatch.setattr(opa, "reduced_objective", lambda h_m, h_e, gamma0: np.ones(h_m.shape[0]))
        comparison = compare_opa_vs_selection(network, 20000, seed=2024)
        assert comparison.dominance_fraction < 1.0
        assert comparison.gap.mean < 0.0
