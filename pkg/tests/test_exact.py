import numpy as np
import pytest

from oracles import brute_force_theta, make_instance
from udncoord.errors import CapacityError, InfeasibleError
from udncoord.exact import (
    assignment_feasible,
    interference_free_bound,
    predicted_bisection_iterations,
    solve_fixed_pairing,
    solve_joint_ppp,
)
from udncoord.network import SystemConfig, generate_instance
from udncoord.power import evaluate_assignment, optimal_common_sinr, group_from_gain_matrix


def seeded_instance(seed, m=3, k=3):
    return generate_instance(m, k, SystemConfig(rng_seed=seed))


class TestAssignmentFeasible:
    def test_orthogonal_two_by_two(self):
        gains = np.array([[2e5, 10.0], [20.0, 5e4]])
        inst = make_instance(gains)
        bound = min(1.0 * gains[k].max() for k in range(2))
        witness = assignment_feasible(inst, 0.999 * bound, 2)
        assert witness is not None
        sol = evaluate_assignment(inst, witness)
        assert sol.common_sinr >= 0.999 * bound

    def test_unreachable_target_infeasible(self):
        inst = make_instance([[2e5, 10.0], [20.0, 5e4]])
        assert assignment_feasible(inst, 10.0 * interference_free_bound(inst), 2) is None

    def test_single_partition_symmetric_threshold(self):
        g, c = 2e5, 40.0
        inst = make_instance([[g, c], [c, g]])
        # Only the direct pairing (and its mirror) is admissible; its exact
        # max-min SINR is the feasibility threshold at N=1.
        group = group_from_gain_matrix([[g, c], [c, g]])
        gamma = optimal_common_sinr(group, 1.0)
        assert assignment_feasible(inst, 0.999 * gamma, 1) is not None
        assert assignment_feasible(inst, 1.001 * gamma, 1) is None

    def test_feasibility_monotone_in_theta(self):
        inst = seeded_instance(2)
        bound = interference_free_bound(inst)
        feasible_flags = []
        for frac in (0.01, 0.05, 0.2, 0.5, 0.9):
            feasible_flags.append(assignment_feasible(inst, frac * bound, 2) is not None)
        # once infeasible, stays infeasible for larger targets
        dropped = False
        for flag in feasible_flags:
            if not flag:
                dropped = True
            assert not (dropped and flag)

    def test_size_cap(self):
        inst = generate_instance(9, 9, SystemConfig(rng_seed=0))
        with pytest.raises(CapacityError):
            assignment_feasible(inst, 1.0, 2)
        with pytest.raises(CapacityError):
            assignment_feasible(inst, 1.0, 2, fixed_pairing=None, size_cap=8)

    def test_theta_validation(self):
        inst = seeded_instance(0)
        with pytest.raises(ValueError):
            assignment_feasible(inst, 0.0, 1)


class TestSolveJointPpp:
    def test_single_pair_network(self):
        inst = make_instance([[2e5]])
        sol = solve_joint_ppp(inst, 1)
        assert sol.common_sinr == pytest.approx(2e5, rel=1e-6)
        assert sol.powers[0] == pytest.approx(1.0)

    def test_two_by_two_orthogonal_closed_form(self):
        gains = np.array([[2e5, 10.0], [20.0, 5e4]])
        inst = make_instance(gains)
        sol = solve_joint_ppp(inst, 2, epsilon=1e-9 * interference_free_bound(inst))
        expected = min(gains[k].max() for k in range(2))
        assert sol.common_sinr == pytest.approx(expected, rel=1e-6)

    @pytest.mark.parametrize("n_partitions", [1, 2, 3])
    def test_matches_enumeration_oracle(self, n_partitions):
        for seed in (0, 1, 2):
            inst = seeded_instance(seed)
            eps = 1e-6 * interference_free_bound(inst)
            sol = solve_joint_ppp(inst, n_partitions, epsilon=eps)
            oracle, _ = brute_force_theta(inst, n_partitions)
            assert sol.common_sinr == pytest.approx(oracle, rel=1e-3)

    def test_matches_enumeration_oracle_four_by_four(self):
        inst = generate_instance(4, 4, SystemConfig(rng_seed=23))
        eps = 1e-8 * interference_free_bound(inst)
        sol = solve_joint_ppp(inst, 2, epsilon=eps)
        oracle, _ = brute_force_theta(inst, 2)
        assert sol.common_sinr == pytest.approx(oracle, rel=1e-6)

    def test_theta_nondecreasing_in_n(self):
        for seed in range(3):
            inst = seeded_instance(seed)
            eps = 1e-9 * interference_free_bound(inst)
            thetas = [solve_joint_ppp(inst, n, epsilon=eps).common_sinr
                      for n in (1, 2, 3)]
            assert thetas[0] <= thetas[1] * (1 + 1e-9)
            assert thetas[1] <= thetas[2] * (1 + 1e-9)

    def test_deterministic(self):
        inst = seeded_instance(4)
        a = solve_joint_ppp(inst, 2)
        b = solve_joint_ppp(inst, 2)
        assert a.common_sinr == b.common_sinr
        assert a.assignment == b.assignment

    def test_stats_populated(self):
        inst = seeded_instance(5)
        sol = solve_joint_ppp(inst, 2)
        stats = sol.solver_stats
        assert stats.nodes_explored > 0
        assert stats.bisection_iterations > 0
        assert stats.brackets[0] == (0.0, interference_free_bound(inst))


class TestBisectionContract:
    @pytest.mark.parametrize("eps_rel", [1e-2, 1e-3, 3.7e-4])
    def test_iteration_count_and_bracket(self, eps_rel):
        inst = seeded_instance(1)
        theta_max = interference_free_bound(inst)
        eps = eps_rel * theta_max
        sol = solve_joint_ppp(inst, 2, epsilon=eps)
        stats = sol.solver_stats
        assert stats.bisection_iterations == predicted_bisection_iterations(theta_max, eps)
        oracle, _ = brute_force_theta(inst, 2)
        for lo, hi in stats.brackets:
            assert lo <= oracle * (1 + 1e-12)
            assert hi >= oracle * (1 - 1e-12)
        lo, hi = stats.brackets[-1]
        assert hi - lo <= eps

    def test_bracket_halves_each_iteration(self):
        inst = seeded_instance(2)
        sol = solve_joint_ppp(inst, 2)
        widths = [hi - lo for lo, hi in sol.solver_stats.brackets]
        for prev, cur in zip(widths, widths[1:]):
            assert cur == pytest.approx(prev / 2.0, rel=1e-9)


class TestSolveFixedPairing:
    def test_orthogonal_closed_form(self):
        gains = np.array([[2e5, 10.0, 5.0],
                          [20.0, 5e4, 5.0],
                          [30.0, 10.0, 8e4]])
        inst = make_instance(gains)
        pairing = {0: 0, 1: 1, 2: 2}
        sol = solve_fixed_pairing(inst, pairing, 3,
                                  epsilon=1e-9 * interference_free_bound(inst))
        assert sol.common_sinr == pytest.approx(5e4, rel=1e-6)

    def test_pigeonhole_infeasible(self):
        inst = make_instance([[2e5, 1.0], [3e5, 1.0]])
        with pytest.raises(InfeasibleError):
            solve_fixed_pairing(inst, {0: 0, 1: 0}, 1)

    def test_matches_enumeration_oracle(self):
        inst = generate_instance(4, 4, SystemConfig(rng_seed=9))
        pairing = {k: int(np.argmax(inst.gains[k])) for k in range(4)}
        from collections import Counter
        if max(Counter(pairing.values()).values()) > 2:
            pairing = {0: 0, 1: 1, 2: 2, 3: 3}
        eps = 1e-6 * interference_free_bound(inst)
        sol = solve_fixed_pairing(inst, pairing, 2, epsilon=eps)
        oracle, _ = brute_force_theta(inst, 2, fixed_pairing=pairing)
        assert sol.common_sinr == pytest.approx(oracle, rel=1e-3)

    def test_requires_total_pairing(self):
        inst = seeded_instance(0)
        with pytest.raises(ValueError):
            solve_fixed_pairing(inst, {0: 0}, 2)


def test_greedy_rate_never_exceeds_exact():
    from udncoord.greedy import GreedyConfig, power_aware_partition

    inst = generate_instance(4, 4, SystemConfig(rng_seed=17))
    eps = 1e-9 * interference_free_bound(inst)
    exact = solve_joint_ppp(inst, 2, epsilon=eps)
    assignment = power_aware_partition(inst, 2, GreedyConfig(rate_mode="exact"))
    greedy = evaluate_assignment(inst, assignment)
    assert greedy.common_rate <= exact.common_rate * (1 + 1e-9)


def test_full_orthogonalization_is_a_lower_bound_certificate():
    from udncoord.greedy import baseline_full_orthogonalization

    for seed in (0, 1, 2):
        inst = generate_instance(3, 3, SystemConfig(rng_seed=seed))
        eps = 1e-9 * interference_free_bound(inst)
        exact = solve_joint_ppp(inst, 3, epsilon=eps)
        orth = baseline_full_orthogonalization(inst)
        assert exact.common_sinr >= orth.common_sinr * (1 - 1e-9)


def test_no_valid_assignment_raises():
    # Three UEs, one AN, one partition: nothing can host them all.
    inst = make_instance([[2e5], [1e5], [3e5]])
    with pytest.raises(InfeasibleError, match="no valid assignment"):
        solve_joint_ppp(inst, 1)
