"""Exact joint pairing/partitioning/power solving at desk scale.

The optimal common SINR is found by bisection over the SINR target, wrapped
around a feasibility search that enumerates assignments with two prunings:
partition labels are canonicalized (partitions are interchangeable), and a
partial partition whose max-min SINR has already dropped below the target is
abandoned, since adding pairs never raises it. For a fixed target the search
either returns a witness assignment or proves that none exists, which is
exactly the role of the linear feasibility model exported by
:mod:`udncoord.ilp`.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import replace

import numpy as np

from .assignment import Assignment, CoordinationSolution, SolverStats
from .errors import CapacityError, InfeasibleError
from .power import GroupRateCache, evaluate_assignment

FREE_PAIRING_UE_CAP = 8
FIXED_PAIRING_UE_CAP = 12


def interference_free_bound(instance, p_max=None) -> float:
    """Upper bound on any achievable SINR: best gain at full power, alone."""
    if p_max is None:
        p_max = instance.config.p_max
    return float(p_max * instance.gains.max())


class _SearchCounter:
    __slots__ = ("nodes",)

    def __init__(self):
        self.nodes = 0


def assignment_feasible(instance, theta0: float, n_partitions: int,
                        fixed_pairing=None, *, size_cap=None,
                        cache: GroupRateCache | None = None,
                        counter: _SearchCounter | None = None) -> Assignment | None:
    """Search for an assignment whose common SINR reaches ``theta0``.

    Returns the first witness found (deterministic: UEs in id order, ANs in
    descending-gain order, partitions in canonical first-use order) or None
    when no valid assignment achieves the target. Refuses instances beyond
    the desk-scale UE cap instead of degrading silently.
    """
    if theta0 <= 0:
        raise ValueError("theta0 must be positive")
    if n_partitions < 1:
        raise ValueError("n_partitions must be >= 1")
    k_count, m_count = instance.k_count, instance.m_count
    cap = size_cap
    if cap is None:
        cap = FIXED_PAIRING_UE_CAP if fixed_pairing is not None else FREE_PAIRING_UE_CAP
    if k_count > cap:
        raise CapacityError(
            f"{k_count} UEs exceed the exact-search cap of {cap}; "
            "use a greedy coordinator for larger networks"
        )
    if fixed_pairing is not None and set(fixed_pairing) != set(range(k_count)):
        raise ValueError("fixed_pairing must map every UE")
    if cache is None:
        cache = GroupRateCache(instance)
    if counter is None:
        counter = _SearchCounter()

    n_parts = min(n_partitions, k_count)
    # Candidate ANs per UE, best gain first: feasible probes find witnesses fast.
    if fixed_pairing is not None:
        an_order = {ue: (fixed_pairing[ue],) for ue in range(k_count)}
    else:
        an_order = {ue: tuple(np.argsort(-instance.gains[ue], kind="stable"))
                    for ue in range(k_count)}

    members: list = [dict() for _ in range(n_parts)]

    def search(ue: int, used: int):
        if ue == k_count:
            serving = {}
            partition = {}
            for n, mem in enumerate(members):
                for u, an in mem.items():
                    serving[u] = an
                    partition[u] = n
            return Assignment(serving_an=serving, partition_of=partition,
                              n_partitions=n_partitions)
        for n in range(min(used + 1, n_parts)):
            mem = members[n]
            taken = set(mem.values())
            for an in an_order[ue]:
                if an in taken:
                    continue
                mem[ue] = an
                counter.nodes += 1
                if cache.sinr(mem) >= theta0:
                    witness = search(ue + 1, max(used, n + 1))
                    if witness is not None:
                        return witness
                del mem[ue]
        return None

    return search(0, 0)


def _any_valid_assignment(instance, n_partitions, fixed_pairing) -> Assignment | None:
    """Cheap constructive witness ignoring rates, or None when none exists."""
    k_count, m_count = instance.k_count, instance.m_count
    n_parts = min(n_partitions, k_count)
    if fixed_pairing is None:
        if k_count > n_parts * m_count:
            return None
        serving = {}
        partition = {}
        counts = [0] * n_parts
        for ue in range(k_count):
            n = ue % n_parts
            serving[ue] = counts[n]  # distinct AN index within the partition
            partition[ue] = n
            counts[n] += 1
        return Assignment(serving_an=serving, partition_of=partition,
                          n_partitions=n_partitions)
    groups: dict = {}
    for ue in sorted(fixed_pairing):
        groups.setdefault(fixed_pairing[ue], []).append(ue)
    if max(len(g) for g in groups.values()) > n_parts:
        return None
    partition = {}
    for members in groups.values():
        for slot, ue in enumerate(members):
            partition[ue] = slot  # one member of each AN group per partition
    return Assignment(serving_an=dict(fixed_pairing), partition_of=partition,
                      n_partitions=n_partitions)


def _bisect(instance, n_partitions, epsilon, fixed_pairing, size_cap) -> CoordinationSolution:
    start = time.perf_counter()
    theta_max = interference_free_bound(instance)
    if epsilon is None:
        epsilon = 1e-3 * theta_max
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")

    cache = GroupRateCache(instance)
    counter = _SearchCounter()
    lo, hi = 0.0, theta_max
    witness = None
    brackets = [(lo, hi)]
    iterations = 0
    while hi - lo > epsilon:
        mid = 0.5 * (lo + hi)
        found = assignment_feasible(instance, mid, n_partitions, fixed_pairing,
                                    size_cap=size_cap, cache=cache, counter=counter)
        if found is not None:
            lo, witness = mid, found
        else:
            hi = mid
        brackets.append((lo, hi))
        iterations += 1

    if witness is None:
        # The optimum sits below every probed target; any valid assignment
        # still certifies lo = 0 (positive gains give a positive common SINR).
        witness = _any_valid_assignment(instance, n_partitions, fixed_pairing)
        if witness is None:
            raise InfeasibleError(
                f"no valid assignment exists for N={n_partitions} "
                f"({instance.k_count} UEs, {instance.m_count} ANs)"
            )

    solution = evaluate_assignment(instance, witness)
    stats = SolverStats(
        nodes_explored=counter.nodes,
        bisection_iterations=iterations,
        wall_time_s=time.perf_counter() - start,
        brackets=tuple(brackets),
    )
    return replace(solution, solver_stats=stats)


def solve_joint_ppp(instance, n_partitions: int, epsilon: float | None = None,
                    *, size_cap=None) -> CoordinationSolution:
    """Optimal joint pairing + partitioning + power for a fixed partition count.

    Bisects the SINR target over [0, p_max * max gain]; ``epsilon`` is the
    absolute bracket width at termination (default: 1e-3 of the upper bound).
    The reported common SINR is the exact evaluation of the witness
    assignment, hence within ``epsilon`` of the true optimum.
    """
    return _bisect(instance, n_partitions, epsilon, None, size_cap)


def solve_fixed_pairing(instance, pairing, n_partitions: int,
                        epsilon: float | None = None, *, size_cap=None) -> CoordinationSolution:
    """Optimal partitioning + power when every UE's serving AN is prescribed."""
    if set(pairing) != set(range(instance.k_count)):
        raise ValueError("pairing must map every UE")
    heaviest = max(Counter(pairing.values()).values())
    if heaviest > n_partitions:
        raise InfeasibleError(
            f"{heaviest} UEs share one AN but only {n_partitions} partitions exist"
        )
    return _bisect(instance, n_partitions, epsilon, dict(pairing), size_cap)


def predicted_bisection_iterations(theta_max: float, epsilon: float) -> int:
    """Iteration count of the bisection loop for a [0, theta_max] bracket."""
    if epsilon >= theta_max:
        return 0
    return math.ceil(math.log2(theta_max / epsilon))
