"""Greedy coordination: best-gain pairing, two partitioning heuristics, and
the full-reuse / full-orthogonalization baselines.

The power-aware partitioner seeds each partition with one of the N globally
strongest (UE, AN) links, then grows the current best-rate partition with
the UE that degrades its rate least, pairing each newcomer to the strongest
AN still free inside that partition. An optional refinement phase swaps UE
pairs across partitions while doing so strictly raises the total rate.

The power-unaware partitioner skips rate evaluations entirely: it builds a
UE-to-UE interference weight matrix from dominant cross links, then assigns
the most-interfered-with UEs first to the partition where they add the least
weight. UEs sharing a serving AN carry a large penalty weight so they end up
orthogonalized whenever the partition count permits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assignment import Assignment, CoordinationSolution, validate_assignment
from .errors import InfeasibleError
from .power import (
    GroupRateCache,
    PerronBoundParams,
    common_rate,
    evaluate_assignment,
)

DEFAULT_DOMINANT_COUNT = 3
DEFAULT_SAME_AN_PENALTY = 1e5


@dataclass(frozen=True, eq=False)
class InterferenceWeights:
    """Symmetric K x K matrix of estimated pairwise co-partition interference."""

    matrix: np.ndarray
    dominant_count: int
    same_an_penalty: float


@dataclass(frozen=True)
class GreedyConfig:
    """Knobs for the power-aware partitioner."""

    rate_mode: str = "exact"  # "exact" | "approx"
    enable_refinement: bool = True
    bound_params: PerronBoundParams = field(default_factory=PerronBoundParams)

    def __post_init__(self):
        if self.rate_mode not in ("exact", "approx"):
            raise ValueError("rate_mode must be 'exact' or 'approx'")


def pair_best_gain(instance, ue_subset=None, exclusive: bool = False) -> dict:
    """Pair each UE with its strongest-gain AN.

    Under the pure path-loss model this is the closest AN. With
    ``exclusive=True`` ANs are not shared: UEs are processed in descending
    order of their best gain, and a UE whose best AN is already taken falls
    back to its strongest remaining AN.
    """
    ues = sorted(range(instance.k_count) if ue_subset is None else ue_subset)
    gains = instance.gains
    if not exclusive:
        return {ue: int(np.argmax(gains[ue])) for ue in ues}
    if len(ues) > instance.m_count:
        raise InfeasibleError(
            f"{len(ues)} UEs cannot take distinct ANs out of {instance.m_count}"
        )
    order = sorted(ues, key=lambda ue: (-gains[ue].max(), ue))
    available = set(range(instance.m_count))
    pairing = {}
    for ue in order:
        best = max(available, key=lambda m: (gains[ue, m], -m))
        pairing[ue] = best
        available.remove(best)
    return pairing


def _best_available_an(gains_row, taken):
    best, best_gain = -1, -np.inf
    for m in range(gains_row.shape[0]):
        if m in taken:
            continue
        if gains_row[m] > best_gain:
            best, best_gain = m, gains_row[m]
    return best


def _members_to_assignment(members, n_partitions) -> Assignment:
    serving, partition = {}, {}
    for n, mem in enumerate(members):
        for ue, an in mem.items():
            serving[ue] = an
            partition[ue] = n
    return Assignment(serving_an=serving, partition_of=partition,
                      n_partitions=n_partitions)


def power_aware_partition(instance, n_partitions: int,
                          config: GreedyConfig | None = None) -> Assignment:
    """Rate-driven greedy partitioning with optional swap refinement."""
    if config is None:
        config = GreedyConfig()
    K, M = instance.k_count, instance.m_count
    N = n_partitions
    if N < 1 or N > K:
        raise InfeasibleError(f"need 1 <= N <= K, got N={N} for K={K}")
    gains = instance.gains
    cache = GroupRateCache(instance, rate_mode=config.rate_mode,
                           bound_params=config.bound_params)

    members: list = [dict() for _ in range(N)]
    unassigned = set(range(K))

    # Seeding: the N strongest remaining (UE, AN) links, one per partition.
    # Each partition has its own AN pool, so seeds may reuse an AN.
    for n in range(N):
        best_ue, best_an, best_gain = -1, -1, -np.inf
        for ue in sorted(unassigned):
            an = int(np.argmax(gains[ue]))
            if gains[ue, an] > best_gain:
                best_ue, best_an, best_gain = ue, an, gains[ue, an]
        members[n][best_ue] = best_an
        unassigned.remove(best_ue)

    # Fill: grow the current best-rate partition with the UE whose addition
    # keeps the partition rate highest; infeasible additions rate -inf.
    while unassigned:
        order = sorted(range(N), key=lambda n: (-cache.rate(members[n], N), n))
        placed = False
        for n in order:
            taken = set(members[n].values())
            if len(taken) >= M:
                continue
            best = None
            for ue in sorted(unassigned):
                an = _best_available_an(gains[ue], taken)
                trial = dict(members[n])
                trial[ue] = an
                rate = cache.rate(trial, N)
                if best is None or rate > best[0]:
                    best = (rate, ue, an)
            if best is not None:
                _, ue, an = best
                members[n][ue] = an
                unassigned.remove(ue)
                placed = True
                break
        if not placed:
            raise InfeasibleError(
                "every partition has exhausted its AN pool before all UEs were placed"
            )

    if config.enable_refinement and N > 1:
        _refine_by_swaps(members, gains, cache, N)

    return _members_to_assignment(members, N)


def _try_swap(members, gains, cache, N, na, nb, ue_a, ue_b):
    """Evaluate exchanging ue_a (partition na) with ue_b (nb).

    Resident UEs keep their ANs; each mover is re-paired with the strongest
    AN left free in its destination. A swap improves when it raises the
    bottleneck rate of the two partitions, or keeps it while raising their
    combined rate; improving the bottleneck (never degrading it) is what
    guarantees the network common rate cannot decrease during refinement.
    """
    rest_a = {u: an for u, an in members[na].items() if u != ue_a}
    rest_b = {u: an for u, an in members[nb].items() if u != ue_b}
    an_for_b = _best_available_an(gains[ue_b], set(rest_a.values()))
    an_for_a = _best_available_an(gains[ue_a], set(rest_b.values()))
    new_a = dict(rest_a)
    new_a[ue_b] = an_for_b
    new_b = dict(rest_b)
    new_b[ue_a] = an_for_a
    rate_a = cache.rate(members[na], N)
    rate_b = cache.rate(members[nb], N)
    rate_new_a = cache.rate(new_a, N)
    rate_new_b = cache.rate(new_b, N)
    before = (min(rate_a, rate_b), rate_a + rate_b)
    after = (min(rate_new_a, rate_new_b), rate_new_a + rate_new_b)
    return after > before, new_a, new_b


def _refine_by_swaps(members, gains, cache, N):
    # Sweep all partition pairs; apply any improving swap and keep sweeping
    # until a full sweep makes no change. The (bottleneck, sum) rate pair
    # rises strictly at every swap, so the loop terminates.
    improved = True
    while improved:
        improved = False
        for na in range(N):
            for nb in range(na + 1, N):
                scanning = True
                while scanning:
                    scanning = False
                    for ue_a in sorted(members[na]):
                        for ue_b in sorted(members[nb]):
                            better, new_a, new_b = _try_swap(
                                members, gains, cache, N, na, nb, ue_a, ue_b)
                            if better:
                                members[na] = new_a
                                members[nb] = new_b
                                improved = True
                                scanning = True
                                break
                        if scanning:
                            break


def interference_weight_matrix(instance, pairing,
                               dominant_count: int = DEFAULT_DOMINANT_COUNT,
                               same_an_penalty: float = DEFAULT_SAME_AN_PENALTY) -> InterferenceWeights:
    """Estimated co-partition interference weights for every UE pair.

    Sharing a serving AN gets the penalty weight (those UEs must not share a
    partition). Otherwise the weight of interferer i on victim j is the gain
    from j toward i's serving AN when i ranks among j's ``dominant_count``
    strongest interferers, and zero when it does not. The matrix is
    symmetrized entrywise by max.
    """
    if dominant_count < 1:
        raise ValueError("dominant_count must be >= 1")
    K = instance.k_count
    gains = instance.gains
    e = np.zeros((K, K))
    for j in range(K):
        rivals = [i for i in range(K) if i != j and pairing[i] != pairing[j]]
        rivals.sort(key=lambda i: (-gains[j, pairing[i]], i))
        for i in rivals[:dominant_count]:
            e[i, j] = gains[j, pairing[i]]
        for i in range(K):
            if i != j and pairing[i] == pairing[j]:
                e[i, j] = same_an_penalty
    e = np.maximum(e, e.T)
    return InterferenceWeights(matrix=e, dominant_count=dominant_count,
                               same_an_penalty=same_an_penalty)


def power_unaware_partition(weights: InterferenceWeights, n_partitions: int) -> dict:
    """Assign UEs to partitions minimizing the accumulated weight sum.

    K allocation cycles: the unassigned UE with the largest total incoming
    weight goes first; it joins the partition where it adds the least weight,
    ties broken toward lower occupancy then lower index. Partitions holding a
    same-AN conflict (a penalty-weight member) are avoided whenever any
    conflict-free partition exists.
    """
    e = weights.matrix
    K = e.shape[0]
    if n_partitions < 1:
        raise ValueError("n_partitions must be >= 1")
    incoming = e.sum(axis=0)
    partitions: list = [[] for _ in range(n_partitions)]
    partition_of: dict = {}
    unassigned = set(range(K))
    while unassigned:
        ue = max(sorted(unassigned), key=lambda j: incoming[j])
        costs = []
        for n, mem in enumerate(partitions):
            cost = float(e[mem, ue].sum()) if mem else 0.0
            conflict = any(e[i, ue] == weights.same_an_penalty for i in mem)
            costs.append((conflict, cost, len(mem), n))
        conflict_free = [c for c in costs if not c[0]]
        pool = conflict_free if conflict_free else costs
        _, _, _, n_best = min(pool, key=lambda c: (c[1], c[2], c[3]))
        partitions[n_best].append(ue)
        partition_of[ue] = n_best
        unassigned.remove(ue)
    return partition_of


def power_unaware_assignment(instance, n_partitions: int, pairing=None,
                             dominant_count: int = DEFAULT_DOMINANT_COUNT,
                             same_an_penalty: float = DEFAULT_SAME_AN_PENALTY) -> Assignment:
    """Best-gain pairing + weight-driven partitioning as a full assignment."""
    if pairing is None:
        pairing = pair_best_gain(instance)
    weights = interference_weight_matrix(instance, pairing, dominant_count,
                                         same_an_penalty)
    partition_of = power_unaware_partition(weights, n_partitions)
    return Assignment(serving_an=dict(pairing), partition_of=partition_of,
                      n_partitions=n_partitions)


def random_partition_assignment(instance, n_partitions: int, rng,
                                pairing=None) -> Assignment:
    """Uniform random partitioning honoring same-AN separation when possible."""
    if pairing is None:
        pairing = pair_best_gain(instance)
    K = instance.k_count
    order = [int(u) for u in rng.permutation(K)]
    partition_of: dict = {}
    for ue in order:
        blocked = {partition_of[other] for other in partition_of
                   if pairing[other] == pairing[ue]}
        choices = [n for n in range(n_partitions) if n not in blocked]
        if not choices:
            choices = list(range(n_partitions))
        partition_of[ue] = int(rng.choice(choices))
    return Assignment(serving_an=dict(pairing), partition_of=partition_of,
                      n_partitions=n_partitions)


def baseline_full_spatial_reuse(instance) -> CoordinationSolution:
    """All pairs share the whole band (N=1) with best-gain pairing.

    Infeasible when two UEs share the same strongest AN, since a single
    partition cannot separate them.
    """
    pairing = pair_best_gain(instance)
    if len(set(pairing.values())) < len(pairing):
        raise InfeasibleError(
            "two UEs share the same closest AN; full spatial reuse needs "
            "pairwise-distinct serving ANs"
        )
    assignment = Assignment(serving_an=pairing,
                            partition_of={ue: 0 for ue in pairing},
                            n_partitions=1)
    return evaluate_assignment(instance, assignment)


def baseline_full_orthogonalization(instance) -> CoordinationSolution:
    """Every UE alone on its own slice (N=K) at full power.

    Interference-free by construction: per-UE SINR is exactly
    p_max * direct gain, and the common rate is the worst per-UE rate.
    """
    K = instance.k_count
    p_max = instance.config.p_max
    pairing = pair_best_gain(instance)
    assignment = Assignment(serving_an=pairing,
                            partition_of={ue: ue for ue in range(K)},
                            n_partitions=K)
    validate_assignment(assignment, K, instance.m_count)
    per_ue_sinr = np.array([p_max * instance.gains[ue, pairing[ue]]
                            for ue in range(K)])
    theta = float(per_ue_sinr.min())
    rate = common_rate(theta, K)
    per_ue_rates = np.log2(1.0 + per_ue_sinr) / K
    return CoordinationSolution(
        assignment=assignment,
        powers={ue: p_max for ue in range(K)},
        common_sinr=theta,
        common_rate=rate,
        sum_rate=float(per_ue_rates.sum()),
        per_ue_sinr=per_ue_sinr,
    )
