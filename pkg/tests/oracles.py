"""Independent reference implementations used to cross-check the solvers.

Everything here is deliberately brute force: closed forms, characteristic
polynomials, grid search, and exhaustive assignment enumeration. None of it
shares code paths with the solvers under test.
"""

import itertools

import numpy as np

from udncoord.assignment import Assignment
from udncoord.network import Deployment, NetworkInstance, SystemConfig
from udncoord.power import build_partition_group, group_from_gain_matrix, optimal_common_sinr


def perron_root_charpoly(matrix):
    """Spectral radius for L <= 3 via characteristic-polynomial roots."""
    a = np.asarray(matrix, dtype=float)
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0])
    if n == 2:
        tr = a[0, 0] + a[1, 1]
        disc = (a[0, 0] - a[1, 1]) ** 2 + 4.0 * a[0, 1] * a[1, 0]
        return float((tr + np.sqrt(disc)) / 2.0)
    if n == 3:
        tr = np.trace(a)
        minors = (
            a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]
            + a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]
            + a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        )
        det = np.linalg.det(a)
        roots = np.roots([1.0, -tr, minors, -det])
        return float(np.max(np.abs(roots)))
    raise ValueError("char-poly oracle only covers L <= 3")


def random_group(rng, size, diag_decades=(3.0, 7.0), off_decades=(0.0, 5.0)):
    """Synthetic partition group with log-uniform gains."""
    g = 10.0 ** rng.uniform(off_decades[0], off_decades[1], size=(size, size))
    diag = 10.0 ** rng.uniform(diag_decades[0], diag_decades[1], size=size)
    np.fill_diagonal(g, diag)
    return group_from_gain_matrix(g)


def mild_random_group(rng, size):
    """Group whose cross links stay well below the direct links.

    Direct gains span one decade and cross gains sit two-plus decades lower,
    keeping the max-min optimal powers away from the grid floor so that a
    200-point-per-axis grid search resolves the optimum to within 1%.
    """
    g = 10.0 ** rng.uniform(1.0, 3.0, size=(size, size))
    diag = 10.0 ** rng.uniform(5.0, 6.0, size=size)
    np.fill_diagonal(g, diag)
    return group_from_gain_matrix(g)


def grid_search_max_min_sinr(group, p_max, points=200):
    """Max-min SINR over an axis-aligned power grid (L <= 3)."""
    f = group.cross_matrix
    v = group.inverse_gains
    axes = np.linspace(p_max / points, p_max, points)
    if group.size == 1:
        return float(axes.max() / v[0])
    if group.size == 2:
        p1, p2 = np.meshgrid(axes, axes, indexing="ij")
        s1 = p1 / (v[0] + f[0, 1] * p2)
        s2 = p2 / (v[1] + f[1, 0] * p1)
        return float(np.minimum(s1, s2).max())
    if group.size == 3:
        best = 0.0
        p2, p3 = np.meshgrid(axes, axes, indexing="ij")
        for p1 in axes:
            s1 = p1 / (v[0] + f[0, 1] * p2 + f[0, 2] * p3)
            s2 = p2 / (v[1] + f[1, 0] * p1 + f[1, 2] * p3)
            s3 = p3 / (v[2] + f[2, 0] * p1 + f[2, 1] * p2)
            best = max(best, float(np.minimum(np.minimum(s1, s2), s3).max()))
        return best
    raise ValueError("grid oracle only covers L <= 3")


def make_instance(gains, p_max=1.0):
    """Instance with a prescribed gain matrix; positions are placeholders."""
    g = np.asarray(gains, dtype=float)
    k, m = g.shape
    config = SystemConfig(p_max=p_max)
    deployment = Deployment(
        an_positions=np.column_stack([np.arange(m, dtype=float), np.zeros(m)]),
        ue_positions=np.column_stack([np.arange(k, dtype=float), np.ones(k)]),
    )
    return NetworkInstance(deployment=deployment, gains=g, config=config)


def set_partitions(items, max_blocks):
    """All partitions of ``items`` into at most ``max_blocks`` unlabeled blocks."""
    def rec(i, blocks):
        if i == len(items):
            yield [list(b) for b in blocks]
            return
        for block in blocks:
            block.append(items[i])
            yield from rec(i + 1, blocks)
            block.pop()
        if len(blocks) < max_blocks:
            blocks.append([items[i]])
            yield from rec(i + 1, blocks)
            blocks.pop()
    yield from rec(0, [])


def enumerate_assignments(k_count, m_count, n_partitions, fixed_pairing=None):
    """Every valid assignment, labels canonicalized by block order."""
    for blocks in set_partitions(list(range(k_count)), n_partitions):
        per_block = []
        feasible = True
        for block in blocks:
            if fixed_pairing is not None:
                ans = tuple(fixed_pairing[ue] for ue in block)
                if len(set(ans)) != len(ans):
                    feasible = False
                    break
                per_block.append([ans])
            else:
                per_block.append(list(itertools.permutations(range(m_count), len(block))))
        if not feasible:
            continue
        for combo in itertools.product(*per_block):
            serving = {}
            partition = {}
            for n, (block, ans) in enumerate(zip(blocks, combo)):
                for ue, an in zip(block, ans):
                    serving[ue] = an
                    partition[ue] = n
            yield Assignment(serving_an=serving, partition_of=partition,
                             n_partitions=n_partitions)


def brute_force_theta(instance, n_partitions, p_max=None, fixed_pairing=None):
    """Exhaustive max over assignments of the per-partition max-min minimum."""
    if p_max is None:
        p_max = instance.config.p_max
    memo = {}

    def group_sinr(members):
        key = frozenset(members.items())
        if key not in memo:
            group = build_partition_group(instance, members, members.keys())
            memo[key] = optimal_common_sinr(group, p_max)
        return memo[key]

    best_theta, best_assignment = 0.0, None
    for assignment in enumerate_assignments(instance.k_count, instance.m_count,
                                            n_partitions, fixed_pairing):
        theta = min(group_sinr(members)
                    for members in assignment.partition_members().values())
        if theta > best_theta:
            best_theta, best_assignment = theta, assignment
    return best_theta, best_assignment
