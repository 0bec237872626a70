"""Max-min power coordination for AN-UE pairs sharing one partition.

A partition hosting L pairs is summarized by the inverse direct gains
v (v[i] = 1/g_ii) and the normalized cross-gain matrix F (F[i][j] =
g_ij / g_ii off the diagonal, zero on it), where g_ij is the noise-normalized
gain from UE i to the AN serving UE j. With transmit powers p the SINR of
pair i is p_i / (v_i + (F p)_i), so the largest SINR level reachable by every
pair at once under the box constraint 0 <= p <= p_max is governed by Perron
roots of the coupling matrices F + v e_i^T / p_max: the max-min optimum is
the reciprocal of the largest such root, and the optimal powers solve the
fixed point p = gamma (F p + v).

Besides the exact characterization, this module provides cheap row/column-sum
bounds on the Perron root of the worst-direct-link coupling matrix, which
yield closed-form lower/upper estimates of the common SINR without any
eigenvalue iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assignment import Assignment, CoordinationSolution, validate_assignment
from .errors import ConstraintViolationError, ConvergenceError, InfeasibleError

_TINY = np.finfo(float).tiny


@dataclass(frozen=True, eq=False)
class PartitionGroup:
    """The link system of one partition, in canonical UE-id order.

    ``pair_ids`` holds (ue, an) tuples sorted by UE id; ``direct_gains``,
    ``cross_matrix`` (F) and ``inverse_gains`` (v) follow that order.
    """

    pair_ids: tuple
    direct_gains: np.ndarray
    cross_matrix: np.ndarray
    inverse_gains: np.ndarray

    @property
    def size(self) -> int:
        return len(self.pair_ids)


@dataclass(frozen=True)
class PerronBoundParams:
    """Exponents for the row/column-sum Perron-root bounds.

    ``a`` and ``b`` are small integers (1 or 2 in practice); the comparison
    matrix is B = (A + I)^matrix_power_exponent, defaulting to exponent L-1.
    """

    a: int = 1
    b: int = 1
    matrix_power_exponent: int | None = None

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise ValueError("bound exponents a and b must be >= 1")
        if self.matrix_power_exponent is not None and self.matrix_power_exponent < 0:
            raise ValueError("matrix_power_exponent must be >= 0")


def group_from_gain_matrix(gain_matrix, pair_ids=None) -> PartitionGroup:
    """Build a group from a raw L x L gain matrix g[i][j] (UE i -> AN of j).

    Intended for synthetic groups in studies and tests; production groups
    come from :func:`build_partition_group`.
    """
    g = np.asarray(gain_matrix, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 1:
        raise ValueError("gain matrix must be square and non-empty")
    if not np.all(np.isfinite(g)) or np.any(g.diagonal() <= 0) or np.any(g < 0):
        raise ValueError("gains must be finite, non-negative, with positive diagonal")
    direct = g.diagonal().copy()
    f = g / direct[:, None]
    np.fill_diagonal(f, 0.0)
    if pair_ids is None:
        pair_ids = tuple((i, i) for i in range(g.shape[0]))
    return PartitionGroup(
        pair_ids=tuple(pair_ids),
        direct_gains=direct,
        cross_matrix=f,
        inverse_gains=1.0 / direct,
    )


def build_partition_group(instance, pairing, ue_subset) -> PartitionGroup:
    """Extract the per-partition link system for a UE subset under a pairing.

    Serving ANs must be pairwise distinct within the subset; otherwise a
    ConstraintViolationError is raised.
    """
    ues = sorted(ue_subset)
    if not ues:
        raise ValueError("ue_subset must be non-empty")
    ans = []
    seen: dict = {}
    for ue in ues:
        an = pairing[ue]
        if an in seen:
            raise ConstraintViolationError(
                f"AN {an} would serve UEs {seen[an]} and {ue} in the same partition"
            )
        seen[an] = ue
        ans.append(an)
    g = instance.gains[np.ix_(ues, ans)]
    return group_from_gain_matrix(g, pair_ids=tuple(zip(ues, ans)))


def _balance_similarity(a: np.ndarray) -> np.ndarray:
    """Osborne-style diagonal similarity scaling with power-of-two factors.

    Equalizes row and column sums without changing the spectrum (power-of-two
    scaling is exact in floating point). Needed so the power-iteration shift
    stays proportional to the spectral radius even for wildly non-normal
    inputs, whose raw row sums can exceed the radius by many decades.
    """
    b = a.copy()
    n = b.shape[0]
    for _ in range(12):
        changed = False
        for i in range(n):
            row = b[i].sum() - b[i, i]
            col = b[:, i].sum() - b[i, i]
            if row <= 0.0 or col <= 0.0:
                continue
            factor = 2.0 ** round(0.5 * np.log2(col / row))
            if factor != 1.0:
                changed = True
                b[i, :] *= factor
                b[:, i] /= factor
        if not changed:
            break
    return b


def perron_root(matrix, *, tol=1e-12, residual_tol=1e-8, max_iterations=100_000) -> float:
    """Spectral radius of a non-negative square matrix by power iteration.

    The input is balanced by an exact diagonal similarity, then iterated with
    a small diagonal shift so that periodic structures still converge; the
    dominant-ratio estimate max_i (A x)_i / x_i is always taken on the
    unshifted matrix, so the shift never enters the returned value. Converged
    when successive ratio estimates agree to ``tol`` (relative) and the
    residual ||A x - lam x||_inf passes a final check.

    Raises ConvergenceError after ``max_iterations`` rather than returning a
    silently wrong value.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError("a non-empty square matrix is required")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    if np.any(a < 0):
        raise ValueError("matrix entries must be non-negative")

    if not a.any():
        return 0.0
    a = _balance_similarity(a)
    shift = 0.05 * float(a.sum(axis=1).max())

    x = np.ones(a.shape[0])
    lam_prev = np.inf
    for _ in range(max_iterations):
        ax = a @ x
        pos = x > 0.0
        lam = float(np.max(ax[pos] / x[pos]))
        if abs(lam - lam_prev) <= tol * max(abs(lam), _TINY):
            residual = float(np.max(np.abs(ax - lam * x)))
            if residual <= residual_tol * max(abs(lam), _TINY):
                return lam
        lam_prev = lam
        y = ax + shift * x
        x = y / y.max()
    raise ConvergenceError(
        f"power iteration did not converge within {max_iterations} iterations"
    )


def _coupling_matrix(group: PartitionGroup, p_max: float, column: int) -> np.ndarray:
    a = group.cross_matrix.copy()
    a[:, column] += group.inverse_gains / p_max
    return a


def optimal_common_sinr(group: PartitionGroup, p_max: float) -> float:
    """Exact max-min SINR achievable by the group within the power box.

    Equals the reciprocal of the largest Perron root among the L coupling
    matrices F + v e_i^T / p_max. Interference-free limit: a single pair
    yields p_max * g.
    """
    if p_max <= 0:
        raise ValueError("p_max must be positive")
    worst = 0.0
    for i in range(group.size):
        worst = max(worst, perron_root(_coupling_matrix(group, p_max, i)))
    return 1.0 / worst


def group_sinrs(group: PartitionGroup, powers) -> np.ndarray:
    """Per-pair SINRs for a given power vector: p_i / (v_i + (F p)_i)."""
    p = np.asarray(powers, dtype=float)
    return p / (group.inverse_gains + group.cross_matrix @ p)


def power_for_target_sinr(group: PartitionGroup, target: float, p_max: float,
                          *, rel_tol=1e-8) -> np.ndarray:
    """Powers equalizing every pair of the group at SINR ``target``.

    Solves the fixed point p = target * (F p + v). Feasible only for targets
    up to the group's max-min optimum; beyond it the solution leaves the
    power box and an InfeasibleError is raised. The returned powers are
    verified by direct SINR substitution before returning.
    """
    if target <= 0:
        raise ValueError("target SINR must be positive")
    if p_max <= 0:
        raise ValueError("p_max must be positive")
    L = group.size
    system = np.eye(L) - target * group.cross_matrix
    try:
        p = np.linalg.solve(system, target * group.inverse_gains)
    except np.linalg.LinAlgError as exc:
        raise InfeasibleError(f"SINR target {target:.6g} is not achievable") from exc
    if not np.all(np.isfinite(p)) or np.any(p <= 0) or p.max() > p_max * (1.0 + 1e-9):
        raise InfeasibleError(
            f"SINR target {target:.6g} exceeds the max-min optimum of the group"
        )
    p = np.minimum(p, p_max)
    achieved = group_sinrs(group, p)
    if np.max(np.abs(achieved - target)) > rel_tol * target:
        raise ConvergenceError("power recovery failed to equalize SINRs at the target")
    return p


def _boxed_fixed_point_powers(group: PartitionGroup, target: float, p_max: float):
    """Fixed-point powers for ``target`` if they lie inside the box, else None."""
    system = np.eye(group.size) - target * group.cross_matrix
    try:
        p = np.linalg.solve(system, target * group.inverse_gains)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(p)) or np.any(p <= 0) or p.max() > p_max:
        return None
    return p


def optimal_power_vector(group: PartitionGroup, p_max: float) -> np.ndarray:
    """Max-min optimal powers: SINRs equalized at the optimum, max entry p_max.

    Near the optimum the fixed-point powers are steeply sensitive to the SINR
    level (sensitivity grows like 1/(1 - rho(gamma F))), so the Perron-root
    estimate is polished by bisecting the SINR level onto the power budget
    before the vector is extracted and verified.
    """
    gamma = optimal_common_sinr(group, p_max)

    offset = max(1e-12 * gamma, _TINY)
    if _boxed_fixed_point_powers(group, gamma, p_max) is None:
        hi = gamma
        lo = gamma - offset
        while _boxed_fixed_point_powers(group, lo, p_max) is None:
            offset *= 2.0
            lo = gamma - offset
            if lo <= 0.0:
                raise ConvergenceError("max-min power recovery found no feasible level")
    else:
        lo = gamma
        hi = gamma + offset
        for _ in range(80):
            if _boxed_fixed_point_powers(group, hi, p_max) is None:
                break
            offset *= 2.0
            hi = gamma + offset
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _boxed_fixed_point_powers(group, mid, p_max) is None:
            hi = mid
        else:
            lo = mid

    p = _boxed_fixed_point_powers(group, lo, p_max)
    if p is None:
        raise ConvergenceError("max-min power recovery failed")
    # Snap the budget-binding pair exactly onto p_max; the residual rescaling
    # is one float step of the SINR level and far below the check tolerance.
    scale = p_max / p.max()
    if abs(scale - 1.0) > 1e-6:
        raise ConvergenceError("max-min power vector failed to reach the power budget")
    p *= scale
    p[np.argmax(p)] = p_max
    achieved = group_sinrs(group, p)
    if np.max(np.abs(achieved - gamma)) > 1e-8 * gamma:
        raise ConvergenceError("power recovery failed to equalize SINRs at the optimum")
    return p


def sinr_bounds(group: PartitionGroup, p_max: float,
                params: PerronBoundParams | None = None) -> tuple:
    """Closed-form (lower, upper) bounds on the common SINR of the group.

    The bounds bracket 1/rho(A) for the single coupling matrix A formed at
    the worst direct link (largest v entry) -- the cheap stand-in for the
    exact max over all L coupling matrices. They follow from row-sum and
    column-sum ratios of A^a B^b against B^b with B = (A + I)^(L-1):
    every ratio interval contains rho(A), and combining the row and column
    intervals keeps the tighter endpoint on each side.
    """
    if params is None:
        params = PerronBoundParams()
    if p_max <= 0:
        raise ValueError("p_max must be positive")
    L = group.size
    if L < 1:
        raise ValueError("group must contain at least one pair")
    worst = int(np.argmax(group.inverse_gains))
    a = _coupling_matrix(group, p_max, worst)
    exponent = params.matrix_power_exponent
    if exponent is None:
        exponent = L - 1
    b_mat = np.linalg.matrix_power(a + np.eye(L), exponent)
    bb = np.linalg.matrix_power(b_mat, params.b)
    aabb = np.linalg.matrix_power(a, params.a) @ bb

    # Row/column sums of B^b are >= 1 since B has a unit diagonal contribution.
    delta_rows = (aabb.sum(axis=1) / bb.sum(axis=1)) ** (1.0 / params.a)
    delta_cols = (aabb.sum(axis=0) / bb.sum(axis=0)) ** (1.0 / params.a)
    # All-zero rows/columns of A produce zero ratios that carry no spectral
    # information; they are excluded from the min/max.
    rows = delta_rows[delta_rows > 0.0]
    cols = delta_cols[delta_cols > 0.0]
    if rows.size == 0 or cols.size == 0:
        raise ValueError("degenerate group: no informative row or column sums")

    inverse_upper = min(rows.max(), cols.max())
    inverse_lower = max(rows.min(), cols.min())
    return 1.0 / inverse_upper, 1.0 / inverse_lower


def approx_common_sinr(group: PartitionGroup, p_max: float,
                       params: PerronBoundParams | None = None) -> float:
    """Midpoint of :func:`sinr_bounds`; exact for a single pair."""
    lower, upper = sinr_bounds(group, p_max, params)
    return 0.5 * (lower + upper)


def common_rate(gamma: float, n_partitions: int) -> float:
    """Shannon rate share of one partition: log2(1 + gamma) / N, in bps/Hz."""
    if gamma < 0:
        raise ValueError("SINR must be non-negative")
    if n_partitions < 1:
        raise ValueError("n_partitions must be >= 1")
    return float(np.log2(1.0 + gamma)) / n_partitions


class GroupRateCache:
    """Memoizing evaluator of per-partition common SINR and rate.

    Assignment searches and greedy partitioners evaluate the same UE subsets
    over and over; keying by the frozen (ue, an) pair set makes those
    evaluations one dictionary lookup after the first. ``rate_mode`` selects
    the exact Perron-root characterization or the closed-form bound midpoint.
    """

    def __init__(self, instance, p_max=None, rate_mode="exact", bound_params=None):
        if rate_mode not in ("exact", "approx"):
            raise ValueError("rate_mode must be 'exact' or 'approx'")
        self.instance = instance
        self.p_max = instance.config.p_max if p_max is None else p_max
        self.rate_mode = rate_mode
        self.bound_params = bound_params
        self._sinr: dict = {}

    def sinr(self, members) -> float:
        """Common SINR of the partition holding ``members`` ({ue: an})."""
        key = frozenset(members.items())
        hit = self._sinr.get(key)
        if hit is None:
            group = build_partition_group(self.instance, members, members.keys())
            if self.rate_mode == "exact":
                hit = optimal_common_sinr(group, self.p_max)
            else:
                hit = approx_common_sinr(group, self.p_max, self.bound_params)
            self._sinr[key] = hit
        return hit

    def rate(self, members, n_partitions: int) -> float:
        return common_rate(self.sinr(members), n_partitions)


def evaluate_assignment(instance, assignment: Assignment, p_max=None) -> CoordinationSolution:
    """Exact power coordination for a complete assignment.

    Validates the assignment, solves each partition's max-min problem, and
    sets the network common SINR to the smallest per-partition optimum. All
    pairs are then powered to meet exactly that level (partitions with slack
    power down), so every UE is provisioned the common rate and the sum rate
    is K times the common rate.
    """
    if p_max is None:
        p_max = instance.config.p_max
    validate_assignment(assignment, instance.k_count, instance.m_count)
    members = assignment.partition_members()
    groups = {n: build_partition_group(instance, mem, mem.keys())
              for n, mem in members.items()}
    gammas = {n: optimal_common_sinr(group, p_max) for n, group in groups.items()}
    theta = min(gammas.values())

    powers: dict = {}
    per_ue_sinr = np.zeros(instance.k_count)
    for n, group in groups.items():
        p = power_for_target_sinr(group, theta, p_max)
        achieved = group_sinrs(group, p)
        for (ue, _an), watts, sinr in zip(group.pair_ids, p, achieved):
            powers[ue] = float(watts)
            per_ue_sinr[ue] = sinr

    rate = common_rate(theta, assignment.n_partitions)
    return CoordinationSolution(
        assignment=assignment,
        powers=powers,
        common_sinr=theta,
        common_rate=rate,
        sum_rate=instance.k_count * rate,
        per_ue_sinr=per_ue_sinr,
    )
