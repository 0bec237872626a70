"""Joint pairing/partitioning decisions and evaluated coordination solutions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolationError


@dataclass(frozen=True)
class Assignment:
    """Sparse encoding of a joint pairing + partitioning decision.

    ``serving_an[k]`` is the AN serving UE k and ``partition_of[k]`` the
    orthogonal partition index (in ``[0, n_partitions)``) it occupies. Within
    a partition every serving AN is distinct; a UE sits in exactly one
    partition. ANs may serve different UEs in different partitions.
    """

    serving_an: dict
    partition_of: dict
    n_partitions: int

    def partition_members(self) -> dict:
        """Map partition index -> {ue: serving_an} for non-empty partitions."""
        members: dict = {}
        for ue, n in sorted(self.partition_of.items()):
            members.setdefault(n, {})[ue] = self.serving_an[ue]
        return members

    def to_json_dict(self) -> dict:
        return {
            "serving_an": {str(k): int(v) for k, v in sorted(self.serving_an.items())},
            "partition_of": {str(k): int(v) for k, v in sorted(self.partition_of.items())},
            "n_partitions": int(self.n_partitions),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Assignment":
        return cls(
            serving_an={int(k): int(v) for k, v in data["serving_an"].items()},
            partition_of={int(k): int(v) for k, v in data["partition_of"].items()},
            n_partitions=int(data["n_partitions"]),
        )


def validate_assignment(assignment: Assignment, k_count: int, m_count: int) -> None:
    """Check the connectivity constraints, naming the violated clause.

    Raises ConstraintViolationError unless: every UE appears in exactly one
    partition with exactly one serving AN, indices are in range, and within
    each partition serving ANs are pairwise distinct.
    """
    ues = set(range(k_count))
    if set(assignment.serving_an) != ues:
        raise ConstraintViolationError(
            "each UE must have exactly one serving AN: serving_an keys "
            f"{sorted(assignment.serving_an)} != expected {sorted(ues)}"
        )
    if set(assignment.partition_of) != ues:
        raise ConstraintViolationError(
            "each UE must be assigned to exactly one partition: partition_of keys "
            f"{sorted(assignment.partition_of)} != expected {sorted(ues)}"
        )
    if assignment.n_partitions < 1:
        raise ConstraintViolationError("n_partitions must be >= 1")
    for ue in ues:
        an = assignment.serving_an[ue]
        if not 0 <= an < m_count:
            raise ConstraintViolationError(f"UE {ue} is paired with out-of-range AN {an}")
        n = assignment.partition_of[ue]
        if not 0 <= n < assignment.n_partitions:
            raise ConstraintViolationError(f"UE {ue} sits in out-of-range partition {n}")
    for n, members in assignment.partition_members().items():
        seen: dict = {}
        for ue, an in members.items():
            if an in seen:
                raise ConstraintViolationError(
                    f"AN {an} serves UEs {seen[an]} and {ue} in partition {n} "
                    "(each AN serves at most one UE per partition)"
                )
            seen[an] = ue


@dataclass(frozen=True)
class SolverStats:
    """Bookkeeping from an exact solve."""

    nodes_explored: int = 0
    bisection_iterations: int = 0
    wall_time_s: float = 0.0
    brackets: tuple = ()


@dataclass(frozen=True, eq=False)
class CoordinationSolution:
    """An assignment with its power levels and achieved common-SINR metrics."""

    assignment: Assignment
    powers: dict
    common_sinr: float
    common_rate: float
    sum_rate: float
    per_ue_sinr: np.ndarray
    solver_stats: SolverStats | None = None

    def per_ue_rates(self) -> np.ndarray:
        return np.log2(1.0 + self.per_ue_sinr) / self.assignment.n_partitions

    def to_json_dict(self) -> dict:
        return {
            "assignment": self.assignment.to_json_dict(),
            "powers": {str(k): float(v) for k, v in sorted(self.powers.items())},
            "common_sinr": float(self.common_sinr),
            "common_rate_bps_hz": float(self.common_rate),
            "sum_rate_bps_hz": float(self.sum_rate),
            "per_ue_sinr": [float(s) for s in self.per_ue_sinr],
        }
