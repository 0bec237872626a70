"""Feasibility ILP assembly and MPS export for the joint coordination problem.

For a fixed SINR target theta0 the joint problem is a pure feasibility check:
does an assignment plus powers exist meeting theta0 for every UE? That check
linearizes exactly. Powers are lifted to a per-(UE, AN, partition) variable
P_kmn tied to the pairing binaries (P <= p_max * rho), per-partition activity
binaries z_kn aggregate the pairing row, and the bilinear products z_kn *
P_imn in the SINR rows are replaced by auxiliary variables u_imnk under the
standard big-M envelope with B = p_max (the tightest valid constant, since
u <= P <= p_max). Integral feasible points of the model correspond exactly
to valid assignments and power levels meeting the target.

The model is written as MPS text for external solvers; solutions come back
as name=value lines and are checked row by row against the same model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .assignment import Assignment


@dataclass(frozen=True)
class IlpVariable:
    name: str
    kind: str  # "binary" | "continuous"
    lower: float = 0.0
    upper: float | None = None


@dataclass(frozen=True)
class IlpRow:
    name: str
    coeffs: tuple  # ((variable name, coefficient), ...)
    sense: str  # "L" (<=), "E" (=), "G" (>=)
    rhs: float


@dataclass
class IlpModel:
    """Variable registry plus constraint rows for one feasibility instance."""

    name: str
    theta0: float
    k_count: int
    m_count: int
    n_partitions: int
    big_m: float
    variables: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)

    @property
    def variable_count(self) -> int:
        return len(self.variables)

    @property
    def row_count(self) -> int:
        return len(self.rows)

    def add_variable(self, name, kind, lower=0.0, upper=None):
        self.variables[name] = IlpVariable(name, kind, lower, upper)

    def add_row(self, name, coeffs, sense, rhs):
        self.rows.append(IlpRow(name, tuple(coeffs), sense, rhs))

    def check_point(self, values, *, abs_tol=1e-9, rel_tol=1e-9) -> list:
        """Violations of the model at a candidate point (missing vars are 0).

        Checks bounds, integrality of binaries, and every constraint row with
        a tolerance scaled by the row's coefficient magnitudes. Returns an
        empty list when the point satisfies the model.
        """
        violations = []
        for name, var in self.variables.items():
            val = values.get(name, 0.0)
            if val < var.lower - abs_tol:
                violations.append(f"{name}={val!r} below lower bound {var.lower}")
            if var.upper is not None and val > var.upper + abs_tol + rel_tol * abs(var.upper):
                violations.append(f"{name}={val!r} above upper bound {var.upper}")
            if var.kind == "binary" and abs(val - round(val)) > 1e-6:
                violations.append(f"{name}={val!r} is not integral")
        for row in self.rows:
            lhs = 0.0
            scale = abs(row.rhs)
            for var_name, coef in row.coeffs:
                term = coef * values.get(var_name, 0.0)
                lhs += term
                scale += abs(term)
            slack = abs_tol + rel_tol * scale
            if row.sense == "L" and lhs > row.rhs + slack:
                violations.append(f"{row.name}: {lhs!r} > {row.rhs!r}")
            elif row.sense == "G" and lhs < row.rhs - slack:
                violations.append(f"{row.name}: {lhs!r} < {row.rhs!r}")
            elif row.sense == "E" and abs(lhs - row.rhs) > slack:
                violations.append(f"{row.name}: {lhs!r} != {row.rhs!r}")
        return violations

    def to_mps(self) -> str:
        """Render the model as MPS text (names may exceed 8 characters)."""
        lines = [f"NAME          {self.name}", "ROWS", " N  COST"]
        for row in self.rows:
            lines.append(f" {row.sense}  {row.name}")

        lines.append("COLUMNS")
        entries: dict = {name: [] for name in self.variables}
        for row in self.rows:
            for var_name, coef in row.coeffs:
                entries[var_name].append((row.name, coef))
        marker = 0

        def emit_column(name):
            for row_name, coef in entries[name]:
                lines.append(f"    {name:<16}{row_name:<16}{coef:.17g}")

        integers = [n for n, v in self.variables.items() if v.kind == "binary"]
        continuous = [n for n, v in self.variables.items() if v.kind != "binary"]
        if integers:
            lines.append(f"    MARKER{marker:<10}'MARKER'        'INTORG'")
            for name in integers:
                emit_column(name)
            lines.append(f"    MARKER{marker + 1:<10}'MARKER'        'INTEND'")
        for name in continuous:
            emit_column(name)

        lines.append("RHS")
        for row in self.rows:
            if row.rhs != 0.0:
                lines.append(f"    RHS             {row.name:<16}{row.rhs:.17g}")

        lines.append("BOUNDS")
        for name, var in self.variables.items():
            if var.kind == "binary":
                lines.append(f" BV BND             {name}")
            elif var.upper is not None:
                lines.append(f" UP BND             {name:<16}{var.upper:.17g}")
        lines.append("ENDATA")
        return "\n".join(lines) + "\n"


def _rho(k, m, n):
    return f"rho_{k}_{m}_{n}"


def _p(k, m, n):
    return f"P_{k}_{m}_{n}"


def _z(k, n):
    return f"z_{k}_{n}"


def _u(i, m, n, k):
    return f"u_{i}_{m}_{n}_{k}"


def export_ilp(instance, theta0: float, n_partitions: int) -> IlpModel:
    """Build the feasibility model for SINR target ``theta0``.

    Variables: rho_kmn, P_kmn, z_kn and one u_imnk per ordered interferer
    pair, totalling 2KMN + KN + (K-1)KMN.
    """
    if theta0 <= 0:
        raise ValueError("theta0 must be positive")
    if n_partitions < 1:
        raise ValueError("n_partitions must be >= 1")
    K, M, N = instance.k_count, instance.m_count, n_partitions
    p_max = instance.config.p_max
    gains = instance.gains
    big_m = p_max

    model = IlpModel(
        name=f"jointppp_K{K}_M{M}_N{N}",
        theta0=theta0, k_count=K, m_count=M, n_partitions=N, big_m=big_m,
    )

    for k in range(K):
        for m in range(M):
            for n in range(N):
                model.add_variable(_rho(k, m, n), "binary")
    for k in range(K):
        for m in range(M):
            for n in range(N):
                model.add_variable(_p(k, m, n), "continuous", 0.0, p_max)
    for k in range(K):
        for n in range(N):
            model.add_variable(_z(k, n), "binary")
    for k in range(K):
        for i in range(K):
            if i == k:
                continue
            for m in range(M):
                for n in range(N):
                    model.add_variable(_u(i, m, n, k), "continuous", 0.0, p_max)

    # Connectivity: one AN per UE per partition, one UE per AN per partition,
    # every UE in exactly one partition.
    for k in range(K):
        for n in range(N):
            model.add_row(f"uepair_{k}_{n}",
                          [(_rho(k, m, n), 1.0) for m in range(M)], "L", 1.0)
    for m in range(M):
        for n in range(N):
            model.add_row(f"anuse_{m}_{n}",
                          [(_rho(k, m, n), 1.0) for k in range(K)], "L", 1.0)
    for k in range(K):
        model.add_row(f"assign_{k}",
                      [(_rho(k, m, n), 1.0) for m in range(M) for n in range(N)],
                      "E", 1.0)

    # Powers only flow over selected links.
    for k in range(K):
        for m in range(M):
            for n in range(N):
                model.add_row(f"pcap_{k}_{m}_{n}",
                              [(_p(k, m, n), 1.0), (_rho(k, m, n), -p_max)], "L", 0.0)

    # Partition-activity binaries aggregate the pairing row.
    for k in range(K):
        for n in range(N):
            coeffs = [(_z(k, n), 1.0)] + [(_rho(k, m, n), -1.0) for m in range(M)]
            model.add_row(f"zdef_{k}_{n}", coeffs, "E", 0.0)

    # Big-M envelope forcing u_imnk = z_kn * P_imn at integral points.
    for k in range(K):
        for i in range(K):
            if i == k:
                continue
            for m in range(M):
                for n in range(N):
                    u, p, z = _u(i, m, n, k), _p(i, m, n), _z(k, n)
                    model.add_row(f"lin1_{i}_{m}_{n}_{k}",
                                  [(p, 1.0), (u, -1.0), (z, big_m)], "L", big_m)
                    model.add_row(f"lin2_{i}_{m}_{n}_{k}",
                                  [(u, 1.0), (p, -1.0)], "L", 0.0)
                    model.add_row(f"lin3_{i}_{m}_{n}_{k}",
                                  [(u, 1.0), (z, -big_m)], "L", 0.0)

    # Linearized minimum-SINR rows: theta0 * (noise + interference) <= signal
    # whenever UE k is active in partition n.
    for k in range(K):
        for n in range(N):
            coeffs = [(_z(k, n), theta0)]
            for i in range(K):
                if i == k:
                    continue
                for m in range(M):
                    coeffs.append((_u(i, m, n, k), theta0 * gains[k, m]))
            for m in range(M):
                coeffs.append((_p(k, m, n), -gains[k, m]))
            model.add_row(f"sinr_{k}_{n}", coeffs, "L", 0.0)

    return model


def expected_variable_count(k_count: int, m_count: int, n_partitions: int) -> int:
    """Closed-form size of the variable registry."""
    kmn = k_count * m_count * n_partitions
    return 2 * kmn + k_count * n_partitions + (k_count - 1) * kmn


def write_mps(model: IlpModel, path) -> None:
    Path(path).write_text(model.to_mps())


def point_from_solution(instance, assignment: Assignment, powers) -> dict:
    """Variable values induced by an (assignment, powers) pair.

    ``powers`` maps UE -> watts. Only non-zero variables are emitted; the
    checker treats missing names as zero.
    """
    values: dict = {}
    n_of = assignment.partition_of
    an_of = assignment.serving_an
    for ue, an in an_of.items():
        n = n_of[ue]
        values[_rho(ue, an, n)] = 1.0
        values[_z(ue, n)] = 1.0
        watts = float(powers[ue])
        if watts != 0.0:
            values[_p(ue, an, n)] = watts
    for k in an_of:
        n = n_of[k]
        for i, an_i in an_of.items():
            if i == k or n_of[i] != n:
                continue
            watts = float(powers[i])
            if watts != 0.0:
                values[_u(i, an_i, n, k)] = watts
    return values


def parse_solution_file(path) -> dict:
    """Read a name=value solution file (whitespace form also accepted)."""
    values: dict = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" in line:
            name, _, val = line.partition("=")
        else:
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"unparseable solution line: {raw!r}")
            name, val = parts
        values[name.strip()] = float(val)
    return values
