"""Generic linear programs and a solver front end shared by all TE modules.

Programs are held in a simple row form (coefficients, relation, rhs) with
per-variable bounds. Solving is delegated to scipy's HiGHS backend, which is
deterministic for identical input and handles the degenerate, equal-capacity
instances common in TE without cycling.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

FEASIBILITY_TOL = 1e-7

LE = "<="
EQ = "="
GE = ">="
_RELATIONS = (LE, EQ, GE)


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LinearProgram:
    """LP in row form. Variables default to bounds [0, +inf)."""

    maximize: bool = False
    objective: list[float] = field(default_factory=list)
    lower: list[float] = field(default_factory=list)
    upper: list[Optional[float]] = field(default_factory=list)
    labels: list[str] = field(default_factory=list)
    rows: list[tuple[dict[int, float], str, float]] = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def add_var(
        self,
        label: str,
        objective: float = 0.0,
        lower: float = 0.0,
        upper: Optional[float] = None,
    ) -> int:
        self.objective.append(float(objective))
        self.lower.append(float(lower))
        self.upper.append(None if upper is None else float(upper))
        self.labels.append(label)
        return len(self.objective) - 1

    def add_row(self, coeffs: dict[int, float], relation: str, rhs: float) -> None:
        if relation not in _RELATIONS:
            raise ValueError(f"bad relation {relation!r}")
        rhs = float(rhs)
        if not np.isfinite(rhs):
            raise ValueError("rhs must be finite")
        for j in coeffs:
            if not (0 <= j < self.num_vars):
                raise ValueError(f"coefficient references unknown variable {j}")
        self.rows.append((dict(coeffs), relation, rhs))


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    objective_value: float
    assignment: tuple[float, ...]

    def __getitem__(self, var: int) -> float:
        return self.assignment[var]


def _build_matrices(lp: LinearProgram):
    n = lp.num_vars
    ub_data, ub_rows, ub_cols, b_ub = [], [], [], []
    eq_data, eq_rows, eq_cols, b_eq = [], [], [], []
    for coeffs, relation, rhs in lp.rows:
        sign = -1.0 if relation == GE else 1.0
        if relation == EQ:
            r = len(b_eq)
            for j, a in coeffs.items():
                eq_rows.append(r)
                eq_cols.append(j)
                eq_data.append(a)
            b_eq.append(rhs)
        else:
            r = len(b_ub)
            for j, a in coeffs.items():
                ub_rows.append(r)
                ub_cols.append(j)
                ub_data.append(sign * a)
            b_ub.append(sign * rhs)
    a_ub = (
        csr_matrix((ub_data, (ub_rows, ub_cols)), shape=(len(b_ub), n))
        if b_ub
        else None
    )
    a_eq = (
        csr_matrix((eq_data, (eq_rows, eq_cols)), shape=(len(b_eq), n))
        if b_eq
        else None
    )
    return a_ub, (np.array(b_ub) if b_ub else None), a_eq, (
        np.array(b_eq) if b_eq else None
    )


def _check_feasibility(lp: LinearProgram, x: np.ndarray) -> None:
    for coeffs, relation, rhs in lp.rows:
        activity = sum(a * x[j] for j, a in coeffs.items())
        norm = max(1.0, max((abs(a) for a in coeffs.values()), default=1.0))
        resid = (activity - rhs) / norm
        ok = (
            (relation == LE and resid <= FEASIBILITY_TOL)
            or (relation == GE and resid >= -FEASIBILITY_TOL)
            or (relation == EQ and abs(resid) <= FEASIBILITY_TOL)
        )
        if not ok:
            raise ArithmeticError(
                f"solver returned an infeasible point: row residual {resid:g}"
            )


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve the program; Infeasible/Unbounded are statuses, not failures."""
    if lp.num_vars == 0:
        return LpSolution(LpStatus.OPTIMAL, 0.0, ())
    c = np.array(lp.objective, dtype=float)
    if lp.maximize:
        c = -c
    a_ub, b_ub, a_eq, b_eq = _build_matrices(lp)
    bounds = list(zip(lp.lower, lp.upper))
    res = linprog(
        c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds,
        method="highs",
    )
    if res.status == 2:
        return LpSolution(LpStatus.INFEASIBLE, float("nan"), ())
    if res.status == 3:
        return LpSolution(LpStatus.UNBOUNDED, float("nan"), ())
    if res.status != 0:
        raise ArithmeticError(f"LP solver failed: {res.message}")
    x = np.asarray(res.x, dtype=float)
    _check_feasibility(lp, x)
    value = float(res.fun)
    if lp.maximize:
        value = -value
    return LpSolution(LpStatus.OPTIMAL, value, tuple(float(v) for v in x))


def dump_lp(lp: LinearProgram) -> str:
    """Human-readable LP-text dump for external cross-checks.

    Grammar: one objective line, a ``subject to`` block with one row per line,
    and a ``bounds`` block; variables are referenced by their labels.
    """
    def term(a: float, j: int) -> str:
        return f"{a:+g} {lp.labels[j]}"

    lines = []
    sense = "maximize" if lp.maximize else "minimize"
    obj = " ".join(
        term(a, j) for j, a in enumerate(lp.objective) if a != 0.0
    ) or "0"
    lines.append(f"{sense}: {obj}")
    lines.append("subject to:")
    for coeffs, relation, rhs in lp.rows:
        lhs = " ".join(term(a, j) for j, a in sorted(coeffs.items())) or "0"
        lines.append(f"  {lhs} {relation} {rhs:g}")
    lines.append("bounds:")
    for j in range(lp.num_vars):
        hi = "+inf" if lp.upper[j] is None else f"{lp.upper[j]:g}"
        lines.append(f"  {lp.lower[j]:g} <= {lp.labels[j]} <= {hi}")
    return "\n".join(lines) + "\n"
