"""Exact rational linear programming by tableau simplex with Bland's rule.

Solves max c.x subject to A.x <= b and E.x = f with free variables, entirely
over Fraction.  Free variables are split into differences of nonnegative
ones; equalities become inequality pairs; a single artificial variable gives
the phase-1 start.  Bland's rule guarantees termination without tolerances.
Infeasibility comes with a Farkas certificate: y >= 0 with y.A = 0 and
y.b < 0 over the combined inequality rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import DimensionMismatch
from .linalg import Vec, vec

Constraint = Tuple[Sequence, object]  # (normal vector, offset): a.x <= b or a.x = b


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    point: Optional[Vec] = None
    value: Optional[Fraction] = None
    farkas: Optional[Vec] = None  # multipliers over the expanded <= rows


def _check_rank(constraints, rank_: int):
    for a, _ in constraints:
        if len(a) != rank_:
            raise DimensionMismatch(
                f"constraint normal of length {len(a)} in ambient rank {rank_}")


class _Tableau:
    """Dense simplex tableau for max-form LPs with rows A z <= b, z >= 0."""

    def __init__(self, rows: List[List[Fraction]], rhs: List[Fraction], nvars: int):
        self.m = len(rows)
        self.n = nvars
        # Columns: structural vars, then slacks.  Row i gets slack n + i.
        self.t = [row[:] + [Fraction(int(i == j)) for j in range(self.m)] + [rhs[i]]
                  for i, row in enumerate(rows)]
        self.basis = [self.n + i for i in range(self.m)]
        self.obj = [Fraction(0)] * (self.n + self.m + 1)

    def set_objective(self, coeffs: Sequence[Fraction]):
        self.obj = [Fraction(c) for c in coeffs] + \
            [Fraction(0)] * (self.n + self.m + 1 - len(coeffs))
        for i, bv in enumerate(self.basis):
            if self.obj[bv] != 0:
                f = self.obj[bv]
                self.obj = [x - f * y for x, y in zip(self.obj, self.t[i])]

    def pivot(self, row: int, col: int):
        inv = 1 / self.t[row][col]
        self.t[row] = [x * inv for x in self.t[row]]
        for i in range(self.m):
            if i != row and self.t[i][col] != 0:
                f = self.t[i][col]
                self.t[i] = [x - f * y for x, y in zip(self.t[i], self.t[row])]
        if self.obj[col] != 0:
            f = self.obj[col]
            self.obj = [x - f * y for x, y in zip(self.obj, self.t[row])]
        self.basis[row] = col

    def optimize(self) -> str:
        ncols = self.n + self.m
        while True:
            col = next((j for j in range(ncols) if self.obj[j] > 0), None)
            if col is None:
                return "optimal"
            row = None
            best = None
            for i in range(self.m):
                if self.t[i][col] > 0:
                    ratio = self.t[i][-1] / self.t[i][col]
                    if best is None or ratio < best or \
                            (ratio == best and self.basis[i] < self.basis[row]):
                        best = ratio
                        row = i
            if row is None:
                return "unbounded"
            self.pivot(row, col)

    def solution(self) -> List[Fraction]:
        x = [Fraction(0)] * (self.n + self.m)
        for i, bv in enumerate(self.basis):
            x[bv] = self.t[i][-1]
        return x


def solve_lp(ineqs: Sequence[Constraint], eqs: Sequence[Constraint],
             objective: Optional[Sequence], rank_: int,
             maximize: bool = True) -> LPResult:
    """Solve max/min objective.x over {ineqs, eqs} with free variables."""
    _check_rank(list(ineqs) + list(eqs), rank_)
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []

    def add_le(a, b):
        av = vec(a)
        # x = u - w with u, w >= 0.
        rows.append([x for x in av] + [-x for x in av])
        rhs.append(Fraction(b))

    for a, b in ineqs:
        add_le(a, b)
    for a, b in eqs:
        add_le(a, b)
        add_le([-x for x in a], -Fraction(b))
    nstruct = 2 * rank_
    m = len(rows)

    # Phase 1: add artificial column t with coefficient -1 in every row and
    # minimize t.  Column index nstruct is t; slacks follow.
    p1_rows = [row[:] + [Fraction(-1)] for row in rows]
    tab = _Tableau(p1_rows, rhs, nstruct + 1)
    tab.set_objective([Fraction(0)] * nstruct + [Fraction(-1)])  # max -t
    neg = min(range(m), key=lambda i: rhs[i], default=None)
    if m and rhs[neg] < 0:
        tab.pivot(neg, nstruct)
        status = tab.optimize()
        assert status == "optimal"  # -t <= 0 bounds phase 1
    if m and -tab.obj[-1] != 0:
        # Infeasible: the phase-1 duals are the negated reduced costs on the
        # slack columns.
        y = tuple(-tab.obj[nstruct + 1 + i] for i in range(m))
        return LPResult(status="infeasible", farkas=y)

    # Pivot the artificial variable out of the basis if it lingers at zero.
    if m and nstruct in tab.basis:
        i = tab.basis.index(nstruct)
        col = next((j for j in range(nstruct + 1 + m)
                    if j != nstruct and tab.t[i][j] != 0), None)
        if col is not None:
            tab.pivot(i, col)
        # Otherwise the row is identically zero and stays inert.

    # Phase 2: freeze t at zero by dropping its column from consideration.
    for row in tab.t:
        row[nstruct] = Fraction(0)
    if objective is None:
        sol = tab.solution()
        point = tuple(sol[i] - sol[rank_ + i] for i in range(rank_))
        return LPResult(status="optimal", point=point)
    objv = vec(objective)
    if len(objv) != rank_:
        raise DimensionMismatch("objective length != ambient rank")
    sign = 1 if maximize else -1
    tab.set_objective([sign * x for x in objv] + [-sign * x for x in objv])
    status = tab.optimize()
    if status == "unbounded":
        return LPResult(status="unbounded")
    sol = tab.solution()
    point = tuple(sol[i] - sol[rank_ + i] for i in range(rank_))
    value = sum((c * x for c, x in zip(objv, point)), Fraction(0))
    return LPResult(status="optimal", point=point, value=value)


def lp_feasible(ineqs: Sequence[Constraint], eqs: Sequence[Constraint],
                rank_: int) -> LPResult:
    """Feasibility: a witness point, or a Farkas certificate of emptiness."""
    return solve_lp(ineqs, eqs, None, rank_)


def lp_maximize(ineqs: Sequence[Constraint], eqs: Sequence[Constraint],
                objective: Sequence, rank_: int) -> LPResult:
    return solve_lp(ineqs, eqs, objective, rank_, maximize=True)
