"""Exact linear programming over the rationals.

A dense two-phase tableau simplex with Bland's anti-cycling rule. It solves

    minimise  c.x   subject to  A x = b,  x >= 0

with every quantity a :class:`fractions.Fraction`, so optimal values and
feasibility verdicts are exact. Problem sizes in this package are tiny
(tens of variables), which keeps the dense tableau affordable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def _pivot(T, obj, row, col):
    prow = T[row]
    piv = prow[col]
    if piv != 1:
        prow[:] = [a / piv for a in prow]
    nz = [j for j, a in enumerate(prow) if a]
    for r in (*T, obj):
        if r is prow:
            continue
        f = r[col]
        if f:
            for j in nz:
                r[j] -= f * prow[j]


def _run(T, obj, basis, allowed) -> str:
    rhs = len(obj) - 1
    while True:
        col = next((j for j in allowed if obj[j] < 0), None)
        if col is None:
            return OPTIMAL
        best = None
        for i, r in enumerate(T):
            a = r[col]
            if a > 0:
                ratio = r[rhs] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return UNBOUNDED
        _pivot(T, obj, best[1], col)
        basis[best[1]] = col


def solve_lp(c: Sequence, A_eq: Sequence[Sequence], b_eq: Sequence, maximize: bool = False) -> LPResult:
    """Solve ``min c.x`` (or max) s.t. ``A_eq x = b_eq``, ``x >= 0`` exactly."""
    n = len(c)
    m = len(A_eq)
    cost = [Fraction(v) for v in c]
    if maximize:
        cost = [-v for v in cost]
    T = []
    for i in range(m):
        row = [Fraction(a) for a in A_eq[i]]
        bi = Fraction(b_eq[i])
        if bi < 0:
            row, bi = [-a for a in row], -bi
        T.append(row + [Fraction(int(j == i)) for j in range(m)] + [bi])
    width = n + m + 1

    # phase 1: drive the artificial variables to zero
    obj = [Fraction(0)] * width
    for r in T:
        for j in range(n):
            obj[j] -= r[j]
        obj[-1] -= r[-1]
    basis = [n + i for i in range(m)]
    _run(T, obj, basis, range(n))
    if obj[-1] != 0:
        return LPResult(INFEASIBLE)

    # pivot remaining (zero-level) artificials out, dropping redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= n:
            col = next((j for j in range(n) if T[i][j] != 0), None)
            if col is None:
                del T[i], basis[i]
                continue
            _pivot(T, obj, i, col)
            basis[i] = col
        i += 1

    # phase 2
    obj = cost + [Fraction(0)] * (m + 1)
    for i, r in enumerate(T):
        cb = cost[basis[i]]
        if cb:
            for j in range(width):
                obj[j] -= cb * r[j]
    status = _run(T, obj, basis, range(n))
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * n
    for i, bcol in enumerate(basis):
        x[bcol] = T[i][-1]
    value = -obj[-1]
    return LPResult(OPTIMAL, tuple(x), -value if maximize else value)
