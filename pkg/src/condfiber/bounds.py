"""Cell and margin bounds for tables consistent with conditionals and N.

Four routes: the linear relaxation (closed form), bounds given one fixed
margin, exact bounds over the margin decomposition, and the relaxation
bounds on the missing margin itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Set, Tuple

from .conditionals import ConditionalSpec, Positivity
from .diophantine import DEFAULT_CAP, DiophEq, build_equation, representable
from .errors import ResourceLimitError, ValidationError
from .exactnum import format_rational, gcd_many
from .tablespace import MarginalTable, decompose_fiber, enumerate_fiber, fiber_total

RELAXATION = "relaxation"
PER_MARGIN = "per_margin"
DECOMPOSITION = "decomposition"


@dataclass(frozen=True)
class BoundGrid:
    """Lower/upper bounds per cell ``(i, j, k)``; entries are ints or Fractions."""

    lower: tuple
    upper: tuple
    kind: str

    def cell(self, i: int, j: int, k: int):
        return self.lower[i][j][k], self.upper[i][j][k]

    def contains(self, table) -> bool:
        return all(
            lo <= v <= hi
            for trow, lrow, urow in zip(table.s, self.lower, self.upper)
            for tcell, lcell, ucell in zip(trow, lrow, urow)
            for v, lo, hi in zip(tcell, lcell, ucell)
        )

    def to_json(self):
        def enc(v):
            return format_rational(v) if isinstance(v, Fraction) else int(v)

        def grid(g):
            return [[[enc(v) for v in cell] for cell in row] for row in g]

        return {"kind": self.kind, "lower": grid(self.lower), "upper": grid(self.upper)}


@dataclass(frozen=True)
class MarginBoundGrid:
    """Bounds on the missing margin ``s_{ij+}``."""

    lower: tuple
    upper: tuple

    def to_json(self):
        return {
            "lower": [[format_rational(v) for v in row] for row in self.lower],
            "upper": [[format_rational(v) for v in row] for row in self.upper],
        }


def _broadcast(lower_ij, upper_ij, K, kind) -> BoundGrid:
    lower = tuple(tuple((lo,) * K for lo in row) for row in lower_ij)
    upper = tuple(tuple((hi,) * K for hi in row) for row in upper_ij)
    return BoundGrid(lower, upper, kind)


def relaxation_cell_bounds(cond: ConditionalSpec) -> BoundGrid:
    """Real relaxation of the fiber with every other conditioning class at its minimum of 1.

    Upper bound for cell ``(i, j, k)`` is ``(N - (J - 1)) * c_ij``; lower is 0.
    """
    cap = cond.N - (cond.J - 1)
    upper = [[Fraction(cap) * c for c in row] for row in cond.c]
    lower = [[Fraction(0)] * cond.J for _ in range(cond.I)]
    return _broadcast(lower, upper, cond.K, RELAXATION)


def margin_bounds_thm(cond: ConditionalSpec) -> MarginBoundGrid:
    """``m_j c_ij <= s_{ij+} <= (N - sum_{t != j} m_t) c_ij``."""
    eq = build_equation(cond)
    total = sum(eq.coeffs)
    lower, upper = [], []
    for row in cond.c:
        lower.append(tuple(eq.coeffs[j] * c for j, c in enumerate(row)))
        upper.append(tuple((cond.N - (total - eq.coeffs[j])) * c for j, c in enumerate(row)))
    return MarginBoundGrid(tuple(lower), tuple(upper))


def per_margin_cell_bounds(margin: MarginalTable, K: int) -> BoundGrid:
    """Given one margin each cell ranges over ``[0, s_{ij+}]`` (exactly ``s_{ij+}`` when K = 1)."""
    if K < 1:
        raise ValidationError("K must be >= 1")
    lower = [[s if K == 1 else 0 for s in row] for row in margin.s]
    return _broadcast(lower, margin.s, K, PER_MARGIN)


def x_ranges(eq: DiophEq, positivity=Positivity.STRICT) -> List[Tuple[int, int]]:
    """Exact ``(min, max)`` of each ``x_j`` over the solutions, without enumerating them.

    Raises :class:`ValidationError` when the equation has no solution.
    """
    lo = 1 if Positivity.coerce(positivity) is Positivity.STRICT else 0
    target = eq.rhs - lo * sum(eq.coeffs)
    if target < 0:
        raise ValidationError(f"{eq} has no solutions")
    out = []
    for j, m in enumerate(eq.coeffs):
        others = eq.coeffs[:j] + eq.coeffs[j + 1:]
        ok = representable(others, target)
        feasible = [y for y in range(target // m + 1) if ok[target - m * y]]
        if not feasible:
            raise ValidationError(f"{eq} has no solutions")
        out.append((feasible[0] + lo, feasible[-1] + lo))
    return out


def decomposition_margin_bounds(cond: ConditionalSpec, positivity=Positivity.STRICT) -> MarginBoundGrid:
    """Exact ``[min_l, max_l]`` of ``s_{ij+}`` across all compatible margins."""
    eq = build_equation(cond)
    ranges = x_ranges(eq, positivity)
    lower, upper = [], []
    for row in cond.c:
        lower.append(tuple(int(eq.coeffs[j] * ranges[j][0] * c) for j, c in enumerate(row)))
        upper.append(tuple(int(eq.coeffs[j] * ranges[j][1] * c) for j, c in enumerate(row)))
    return MarginBoundGrid(tuple(lower), tuple(upper))


def decomposition_cell_bounds(cond: ConditionalSpec, positivity=Positivity.STRICT) -> BoundGrid:
    """Exact integer cell bounds over the whole fiber.

    Upper is the largest compatible ``s_{ij+}``.  Lower is 0 when K >= 2 (any
    single cell can be emptied within its margin), else the smallest margin value.
    """
    mb = decomposition_margin_bounds(cond, positivity)
    if cond.K == 1:
        lower = mb.lower
    else:
        lower = [[0] * cond.J for _ in range(cond.I)]
    return _broadcast(lower, mb.upper, cond.K, DECOMPOSITION)


def approx_x_value_count(eq: DiophEq, i: int) -> Fraction:
    """Approximate number of values ``x_i`` takes (``i`` is 0-based).

    ``(N - sum_{j != i} m_j) * gcd(all m) / (m_i * gcd(m without m_i))``
    """
    if eq.J < 2:
        raise ValidationError("approx_x_value_count needs at least two coefficients")
    if not 0 <= i < eq.J:
        raise ValidationError(f"index {i} out of range for J={eq.J}")
    others = eq.coeffs[:i] + eq.coeffs[i + 1:]
    num = (eq.rhs - sum(others)) * gcd_many(eq.coeffs)
    return Fraction(num, eq.coeffs[i] * gcd_many(others))


def attained_values(
    cond: ConditionalSpec, positivity=Positivity.STRICT, cap: int = DEFAULT_CAP
) -> Dict[str, Dict[Tuple[int, ...], Set[int]]]:
    """Values actually taken by each cell and each margin entry over the fiber.

    Exposes the gaps inside the bound intervals.  Brute force, capped.
    """
    total = fiber_total(cond, positivity)
    if total > cap:
        raise ResourceLimitError(f"fiber has {total} tables, above the cap {cap}", count=total)
    cells: Dict[Tuple[int, ...], Set[int]] = {}
    margins: Dict[Tuple[int, ...], Set[int]] = {}
    for t in enumerate_fiber(cond, positivity, cap):
        for i, row in enumerate(t.s):
            for j, cell in enumerate(row):
                margins.setdefault((i, j), set()).add(sum(cell))
                for k, v in enumerate(cell):
                    cells.setdefault((i, j, k), set()).add(v)
    return {"cells": cells, "margins": margins}


def attained_margin_values(cond: ConditionalSpec, positivity=Positivity.STRICT, cap: int = DEFAULT_CAP):
    """Per ``(i, j)``, the sorted values of ``s_{ij+}`` across compatible margins (no table enumeration)."""
    out: Dict[Tuple[int, int], Set[int]] = {}
    for mg in decompose_fiber(cond, positivity, cap):
        for i, row in enumerate(mg.s):
            for j, v in enumerate(row):
                out.setdefault((i, j), set()).add(v)
    return {key: sorted(vals) for key, vals in out.items()}
