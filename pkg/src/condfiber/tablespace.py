"""Fiber decomposition by margins, exact/approximate table counts, enumeration.

Tables are 3-way ``s[i][j][k]`` with A = target (``I`` levels), B = the
conditioning variable (``J``) and C = everything else (``K``).  Flattened
tables and moves list C outermost, then B, then A, which is the layout of the
printed move matrices in the literature this follows.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from .conditionals import ConditionalSpec, Positivity
from .diophantine import (
    DEFAULT_CAP,
    DiophEq,
    build_equation,
    count_solutions,
    iter_solutions,
)
from .errors import InvariantError, ResourceLimitError, UnsupportedError, ValidationError
from .exactnum import binomial, gcd_many, real_binomial


@dataclass(frozen=True)
class MarginalTable:
    """The I x J margin ``s_{ij+}``."""

    s: tuple

    def __post_init__(self):
        grid = tuple(tuple(int(v) for v in row) for row in self.s)
        object.__setattr__(self, "s", grid)
        if not grid or not grid[0] or any(len(r) != len(grid[0]) for r in grid):
            raise ValidationError("margin must be a non-empty rectangular grid")
        if any(v < 0 for row in grid for v in row):
            raise ValidationError("margin entries must be nonnegative")

    @property
    def I(self) -> int:  # noqa: E743
        return len(self.s)

    @property
    def J(self) -> int:
        return len(self.s[0])

    @property
    def column_sums(self) -> Tuple[int, ...]:
        return tuple(sum(row[j] for row in self.s) for j in range(self.J))

    @property
    def total(self) -> int:
        return sum(map(sum, self.s))

    def to_json(self):
        return [list(row) for row in self.s]


@dataclass(frozen=True)
class Table3:
    """An I x J x K table of counts ``s[i][j][k]``."""

    s: tuple

    @property
    def shape(self) -> Tuple[int, int, int]:
        return len(self.s), len(self.s[0]), len(self.s[0][0])

    def flatten(self) -> Tuple[int, ...]:
        I, J, K = self.shape
        return tuple(self.s[i][j][k] for k in range(K) for j in range(J) for i in range(I))

    @classmethod
    def from_flat(cls, flat: Sequence[int], I: int, J: int, K: int) -> "Table3":
        return cls(
            tuple(
                tuple(tuple(flat[(k * J + j) * I + i] for k in range(K)) for j in range(J))
                for i in range(I)
            )
        )

    def margin(self) -> MarginalTable:
        return MarginalTable(tuple(tuple(sum(cell) for cell in row) for row in self.s))

    @property
    def total(self) -> int:
        return sum(sum(cell) for row in self.s for cell in row)


@dataclass(frozen=True)
class FiberCount:
    total: int
    per_margin: Tuple[Tuple[MarginalTable, int], ...] = ()


def flat_index(i: int, j: int, k: int, I: int, J: int) -> int:
    return (k * J + j) * I + i


# --- margins ---------------------------------------------------------------


def margin_from_solution(cond: ConditionalSpec, x: Sequence[int]) -> MarginalTable:
    """``s_{ij+} = m_j x_j c_ij``; integral because ``m_j`` clears every denominator."""
    eq = build_equation(cond)
    x = tuple(x)
    if any(v < 0 for v in x) or not eq.is_solution(x):
        raise ValidationError(f"{x} is not a nonnegative solution of {eq}")
    grid = []
    for row in cond.c:
        grid.append(tuple(int(eq.coeffs[j] * x[j] * row[j]) for j in range(cond.J)))
    return MarginalTable(tuple(grid))


def decompose_fiber(cond: ConditionalSpec, positivity=Positivity.STRICT, cap: int = DEFAULT_CAP) -> List[MarginalTable]:
    """One margin per solution of the induced equation; empty when the fiber is empty."""
    eq = build_equation(cond)
    n = count_solutions(eq, positivity)
    if n > cap:
        raise ResourceLimitError(f"{n} margins exceed the cap {cap}", count=n)
    return [margin_from_solution(cond, x) for x in iter_solutions(eq, positivity)]


def fibers_coincide(cond: ConditionalSpec) -> bool:
    """True iff exactly one margin is compatible, i.e. conditional and marginal fibers agree."""
    return count_solutions(build_equation(cond)) == 1


# --- counting given a margin ----------------------------------------------


def count_given_margin(margin: MarginalTable, K: int) -> int:
    """Tables with this margin: each ``s_{ij+}`` split into ``K`` ordered parts."""
    if K < 1:
        raise ValidationError("K must be >= 1")
    return math.prod(binomial(s + K - 1, K - 1) for row in margin.s for s in row)


def count_given_margin_real(margin: Sequence[Sequence[float]], K: int) -> float:
    """Real-valued extension for margins implied by rounded conditionals."""
    out = 1.0
    for row in margin:
        for s in row:
            if s < 0:
                raise ValidationError(f"negative margin entry {s}")
            out *= real_binomial(s, K)
    return out


# --- exact fiber total by generating functions ----------------------------


def _column_weight(cond: ConditionalSpec, eq: DiophEq, j: int):
    m, K = eq.coeffs[j], cond.K
    parts = [m * c for c in cond.column(j)]  # integers

    def w(x: int) -> int:
        return math.prod(binomial(int(p * x) + K - 1, K - 1) for p in parts)

    degree = sum(1 for p in parts if p) * (K - 1)
    return w, degree


def _binomial_basis(values: Sequence[int]) -> List[int]:
    """Coefficients ``a_r`` with ``w(x) = sum_r a_r * C(x + r, r)`` from ``w(0..d)``.

    Uses ``sum_x C(x+r, r) t^x = (1-t)^-(r+1)``: multiply the truncated series
    of ``w`` by ``(1-t)^(d+1)`` and re-expand the result in powers of ``1-t``.
    """
    d = len(values) - 1
    q = [
        sum(values[n - k] * (-1) ** k * math.comb(d + 1, k) for k in range(n + 1))
        for n in range(d + 1)
    ]
    c = [(-1) ** k * sum(q[n] * math.comb(n, k) for n in range(k, d + 1)) for k in range(d + 1)]
    return [c[d - r] for r in range(d + 1)]


def fiber_total(cond: ConditionalSpec, positivity=Positivity.STRICT) -> int:
    """Sum over compatible margins of the per-margin count, without listing margins.

    Coefficient of ``t^N`` in ``prod_j sum_x w_j(x) t^(m_j x)``, each factor a
    rational series in ``t^(m_j)`` once ``w_j`` is written in the binomial basis.
    """
    positivity = Positivity.coerce(positivity)
    eq = build_equation(cond)
    lo = 1 if positivity is Positivity.STRICT else 0
    target = eq.rhs - lo * sum(eq.coeffs)
    if target < 0:
        return 0
    ways = [0] * (target + 1)
    ways[0] = 1
    for j, m in enumerate(eq.coeffs):
        w, d = _column_weight(cond, eq, j)
        a = _binomial_basis([w(x + lo) for x in range(d + 1)])
        acc = [0] * (target + 1)
        cur = ways
        for coef in a:
            cur = cur[:]
            for n in range(m, target + 1):
                cur[n] += cur[n - m]
            if coef:
                for n in range(target + 1):
                    acc[n] += coef * cur[n]
        ways = acc
    return ways[target]


def _count_margin_worker(args):
    margin, K = args
    return count_given_margin(margin, K)


def count_fiber(
    cond: ConditionalSpec,
    positivity=Positivity.STRICT,
    per_margin: bool = False,
    cap: int = DEFAULT_CAP,
    jobs: int = 1,
) -> FiberCount:
    """Exact number of 3-way tables in the fiber.

    With ``per_margin`` the margins are listed and counted one by one, and the
    sum is cross-checked against the generating-function total.
    """
    total = fiber_total(cond, positivity)
    if not per_margin:
        return FiberCount(total=total)
    margins = decompose_fiber(cond, positivity, cap)
    if jobs > 1 and len(margins) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(_count_margin_worker, [(mg, cond.K) for mg in margins], chunksize=64))
    else:
        counts = [count_given_margin(mg, cond.K) for mg in margins]
    if sum(counts) != total:
        raise InvariantError(
            f"per-margin sum {sum(counts)} disagrees with generating-function total {total}"
        )
    return FiberCount(total=total, per_margin=tuple(zip(margins, counts)))


# --- approximate fiber size ------------------------------------------------


def _split_count_poly(s, K):
    """``C(s + K - 1, K - 1)`` as a polynomial in real ``s`` (vectorized)."""
    out = np.ones_like(s, dtype=float)
    for t in range(1, K):
        out = out * (s + t) / t
    return out


def approx_count_fiber(cond: ConditionalSpec) -> float:
    """Integral approximation of the fiber size over the real margin polytope.

    Integrates the per-margin count, as a polynomial in ``x_1..x_{J-1}``, over
    ``x >= 0, sum m_j x_j <= N`` and scales by ``gcd(m) / m_J``.  Gauss-Legendre
    with enough nodes for the integrand's degree, so the rule is exact up to
    rounding.  Only ``J <= 3`` is supported.
    """
    eq = build_equation(cond)
    m, N, J, K = eq.coeffs, eq.rhs, eq.J, cond.K
    if J > 3:
        raise UnsupportedError(f"approximate fiber count supports J <= 3, got J={J}")
    weights = [[float(m[j] * cond.c[i][j]) for j in range(J)] for i in range(cond.I)]

    def integrand(xs):
        # xs: list of J-1 arrays; the last coordinate is solved from the equation
        last = (N - sum(m[j] * xs[j] for j in range(J - 1))) / m[J - 1]
        cols = list(xs) + [last]
        val = np.ones_like(last, dtype=float)
        for i in range(cond.I):
            for j in range(J):
                if weights[i][j]:
                    val = val * _split_count_poly(weights[i][j] * cols[j], K)
        return val

    if J == 1:
        return float(integrand([]))
    degree = cond.I * J * (K - 1)
    nodes, wts = np.polynomial.legendre.leggauss(degree // 2 + 2)
    scale = gcd_many(m) / m[J - 1]
    if J == 2:
        b = N / m[0]
        x1 = 0.5 * b * (nodes + 1.0)
        return scale * 0.5 * b * float(np.sum(wts * integrand([x1])))
    # J == 3: x2 in [0, N/m2], x1 in [0, (N - m2 x2)/m1] via a collapsed square
    b2 = N / m[1]
    u, v = np.meshgrid(nodes, nodes, indexing="ij")
    wu, wv = np.meshgrid(wts, wts, indexing="ij")
    x2 = 0.5 * b2 * (v + 1.0)
    width = (N - m[1] * x2) / m[0]
    x1 = 0.5 * width * (u + 1.0)
    jac = 0.5 * b2 * 0.5 * width
    return scale * float(np.sum(wu * wv * jac * integrand([x1, x2])))


# --- enumeration ------------------------------------------------------------


def compositions(total: int, parts: int) -> List[Tuple[int, ...]]:
    """Ordered splits of ``total`` into ``parts`` nonnegative integers, lexicographic."""
    if parts == 1:
        return [(total,)]
    out = []
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return out


def iter_tables_given_margin(margin: MarginalTable, K: int) -> Iterator[Tuple[int, ...]]:
    """Flat tables (C, B, A order) with this margin; cells vary in (i, j) lexicographic order."""
    I, J = margin.I, margin.J
    cells = [(i, j) for i in range(I) for j in range(J)]
    comp_lists = [compositions(margin.s[i][j], K) for i, j in cells]
    index = [[flat_index(i, j, k, I, J) for k in range(K)] for i, j in cells]
    size = I * J * K
    for choice in itertools.product(*comp_lists):
        flat = [0] * size
        for idx, comp in zip(index, choice):
            for pos, v in zip(idx, comp):
                flat[pos] = v
        yield tuple(flat)


def iter_fiber_flat(cond: ConditionalSpec, positivity=Positivity.STRICT) -> Iterator[Tuple[int, ...]]:
    eq = build_equation(cond)
    for x in iter_solutions(eq, positivity):
        yield from iter_tables_given_margin(margin_from_solution(cond, x), cond.K)


def enumerate_fiber(
    cond: ConditionalSpec, positivity=Positivity.STRICT, cap: int = DEFAULT_CAP
) -> Iterator[Table3]:
    """Stream every table of the fiber, grouped by margin in solution order.

    Raises before yielding anything when the fiber holds more than ``cap`` tables.
    """
    total = fiber_total(cond, positivity)
    if total > cap:
        raise ResourceLimitError(f"fiber has {total} tables, above the cap {cap}", count=total)
    I, J, K = cond.I, cond.J, cond.K

    def gen():
        for flat in iter_fiber_flat(cond, positivity):
            yield Table3.from_flat(flat, I, J, K)

    return gen()


def table_in_fiber(cond: ConditionalSpec, table: Table3, positivity=Positivity.STRICT) -> bool:
    """Direct membership test: total N, exact conditional ratios, positivity."""
    I, J, K = table.shape
    if (I, J) != (cond.I, cond.J) or K != cond.K:
        return False
    if any(v < 0 for row in table.s for cell in row for v in cell):
        return False
    if table.total != cond.N:
        return False
    margin = table.margin()
    cols = margin.column_sums
    for j in range(J):
        if cols[j] == 0:
            if Positivity.coerce(positivity) is Positivity.STRICT:
                return False
            continue
        for i in range(I):
            if Fraction(margin.s[i][j], cols[j]) != cond.c[i][j]:
                return False
    return True


# --- two fixed 2-way margins ---------------------------------------------


def iter_two_way_tables(rows: Sequence[int], cols: Sequence[int]) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    """Brute-force stream of nonnegative tables with given row and column sums."""
    rows, cols = tuple(rows), tuple(cols)
    if sum(rows) != sum(cols):
        return

    def rec(r, remaining):
        if r == len(rows) - 1:
            yield (remaining,)
            return
        for comp in compositions(rows[r], len(cols)):
            if all(c <= rem for c, rem in zip(comp, remaining)):
                rest = tuple(rem - c for c, rem in zip(comp, remaining))
                for tail in rec(r + 1, rest):
                    yield (comp,) + tail

    yield from rec(0, cols)


def count_two_way_tables(rows: Sequence[int], cols: Sequence[int], cap: int = DEFAULT_CAP) -> int:
    """Number of tables with fixed row/column sums, row by row with memoized column remainders."""
    rows, cols = tuple(rows), tuple(cols)
    if any(v < 0 for v in rows + cols):
        raise ValidationError("row and column sums must be nonnegative")
    if sum(rows) != sum(cols):
        return 0
    memo = {}

    def bounded_comps(total, caps):
        if len(caps) == 1:
            if total <= caps[0]:
                yield (total,)
            return
        for first in range(min(total, caps[0]) + 1):
            for rest in bounded_comps(total - first, caps[1:]):
                yield (first,) + rest

    def rec(r, remaining):
        if r == len(rows) - 1:
            return 1
        key = (r, remaining)
        if key in memo:
            return memo[key]
        if len(memo) > cap:
            raise ResourceLimitError(f"slice with rows {rows} and cols {cols} is too large")
        total = 0
        for comp in bounded_comps(rows[r], remaining):
            total += rec(r + 1, tuple(rem - c for c, rem in zip(comp, remaining)))
        memo[key] = total
        return total

    return rec(0, cols)


def count_fiber_two_margins(ab: MarginalTable, ac: MarginalTable, cap: int = DEFAULT_CAP) -> int:
    """3-way tables with both [AB] and [AC] fixed (rows of both grids index A).

    Independent across A levels: the product over A slices of the number of
    B x C tables with the slice's row and column sums.
    """
    if ab.I != ac.I:
        raise ValidationError("margins disagree on the number of A levels")
    out = 1
    for a in range(ab.I):
        r, c = ab.s[a], ac.s[a]
        if sum(r) != sum(c):
            raise ValidationError(f"A-level {a}: [AB] total {sum(r)} != [AC] total {sum(c)}")
        out *= count_two_way_tables(r, c, cap)
        if out == 0:
            break
    return out
