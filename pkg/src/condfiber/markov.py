"""Two-part candidate Markov moves and brute-force connectivity checks.

Moves either keep the [AB] margin (a unit shift between two C levels of one
cell) or change it along a kernel vector of the Diophantine coefficients.
Whether the union always connects the fiber is an open question; this module
only builds the candidates and measures connectivity on enumerable fibers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .conditionals import ConditionalSpec, Positivity
from .diophantine import DEFAULT_CAP, build_equation, markov_lattice_basis
from .errors import ResourceLimitError, ValidationError
from .tablespace import Table3, fiber_total, flat_index, iter_fiber_flat

FIXES_MARGIN = "fixes_margin"
CHANGES_MARGIN = "changes_margin"


@dataclass(frozen=True)
class TableMove:
    delta: Tuple[int, ...]  # flattened, C outermost then B then A
    tag: str
    shape: Tuple[int, int, int]

    def as_table(self) -> Table3:
        return Table3.from_flat(self.delta, *self.shape)

    def canonical(self) -> Tuple[int, ...]:
        """Sign-normalized delta: first nonzero entry positive."""
        for v in self.delta:
            if v:
                return self.delta if v > 0 else tuple(-d for d in self.delta)
        return self.delta


@dataclass(frozen=True)
class MoveSet:
    moves: Tuple[TableMove, ...]

    def __post_init__(self):
        seen = set()
        for mv in self.moves:
            key = mv.canonical()
            if key in seen:
                raise ValidationError(f"duplicate move (up to sign): {mv.delta}")
            seen.add(key)

    def __len__(self):
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    @property
    def counts(self) -> Dict[str, int]:
        out = {FIXES_MARGIN: 0, CHANGES_MARGIN: 0}
        for mv in self.moves:
            out[mv.tag] += 1
        return out

    def of_tag(self, tag: str) -> "MoveSet":
        return MoveSet(tuple(mv for mv in self.moves if mv.tag == tag))

    def union(self, other: "MoveSet") -> "MoveSet":
        return MoveSet(self.moves + other.moves)

    def matrix(self) -> List[List[int]]:
        return [list(mv.delta) for mv in self.moves]


@dataclass(frozen=True)
class ConnectivityReport:
    fiber_size: int
    component_count: int
    component_sizes: Tuple[int, ...]

    @property
    def connected(self) -> bool:
        return self.component_count <= 1


@dataclass(frozen=True)
class ConjectureReport:
    conjectured_size: int
    candidate_size: int
    candidate_counts: Dict[str, int]
    full_conditional: bool
    connectivity: ConnectivityReport
    size_matches: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "size_matches", self.conjectured_size == self.candidate_size)


def constraint_matrix(cond: ConditionalSpec) -> List[List[int]]:
    """Integer rows of the linear system defining the fiber (without positivity).

    First row is the grand total; then for each ``(i, j)`` the row for
    ``m_j * (s_{ij+} - c_ij * s_{+j+}) = 0``.
    """
    I, J, K = cond.I, cond.J, cond.K
    eq = build_equation(cond)
    size = I * J * K
    rows = [[1] * size]
    for j in range(J):
        m = eq.coeffs[j]
        for i in range(I):
            row = [0] * size
            for i2 in range(I):
                coef = int(m * ((1 if i2 == i else 0) - cond.c[i][j]))
                for k in range(K):
                    row[flat_index(i2, j, k, I, J)] = coef
            rows.append(row)
    return rows


def in_kernel(cond: ConditionalSpec, delta: Sequence[int]) -> bool:
    return all(sum(a * d for a, d in zip(row, delta)) == 0 for row in constraint_matrix(cond))


def basic_moves(cond: ConditionalSpec) -> MoveSet:
    """``+1`` at ``(i, j, 1)``, ``-1`` at ``(i, j, k)`` for every cell and every other C level."""
    I, J, K = cond.I, cond.J, cond.K
    shape = (I, J, K)
    moves = []
    for i in range(I):
        for j in range(J):
            for k in range(1, K):
                delta = [0] * (I * J * K)
                delta[flat_index(i, j, 0, I, J)] = 1
                delta[flat_index(i, j, k, I, J)] = -1
                moves.append(TableMove(tuple(delta), FIXES_MARGIN, shape))
    return MoveSet(tuple(moves))


def margin_change_moves(cond: ConditionalSpec) -> MoveSet:
    """One move per kernel basis vector ``v``: ``m_j v_j c_ij`` placed at C level 1."""
    I, J, K = cond.I, cond.J, cond.K
    eq = build_equation(cond)
    moves = []
    for v in markov_lattice_basis(eq):
        delta = [0] * (I * J * K)
        for j in range(J):
            for i in range(I):
                delta[flat_index(i, j, 0, I, J)] = int(eq.coeffs[j] * v[j] * cond.c[i][j])
        moves.append(TableMove(tuple(delta), CHANGES_MARGIN, (I, J, K)))
    return MoveSet(tuple(moves))


def candidate_basis(cond: ConditionalSpec) -> MoveSet:
    return margin_change_moves(cond).union(basic_moves(cond))


def conjectured_basis_size(cond: ConditionalSpec) -> int:
    """``(J - 1) + (K - 1) * J * I``."""
    return (cond.J - 1) + (cond.K - 1) * cond.J * cond.I


def verify_connectivity(
    cond: ConditionalSpec,
    moves: MoveSet,
    positivity=Positivity.STRICT,
    cap: int = DEFAULT_CAP,
) -> ConnectivityReport:
    """Components of the fiber graph whose edges are ``t -> t +/- move`` inside the fiber.

    Components are discovered in enumeration order, so the report is deterministic.
    """
    total = fiber_total(cond, positivity)
    if total > cap:
        raise ResourceLimitError(f"fiber has {total} tables, above the cap {cap}", count=total)
    points = list(iter_fiber_flat(cond, positivity))
    index = {p: n for n, p in enumerate(points)}
    steps = []
    for mv in moves:
        sparse = tuple((pos, d) for pos, d in enumerate(mv.delta) if d)
        steps.append(sparse)
        steps.append(tuple((pos, -d) for pos, d in sparse))

    label = [-1] * len(points)
    sizes = []
    for start in range(len(points)):
        if label[start] >= 0:
            continue
        comp = len(sizes)
        label[start] = comp
        size = 1
        queue = deque([start])
        while queue:
            cur = points[queue.popleft()]
            for sparse in steps:
                nxt = list(cur)
                ok = True
                for pos, d in sparse:
                    v = nxt[pos] + d
                    if v < 0:
                        ok = False
                        break
                    nxt[pos] = v
                if not ok:
                    continue
                n = index.get(tuple(nxt))
                if n is not None and label[n] < 0:
                    label[n] = comp
                    size += 1
                    queue.append(n)
        sizes.append(size)
    return ConnectivityReport(len(points), len(sizes), tuple(sizes))


def conjecture_check(cond: ConditionalSpec, positivity=Positivity.STRICT, cap: int = DEFAULT_CAP) -> ConjectureReport:
    """Evidence for the conjectured basis size and for connectivity of the candidate moves."""
    moves = candidate_basis(cond)
    return ConjectureReport(
        conjectured_size=conjectured_basis_size(cond),
        candidate_size=len(moves),
        candidate_counts=moves.counts,
        full_conditional=cond.K == 1,
        connectivity=verify_connectivity(cond, moves, positivity, cap),
    )


def apply_move(table: Table3, move: TableMove, sign: int = 1, positivity=Positivity.STRICT) -> Optional[Table3]:
    """``table + sign * move``, or ``None`` if that leaves the fiber.

    Rejects negative cells and, in strict mode, an emptied conditioning class.
    """
    I, J, K = table.shape
    flat = [v + sign * d for v, d in zip(table.flatten(), move.delta)]
    if any(v < 0 for v in flat):
        return None
    out = Table3.from_flat(flat, I, J, K)
    if Positivity.coerce(positivity) is Positivity.STRICT and 0 in out.margin().column_sums:
        return None
    return out
