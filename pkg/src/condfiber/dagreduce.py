"""Evidence sets as DAGs, the Wermuth check, and reduction to marginal fibers.

Supported evidence for reduction and fiber comparison: conditionals with one
target and one conditioning variable, all sharing that conditioning variable,
plus optional marginals.  Anything else is reported as unsupported.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .conditionals import ConditionalSpec, Positivity
from .diophantine import DEFAULT_CAP, intersect_margins
from .errors import ResourceLimitError, StructureError, UnsupportedError, ValidationError
from .exactnum import as_rational
from .tablespace import MarginalTable, count_fiber, count_fiber_two_margins, count_given_margin


@dataclass(frozen=True)
class Conditional:
    """P(of | given); ``values[i][j]`` is row = level of ``of``, column = level of ``given``."""

    of: Tuple[str, ...]
    given: Tuple[str, ...]
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "of", tuple(self.of))
        object.__setattr__(self, "given", tuple(self.given))
        object.__setattr__(self, "values", tuple(tuple(as_rational(v) for v in row) for row in self.values))
        if not self.of or not self.given:
            raise ValidationError("a conditional needs a target set and a conditioning set")
        if set(self.of) & set(self.given):
            raise ValidationError(f"variables {sorted(set(self.of) & set(self.given))} on both sides")

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.of + self.given


@dataclass(frozen=True)
class Marginal:
    """Counts over ``of`` (a 1- or 2-variable margin; rows index ``of[0]``)."""

    of: Tuple[str, ...]
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "of", tuple(self.of))
        if not self.of:
            raise ValidationError("a marginal needs at least one variable")
        vals = self.values
        if len(self.of) == 1 and vals and not isinstance(vals[0], (list, tuple)):
            vals = [vals]
        object.__setattr__(self, "values", tuple(tuple(int(v) for v in row) for row in vals))

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.of


@dataclass(frozen=True)
class EvidenceSet:
    pieces: tuple
    N: int
    levels: Dict[str, int] = field(default_factory=dict)
    reference_margin: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not isinstance(self.N, int) or self.N < 1:
            raise ValidationError(f"N must be a positive integer, got {self.N!r}")
        if self.levels:
            universe = set(self.levels)
            for p in self.pieces:
                unknown = set(p.variables) - universe
                if unknown:
                    raise ValidationError(f"undeclared variables {sorted(unknown)}")
        if self.reference_margin is not None:
            object.__setattr__(self, "reference_margin", tuple(int(v) for v in self.reference_margin))

    @property
    def variables(self) -> List[str]:
        seen: List[str] = list(self.levels)
        for p in self.pieces:
            for v in p.variables:
                if v not in seen:
                    seen.append(v)
        return seen

    @property
    def conditionals(self) -> List[Conditional]:
        return [p for p in self.pieces if isinstance(p, Conditional)]

    @property
    def marginals(self) -> List[Marginal]:
        return [p for p in self.pieces if isinstance(p, Marginal)]

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "EvidenceSet":
        if "pieces" not in data or "N" not in data:
            raise ValidationError("evidence JSON needs 'pieces' and 'N'")
        pieces = []
        for n, raw in enumerate(data["pieces"]):
            kind = raw.get("kind")
            try:
                if kind == "conditional":
                    pieces.append(Conditional(raw["of"], raw["given"], raw["values"]))
                elif kind == "marginal":
                    pieces.append(Marginal(raw["of"], raw["values"]))
                else:
                    raise ValidationError(f"piece {n}: unknown kind {kind!r}")
            except KeyError as exc:
                raise ValidationError(f"piece {n}: missing key {exc.args[0]!r}") from None
        return cls(
            pieces=tuple(pieces),
            N=data["N"],
            levels=dict(data.get("levels", {})),
            reference_margin=data.get("reference_margin"),
        )


@dataclass(frozen=True)
class DagModel:
    nodes: Tuple[str, ...]
    edges: Tuple[Tuple[str, str], ...]

    def __post_init__(self):
        if len(set(self.edges)) != len(self.edges):
            raise StructureError("duplicate edges")
        for a, b in self.edges:
            if a == b:
                raise StructureError(f"self-loop on {a}")
        g = self.to_networkx()
        if not nx.is_directed_acyclic_graph(g):
            cycle = nx.find_cycle(g)
            raise StructureError(f"evidence has no DAG representation; cycle {cycle}")

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.edges)
        return g

    def parents(self, node: str) -> List[str]:
        return [a for a, b in self.edges if b == node]

    def skeleton(self) -> set:
        return {frozenset(e) for e in self.edges}


def build_dag(ev: EvidenceSet) -> DagModel:
    """Each conditional adds ``given -> of`` edges; marginal sets are joined internally.

    A marginal over several variables is oriented in listed order, so it adds
    ``of[a] -> of[b]`` for ``a < b`` unless the pair is already linked.
    """
    edges: List[Tuple[str, str]] = []
    for p in ev.conditionals:
        for g in p.given:
            for t in p.of:
                if (g, t) not in edges:
                    edges.append((g, t))
    linked = {frozenset(e) for e in edges}
    for p in ev.marginals:
        for a, b in itertools.combinations(p.of, 2):
            if frozenset((a, b)) not in linked:
                edges.append((a, b))
                linked.add(frozenset((a, b)))
    return DagModel(tuple(ev.variables), tuple(edges))


def moralize(g: DagModel) -> nx.Graph:
    return nx.moral_graph(g.to_networkx())


def wermuth_check(g: DagModel) -> bool:
    """True iff every two parents of a common child are adjacent."""
    adjacent = g.skeleton()
    for node in g.nodes:
        for a, b in itertools.combinations(g.parents(node), 2):
            if frozenset((a, b)) not in adjacent:
                return False
    return True


@dataclass(frozen=True)
class Reduction:
    reducible: bool
    margins: Tuple[Tuple[str, ...], ...] = ()
    reason: str = ""
    common_margin_count: Optional[int] = None
    common_margin: Optional[Tuple[int, ...]] = None


def _shared_conditioning(ev: EvidenceSet) -> str:
    """The single conditioning variable shared by all conditionals, or raise UnsupportedError."""
    conds = ev.conditionals
    for p in conds:
        if len(p.of) != 1 or len(p.given) != 1:
            raise UnsupportedError("only conditionals with one target and one conditioning variable are supported")
    given = {p.given[0] for p in conds}
    if len(given) != 1:
        raise UnsupportedError("conditionals must share one conditioning variable")
    return given.pop()


def _specs(ev: EvidenceSet) -> List[ConditionalSpec]:
    return [ConditionalSpec(c=p.values, K=1, N=ev.N) for p in ev.conditionals]


def _cliques(g: DagModel) -> Tuple[Tuple[str, ...], ...]:
    order = {v: n for n, v in enumerate(g.nodes)}
    out = []
    for clique in nx.find_cliques(moralize(g)):
        out.append(tuple(sorted(clique, key=order.get)))
    return tuple(sorted(out, key=lambda c: [order[v] for v in c]))


def reduce_to_margins(ev: EvidenceSet, positivity=Positivity.STRICT) -> Reduction:
    g = build_dag(ev)
    if not wermuth_check(g):
        return Reduction(False, reason="the DAG violates the Wermuth condition")
    if not ev.conditionals:
        return Reduction(True, margins=tuple(p.of for p in ev.marginals))
    try:
        _shared_conditioning(ev)
    except UnsupportedError as exc:
        return Reduction(False, reason=f"unsupported evidence shape: {exc}")
    common = intersect_margins(_specs(ev), positivity)
    if len(common) != 1:
        what = "no" if not common else f"{len(common)}"
        return Reduction(
            False,
            reason=f"{what} conditioning margins are compatible with every conditional",
            common_margin_count=len(common),
        )
    return Reduction(True, margins=_cliques(g), common_margin_count=1, common_margin=common[0])


@dataclass(frozen=True)
class FiberComparison:
    reduction: Reduction
    conditional_size: int
    margins_size: Optional[int]
    reference_margin: Optional[Tuple[int, ...]]

    @property
    def equal(self) -> Optional[bool]:
        if self.margins_size is None:
            return None
        return self.conditional_size == self.margins_size


def _joint_margins(specs: Sequence[ConditionalSpec], g_margin: Sequence[int]) -> List[MarginalTable]:
    """[given x target] margins for one conditioning margin; rows index the conditioning variable."""
    out = []
    for spec in specs:
        rows = []
        for j, n in enumerate(g_margin):
            col = spec.column(j)
            cells = [n * c for c in col]
            if any(v.denominator != 1 for v in cells):
                raise ValidationError(f"margin {tuple(g_margin)} is not compatible with a conditional")
            rows.append(tuple(int(v) for v in cells))
        out.append(MarginalTable(tuple(rows)))
    return out


def _size_given(specs, g_margin, levels_rest: int, cap: int) -> int:
    margins = _joint_margins(specs, g_margin)
    if len(margins) == 1:
        return count_given_margin(margins[0], levels_rest)
    if len(margins) == 2:
        if levels_rest != 1:
            raise UnsupportedError("two conditionals plus further unobserved variables are not supported")
        return count_fiber_two_margins(margins[0], margins[1], cap)
    raise UnsupportedError("at most two conditionals are supported for fiber comparison")


def compare_fibers(
    ev: EvidenceSet,
    cap: int = DEFAULT_CAP,
    reference_margin: Optional[Sequence[int]] = None,
    positivity=Positivity.STRICT,
) -> FiberComparison:
    """|F_T| (all tables matching the evidence) against the fiber of the margins.

    The margin fiber needs a conditioning margin: the unique compatible one
    when the evidence reduces, else ``reference_margin`` (argument or field).
    Without either, ``margins_size`` is None.
    """
    reduction = reduce_to_margins(ev, positivity)
    if not ev.conditionals:
        raise UnsupportedError("fiber comparison needs at least one conditional")
    given = _shared_conditioning(ev)
    specs = _specs(ev)
    named = {given} | {p.of[0] for p in ev.conditionals}
    levels_rest = 1
    for v in ev.variables:
        if v not in named:
            if v not in ev.levels:
                raise ValidationError(f"level count of {v!r} is unknown")
            levels_rest *= ev.levels[v]

    common = intersect_margins(specs, positivity)
    if len(common) > cap:
        raise ResourceLimitError(f"{len(common)} common margins exceed the cap {cap}", count=len(common))
    if len(specs) == 1:
        single = ConditionalSpec(c=specs[0].c, K=levels_rest, N=ev.N)
        conditional_size = count_fiber(single, positivity).total
    else:
        conditional_size = sum(_size_given(specs, m, levels_rest, cap) for m in common)

    ref = reference_margin if reference_margin is not None else ev.reference_margin
    if ref is None and reduction.reducible:
        ref = reduction.common_margin
    margins_size = None
    if ref is not None:
        ref = tuple(int(v) for v in ref)
        if sum(ref) != ev.N:
            raise ValidationError(f"reference margin {ref} does not sum to N={ev.N}")
        margins_size = _size_given(specs, ref, levels_rest, cap)
    return FiberComparison(reduction, conditional_size, margins_size, ref)
