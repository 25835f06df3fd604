"""Exact analysis of the tables consistent with observed conditional frequencies."""

from .conditionals import ConditionalSpec, Positivity, conditional_from_counts
from .diophantine import (
    DiophEq,
    build_equation,
    count_solutions,
    enumerate_solutions,
    intersect_margins,
    lattice_basis,
    markov_lattice_basis,
    solve_particular,
)
from .errors import (
    CondFiberError,
    InvariantError,
    ResourceLimitError,
    StructureError,
    UnsupportedError,
    ValidationError,
)
from .tablespace import (
    FiberCount,
    MarginalTable,
    Table3,
    approx_count_fiber,
    count_fiber,
    decompose_fiber,
    enumerate_fiber,
    fibers_coincide,
)

__all__ = [
    "ConditionalSpec",
    "Positivity",
    "conditional_from_counts",
    "DiophEq",
    "build_equation",
    "count_solutions",
    "enumerate_solutions",
    "intersect_margins",
    "lattice_basis",
    "markov_lattice_basis",
    "solve_particular",
    "CondFiberError",
    "InvariantError",
    "ResourceLimitError",
    "StructureError",
    "UnsupportedError",
    "ValidationError",
    "FiberCount",
    "MarginalTable",
    "Table3",
    "approx_count_fiber",
    "count_fiber",
    "decompose_fiber",
    "enumerate_fiber",
    "fibers_coincide",
]
