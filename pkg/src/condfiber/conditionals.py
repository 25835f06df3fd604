"""The problem instance: exact conditionals P(A=i | B=j), the C level count and N."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .errors import ValidationError
from .exactnum import as_rational, format_rational


class Positivity(str, enum.Enum):
    """Whether every conditioning class must be non-empty (``strict``) or may be empty."""

    STRICT = "strict"
    NONNEG = "nonneg"

    @classmethod
    def coerce(cls, value) -> "Positivity":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value))
        except ValueError:
            raise ValidationError(
                f"positivity must be 'strict' or 'nonneg', got {value!r}"
            ) from None


@dataclass(frozen=True)
class ConditionalSpec:
    """Observed conditional frequencies plus grand total.

    ``c[i][j]`` is P(A=i | B=j); every column sums to one exactly.  ``K`` is
    the number of levels of the unobserved remainder C (``K == 1`` encodes
    full conditionals).
    """

    c: tuple
    K: int
    N: int

    def __post_init__(self):
        grid = tuple(tuple(as_rational(v) for v in row) for row in self.c)
        object.__setattr__(self, "c", grid)
        if not grid or not grid[0]:
            raise ValidationError("conditional grid must be non-empty")
        width = len(grid[0])
        if any(len(row) != width for row in grid):
            raise ValidationError("conditional grid rows have unequal lengths")
        if not isinstance(self.K, int) or self.K < 1:
            raise ValidationError(f"K must be a positive integer, got {self.K!r}")
        if not isinstance(self.N, int) or self.N < 1:
            raise ValidationError(f"N must be a positive integer, got {self.N!r}")
        for i, row in enumerate(grid):
            for j, v in enumerate(row):
                if v < 0:
                    raise ValidationError(f"negative conditional at ({i}, {j}): {v}")
        for j in range(width):
            total = sum(row[j] for row in grid)
            if total != 1:
                raise ValidationError(
                    f"column {j} of the conditional sums to {format_rational(total)}, not 1"
                )

    @property
    def I(self) -> int:  # noqa: E743
        return len(self.c)

    @property
    def J(self) -> int:
        return len(self.c[0])

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.c)

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "ConditionalSpec":
        """Build from the problem JSON object.

        ``I``/``J`` are optional but checked against the grid when present.
        """
        try:
            grid = data["conditional"]
            N = data["N"]
        except KeyError as exc:
            raise ValidationError(f"problem JSON missing key {exc.args[0]!r}") from None
        direction = data.get("direction", "A_given_B")
        if direction != "A_given_B":
            raise ValidationError(f"unsupported direction {direction!r}; use 'A_given_B'")
        K = data.get("K", 1)
        for key in ("N", "K", "I", "J"):
            if key in data and (not isinstance(data[key], int) or isinstance(data[key], bool)):
                raise ValidationError(f"{key} must be an integer, got {data[key]!r}")
        if not isinstance(grid, Sequence) or isinstance(grid, str):
            raise ValidationError("'conditional' must be a list of rows")
        spec = cls(c=tuple(tuple(row) for row in grid), K=K, N=N)
        if "I" in data and data["I"] != spec.I:
            raise ValidationError(f"I={data['I']} but the grid has {spec.I} rows")
        if "J" in data and data["J"] != spec.J:
            raise ValidationError(f"J={data['J']} but the grid has {spec.J} columns")
        return spec

    def to_json(self) -> dict:
        return {
            "I": self.I,
            "J": self.J,
            "K": self.K,
            "N": self.N,
            "conditional": [[format_rational(v) for v in row] for row in self.c],
            "direction": "A_given_B",
        }


def conditional_from_counts(counts: Sequence[Sequence[int]], K: int, N: int | None = None) -> ConditionalSpec:
    """Conditional spec implied by an observed I x J margin ``s_ij+``."""
    I, J = len(counts), len(counts[0])
    col = [sum(counts[i][j] for i in range(I)) for j in range(J)]
    if any(t == 0 for t in col):
        raise ValidationError("every conditioning class needs a positive count")
    grid = tuple(tuple(Fraction(counts[i][j], col[j]) for j in range(J)) for i in range(I))
    return ConditionalSpec(c=grid, K=K, N=sum(col) if N is None else N)
