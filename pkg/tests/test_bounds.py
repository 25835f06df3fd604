from fractions import Fraction

import pytest

from condfiber import ConditionalSpec, Positivity
from condfiber.bounds import (
    approx_x_value_count,
    attained_margin_values,
    attained_values,
    decomposition_cell_bounds,
    decomposition_margin_bounds,
    margin_bounds_thm,
    per_margin_cell_bounds,
    relaxation_cell_bounds,
    x_ranges,
)
from condfiber.diophantine import DiophEq
from condfiber.errors import ValidationError
from condfiber.tablespace import MarginalTable, enumerate_fiber

from conftest import DOWNLOAD, THREE_COL


def ij(grid, k=0):
    return [[grid[i][j][k] for j in range(len(grid[0]))] for i in range(len(grid))]


def test_relaxation_download(download):
    b = relaxation_cell_bounds(download)
    assert ij(b.upper) == [[Fraction(147, 5), Fraction(49, 5)], [Fraction(98, 5), Fraction(196, 5)]]
    assert ij(b.lower) == [[0, 0], [0, 0]]
    assert b.to_json()["upper"][0][0] == ["147/5", "147/5"]


def test_margin_bounds_download(download):
    mb = margin_bounds_thm(download)
    assert mb.lower == ((3, 1), (2, 4))
    assert mb.upper == ((27, 9), (18, 36))
    assert decomposition_margin_bounds(download) == mb


def test_decomposition_and_per_margin(download):
    dec = decomposition_cell_bounds(download)
    assert ij(dec.upper) == [[27, 9], [18, 36]]
    assert ij(dec.lower) == [[0, 0], [0, 0]]
    per = per_margin_cell_bounds(MarginalTable(((15, 5), (10, 20))), 2)
    assert ij(per.upper) == [[15, 5], [10, 20]]
    assert ij(per.lower) == [[0, 0], [0, 0]]


def test_full_conditional_lower_bounds():
    cond = ConditionalSpec(DOWNLOAD, 1, 50)
    assert ij(decomposition_cell_bounds(cond).lower) == [[3, 1], [2, 4]]
    per = per_margin_cell_bounds(MarginalTable(((15, 5), (10, 20))), 1)
    assert per.lower == per.upper


def test_decomposition_is_sharp(download):
    """Every bound is attained: compare against the values the fiber really takes."""
    small = ConditionalSpec(DOWNLOAD, 2, 20)
    seen = attained_values(small)
    dec = decomposition_cell_bounds(small)
    for (i, j, k), vals in seen["cells"].items():
        assert (min(vals), max(vals)) == dec.cell(i, j, k)


def test_margin_gaps():
    cond = ConditionalSpec(THREE_COL, 1, 24)
    got = attained_margin_values(cond)
    mb = decomposition_margin_bounds(cond)
    for (i, j), vals in got.items():
        assert vals[0] == mb.lower[i][j] and vals[-1] == mb.upper[i][j]


def test_x_ranges():
    assert x_ranges(DiophEq((5, 5), 50)) == [(1, 9), (1, 9)]
    assert x_ranges(DiophEq((7, 17), 240)) == [(10, 27), (3, 10)]
    assert x_ranges(DiophEq((5, 5), 50), Positivity.NONNEG) == [(0, 10), (0, 10)]
    with pytest.raises(ValidationError):
        x_ranges(DiophEq((4, 6), 9))


def test_approx_x_value_count():
    assert approx_x_value_count(DiophEq((5, 5), 50), 0) == 9
    assert approx_x_value_count(DiophEq((2, 3, 4), 240), 0) == Fraction(233, 2)
    with pytest.raises(ValidationError):
        approx_x_value_count(DiophEq((5,), 50), 0)
    with pytest.raises(ValidationError):
        approx_x_value_count(DiophEq((5, 5), 50), 2)


def test_single_column_bounds_are_equalities():
    cond = ConditionalSpec((("1/4",), ("3/4",)), 1, 20)
    dec = decomposition_cell_bounds(cond)
    assert dec.lower == dec.upper == (((5,),), ((15,),))


def test_contains(download):
    t = next(iter(enumerate_fiber(ConditionalSpec(DOWNLOAD, 2, 10))))
    assert relaxation_cell_bounds(ConditionalSpec(DOWNLOAD, 2, 10)).contains(t)
