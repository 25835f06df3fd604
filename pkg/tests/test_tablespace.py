import math
from fractions import Fraction

import pytest
import sympy

from condfiber import ConditionalSpec, Positivity
from condfiber.diophantine import build_equation
from condfiber.errors import ResourceLimitError, UnsupportedError, ValidationError
from condfiber.tablespace import (
    MarginalTable,
    Table3,
    approx_count_fiber,
    compositions,
    count_fiber,
    count_fiber_two_margins,
    count_given_margin,
    count_given_margin_real,
    count_two_way_tables,
    decompose_fiber,
    enumerate_fiber,
    fiber_total,
    fibers_coincide,
    flat_index,
    iter_two_way_tables,
    margin_from_solution,
    table_in_fiber,
)

from conftest import DOWNLOAD, SEVENTEENTHS, THREE_COL


def brute_fiber(cond, positivity=Positivity.STRICT):
    """Every I x J x K table with total N whose columns carry the conditional exactly."""
    I, J, K = cond.I, cond.J, cond.K
    out = []
    for flat in compositions(cond.N, I * J * K):
        s = [[[flat[(i * J + j) * K + k] for k in range(K)] for j in range(J)] for i in range(I)]
        ok = True
        for j in range(J):
            col = [sum(s[i][j]) for i in range(I)]
            tot = sum(col)
            if tot == 0:
                ok = positivity is Positivity.NONNEG
            elif any(Fraction(col[i], tot) != cond.c[i][j] for i in range(I)):
                ok = False
            if not ok:
                break
        if ok:
            out.append(tuple(tuple(tuple(c) for c in row) for row in s))
    return out


def test_flat_order_is_c_then_b_then_a():
    t = Table3((((1, 2), (3, 4)), ((5, 6), (7, 8))))
    assert t.flatten() == (1, 5, 3, 7, 2, 6, 4, 8)
    assert Table3.from_flat(t.flatten(), 2, 2, 2) == t
    assert flat_index(1, 0, 1, 2, 2) == 5


def test_margins_of_download_problem(download):
    margins = decompose_fiber(download)
    assert len(margins) == 9
    assert margins[4].s == ((15, 5), (10, 20))
    assert count_given_margin(margins[4], 2) == 22176


def test_margin_from_solution_rejects(download):
    with pytest.raises(ValidationError):
        margin_from_solution(download, (2, 2))


def test_exact_counts_download(download):
    fc = count_fiber(download, per_margin=True)
    assert fc.total == 128676
    assert sum(c for _, c in fc.per_margin) == 128676
    assert fiber_total(download, Positivity.NONNEG) == 129778


def test_nonneg_adds_zero_columns(download):
    # two extra margins: all men (x = (10, 0)) and all women (x = (0, 10))
    extra = fiber_total(download, Positivity.NONNEG) - fiber_total(download)
    men_only = count_given_margin(MarginalTable(((30, 0), (20, 0))), 2)
    women_only = count_given_margin(MarginalTable(((0, 10), (0, 40))), 2)
    assert extra == men_only + women_only


@pytest.mark.parametrize(
    "c,K,N,pos",
    [
        (DOWNLOAD, 2, 10, Positivity.STRICT),
        (DOWNLOAD, 2, 10, Positivity.NONNEG),
        (THREE_COL, 2, 12, Positivity.STRICT),
        ((("1/2",), ("1/2",)), 3, 6, Positivity.STRICT),
        ((("1/3", "1"), ("2/3", "0")), 1, 12, Positivity.NONNEG),
    ],
)
def test_counts_and_enumeration_match_brute_force(c, K, N, pos):
    cond = ConditionalSpec(c, K, N)
    brute = brute_fiber(cond, pos)
    listed = [t.s for t in enumerate_fiber(cond, pos)]
    assert fiber_total(cond, pos) == len(brute) == len(listed)
    assert sorted(listed) == sorted(brute)
    assert all(table_in_fiber(cond, Table3(t), pos) for t in listed)


def test_per_margin_split_seventeenths(seventeenths):
    fc = count_fiber(seventeenths, per_margin=True)
    assert [c for _, c in fc.per_margin] == [4179685045536, 1950497373880]
    assert fc.total == 6130182419416


def test_parallel_per_margin_agrees(three_col):
    small = ConditionalSpec(three_col.c, 2, 48)
    assert count_fiber(small, per_margin=True, jobs=2) == count_fiber(small, per_margin=True)


def test_fibers_coincide():
    assert fibers_coincide(ConditionalSpec(SEVENTEENTHS, 1, 25)) is False  # no solution
    assert fibers_coincide(ConditionalSpec(SEVENTEENTHS, 1, 7 + 17))
    assert not fibers_coincide(ConditionalSpec(DOWNLOAD, 1, 50))


def test_enumeration_cap(download):
    with pytest.raises(ResourceLimitError) as info:
        enumerate_fiber(download, cap=1000)
    assert info.value.count == 128676


def test_count_given_margin_real():
    assert count_given_margin_real([[2.5, 1.0]], 2) == pytest.approx(3.5 * 2.0)
    with pytest.raises(ValidationError):
        count_given_margin_real([[-1.0]], 2)


def exact_integral(cond):
    """Oracle: symbolic integral of the per-margin count over the real margin polytope."""
    eq = build_equation(cond)
    m, N, J, K = eq.coeffs, eq.rhs, eq.J, cond.K
    xs = sympy.symbols(f"x0:{J - 1}")
    last = (N - sum(m[j] * xs[j] for j in range(J - 1))) / sympy.Integer(m[J - 1])
    cols = list(xs) + [last]
    f = sympy.Integer(1)
    for i in range(cond.I):
        for j in range(J):
            s = m[j] * sympy.Rational(cond.c[i][j].numerator, cond.c[i][j].denominator) * cols[j]
            f *= sympy.prod([(s + t) / t for t in range(1, K)])
    f = sympy.expand(f)
    if J == 2:
        val = sympy.integrate(f, (xs[0], 0, sympy.Rational(N, m[0])))
    else:
        upper = (N - m[1] * xs[1]) / sympy.Integer(m[0])
        inner = sympy.integrate(f, (xs[0], 0, upper))
        val = sympy.integrate(sympy.expand(inner), (xs[1], 0, sympy.Rational(N, m[1])))
    return val * sympy.Rational(math.gcd(*m), m[J - 1])


def test_approx_matches_symbolic_integral(download):
    want = exact_integral(download)
    assert want == sympy.Rational(389030, 3)
    assert approx_count_fiber(download) == pytest.approx(float(want), rel=1e-12)


@pytest.mark.parametrize("N,want", [(24, sympy.Rational(325748, 5)), (240, sympy.Rational(8319359544400, 7))])
def test_approx_three_columns_symbolic(N, want):
    cond = ConditionalSpec(THREE_COL, 2, N)
    assert exact_integral(cond) == want
    assert approx_count_fiber(cond) == pytest.approx(float(want), rel=1e-10)


def test_approx_limits():
    with pytest.raises(UnsupportedError):
        approx_count_fiber(ConditionalSpec((("1/2",) * 4, ("1/2",) * 4), 2, 40))
    one = ConditionalSpec((("1/2",), ("1/2",)), 3, 10)
    assert approx_count_fiber(one) == pytest.approx(21 * 21)


def test_two_way_tables():
    tables = list(iter_two_way_tables((3, 3), (2, 4)))
    assert len(tables) == count_two_way_tables((3, 3), (2, 4)) == 3
    assert all(sum(r) == 3 for t in tables for r in t)
    assert count_two_way_tables((5,), (2, 3)) == 1
    assert count_two_way_tables((2, 2), (3, 2)) == 0


@pytest.mark.parametrize("rows,cols", [((4, 2, 3), (5, 4)), ((6, 6), (3, 3, 6)), ((1, 0, 7), (2, 2, 2, 2))])
def test_two_way_count_matches_listing(rows, cols):
    assert count_two_way_tables(rows, cols) == len(list(iter_two_way_tables(rows, cols)))


def test_two_margin_fiber():
    ab = MarginalTable(((3, 3), (2, 4), (3, 9)))
    ac = MarginalTable(((2, 4), (2, 4), (3, 9)))
    assert count_fiber_two_margins(ab, ac) == 36
    with pytest.raises(ValidationError):
        count_fiber_two_margins(ab, MarginalTable(((1, 4), (2, 4), (3, 9))))


def test_compositions_order():
    assert compositions(2, 2) == [(0, 2), (1, 1), (2, 0)]
    assert len(compositions(5, 3)) == math.comb(7, 2)
