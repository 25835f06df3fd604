import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from condfiber import ConditionalSpec, Positivity
from condfiber.diophantine import (
    DiophEq,
    approx_count_solutions,
    build_equation,
    connects_small_fibers,
    count_solutions,
    enumerate_solutions,
    euclid_chain_basis,
    extended_gcd,
    hermite_normal_form,
    intersect_margins,
    iter_solutions,
    lattice_basis,
    markov_lattice_basis,
    same_lattice,
    solve_particular,
)
from condfiber.errors import ResourceLimitError, ValidationError

from conftest import DOWNLOAD, FULL_FOUR, THREE_COL


def brute_solutions(coeffs, rhs, lo=1):
    ranges = [range(lo, rhs // m + 1) for m in coeffs]
    return [x for x in itertools.product(*ranges) if sum(m * v for m, v in zip(coeffs, x)) == rhs]


def test_build_equation_from_conditionals():
    assert build_equation(ConditionalSpec(DOWNLOAD, 2, 50)).coeffs == (5, 5)
    assert build_equation(ConditionalSpec(THREE_COL, 2, 240)).coeffs == (2, 3, 4)
    assert build_equation(ConditionalSpec(FULL_FOUR, 1, 240)).coeffs == (3, 4, 5, 6)


def test_download_solutions():
    sols = enumerate_solutions(DiophEq((5, 5), 50))
    assert sols == [(x, 10 - x) for x in range(1, 10)]


@pytest.mark.parametrize(
    "coeffs,rhs,expected",
    [((2, 3, 4), 24, 7), ((7, 17), 240, 2), ((5, 5), 50, 9), ((2, 3, 4), 240, 1141)],
)
def test_counts_match_brute_force(coeffs, rhs, expected):
    eq = DiophEq(coeffs, rhs)
    assert count_solutions(eq) == expected == len(brute_solutions(coeffs, rhs))


def test_infeasible_and_nonneg():
    assert count_solutions(DiophEq((4, 6), 9)) == 0
    assert count_solutions(DiophEq((2, 3), 4)) == 0
    assert count_solutions(DiophEq((2, 3), 4), Positivity.NONNEG) == 1
    assert solve_particular(DiophEq((4, 6), 9)) is None


def test_enumeration_cap():
    with pytest.raises(ResourceLimitError) as info:
        enumerate_solutions(DiophEq((2, 3, 4), 240), cap=100)
    assert info.value.count == 1141


def test_approx_counts_closed_form():
    assert approx_count_solutions(DiophEq((5, 5), 50)) == 10
    for N, want in [(24, 12), (240, 1200), (2400, 120000), (24000, 12000000)]:
        assert approx_count_solutions(DiophEq((2, 3, 4), N)) == want


def test_extended_gcd():
    g, a, b = extended_gcd(240, 46)
    assert g == 2 and 240 * a + 46 * b == 2


def test_euclid_chain_vectors_are_kernel_and_full_rank():
    eq = DiophEq((2, 3, 4), 24)
    chain = euclid_chain_basis(eq)
    assert len(chain) == 2
    assert all(eq.evaluate(v) == 0 for v in chain)
    assert same_lattice(chain, lattice_basis(eq))


def test_lattice_basis_of_two_three_four():
    basis = lattice_basis(DiophEq((2, 3, 4), 24))
    assert same_lattice(basis, [(2, 0, -1), (3, -2, 0)])


def test_markov_basis_connects_where_hnf_may_not():
    eq = DiophEq((2, 3, 4), 24)
    basis = markov_lattice_basis(eq)
    assert {tuple(abs(v) for v in b) for b in basis} == {(2, 0, 1), (3, 2, 0)}
    assert same_lattice(basis, lattice_basis(eq))
    assert connects_small_fibers(eq, basis)


def test_hnf_is_canonical():
    a = hermite_normal_form([(2, 0, -1), (3, -2, 0)])
    b = hermite_normal_form([(5, -2, -1), (3, -2, 0)])
    assert a == b


def test_intersect_margins():
    b_given_a = ConditionalSpec(THREE_COL, 1, 24)
    c_given_a = ConditionalSpec((("1/3", "1/3", "1/4"), ("2/3", "2/3", "3/4")), 1, 24)
    assert intersect_margins([b_given_a, c_given_a]) == [(6, 6, 12)]
    assert len(intersect_margins([ConditionalSpec(THREE_COL, 1, 240), ConditionalSpec(c_given_a.c, 1, 240)])) == 361
    with pytest.raises(ValidationError):
        intersect_margins([DiophEq((1, 2), 5), DiophEq((1, 2, 3), 5)])


def test_intersect_matches_brute_force():
    eqs = [DiophEq((2, 3, 4), 48), DiophEq((3, 3, 4), 48)]
    brute = [
        s
        for s in itertools.product(range(1, 49), repeat=3)
        if sum(s) == 48 and all(all(v % m == 0 for v, m in zip(s, e.coeffs)) for e in eqs)
    ]
    assert sorted(intersect_margins(eqs)) == sorted(brute)


coeff_lists = st.lists(st.integers(1, 9), min_size=1, max_size=4)


@settings(max_examples=150, deadline=None)
@given(coeff_lists, st.integers(1, 40), st.sampled_from(list(Positivity)))
def test_count_matches_enumeration(coeffs, rhs, pos):
    eq = DiophEq(tuple(coeffs), rhs)
    lo = 1 if pos is Positivity.STRICT else 0
    brute = brute_solutions(coeffs, rhs, lo)
    listed = list(iter_solutions(eq, pos))
    assert listed == sorted(brute)
    assert count_solutions(eq, pos) == len(brute)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=2, max_size=4), st.integers(1, 500))
def test_particular_solution_and_basis(coeffs, rhs):
    eq = DiophEq(tuple(coeffs), rhs)
    x0 = solve_particular(eq)
    g = math.gcd(*coeffs)
    if rhs % g:
        assert x0 is None
    else:
        assert eq.evaluate(x0) == rhs
    basis = lattice_basis(eq)
    assert len(basis) == len(coeffs) - 1
    assert all(eq.evaluate(v) == 0 for v in basis)
