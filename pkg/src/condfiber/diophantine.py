"""The linear Diophantine equation sum_j m_j x_j = N induced by a conditional.

Its positive solutions are in bijection with the conditioning margins
``s_{+j+} = m_j x_j`` that are compatible with the observed conditionals.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from .conditionals import ConditionalSpec, Positivity
from .errors import ResourceLimitError, ValidationError
from .exactnum import gcd_many, lcm_many

DEFAULT_CAP = 10**7

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class DiophEq:
    coeffs: Vector
    rhs: int

    def __post_init__(self):
        coeffs = tuple(int(m) for m in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if not coeffs:
            raise ValidationError("equation needs at least one coefficient")
        if any(m < 1 for m in coeffs):
            raise ValidationError(f"coefficients must be positive, got {coeffs}")
        if not isinstance(self.rhs, int) or self.rhs < 1:
            raise ValidationError(f"right-hand side must be a positive integer, got {self.rhs!r}")

    @property
    def J(self) -> int:
        return len(self.coeffs)

    def evaluate(self, x: Sequence[int]) -> int:
        return sum(m * v for m, v in zip(self.coeffs, x))

    def is_solution(self, x: Sequence[int]) -> bool:
        return len(x) == self.J and self.evaluate(x) == self.rhs

    def __str__(self):
        lhs = " + ".join(f"{m}*x{j + 1}" for j, m in enumerate(self.coeffs))
        return f"{lhs} = {self.rhs}"


def build_equation(cond: ConditionalSpec) -> DiophEq:
    """``m_j`` is the lcm of the reduced denominators in column ``j``."""
    coeffs = tuple(lcm_many(c.denominator for c in cond.column(j)) for j in range(cond.J))
    return DiophEq(coeffs, cond.N)


def _as_equation(item) -> DiophEq:
    if isinstance(item, DiophEq):
        return item
    if isinstance(item, ConditionalSpec):
        return build_equation(item)
    raise ValidationError(f"expected DiophEq or ConditionalSpec, got {type(item).__name__}")


# --- Euclid chain ----------------------------------------------------------


def extended_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b)``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def prefix_bezout(coeffs: Sequence[int]) -> List[Tuple[int, Vector]]:
    """Bezout data for every prefix of ``coeffs``.

    Entry ``t`` (0-based) is ``(g, y)`` where ``g = gcd(m_1..m_{t+1})`` and
    ``sum_i m_i y_i == g`` over that prefix.
    """
    out: List[Tuple[int, Vector]] = []
    g, y = coeffs[0], (1,)
    out.append((g, y))
    for m in coeffs[1:]:
        g_new, a, b = extended_gcd(g, m)
        y = tuple(a * v for v in y) + (b,)
        g = g_new
        out.append((g, y))
    return out


def solve_particular(eq: DiophEq) -> Optional[Vector]:
    """One integer solution (entries may be negative), or ``None`` if none exists."""
    g, y = prefix_bezout(eq.coeffs)[-1]
    if eq.rhs % g:
        return None
    scale = eq.rhs // g
    return tuple(v * scale for v in y)


def euclid_chain_basis(eq: DiophEq) -> List[Vector]:
    """Kernel basis read off the prefix-gcd chain (lower-triangular in reverse).

    Vector ``h`` (1-based, ``h < J``) has entries
    ``-m_{J+1-h} y_l / g_{J+1-h}`` for ``l <= J-h``, ``g_{J-h} / g_{J-h+1}``
    at position ``J-h+1`` and zeros after, where ``y`` is the Bezout vector
    of the first ``J-h`` coefficients and ``g_t`` the gcd of the first ``t``.
    """
    m = eq.coeffs
    J = len(m)
    chain = prefix_bezout(m)
    basis = []
    for h in range(1, J):
        pivot = J - h  # 0-based index of the last nonzero entry
        g_prev, y = chain[pivot - 1]
        g_here = chain[pivot][0]
        v = [0] * J
        for l in range(pivot):
            v[l] = -m[pivot] * y[l] // g_here
        v[pivot] = g_prev // g_here
        basis.append(tuple(v))
    return basis


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> List[Vector]:
    """Row-style Hermite normal form of an integer matrix, zero rows dropped.

    Pivots are positive and entries above each pivot are reduced into
    ``[0, pivot)``; two matrices generate the same lattice iff their HNFs match.
    """
    A = [list(r) for r in rows if any(r)]
    if not A:
        return []
    ncols = len(A[0])
    pivot_row = 0
    for col in range(ncols):
        if pivot_row >= len(A):
            break
        # Euclid on column `col` across rows pivot_row..end
        while True:
            nonzero = [r for r in range(pivot_row, len(A)) if A[r][col] != 0]
            if not nonzero:
                break
            best = min(nonzero, key=lambda r: abs(A[r][col]))
            A[pivot_row], A[best] = A[best], A[pivot_row]
            done = True
            for r in range(pivot_row + 1, len(A)):
                if A[r][col]:
                    q = A[r][col] // A[pivot_row][col]
                    A[r] = [a - q * b for a, b in zip(A[r], A[pivot_row])]
                    if A[r][col]:
                        done = False
            if done:
                break
        if A[pivot_row][col] == 0:
            continue
        if A[pivot_row][col] < 0:
            A[pivot_row] = [-a for a in A[pivot_row]]
        p = A[pivot_row][col]
        for r in range(pivot_row):
            q = A[r][col] // p
            if q:
                A[r] = [a - q * b for a, b in zip(A[r], A[pivot_row])]
        pivot_row += 1
    return [tuple(r) for r in A[:pivot_row]]


def lattice_basis(eq: DiophEq) -> List[Vector]:
    """HNF basis of the integer kernel of the coefficient row (``J - 1`` vectors).

    Every integer solution is ``solve_particular(eq)`` plus an integer
    combination of these.
    """
    if eq.J == 1:
        return []
    return hermite_normal_form(euclid_chain_basis(eq))


def same_lattice(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> bool:
    return hermite_normal_form(a) == hermite_normal_form(b)


# --- counting and enumeration ---------------------------------------------


def _shifted_rhs(eq: DiophEq, positivity) -> int:
    positivity = Positivity.coerce(positivity)
    if positivity is Positivity.STRICT:
        return eq.rhs - sum(eq.coeffs)
    return eq.rhs


def representable(coeffs: Sequence[int], limit: int) -> List[bool]:
    """``ok[n]`` is true iff ``n`` is a nonnegative combination of ``coeffs``."""
    ok = [False] * (limit + 1)
    if limit >= 0:
        ok[0] = True
    for m in coeffs:
        for n in range(m, limit + 1):
            if ok[n - m]:
                ok[n] = True
    return ok


def count_solutions(eq: DiophEq, positivity=Positivity.STRICT) -> int:
    """Exact number of solutions via the coin-change (denumerant) recurrence."""
    target = _shifted_rhs(eq, positivity)
    if target < 0:
        return 0
    ways = [0] * (target + 1)
    ways[0] = 1
    for m in eq.coeffs:
        for n in range(m, target + 1):
            ways[n] += ways[n - m]
    return ways[target]


def iter_solutions(eq: DiophEq, positivity=Positivity.STRICT) -> Iterator[Vector]:
    """Lexicographic stream of solutions, no cap."""
    target = _shifted_rhs(eq, positivity)
    if target < 0:
        return
    lo = 1 if Positivity.coerce(positivity) is Positivity.STRICT else 0
    coeffs = eq.coeffs
    J = len(coeffs)
    ok_suffix = [representable(coeffs[t:], target) for t in range(1, J)]

    def rec(t, rest, prefix):
        m = coeffs[t]
        if t == J - 1:
            if rest % m == 0:
                yield prefix + (rest // m + lo,)
            return
        ok = ok_suffix[t]
        for x in range(rest // m + 1):
            r = rest - m * x
            if ok[r]:
                yield from rec(t + 1, r, prefix + (x + lo,))

    yield from rec(0, target, ())


def enumerate_solutions(eq: DiophEq, positivity=Positivity.STRICT, cap: int = DEFAULT_CAP) -> List[Vector]:
    """All solutions in lexicographic order; refuses when there are more than ``cap``."""
    total = count_solutions(eq, positivity)
    if total > cap:
        raise ResourceLimitError(
            f"{eq} has {total} solutions, above the enumeration cap {cap}", count=total
        )
    return list(iter_solutions(eq, positivity))


def approx_count_solutions(eq: DiophEq) -> Fraction:
    """Volume estimate ``N^(J-1) gcd(m) / ((J-1)! prod m)`` of the solution count, exact."""
    J = eq.J
    num = eq.rhs ** (J - 1) * gcd_many(eq.coeffs)
    den = math.factorial(J - 1) * math.prod(eq.coeffs)
    return Fraction(num, den)


def intersect_margins(
    items: Sequence[Union[ConditionalSpec, DiophEq]], positivity=Positivity.STRICT
) -> List[Vector]:
    """Conditioning margins ``s`` compatible with every equation at once.

    Compared in margin space: ``s_j`` must be a multiple of each equation's
    ``m_j``, hence of their lcm, and ``sum_j s_j == N``.
    """
    eqs = [_as_equation(it) for it in items]
    if not eqs:
        raise ValidationError("intersect_margins needs at least one equation")
    J, N = eqs[0].J, eqs[0].rhs
    for e in eqs[1:]:
        if e.J != J or e.rhs != N:
            raise ValidationError("all equations must share the number of levels and N")
    joint = tuple(lcm_many(e.coeffs[j] for e in eqs) for j in range(J))
    joint_eq = DiophEq(joint, N)
    return [
        tuple(m * x for m, x in zip(joint, sol))
        for sol in iter_solutions(joint_eq, positivity)
    ]


# --- move-oriented lattice basis -------------------------------------------


def _primitive_sign_normal(v: Sequence[int]) -> Optional[Vector]:
    g = 0
    for a in v:
        g = math.gcd(g, a)
    if g != 1:
        return None
    for a in v:
        if a:
            return tuple(v) if a > 0 else tuple(-b for b in v)
    return None


def short_kernel_vectors(eq: DiophEq, limit: int = 40, budget: int = 200_000) -> List[Vector]:
    """Primitive kernel vectors with small entries, sparsest and shortest first.

    Searches the box ``|v_j| <= B`` (last coordinate solved from the others),
    shrinking ``B`` until the box fits in ``budget`` points.
    """
    m = eq.coeffs
    J = len(m)
    if J == 1:
        return []
    bound = max(m)
    while bound > 1 and (2 * bound + 1) ** (J - 1) > budget:
        bound -= 1
    found = set()
    # support-2 generators always belong to the candidate pool
    for a in range(J):
        for b in range(a + 1, J):
            g = math.gcd(m[a], m[b])
            v = [0] * J
            v[a], v[b] = m[b] // g, -m[a] // g
            found.add(_primitive_sign_normal(v))
    rng = range(-bound, bound + 1)
    for head in itertools.product(rng, repeat=J - 1):
        rest = -sum(c * x for c, x in zip(m, head))
        if rest % m[-1]:
            continue
        last = rest // m[-1]
        if abs(last) > bound:
            continue
        v = _primitive_sign_normal(head + (last,))
        if v is not None:
            found.add(v)
    found.discard(None)
    ordered = sorted(found, key=lambda v: (sum(1 for a in v if a), sum(map(abs, v)), v))
    return ordered[:limit]


def _fiber_connected(coeffs: Sequence[int], moves: Sequence[Vector], rhs: int) -> bool:
    pts = list(iter_solutions(DiophEq(coeffs, rhs), Positivity.NONNEG))
    if len(pts) <= 1:
        return True
    pool = set(pts)
    seen = {pts[0]}
    stack = [pts[0]]
    while stack:
        cur = stack.pop()
        for mv in moves:
            for sgn in (1, -1):
                nxt = tuple(a + sgn * d for a, d in zip(cur, mv))
                if nxt in pool and nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return len(seen) == len(pts)


def connects_small_fibers(eq: DiophEq, basis: Sequence[Vector], max_rhs: Optional[int] = None) -> bool:
    """Do the moves connect every nonnegative fiber ``sum m_j x_j = n`` for ``n <= max_rhs``?

    The default ``max_rhs`` is twice the largest move degree plus ``sum m``.
    """
    m = eq.coeffs
    if max_rhs is None:
        degree = max((sum(c * max(a, 0) for c, a in zip(m, v)) for v in basis), default=0)
        max_rhs = 2 * degree + sum(m)
    return all(_fiber_connected(m, basis, n) for n in range(1, max_rhs + 1))


MAX_BASIS_SUBSETS = 50_000


def markov_lattice_basis(eq: DiophEq, pool_size: int = 24) -> List[Vector]:
    """A kernel lattice basis suited to serve as margin-changing moves.

    Any lattice basis describes every integer solution, but not every one
    connects the nonnegative solutions.  This scans ``J - 1`` subsets of
    :func:`short_kernel_vectors` in order and returns the first that is a
    basis of the full kernel lattice and connects every small nonnegative
    fiber.  Falls back to the first lattice basis found, then to
    :func:`lattice_basis`, when no subset connects.
    """
    return [tuple(v) for v in _markov_lattice_basis(eq.coeffs, pool_size)]


@functools.lru_cache(maxsize=256)
def _markov_lattice_basis(coeffs: Vector, pool_size: int) -> Tuple[Vector, ...]:
    eq = DiophEq(coeffs, 1)
    J = eq.J
    if J == 1:
        return ()
    target = lattice_basis(eq)
    while pool_size > J - 1 and math.comb(pool_size, J - 1) > MAX_BASIS_SUBSETS:
        pool_size -= 1
    pool = short_kernel_vectors(eq, limit=pool_size)
    first_basis = None
    for combo in itertools.combinations(pool, J - 1):
        if hermite_normal_form(combo) != target:
            continue
        if first_basis is None:
            first_basis = combo
        if connects_small_fibers(eq, combo):
            return combo
    return first_basis if first_basis is not None else tuple(target)
