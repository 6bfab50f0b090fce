"""Exact linear algebra over the rationals.

Rank and solving use fraction-free (Bareiss) elimination on integer rows: each
input row is scaled by the lcm of its denominators first, which leaves ranks
and solution sets unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import gmpy2
from gmpy2 import mpq, mpz

from .algebra import Q, ZERO
from .errors import Inconsistent, SingularJacobian

Matrix = Sequence[Sequence[object]]


def _integer_row(row) -> list:
    qs = [Q(v) for v in row]
    den = mpz(1)
    for v in qs:
        if v.denominator != 1:
            den = gmpy2.lcm(den, v.denominator)
    return [mpz(v * den) for v in qs]


def bareiss_echelon(rows: list[list]) -> tuple[list[list], list[int]]:
    """In-place fraction-free row echelon form of an integer matrix.

    Returns the reduced rows (only the first ``len(pivots)`` are meaningful) and
    the pivot columns.  Pivots are taken column by column from the left, first
    nonzero entry from the top.
    """
    n = len(rows)
    m = len(rows[0]) if n else 0
    prev = mpz(1)
    r = 0
    pivots: list[int] = []
    for c in range(m):
        if r == n:
            break
        pr = next((i for i in range(r, n) if rows[i][c]), None)
        if pr is None:
            continue
        if pr != r:
            rows[r], rows[pr] = rows[pr], rows[r]
        piv_row = rows[r]
        piv = piv_row[c]
        for i in range(r + 1, n):
            row = rows[i]
            a = row[c]
            if a:
                for j in range(c + 1, m):
                    row[j] = (row[j] * piv - a * piv_row[j]) // prev
            else:
                for j in range(c + 1, m):
                    if row[j]:
                        row[j] = (row[j] * piv) // prev
            row[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return rows, pivots


def matrix_rank(m: Matrix) -> int:
    """Exact rank of a rational matrix."""
    rows = [_integer_row(row) for row in m]
    rows = [row for row in rows if any(row)]
    if not rows:
        return 0
    _, pivots = bareiss_echelon(rows)
    return len(pivots)


def transpose(m: Matrix) -> list[list]:
    return [list(col) for col in zip(*m)] if m else []


@dataclass(frozen=True)
class LinearSolution:
    solution: tuple
    pivot_columns: tuple[int, ...]
    free_columns: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivot_columns)


def linear_solve(
    A: Matrix,
    b: Sequence[object],
    free_values: Callable[[int], object] | Sequence[object] | None = None,
) -> LinearSolution:
    """Solve ``A x = b`` exactly.

    Free columns receive ``free_values(col)`` (or ``free_values[col]``; zero by
    default) and the pivot unknowns are then back-substituted.

    Raises :class:`Inconsistent` if the system has no solution.
    """
    n_cols = len(A[0]) if len(A) else 0
    aug = [_integer_row(list(row) + [bv]) for row, bv in zip(A, b)]
    if len(aug) != len(A):
        raise ValueError("A and b have different lengths")
    if not aug:
        pivots: list[int] = []
        echelon: list[list] = []
    else:
        echelon, pivots = bareiss_echelon(aug)
    if pivots and pivots[-1] == n_cols:
        raise Inconsistent("linear system has no solution")
    pivot_set = set(pivots)
    free = tuple(c for c in range(n_cols) if c not in pivot_set)
    x = [ZERO] * n_cols
    for c in free:
        if free_values is None:
            v = ZERO
        elif callable(free_values):
            v = free_values(c)
        else:
            v = free_values[c]
        x[c] = Q(v)
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        row = echelon[r]
        s = mpq(row[n_cols])
        for j in range(c + 1, n_cols):
            if row[j]:
                s -= row[j] * x[j]
        x[c] = s / row[c]
    return LinearSolution(tuple(x), tuple(pivots), free)


def nullspace(m: Matrix, n_cols: int | None = None) -> list[list]:
    """Basis of ``{v : m v = 0}``, one vector per free column."""
    if n_cols is None:
        n_cols = len(m[0])
    if not m:
        return [[Q(int(i == j)) for i in range(n_cols)] for j in range(n_cols)]
    zero_b = [0] * len(m)
    first = linear_solve(m, zero_b)
    basis = []
    for c in first.free_columns:
        sol = linear_solve(m, zero_b, lambda col, c=c: 1 if col == c else 0)
        basis.append(list(sol.solution))
    return basis


# ---------------------------------------------------------------------------
# small dense matrices over any field-like ring (mpq or dual numbers)


def _is_zero(v) -> bool:
    while hasattr(v, "value"):
        v = v.value
    return not v


def inverse(m: Matrix, one=None):
    """Gauss-Jordan inverse of a square matrix over a field-like ring.

    Pivots are chosen with nonzero real part, so matrices of dual numbers are
    inverted correctly whenever their real part is invertible.
    """
    n = len(m)
    if one is None:
        one = Q(1)
    zero = one - one
    a = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        pr = next((i for i in range(c, n) if not _is_zero(a[i][c])), None)
        if pr is None:
            raise SingularJacobian("matrix is singular")
        a[c], a[pr] = a[pr], a[c]
        inv_p = one / a[c][c]
        a[c] = [v * inv_p for v in a[c]]
        for i in range(n):
            if i != c:
                f = a[i][c]
                a[i] = [vi - f * vc for vi, vc in zip(a[i], a[c])]
    return [row[n:] for row in a]


def determinant(m: Matrix):
    """Exact determinant by fraction-free elimination."""
    n = len(m)
    rows = []
    scale = mpq(1)
    for orig in m:
        qs = [Q(v) for v in orig]
        den = mpz(1)
        for v in qs:
            den = gmpy2.lcm(den, v.denominator)
        rows.append([mpz(v * den) for v in qs])
        scale /= den
    sign = 1
    prev = mpz(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if rows[i][c]), None)
        if pr is None:
            return mpq(0)
        if pr != c:
            rows[c], rows[pr] = rows[pr], rows[c]
            sign = -sign
        piv = rows[c][c]
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                rows[i][j] = (rows[i][j] * piv - rows[i][c] * rows[c][j]) // prev
            rows[i][c] = 0
        prev = piv
    return sign * mpq(rows[n - 1][n - 1]) * scale


def matmul(a: Matrix, b: Matrix) -> list[list]:
    bt = transpose(b)
    out = []
    for row in a:
        new = []
        for col in bt:
            acc = None
            for x, y in zip(row, col):
                t = x * y
                acc = t if acc is None else acc + t
            new.append(acc)
        out.append(new)
    return out


def identity(n: int) -> list[list]:
    return [[Q(int(i == j)) for j in range(n)] for i in range(n)]
