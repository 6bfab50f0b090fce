import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prsde.algebra import Q
from prsde.errors import Inconsistent
from prsde.linalg import determinant, identity, inverse, linear_solve, matmul, matrix_rank, nullspace, transpose

int_matrices = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=1, max_size=7)
)


def fraction_rank(m):
    """Plain Gauss-Jordan over Fraction, used as an oracle."""
    a = [[Fraction(v) for v in row] for row in m]
    rank, cols = 0, len(a[0]) if a else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(len(a)):
            if i != rank and a[i][c] != 0:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def test_rank_examples():
    assert matrix_rank(identity(4)) == 4
    assert matrix_rank([[0] * 4 for _ in range(8)]) == 0
    assert matrix_rank([[1, 2], [2, 4]]) == 1


def test_solve_examples():
    assert list(linear_solve(identity(3), [5, Q("1/2"), -1]).solution) == [5, Q("1/2"), -1]
    assert list(linear_solve([[1, 1]], [2]).solution) == [2, 0]
    with pytest.raises(Inconsistent):
        linear_solve([[0]], [1])


@given(int_matrices)
def test_rank_matches_transpose_and_oracle(m):
    assert matrix_rank(m) == matrix_rank(transpose(m)) == fraction_rank(m)


@given(int_matrices)
def test_nullspace_is_annihilated(m):
    for v in nullspace(m, len(m[0])):
        assert all(sum(Q(a) * b for a, b in zip(row, v)) == 0 for row in m)
    assert len(nullspace(m, len(m[0]))) == len(m[0]) - matrix_rank(m)


def test_inverse_and_determinant_of_random_matrices():
    rng = random.Random(3)
    for _ in range(20):
        m = [[Q(rng.randint(-5, 5)) for _ in range(4)] for _ in range(4)]
        d = determinant(m)
        if d == 0:
            assert matrix_rank(m) < 4
            continue
        assert matmul(m, inverse(m)) == identity(4)
        assert d * determinant(inverse(m)) == 1


def test_solve_with_free_variables_satisfies_system():
    rng = random.Random(5)
    A = [[rng.randint(-3, 3) for _ in range(5)] for _ in range(3)]
    x0 = [rng.randint(-3, 3) for _ in range(5)]
    b = [sum(a * x for a, x in zip(row, x0)) for row in A]
    sol = linear_solve(A, b, lambda col: Q(7)).solution
    assert [sum(Q(a) * x for a, x in zip(row, sol)) for row in A] == b
