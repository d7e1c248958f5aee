"""Oracle tests for the sparse exact elimination engine.

The oracle is an independent dense row reduction over Python's
fractions.Fraction — different arithmetic type, different pivoting,
no sparsity tricks — so agreement is meaningful.
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from novikov.exactlin import (EchelonReducer, Factorization, Q,
                              SparseMatrix, kernel_basis, rank,
                              rational_from_string, rational_to_string,
                              solve)


def dense_rref_rank(rows, cols, entries):
    """Dense Gauss-Jordan rank over Fraction; the independent oracle."""
    a = [[Fraction(0)] * cols for _ in range(rows)]
    for (r, c), v in entries.items():
        a[r][c] = Fraction(int(v.numerator), int(v.denominator))
    rk = 0
    for c in range(cols):
        piv = next((r for r in range(rk, rows) if a[r][c]), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        inv = 1 / a[rk][c]
        a[rk] = [x * inv for x in a[rk]]
        for r in range(rows):
            if r != rk and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[rk])]
        rk += 1
    return rk


def random_matrix(rng, rows, cols, density=0.4):
    ent = {}
    for r in range(rows):
        for c in range(cols):
            if rng.random() < density:
                ent[(r, c)] = Q(rng.randint(-6, 6), rng.randint(1, 4))
    return SparseMatrix(rows, cols, {k: v for k, v in ent.items() if v})


@pytest.mark.parametrize("seed", range(25))
def test_rank_matches_dense_oracle(seed):
    rng = random.Random(seed)
    m = random_matrix(rng, rng.randint(1, 12), rng.randint(1, 12))
    assert rank(m) == dense_rref_rank(m.rows, m.cols, m.entries)


@pytest.mark.parametrize("seed", range(25))
def test_rank_plus_nullity(seed):
    rng = random.Random(100 + seed)
    m = random_matrix(rng, rng.randint(1, 10), rng.randint(1, 10))
    kb = kernel_basis(m)
    assert rank(m) + len(kb) == m.cols
    for v in kb:
        assert not m.mul_vec(v)
    # kernel vectors are linearly independent
    red = EchelonReducer()
    for v in kb:
        assert red.add(v)


@pytest.mark.parametrize("seed", range(25))
def test_solve_on_consistent_systems(seed):
    rng = random.Random(200 + seed)
    m = random_matrix(rng, rng.randint(1, 10), rng.randint(1, 10))
    x = {c: Q(rng.randint(-4, 4)) for c in range(m.cols)
         if rng.random() < 0.5}
    b = m.mul_vec(x)
    sol = solve(m, b)
    assert sol is not None
    got = m.mul_vec(sol)
    assert got == {k: v for k, v in b.items() if v}


def test_solve_detects_inconsistency():
    m = SparseMatrix(2, 1, {(0, 0): Q(1), (1, 0): Q(1)})
    assert solve(m, {0: Q(1), 1: Q(2)}) is None


def test_transpose_rank_equal():
    rng = random.Random(5)
    for _ in range(10):
        m = random_matrix(rng, rng.randint(1, 9), rng.randint(1, 9))
        assert rank(m) == rank(m.transpose())


def test_matmul_against_dense():
    rng = random.Random(9)
    a = random_matrix(rng, 5, 4)
    b = random_matrix(rng, 4, 6)
    prod = a.matmul(b)
    for r in range(5):
        for c in range(6):
            want = sum((a.entries.get((r, k), Q(0))
                        * b.entries.get((k, c), Q(0)) for k in range(4)),
                       Q(0))
            assert prod.entries.get((r, c), Q(0)) == want


def test_big_integer_arithmetic_survives_elimination():
    # Hilbert-like matrices force huge exact denominators; ranks are full
    n = 7
    m = SparseMatrix(n, n, {(r, c): Q(1, r + c + 1)
                            for r in range(n) for c in range(n)})
    assert rank(m) == n
    sol = solve(m, {r: Q(1) for r in range(n)})
    assert sol is not None
    assert m.mul_vec(sol) == {r: Q(1) for r in range(n)}


@given(st.integers(2, 40), st.integers(2, 40))
def test_rational_string_roundtrip(p, q):
    s = "%d/%d" % (p, q)
    assert rational_to_string(rational_from_string(s)) == \
        rational_to_string(Q(p, q))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_property_rank_of_stacked_self(seed):
    rng = random.Random(seed)
    m = random_matrix(rng, rng.randint(1, 7), rng.randint(1, 7))
    assert rank(m.vstack(m)) == rank(m)
    assert rank(m.hstack(m)) == rank(m)


def test_echelon_reducer_membership():
    rng = random.Random(3)
    m = random_matrix(rng, 8, 5)
    red = EchelonReducer()
    for c in range(m.cols):
        red.add(m.column(c))
    assert red.rank == rank(m)
    combo = m.mul_vec({0: Q(2), 3: Q(-1, 2)})
    assert not red.reduce(combo)
