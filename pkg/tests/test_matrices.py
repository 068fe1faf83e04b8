import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pgcm.matrices import (
    MatrixParseError,
    adjugate3,
    all_matrices,
    det,
    format_matrix,
    from_code,
    identity,
    inverse,
    mat_mul,
    parse_matrix,
    rank,
    scale,
    solve,
    to_code,
    transpose,
)

pytestmark = pytest.mark.property


def matrices3(p):
    row = st.tuples(*[st.integers(0, p - 1)] * 3)
    return st.tuples(row, row, row)


def random_invertible(p, rng):
    while True:
        A = tuple(tuple(rng.randrange(p) for _ in range(3)) for _ in range(3))
        if det(A, p):
            return A


def test_parse_and_format_roundtrip():
    A = parse_matrix("0,0,0;0,0,1;0,2,0", 3)
    assert A == ((0, 0, 0), (0, 0, 1), (0, 2, 0))
    assert format_matrix(A) == "0,0,0;0,0,1;0,2,0"
    assert parse_matrix("1,-1,4;0,0,0;0,0,0", 3) == ((1, 2, 1), (0, 0, 0), (0, 0, 0))


@pytest.mark.parametrize("text", ["1,0;0,1", "1,0,0;0,1;0,0,1", "a,0,0;0,1,0;0,0,1", ""])
def test_parse_errors(text):
    with pytest.raises(MatrixParseError):
        parse_matrix(text, 3)


def test_code_roundtrip_is_lexicographic():
    mats = list(all_matrices(2))
    assert len(mats) == 512
    assert mats == sorted(mats)
    assert all(to_code(A, 2) == k for k, A in enumerate(mats))
    assert from_code(to_code(((2, 0, 1), (0, 1, 2), (1, 1, 0)), 3), 3) == ((2, 0, 1), (0, 1, 2), (1, 1, 0))


def test_adjugate_exhaustive_f2():
    I = identity(3)
    for A in all_matrices(2):
        d = det(A, 2)
        assert mat_mul(A, adjugate3(A, 2), 2) == scale(d, I, 2)
        assert mat_mul(adjugate3(A, 2), A, 2) == scale(d, I, 2)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_adjugate_sampled(p):
    rng = random.Random(p)
    I = identity(3)
    for _ in range(10_000):
        A = tuple(tuple(rng.randrange(p) for _ in range(3)) for _ in range(3))
        d = det(A, p)
        assert mat_mul(A, adjugate3(A, p), p) == scale(d, I, p)
        assert mat_mul(adjugate3(A, p), A, p) == scale(d, I, p)


@given(st.sampled_from([2, 3, 5, 7]).flatmap(lambda p: st.tuples(st.just(p), matrices3(p), matrices3(p))))
def test_det_multiplicative_and_transpose(args):
    p, A, B = args
    assert det(mat_mul(A, B, p), p) == det(A, p) * det(B, p) % p
    assert det(transpose(A), p) == det(A, p)
    assert transpose(transpose(A)) == A


@given(st.sampled_from([2, 3, 5, 7]).flatmap(lambda p: st.tuples(st.just(p), matrices3(p))), st.integers(0, 2**32))
def test_rank_invariant_under_invertible(args, seed):
    p, A = args
    rng = random.Random(seed)
    P, Q = random_invertible(p, rng), random_invertible(p, rng)
    assert rank(mat_mul(mat_mul(P, A, p), Q, p), p) == rank(A, p)
    assert mat_mul(P, inverse(P, p), p) == identity(3)


def test_solve():
    A = ((1, 2, 0), (0, 1, 1))
    x = solve(A, (1, 2), 5)
    assert [sum(a * b for a, b in zip(row, x)) % 5 for row in A] == [1, 2]
    assert solve(((1, 1), (1, 1)), (0, 1), 3) is None
