import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pgcm.finite_field import PrimeContext
from pgcm.matrices import det, mat_mul, rank, scale, transpose
from pgcm.pair_forms import (
    PairLabel,
    Relation,
    canonical_pair,
    pair_labels,
    pair_representative,
    verify_pair_transversal,
)

pytestmark = pytest.mark.property


def act(A, P, lam, p):
    return scale(lam, mat_mul(mat_mul(transpose(P), A, p), P, p), p)


def random_invertible2(p, rng):
    while True:
        P = tuple(tuple(rng.randrange(p) for _ in range(2)) for _ in range(2))
        if det(P, p):
            return P


def test_examples():
    label, rep, _, _ = canonical_pair(((0, 1), (4, 0)), 5)
    assert label == PairLabel(True, 1)
    assert rep == ((0, 1), (4, 0))
    label, rep, P, lam = canonical_pair(((0, 0), (0, 0)), 7)
    assert label == PairLabel(False, 3) and rep == ((0, 0), (0, 0)) and lam == 1
    label, rep, _, _ = canonical_pair(((1, 0), (0, 3)), 5, Relation.CONGRUENCE)
    assert label == PairLabel(True, 3, nu=2)
    assert rep == ((1, 0), (0, 2))


def test_class_counts_by_stratum():
    assert len(pair_labels(2, Relation.CONGRUENCE, "invertible")) == 3
    sing3 = [l for l in pair_labels(3, Relation.CONGRUENCE, "singular") if l.index != 3]
    assert [str(l) for l in sing3] == ["sing1", "sing2[nu=1]", "sing2[nu=2]"]
    # one class each for types 1, 2 and 3 twice, and r = 1..p-2 for type 4
    assert len(pair_labels(5, Relation.CONGRUENCE, "invertible")) == 1 + 2 + 2 + 3


@pytest.mark.parametrize("p", [2, 3, 5, 7])
@pytest.mark.parametrize("relation", list(Relation))
def test_transversal(p, relation):
    rep = verify_pair_transversal(p, relation)
    assert rep.ok, rep.violations[:5]


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
@pytest.mark.parametrize("relation", list(Relation))
def test_idempotent_on_representatives(p, relation):
    for label in pair_labels(p, relation):
        R = pair_representative(label, p)
        got, rep, P, lam = canonical_pair(R, p, relation)
        assert got == label and rep == R


@pytest.mark.parametrize("p", [3, 5, 7, 11])
@pytest.mark.parametrize("relation", list(Relation))
def test_orbit_invariance_sampled(p, relation):
    rng = random.Random(1000 + p)
    g = PrimeContext.get(p).generator
    for _ in range(1000):
        A = tuple(tuple(rng.randrange(p) for _ in range(2)) for _ in range(2))
        P = random_invertible2(p, rng)
        lam = pow(g, rng.randrange(p - 1), p) if relation is Relation.SUBCONGRUENCE else 1
        B = act(A, P, lam, p)
        assert canonical_pair(B, p, relation)[0] == canonical_pair(A, p, relation)[0]


@given(
    st.sampled_from([3, 5, 7, 11]),
    st.lists(st.integers(0, 10**6), min_size=4, max_size=4),
    st.sampled_from(list(Relation)),
)
def test_witness_soundness_and_rank(p, entries, relation):
    A = ((entries[0] % p, entries[1] % p), (entries[2] % p, entries[3] % p))
    label, rep, P, lam = canonical_pair(A, p, relation)
    assert act(A, P, lam, p) == rep
    assert rank(rep, p) == rank(A, p)
    if relation is Relation.CONGRUENCE:
        assert lam == 1
        assert (A == transpose(A)) == (rep == transpose(rep))
