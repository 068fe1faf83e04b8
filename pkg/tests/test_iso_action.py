import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pgcm.classifier import random_matrix, random_transform
from pgcm.iso_action import (
    ActionError,
    CapError,
    CaseTag,
    ExponentType,
    IsoTransform,
    apply,
    compose,
    enumerate_transforms,
    group_order,
    invert,
    orbit,
    orbit_labels,
    same_orbit,
    scalar,
    validate,
)
from pgcm.matrices import all_matrices, rank, to_code

pytestmark = pytest.mark.property

# One exponent type per tag at each small prime.
TAG_TYPES = {
    2: [(3, 2, 1), (2, 1, 1), (2, 2, 1), (2, 2, 2), (3, 1, 1)],
    3: [(3, 2, 1), (2, 1, 1), (2, 2, 1), (1, 1, 1)],
    5: [(3, 2, 1), (2, 1, 1), (2, 2, 1), (1, 1, 1)],
}
SMALL = [(p, m) for p in (2, 3) for m in TAG_TYPES[p]]


def test_tags():
    assert ExponentType(3, (3, 2, 1)).tag is CaseTag.STRICT
    assert ExponentType(2, (3, 1, 1)).tag is CaseTag.P2_SPECIAL
    assert ExponentType(2, (1, 1, 1)).tag is CaseTag.P2_TINY
    assert ExponentType(5, (4, 2, 2)).tag is CaseTag.TOP
    assert ExponentType(5, (2, 2, 1)).tag is CaseTag.BOTTOM
    assert ExponentType(2, (2, 2, 2)).tag is CaseTag.EQUAL


@pytest.mark.parametrize("p, m", [(4, (1, 1, 1)), (3, (1, 2, 1)), (3, (1, 1, 0))])
def test_invalid_types(p, m):
    with pytest.raises(ActionError):
        ExponentType(p, m)


def test_special_correction_survives_on_zero():
    e = ExponentType(2, (2, 1, 1))
    t = IsoTransform.from_params(e, [[1, 0, 0], [0, 1, 1], [0, 0, 1]])
    zero = ((0, 0, 0),) * 3
    assert apply(t, zero) == ((0, 0, 0), (1, 0, 0), (0, 0, 0))


def test_special_requires_unit_corner():
    with pytest.raises(ActionError):
        IsoTransform.from_params(ExponentType(2, (2, 1, 1)), [[0, 1, 0], [1, 1, 0], [0, 0, 1]])


def test_tiny_has_no_matrix_action():
    with pytest.raises(ActionError):
        IsoTransform.from_params(ExponentType(2, (1, 1, 1)), [[1, 0, 0], [0, 1, 0], [0, 0, 1]])


@pytest.mark.parametrize(
    "p, m, expected",
    [
        (2, (3, 2, 1), 64),
        (3, (1, 1, 1), 26 * 24 * 18),
        # x11 = 1, a shared GL2 block and four free entries
        (2, (2, 1, 1), 6 * 2**4),
        (2, (2, 2, 1), 6 * 2**4),
        (3, (2, 1, 1), 48 * 2 * 3**4),
    ],
)
def test_group_order_matches_enumeration(p, m, expected):
    e = ExponentType(p, m)
    assert group_order(e) == expected
    ts = list(enumerate_transforms(e))
    assert len(ts) == expected == len(set(ts))
    for t in ts[:: max(1, len(ts) // 200)]:
        validate(t)


def test_transform_cap():
    with pytest.raises(CapError):
        next(enumerate_transforms(ExponentType(5, (1, 1, 1)), cap=10**5))


@pytest.mark.parametrize("p, m", SMALL)
def test_action_law_stays_in_orbit(p, m):
    e = ExponentType(p, m)
    lab = orbit_labels(e)
    rng = random.Random(to_code(((p,) + m, (0, 0, 0), (0, 0, 0)), 10))
    for _ in range(10_000):
        w = random_matrix(p, rng)
        t1, t2 = random_transform(e, rng), random_transform(e, rng)
        u = apply(t2, apply(t1, w))
        assert lab[to_code(u, p)] == lab[to_code(w, p)]
        assert u == apply(compose(t2, t1), w)


@pytest.mark.parametrize("m", TAG_TYPES[5])
def test_action_law_p5(m):
    e = ExponentType(5, m)
    rng = random.Random(sum(m))
    for _ in range(10_000):
        w = random_matrix(5, rng)
        t1, t2 = random_transform(e, rng), random_transform(e, rng)
        assert apply(t2, apply(t1, w)) == apply(compose(t2, t1), w)
        assert apply(invert(t1), apply(t1, w)) == w


@pytest.mark.parametrize("p, m", [(2, m) for m in TAG_TYPES[2]] + [(3, (3, 2, 1))])
def test_vectorised_partition_matches_bfs(p, m):
    e = ExponentType(p, m)
    lab = orbit_labels(e)
    rng = random.Random(7)
    sample = [random_matrix(p, rng) for _ in range(200 if p == 2 else 60)]
    orbits = {}
    for w in sample:
        if w not in orbits:
            orb = orbit(e, w)
            for u in orb:
                orbits[u] = orb
    for w1 in sample:
        for w2 in sample:
            assert (w2 in orbits[w1]) == (lab[to_code(w1, p)] == lab[to_code(w2, p)])
    w1, w2 = sample[0], sample[1]
    ok, t = same_orbit(e, w1, w2)
    assert ok == (w2 in orbits[w1])
    if ok:
        assert apply(t, w1) == w2


@pytest.mark.parametrize("m", TAG_TYPES[2])
def test_identity_and_inverses_exhaustive_p2(m):
    e = ExponentType(2, m)
    ident = IsoTransform.identity(e)
    mats = list(all_matrices(2))
    for w in mats:
        assert apply(ident, w) == w
    for t in enumerate_transforms(e):
        ti = invert(t)
        for w in mats:
            assert apply(ti, apply(t, w)) == w


@pytest.mark.parametrize("m", TAG_TYPES[3])
def test_inverses_sampled_p3(m):
    e = ExponentType(3, m)
    rng = random.Random(3)
    for _ in range(2000):
        t, w = random_transform(e, rng), random_matrix(3, rng)
        assert apply(invert(t), apply(t, w)) == w


@given(st.sampled_from([(p, m) for p in (3, 5, 7) for m in TAG_TYPES[5]]), st.integers(0, 2**32))
def test_scalar_invariance(pm, seed):
    p, m = pm
    e = ExponentType(p, m)
    rng = random.Random(seed)
    w = random_matrix(p, rng)
    lam = rng.randrange(1, p)
    inv = pow(lam, -1, p)
    assert apply(scalar(e, lam), w) == tuple(tuple(inv * x % p for x in row) for row in w)


@given(st.sampled_from([(p, m) for p in (2, 3, 5) for m in TAG_TYPES[p]
                                if ExponentType(p, m).tag is not CaseTag.P2_SPECIAL]),
       st.integers(0, 2**32))
def test_rank_invariance_without_correction(pm, seed):
    p, m = pm
    e = ExponentType(p, m)
    rng = random.Random(seed)
    w = random_matrix(p, rng)
    assert rank(apply(random_transform(e, rng), w), p) == rank(w, p)


@pytest.mark.parametrize("p, m", SMALL)
def test_orbit_sizes_partition_space(p, m):
    e = ExponentType(p, m)
    _, sizes = np.unique(orbit_labels(e), return_counts=True)
    assert int(sizes.sum()) == p**9
    assert all(group_order(e) % int(s) == 0 for s in sizes)


def test_orbit_search_cap_at_p7():
    e = ExponentType(7, (1, 1, 1))
    with pytest.raises(CapError):
        orbit_labels(e)
    with pytest.raises(CapError):
        same_orbit(e, ((0, 0, 0),) * 3, ((1, 0, 0), (0, 0, 0), (0, 0, 0)))
