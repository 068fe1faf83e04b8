import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pgcm.classifier import TINY_PRESENTATIONS, parse_label, random_matrix, representative
from pgcm.group_model import (
    GroupError,
    GroupSpec,
    MetaMode,
    Presentation,
    a1_profile,
    brute_isomorphic,
    char_matrix_for,
    enumerate_a1,
    extract_char_matrix,
    metahamiltonian_oracle,
    oracle_invariants,
)
from pgcm.iso_action import ExponentType, apply, same_orbit
from pgcm.classifier import random_transform
from pgcm.matrices import all_matrices

pytestmark = pytest.mark.property

ZERO = ((0, 0, 0),) * 3


def tiny(name):
    return Presentation(TINY_PRESENTATIONS[name], 2, (1, 1, 1), generators=("a", "b", "c"))


def test_zero_matrix_gives_s1():
    e = ExponentType(2, (1, 1, 1))
    spec = GroupSpec(e, ZERO)
    assert spec.order == 64
    assert spec.verify_consistency() == []
    assert tiny("S1").char_matrix == ZERO
    assert brute_isomorphic(spec, tiny("S1").spec())[0]


def test_all_tiny_specs_consistent():
    e = ExponentType(2, (1, 1, 1))
    for w in all_matrices(2):
        assert GroupSpec(e, w).verify_consistency() == []


def test_p3_order_729_sampled():
    e = ExponentType(3, (1, 1, 1))
    spec = GroupSpec(e, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    assert spec.order == 729
    assert spec.verify_consistency(samples=20_000) == []


@given(st.sampled_from([(2, (2, 1, 1)), (2, (3, 2, 1)), (3, (1, 1, 1)), (3, (2, 1, 1)), (5, (1, 1, 1)), (7, (3, 2, 1))]),
       st.integers(0, 2**32))
def test_structure(pm, seed):
    p, m = pm
    e = ExponentType(p, m)
    spec = GroupSpec(e, random_matrix(p, random.Random(seed)))
    assert spec.order == p ** (sum(m) + 3)
    assert spec.verify_consistency(samples=2000, seed=seed) == []


def test_presentations_match_group_powers():
    for name in TINY_PRESENTATIONS:
        pres = tiny(name)
        spec = pres.spec()
        assert pres.check(spec)
        # powers of the generators recomputed in the constructed group
        assert char_matrix_for(spec, spec.generators) == pres.char_matrix


def test_extracted_matrix_defines_same_group():
    e = ExponentType(2, (2, 1, 1))
    spec = GroupSpec(e, ((0, 1, 1), (0, 1, 0), (1, 1, 0)))
    w, images = extract_char_matrix(spec)
    assert images != spec.generators
    assert brute_isomorphic(spec, GroupSpec(e, w))[0]


def test_bad_presentation():
    with pytest.raises(GroupError):
        Presentation("a^2=1; b^2=1", 2, (1, 1, 1), generators=("a", "b", "c"))


def _index_range(spec):
    total = int(round(math.log(spec.order, spec.p)))
    idx = [total - int(round(math.log(H.order, spec.p))) for H in enumerate_a1(spec)]
    return min(idx), max(idx)


@pytest.mark.parametrize("p, m, n", [(2, (1, 1, 1), 40), (2, (2, 1, 1), 15), (3, (1, 1, 1), 3)])
def test_quotient_search_matches_element_search(p, m, n):
    e = ExponentType(p, m)
    rng = random.Random(5)
    for _ in range(n):
        spec = GroupSpec(e, random_matrix(p, rng))
        assert oracle_invariants(spec) == _index_range(spec)


@given(st.sampled_from([(2, (1, 1, 1)), (2, (2, 1, 1)), (2, (2, 2, 1)), (3, (1, 1, 1)), (3, (2, 1, 1))]),
       st.integers(0, 2**32))
def test_oracle_bounds(pm, seed):
    p, m = pm
    e = ExponentType(p, m)
    i_min, i_max = oracle_invariants(GroupSpec(e, random_matrix(p, random.Random(seed))))
    assert m[2] <= i_min <= m[2] + 2
    assert m[0] <= i_max <= m[0] + 2


def test_metahamiltonian_examples():
    assert metahamiltonian_oracle(tiny("S10").spec(), MetaMode.FULL).value
    assert not metahamiltonian_oracle(tiny("S3").spec(), MetaMode.FULL).value
    e = ExponentType(3, (2, 1, 1))
    d3 = representative(e, parse_label("D3[nu=1]", 3))
    assert metahamiltonian_oracle(GroupSpec(e, d3), MetaMode.NECESSARY).value
    with pytest.raises(GroupError):
        metahamiltonian_oracle(GroupSpec(e, d3), MetaMode.FULL)


def test_full_implies_necessary():
    e = ExponentType(2, (1, 1, 1))
    rng = random.Random(9)
    for _ in range(25):
        spec = GroupSpec(e, random_matrix(2, rng))
        full = metahamiltonian_oracle(spec, MetaMode.FULL).value
        nec = metahamiltonian_oracle(spec, MetaMode.NECESSARY).value
        assert not full or nec


@pytest.mark.parametrize("m", [(2, 1, 1), (2, 2, 1), (3, 2, 1)])
def test_orbit_iff_isomorphic_sampled(m):
    e = ExponentType(2, m)
    rng = random.Random(sum(m))
    for k in range(30):
        w1 = random_matrix(2, rng)
        w2 = apply(random_transform(e, rng), w1) if k % 2 else random_matrix(2, rng)
        assert same_orbit(e, w1, w2)[0] == brute_isomorphic(GroupSpec(e, w1), GroupSpec(e, w2))[0]
