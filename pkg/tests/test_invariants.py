import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pgcm.classifier import enumerate_families, parse_label, random_matrix, random_transform, representative
from pgcm.invariants import (
    Method,
    imax,
    imin,
    invariants,
    metahamiltonian,
    orbit_search_invariants,
    oracle_invariants_for,
    property_table,
    table_invariants,
)
from pgcm.iso_action import CapError, ExponentType, apply

pytestmark = pytest.mark.property

ZERO = ((0, 0, 0),) * 3

ORBIT_TYPES = [(2, m) for m in ((3, 2, 1), (4, 2, 1), (3, 2, 2), (4, 2, 2), (2, 2, 1), (3, 3, 1),
                                (2, 2, 2), (3, 3, 3), (2, 1, 1), (3, 1, 1), (1, 1, 1))]
ORBIT_TYPES += [(3, m) for m in ((3, 2, 1), (4, 2, 1), (2, 1, 1), (3, 1, 1), (2, 2, 1), (3, 3, 1), (1, 1, 1))]
ORBIT_TYPES += [(5, m) for m in ((3, 2, 1), (2, 1, 1), (2, 2, 1), (1, 1, 1))]
ORACLE_TYPES = [(2, (3, 2, 1)), (2, (2, 2, 1)), (2, (3, 2, 2)), (2, (2, 2, 2)), (2, (3, 1, 1)),
                (3, (2, 1, 1)), (3, (2, 2, 1))]


def rep(p, m, text):
    e = ExponentType(p, m)
    return e, representative(e, parse_label(text, p))


def test_imin_examples():
    assert imin(*rep(3, (3, 2, 1), "B18[t=1]"))[0] == 2
    assert imin(*rep(5, (1, 1, 1), "J4[r=1]"))[0] == 1
    assert imin(ExponentType(3, (3, 2, 1)), ZERO)[0] == 3
    assert imin(ExponentType(3, (2, 1, 1)), ZERO)[0] == 3
    assert imin(ExponentType(3, (1, 1, 1)), ZERO)[0] == 3


def test_imax_examples():
    assert imax(*rep(3, (3, 2, 1), "B18[t=1]"))[0] == 4
    assert imax(*rep(3, (4, 2, 1), "B18[t=1]"))[0] == 4
    assert imax(*rep(2, (2, 1, 1), "N11"))[0] == 4


def test_metahamiltonian_examples():
    e = ExponentType(3, (2, 1, 1))
    assert metahamiltonian(parse_label("D3[nu=1]", 3), e)
    assert metahamiltonian(parse_label("S10", 2), ExponentType(2, (1, 1, 1)))
    assert not metahamiltonian(parse_label("L1", 3), ExponentType(3, (1, 1, 1)))


@pytest.mark.parametrize("p, m", ORBIT_TYPES)
def test_table_matches_orbit_search(p, m):
    e = ExponentType(p, m)
    for label in enumerate_families(e):
        w = representative(e, label)
        assert table_invariants(e, label) == orbit_search_invariants(e, w)[:2], str(label)


@pytest.mark.parametrize("p, m", ORACLE_TYPES)
def test_table_matches_oracle(p, m):
    e = ExponentType(p, m)
    for label in enumerate_families(e):
        w = representative(e, label)
        i_min, i_max, wit = oracle_invariants_for(e, w)
        got = (i_min, i_max, wit["all_contain_derived"])
        assert got == table_invariants(e, label) + (metahamiltonian(label, e),), str(label)


def test_oracle_cap():
    with pytest.raises(CapError):
        oracle_invariants_for(ExponentType(5, (3, 3, 3)), ZERO)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_bounds_and_metahamiltonian_condition(p):
    ms = [(3, 2, 1), (4, 2, 1), (2, 1, 1), (3, 1, 1), (3, 2, 2), (2, 2, 1), (3, 3, 1), (3, 3, 2),
          (1, 1, 1), (2, 2, 2)]
    for m in ms:
        e = ExponentType(p, m)
        for row in property_table(e):
            assert m[2] <= row.i_min <= m[2] + 2
            assert m[0] <= row.i_max <= m[0] + 2
            if row.metahamiltonian:
                assert (row.i_min, row.i_max) == (m[2], m[0]), str(row.label)


@given(st.sampled_from([(3, (2, 1, 1)), (3, (2, 2, 1)), (3, (1, 1, 1)), (2, (3, 2, 1)), (2, (2, 1, 1))]),
       st.integers(0, 2**32))
def test_orbit_invariance(pm, seed):
    p, m = pm
    e = ExponentType(p, m)
    rng = random.Random(seed)
    w = random_matrix(p, rng)
    u = apply(random_transform(e, rng), w)
    assert orbit_search_invariants(e, w)[:2] == orbit_search_invariants(e, u)[:2]
    assert invariants(e, w).i_min == invariants(e, u).i_min


def test_methods_agree_through_front_end():
    e = ExponentType(2, (2, 1, 1))
    for label in enumerate_families(e):
        w = representative(e, label)
        reports = [invariants(e, w, m) for m in Method]
        assert len({(r.i_min, r.i_max, r.metahamiltonian) for r in reports}) == 1, str(label)


def test_property_table_rows():
    rows = property_table(ExponentType(3, (3, 2, 1)))
    assert len(rows) == 46
    b18 = [r for r in rows if r.label.family == "B18"]
    assert [r.params for r in b18] == ["t=1", "t=2"]
    assert all(r.method == "TABLE" for r in rows)
