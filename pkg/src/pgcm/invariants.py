"""Minimal and maximal index of A1-subgroups, and metahamiltonicity.

For a group G(w) write p^i_min and p^i_max for the least and greatest index
of a minimal non-abelian subgroup.  Always ``m3 <= i_min <= m3 + 2`` and
``m1 <= i_max <= m1 + 2``.  Three ways to get the numbers:

TABLE
    look up the family of w in the per-family tables below.
ORBIT_SEARCH
    test block-rank conditions on every member of the orbit of w: i_min is
    m3 when some member has an invertible top-left 2x2 block, otherwise m3+1
    when some member has rank >= 2 or a rank-1 top-left block, otherwise
    m3+2.  i_max is m1+2 when some member has a zero bottom-right 2x2
    block, otherwise m1+1 when some member has a rank-1 bottom-right block
    or (m1 = m2 + 1 and some member vanishes on the four corners),
    otherwise m1.
ORACLE
    compute the subgroups directly in the group (see :mod:`group_model`).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .classifier import FamilyLabel, classify_any, enumerate_families, tiny_partition
from .finite_field import PrimeContext
from .group_model import GroupSpec, MetaMode, a1_profile, metahamiltonian_oracle
from .iso_action import MATRIX_SPACE_CAP, CapError, CaseTag, ExponentType, all_digits, orbit_labels
from .matrices import from_code, mat, to_code

#: The A1-subgroup oracle walks pairs of cosets of G'; refuse above this |G/G'|.
ORACLE_QUOTIENT_CAP = 3**6


class InvariantError(ValueError):
    pass


class Method(enum.Enum):
    TABLE = "TABLE"
    ORBIT_SEARCH = "ORBIT_SEARCH"
    ORACLE = "ORACLE"


@dataclass
class InvariantReport:
    i_min: int
    i_max: int
    metahamiltonian: bool
    method: Method
    witnesses: dict = field(default_factory=dict)


# -- tables -------------------------------------------------------------------

def _expand(spec: str) -> list[str]:
    """``"A1-A3, B7"`` -> ``["A1", "A2", "A3", "B7"]``."""
    out = []
    for part in spec.split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-")
            letter = a[0]
            out += [f"{letter}{k}" for k in range(int(a[1:]), int(b[1:]) + 1)]
        elif part:
            out.append(part)
    return out


def _offsets(groups: dict[int, str]) -> dict[str, int]:
    out = {}
    for off, spec in groups.items():
        for name in _expand(spec):
            out[name] = off
    return out


# i_min - m3
_IMIN = _offsets({
    0: "A1-A6, B1-B4, B15-B16, D2-D4, D6-D9, E8-E9, E12-E15, G1-G9, H1-H7, H12-H13,"
       "J1-J5, K1-K6, M2-M7, N5-N6, N10, N12-N13, P1-P4, Q1-Q5",
    1: "B5-B14, B17-B18, C1-C6, D1, D5, E1-E7, E10-E11, F1-F4, F6, H8-H11, H14-H15, I2-I3, I6,"
       "L2-L3, M1, N1-N4, N7-N9, N11, O1-O3, R1-R2",
    2: "C7-C10, F5, I1, I4-I5, L1, R3",
})

# i_max - m1 for the families without conditions
_IMAX = _offsets({
    2: "B13-B16, C1-C4, C9-C10, E14-E15, F1, F4-F6, H1-H2, H5-H6, H10, H13, H15, I2-I6,"
       "K3-K5, L1-L3, N11-N13, O1-O3, Q1-Q2, Q5, R1-R3",
    1: "A3-A6, B1-B12, C5-C8, D8-D9, E8-E13, F2-F3, G1-G2, G5-G6, G8-G9, H7-H9, H11-H12, H14, I1,"
       "J1-J5, K2, M4-M7, N4-N10, P1-P4, Q3-Q4",
    0: "A1-A2, B17, D1-D7, E7, G7, M1-M3, N3",
})

_TINY_IMAX = {"S1": 3, "S2": 3, "S5": 3, "S6": 3, "S3": 2, "S4": 2, "S7": 2, "S8": 2, "S9": 2, "S10": 1}


def _neg_square(F: PrimeContext, params: dict, name: str) -> bool:
    return F.is_square(-params[name])


def _imax_offset(label: FamilyLabel, etype: ExponentType) -> int:
    name, params = label.family, label.param_dict
    m1, m2, _ = etype.m
    F = PrimeContext.get(etype.p)
    near = m1 == m2 + 1
    if name == "B18":
        return 1 if near else 0
    if name in ("E1", "E2", "E5", "E6"):
        return 1 if near else 0
    if name == "E3":
        return 1 if near and _neg_square(F, params, "nu") else 0
    if name == "E4":
        return 1 if near and _neg_square(F, params, "r") else 0
    if name == "G3":
        return 1 if _neg_square(F, params, "nu") else 0
    if name == "G4":
        return 1 if _neg_square(F, params, "r") else 0
    if name == "H3":
        return 2 if _neg_square(F, params, "nu") else 1
    if name == "H4":
        return 2 if _neg_square(F, params, "r") else 1
    if name == "K1":
        return 2 if _neg_square(F, params, "nu") else 1
    if name == "K6":
        return 2 if _neg_square(F, params, "r") else 1
    if name in ("N1", "N2"):
        return 1 if m1 == 2 else 0
    if name in _IMAX:
        return _IMAX[name]
    raise InvariantError(f"no table entry for {label}")


def table_invariants(etype: ExponentType, label: FamilyLabel) -> tuple[int, int]:
    """``(i_min, i_max)`` from the per-family tables."""
    m1, _, m3 = etype.m
    if etype.tag is CaseTag.P2_TINY:
        return 1, _TINY_IMAX[label.family]
    if label.family not in _IMIN:
        raise InvariantError(f"no table entry for {label}")
    return m3 + _IMIN[label.family], m1 + _imax_offset(label, etype)


def metahamiltonian(label: FamilyLabel, etype: ExponentType) -> bool:
    """Whether G is metahamiltonian, decided from its family."""
    name, params = label.family, label.param_dict
    p, (m1, m2, m3) = etype.p, etype.m
    tag = etype.tag
    if tag is CaseTag.P2_TINY:
        return name == "S10"
    F = PrimeContext.get(p)
    if tag is CaseTag.TOP:
        pattern = m1 == m2 + 1 and m2 == m3
        if name == "D3":
            return pattern and not _neg_square(F, params, "nu")
        if name == "D4":
            return pattern and not _neg_square(F, params, "r")
        if name == "D7":
            return m1 == m2 + 1
    if tag is CaseTag.P2_SPECIAL and name == "M3":
        return m1 == 2
    if tag is CaseTag.BOTTOM:
        pattern = m2 == m3 + 1
        if name == "G3":
            return pattern and not _neg_square(F, params, "nu")
        if name == "G4":
            return pattern and not _neg_square(F, params, "r")
        if name == "G7":
            return pattern
    return False


# -- orbit search -------------------------------------------------------------

def _det2(a, b, c, d, p):
    return (a * d - b * c) % p


def _predicates(digits: np.ndarray, p: int) -> dict[str, np.ndarray]:
    """Block conditions for every matrix, as boolean arrays."""
    w = [digits[:, k] for k in range(9)]
    tl = _det2(w[0], w[1], w[3], w[4], p)
    tl_zero = (w[0] == 0) & (w[1] == 0) & (w[3] == 0) & (w[4] == 0)
    br = _det2(w[4], w[5], w[7], w[8], p)
    br_zero = (w[4] == 0) & (w[5] == 0) & (w[7] == 0) & (w[8] == 0)
    corners = (w[0] == 0) & (w[2] == 0) & (w[6] == 0) & (w[8] == 0)
    rank2 = np.zeros(len(digits), dtype=bool)
    for r in ((0, 1), (0, 2), (1, 2)):
        for c in ((0, 1), (0, 2), (1, 2)):
            m = _det2(w[3 * r[0] + c[0]], w[3 * r[0] + c[1]], w[3 * r[1] + c[0]], w[3 * r[1] + c[1]], p)
            rank2 |= m != 0
    return {
        "tl_invertible": tl != 0,
        "tl_rank1": (tl == 0) & ~tl_zero,
        "rank_ge2": rank2,
        "br_zero": br_zero,
        "br_rank1": (br == 0) & ~br_zero,
        "corners_zero": corners,
    }


def _decide(has: dict, etype: ExponentType):
    """(i_min, i_max, names of the deciding conditions) from orbit-level flags."""
    m1, m2, m3 = etype.m
    if has["tl_invertible"]:
        imin, why_min = m3, "tl_invertible"
    elif has["rank_ge2"] or has["tl_rank1"]:
        imin, why_min = m3 + 1, "rank_ge2" if has["rank_ge2"] else "tl_rank1"
    else:
        imin, why_min = m3 + 2, None
    if has["br_zero"]:
        imax, why_max = m1 + 2, "br_zero"
    elif has["br_rank1"]:
        imax, why_max = m1 + 1, "br_rank1"
    elif m1 == m2 + 1 and has["corners_zero"]:
        imax, why_max = m1 + 1, "corners_zero"
    else:
        imax, why_max = m1, None
    return imin, imax, why_min, why_max


@lru_cache(maxsize=8)
def _orbit_search_table(etype: ExponentType, cap: int = MATRIX_SPACE_CAP):
    """Per-orbit flags: orbit labels plus, per condition, the least member satisfying it."""
    p = etype.p
    if etype.tag is CaseTag.P2_TINY:
        classes = tiny_partition()
        n = 2**9
        lab = np.empty(n, dtype=np.int64)
        for members in classes:
            codes = [to_code(w, 2) for w in members]
            lab[codes] = min(codes)
    else:
        lab = orbit_labels(etype, cap)
        n = p**9
    preds = _predicates(all_digits(p), p)
    big = np.iinfo(np.int64).max
    first = {}
    for name, mask in preds.items():
        arr = np.full(n, big, dtype=np.int64)
        idx = np.nonzero(mask)[0]
        np.minimum.at(arr, lab[idx], idx)
        first[name] = arr
    return lab, first


def orbit_search_invariants(etype: ExponentType, w, cap: int = MATRIX_SPACE_CAP):
    """``(i_min, i_max, witnesses)`` by the block criteria over the orbit of w."""
    p = etype.p
    lab, first = _orbit_search_table(etype, cap)
    key = int(lab[to_code(mat(w, p), p)])
    big = np.iinfo(np.int64).max
    has = {name: int(arr[key]) != big for name, arr in first.items()}
    imin, imax, why_min, why_max = _decide(has, etype)
    witnesses = {}
    if why_min:
        witnesses["i_min"] = (why_min, from_code(int(first[why_min][key]), p))
    if why_max:
        witnesses["i_max"] = (why_max, from_code(int(first[why_max][key]), p))
    return imin, imax, witnesses


# -- oracle -------------------------------------------------------------------

def oracle_check_feasible(etype: ExponentType, cap: int = ORACLE_QUOTIENT_CAP):
    q = etype.p ** sum(etype.m)
    if q > cap:
        raise CapError(f"|G/G'| = {q} for {etype} exceeds the oracle cap {cap}")


def oracle_invariants_for(etype: ExponentType, w, cap: int = ORACLE_QUOTIENT_CAP):
    oracle_check_feasible(etype, cap)
    prof = a1_profile(GroupSpec(etype, w))
    return prof.i_min, prof.i_max, {"i_min": prof.min_witness, "i_max": prof.max_witness,
                                    "all_contain_derived": prof.all_contain_derived}


# -- front ends ---------------------------------------------------------------

def invariants(etype: ExponentType, w, method: Method = Method.TABLE) -> InvariantReport:
    w = mat(w, etype.p)
    label = classify_any(etype, w).label
    meta = metahamiltonian(label, etype)
    if method is Method.TABLE:
        imin, imax = table_invariants(etype, label)
        wit = {"label": str(label)}
    elif method is Method.ORBIT_SEARCH:
        imin, imax, wit = orbit_search_invariants(etype, w)
    else:
        imin, imax, wit = oracle_invariants_for(etype, w)
        # A non-abelian subgroup contains a minimal non-abelian one, so it is
        # normal as soon as every minimal non-abelian subgroup contains G'.
        meta = wit["all_contain_derived"]
        if etype.order_exponent <= 6 and etype.p == 2:
            full = metahamiltonian_oracle(GroupSpec(etype, w), MetaMode.FULL).value
            if full != meta:
                raise AssertionError(f"lattice walk and A1 test disagree at {etype}, {w}")
    m1, _, m3 = etype.m
    if not (m3 <= imin <= m3 + 2 and m1 <= imax <= m1 + 2):
        raise AssertionError(f"index bounds violated: {imin}, {imax} at {etype}")
    return InvariantReport(imin, imax, meta, method, wit)


def imin(etype: ExponentType, w, method: Method = Method.TABLE):
    r = invariants(etype, w, method)
    return r.i_min, r.witnesses.get("i_min", r.witnesses.get("label"))


def imax(etype: ExponentType, w, method: Method = Method.TABLE):
    r = invariants(etype, w, method)
    return r.i_max, r.witnesses.get("i_max", r.witnesses.get("label"))


@dataclass
class PropertyRow:
    label: FamilyLabel
    m: tuple
    i_min: int
    i_max: int
    metahamiltonian: bool
    method: str = "TABLE"

    @property
    def params(self) -> str:
        s = str(self.label)
        found = re.search(r"\[(.*)\]", s)
        return found.group(1) if found else ""


def property_table(etype: ExponentType) -> list[PropertyRow]:
    rows = []
    for label in enumerate_families(etype):
        i_min, i_max = table_invariants(etype, label)
        rows.append(PropertyRow(label, etype.m, i_min, i_max, metahamiltonian(label, etype)))
    return rows
