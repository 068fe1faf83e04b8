"""Canonical forms of characteristic matrices.

Every orbit of the isomorphism action contains exactly one matrix from a
fixed list of families; :func:`classify` finds it together with a transform
that maps the input onto it.  The lists depend on the case tag:

* ``STRICT``      A1-A6, B1-B18, C1-C10
* ``TOP``         D1-D9, E1-E15, F1-F6
* ``BOTTOM``      G1-G9, H1-H15, I1-I6 (the TOP lists transported by a
  cyclic relabelling of the generators and a transpose)
* ``EQUAL``       J1-J5, K1-K6, L1-L3 for odd p, P1-P4, Q1-Q5, R1-R3 for p = 2
* ``P2_SPECIAL``  M1-M7, N1-N13, O1-O3
* ``P2_TINY``     S1-S10, recognised as groups rather than as matrices

Families carry parameters ``nu``, ``nu1``, ``nu2`` in {1, eta}, ``t`` in
F_p^* or ``r`` in 1..p-2.  For odd p the reduction is constructive; for the
two p = 2 cases without a matrix normal form procedure the orbit of every
representative is searched once and cached.
"""

from __future__ import annotations

import re
import time
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import gcd

import numpy as np

from .finite_field import PrimeContext
from .group_model import GroupSpec, Presentation, brute_isomorphic
from .iso_action import (
    ActionError,
    CaseTag,
    ExponentType,
    IsoTransform,
    apply,
    compose,
    generators,
    invert,
    orbit_labels,
    MATRIX_SPACE_CAP,
)
from .matrices import det, from_code, identity, inverse, mat, mat_mul, to_code, transpose
from .pair_forms import Relation, canonical_pair


class LabelError(ValueError):
    pass


# -- family tables ------------------------------------------------------------

# name: rows, entries separated by spaces, rows by ';'.  Symbols: -1, nu,
# nu1, nu2, t, r.
_STRICT = """
A1 1 0 0;0 nu1 0;0 0 nu2
A2 1 0 0;0 0 1;0 t 0
A3 0 0 t;0 1 0;1 0 0
A4 0 0 1;1 0 0;0 1 0
A5 0 1 0;0 0 1;1 0 0
A6 0 t 0;1 0 0;0 0 1
B1 1 0 0;0 nu 0;0 0 0
B2 1 0 0;0 0 1;0 0 0
B3 0 0 1;0 1 0;0 0 0
B4 0 1 0;0 0 1;0 0 0
B5 0 0 1;0 0 0;0 1 0
B6 1 0 0;0 0 0;0 0 nu
B7 1 0 0;0 0 0;0 1 0
B8 0 1 0;0 0 0;0 0 1
B9 0 0 0;0 1 0;1 0 0
B10 0 0 0;0 0 1;1 0 0
B11 0 0 0;1 0 0;0 0 1
B12 0 0 0;1 0 0;0 1 0
B13 0 1 0;0 0 0;1 0 0
B14 0 0 t;0 0 0;1 0 0
B15 0 0 1;1 0 0;0 0 0
B16 0 t 0;1 0 0;0 0 0
B17 0 0 0;0 1 0;0 0 nu
B18 0 0 0;0 0 1;0 t 0
C1 1 0 0;0 0 0;0 0 0
C2 0 1 0;0 0 0;0 0 0
C3 0 0 1;0 0 0;0 0 0
C4 0 0 0;1 0 0;0 0 0
C5 0 0 0;0 1 0;0 0 0
C6 0 0 0;0 0 1;0 0 0
C7 0 0 0;0 0 0;0 0 1
C8 0 0 0;0 0 0;0 1 0
C9 0 0 0;0 0 0;1 0 0
C10 0 0 0;0 0 0;0 0 0
"""

_TOP = """
D1 odd 1 0 0;0 0 1;0 -1 0
D2 odd 1 0 0;0 nu 1;0 -1 0
D3 odd 1 0 0;0 1 0;0 0 nu
D4 odd 1 0 0;0 1 1;0 -1 r
E1 odd 0 0 0;0 0 1;0 -1 0
E2 odd 0 0 0;0 1 1;0 -1 0
E3 odd 0 0 0;0 1 0;0 0 nu
E4 odd 0 0 0;0 1 1;0 -1 r
D5 two 1 0 0;0 0 1;0 1 0
D6 two 1 0 0;0 1 0;0 0 1
D7 two 1 0 0;0 1 0;0 1 1
E5 two 0 0 0;0 0 1;0 1 0
E6 two 0 0 0;0 1 0;0 0 1
E7 two 0 0 0;0 1 0;0 1 1
D8 any 0 0 1;0 1 0;t 0 0
D9 any 0 0 1;1 0 0;0 1 0
E8 any 1 0 0;0 0 1;0 0 0
E9 any 1 0 0;0 0 0;0 0 nu
E10 any 0 0 0;0 0 1;1 0 0
E11 any 0 0 0;1 0 0;0 0 1
E12 any 0 0 1;0 1 0;0 0 0
E13 any 0 0 1;0 0 0;0 1 0
E14 any 0 0 1;1 0 0;0 0 0
E15 any 0 0 1;0 0 0;t 0 0
F1 any 1 0 0;0 0 0;0 0 0
F2 any 0 0 0;0 0 1;0 0 0
F3 any 0 0 0;0 0 0;0 0 1
F4 any 0 0 0;1 0 0;0 0 0
F5 any 0 0 0;0 0 0;0 0 0
F6 any 0 0 1;0 0 0;0 0 0
"""

_BOTTOM = """
G1 odd 0 -1 0;1 0 0;0 0 1
G2 odd nu -1 0;1 0 0;0 0 1
G3 odd 1 0 0;0 nu 0;0 0 1
G4 odd 1 -1 0;1 r 0;0 0 1
H1 odd 0 -1 0;1 0 0;0 0 0
H2 odd 1 -1 0;1 0 0;0 0 0
H3 odd 1 0 0;0 nu 0;0 0 0
H4 odd 1 -1 0;1 r 0;0 0 0
G5 two 0 1 0;1 0 0;0 0 1
G6 two 1 0 0;0 1 0;0 0 1
G7 two 1 1 0;0 1 0;0 0 1
H5 two 0 1 0;1 0 0;0 0 0
H6 two 1 0 0;0 1 0;0 0 0
H7 two 1 1 0;0 1 0;0 0 0
G8 any 1 0 0;0 0 1;0 t 0
G9 any 0 1 0;0 0 1;1 0 0
H8 any 0 0 0;1 0 0;0 0 1
H9 any 0 0 0;0 nu 0;0 0 1
H10 any 0 0 0;1 0 0;0 1 0
H11 any 0 0 0;0 1 0;1 0 0
H12 any 1 0 0;0 0 1;0 0 0
H13 any 0 1 0;0 0 1;0 0 0
H14 any 0 0 0;0 0 1;1 0 0
H15 any 0 0 0;0 0 1;0 t 0
I1 any 0 0 0;0 0 0;0 0 1
I2 any 0 0 0;1 0 0;0 0 0
I3 any 0 0 0;0 1 0;0 0 0
I4 any 0 0 0;0 0 0;1 0 0
I5 any 0 0 0;0 0 0;0 0 0
I6 any 0 0 0;0 0 1;0 0 0
"""

_EQUAL = """
J1 odd 1 0 0;0 1 0;0 0 1
J2 odd 1 0 0;0 0 1;0 -1 0
J3 odd 1 0 0;0 nu 1;0 -1 0
J4 odd 1 0 0;0 1 1;0 -1 r
J5 odd 0 0 1;0 1 1;1 -1 0
K1 odd 1 0 0;0 nu 0;0 0 0
K2 odd 1 0 0;0 0 1;0 0 0
K3 odd 0 0 1;0 0 0;0 1 0
K4 odd 0 0 0;0 0 1;0 -1 0
K5 odd 0 0 0;0 1 1;0 -1 0
K6 odd 0 0 0;0 1 1;0 -1 r
L1 odd 0 0 0;0 0 0;0 0 0
L2 odd 1 0 0;0 0 0;0 0 0
L3 odd 0 0 0;0 0 1;0 0 0
P1 two 1 0 0;0 1 0;0 0 1
P2 two 1 0 0;0 1 0;0 1 1
P3 two 1 1 1;0 1 0;0 0 1
P4 two 1 0 1;0 0 1;0 1 0
Q1 two 1 0 0;0 1 0;0 0 0
Q2 two 0 1 0;1 0 0;0 0 0
Q3 two 1 0 0;1 1 0;0 0 0
Q4 two 0 0 1;0 1 0;0 0 0
Q5 two 0 1 0;0 0 1;0 0 0
R1 two 0 1 0;0 0 0;0 0 0
R2 two 1 0 0;0 0 0;0 0 0
R3 two 0 0 0;0 0 0;0 0 0
"""

_P2_SPECIAL = """
M1 1 0 0;0 0 1;0 1 0
M2 1 0 0;0 1 0;0 0 1
M3 1 0 0;0 1 0;0 1 1
M4 0 0 1;0 1 0;1 0 0
M5 0 0 1;1 0 0;0 1 0
M6 0 0 1;0 1 0;1 1 0
M7 0 1 1;0 1 0;1 1 0
N1 0 0 0;0 0 1;0 1 0
N2 0 0 0;0 1 0;0 0 1
N3 0 0 0;0 1 0;0 1 1
N4 0 0 0;0 1 1;1 1 1
N5 1 0 0;0 0 1;0 0 0
N6 1 0 0;0 0 0;0 0 1
N7 0 0 0;0 0 1;1 0 0
N8 0 0 0;1 0 0;0 0 1
N9 0 0 0;1 0 1;0 0 1
N10 0 0 1;0 0 0;0 1 0
N11 0 0 1;1 0 0;0 0 0
N12 0 0 1;0 0 0;1 0 0
N13 0 0 1;1 0 0;1 0 0
O1 1 0 0;0 0 0;0 0 0
O2 0 0 0;1 0 0;0 0 0
O3 0 0 0;1 0 0;1 0 0
"""

# Groups of order 2^6 with m = (1,1,1), given by presentations on a, b, c.
TINY_PRESENTATIONS = {
    "S1": "a^2=b^2=c^2=d^2=e^2=f^2=1; [b,c]=d; [c,a]=e; [a,b]=f",
    "S2": "a^2=b^2=c^4=d^2=e^2=1; [b,c]=d; [c,a]=e; [a,b]=c^2",
    "S3": "a^4=b^4=c^2=d^2=1; [b,c]=d; [c,a]=a^2 b^2; [a,b]=b^2",
    "S4": "a^4=b^4=c^2=d^2=1; [b,c]=d; [c,a]=a^2 b^2; [a,b]=a^2",
    "S5": "a^4=b^4=c^2=d^2=e^2=1; [b,c]=d; [c,a]=e; [a,b]=a^2=b^2",
    "S6": "a^4=b^4=c^4=d^2=e^2=1; [b,c]=d; [c,a]=e; [a,b]=a^2=b^2=c^2",
    "S7": "a^4=b^2=c^4=d^2=1; [b,c]=d; [c,a]=a^2; [a,b]=c^2",
    "S8": "a^4=b^4=c^4=d^2=1; [b,c]=d; [c,a]=a^2; [a,b]=b^2=c^2",
    "S9": "a^4=b^4=c^4=d^2=1; [b,c]=d; [c,a]=a^2 b^2; [a,b]=a^2=c^2",
    "S10": "a^4=b^4=c^4=1; [b,c]=a^2 b^2; [c,a]=b^2 c^2; [a,b]=c^2; [c^2,a]=[c^2,b]=1",
}

PARAM_ORDER = ("nu", "nu1", "nu2", "t", "r")
_NU_PARAMS = ("nu", "nu1", "nu2")


@dataclass(frozen=True)
class FamilyDef:
    name: str
    tag: CaseTag
    parity: str  # "odd", "two" or "any"
    template: tuple  # 3x3 of int | str

    @property
    def params(self) -> tuple[str, ...]:
        names = {x for row in self.template for x in row if isinstance(x, str)}
        return tuple(n for n in PARAM_ORDER if n in names)

    def allowed(self, p: int) -> bool:
        return self.parity == "any" or (self.parity == "two") == (p == 2)

    def domain(self, name: str, p: int) -> tuple[int, ...]:
        if name in _NU_PARAMS:
            return PrimeContext.get(p).nu_values()
        if name == "t":
            return tuple(range(1, p))
        return tuple(range(1, p - 1))

    def instances(self, p: int):
        names = self.params
        for vals in product(*(self.domain(n, p) for n in names)):
            yield dict(zip(names, vals))

    def matrix(self, p: int, params: dict, free=()):
        """The template with ``params`` substituted; names in ``free`` stay None."""
        out = []
        for row in self.template:
            r = []
            for x in row:
                if isinstance(x, str):
                    r.append(None if x in free else params[x] % p)
                else:
                    r.append(x % p)
            out.append(tuple(r))
        return tuple(out)


def _parse_table(text: str, tag: CaseTag, with_parity: bool) -> dict[str, FamilyDef]:
    out = {}
    for line in text.strip().splitlines():
        name, rest = line.split(None, 1)
        parity = "any"
        if with_parity:
            parity, rest = rest.split(None, 1)
        rows = []
        for row in rest.split(";"):
            rows.append(tuple(x if x[0].isalpha() else int(x) for x in row.split()))
        out[name] = FamilyDef(name, tag, parity, tuple(rows))
    return out


FAMILIES: dict[str, FamilyDef] = {}
FAMILIES.update(_parse_table(_STRICT, CaseTag.STRICT, False))
FAMILIES.update(_parse_table(_TOP, CaseTag.TOP, True))
FAMILIES.update(_parse_table(_BOTTOM, CaseTag.BOTTOM, True))
FAMILIES.update(_parse_table(_EQUAL, CaseTag.EQUAL, True))
FAMILIES.update(_parse_table(_P2_SPECIAL, CaseTag.P2_SPECIAL, False))
for _s in TINY_PRESENTATIONS:
    FAMILIES[_s] = FamilyDef(_s, CaseTag.P2_TINY, "two", ())

# TOP family -> BOTTOM family, by position in the lists
_TOP_TO_BOTTOM = {}
for _top, _bot in (("D", "G"), ("E", "H"), ("F", "I")):
    for _k in range(1, 16):
        if _top + str(_k) in FAMILIES:
            _TOP_TO_BOTTOM[_top + str(_k)] = _bot + str(_k)


# -- labels -------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyLabel:
    family: str
    params: tuple = ()  # sorted (name, value) pairs, values reduced mod p

    @classmethod
    def make(cls, family: str, params: dict | None = None) -> "FamilyLabel":
        params = params or {}
        return cls(family, tuple((n, params[n]) for n in PARAM_ORDER if n in params))

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def __str__(self):
        if not self.params:
            return self.family
        parts = []
        for n, v in self.params:
            if n in _NU_PARAMS and v != 1:
                parts.append(f"{n}=eta")
            else:
                parts.append(f"{n}={v}")
        return f"{self.family}[{','.join(parts)}]"

    def mentions_eta(self) -> bool:
        return any(n in _NU_PARAMS and v != 1 for n, v in self.params)


_LABEL_RE = re.compile(r"^([A-S]\d+)(?:\[(.*)\])?$")


def parse_label(text: str, p: int) -> FamilyLabel:
    """Inverse of ``str(label)``; ``eta`` is resolved for the prime ``p``."""
    m = _LABEL_RE.match(text.strip())
    if not m or m.group(1) not in FAMILIES:
        raise LabelError(f"unknown family label {text!r}")
    params = {}
    if m.group(2):
        for item in m.group(2).split(","):
            if "=" not in item:
                raise LabelError(f"bad parameter {item!r}")
            k, v = (s.strip() for s in item.split("=", 1))
            if v == "eta":
                v = PrimeContext.get(p).eta
            try:
                params[k] = int(v) % p
            except ValueError as exc:
                raise LabelError(f"bad parameter value {v!r}") from exc
    return FamilyLabel.make(m.group(1), params)


def _check_label(label: FamilyLabel, etype: ExponentType) -> FamilyDef:
    fd = FAMILIES.get(label.family)
    if fd is None:
        raise LabelError(f"unknown family {label.family}")
    p = etype.p
    if fd.tag is not etype.tag or not fd.allowed(p):
        raise LabelError(f"{label.family} is not a family for {etype}")
    got = label.param_dict
    if set(got) != set(fd.params):
        raise LabelError(f"{label.family} takes parameters {fd.params}, got {tuple(got)}")
    for n, v in got.items():
        if v not in fd.domain(n, p):
            raise LabelError(f"{n}={v} is out of range for {label.family} at p={p}")
    return fd


def families_for(etype: ExponentType) -> list[FamilyDef]:
    p, tag = etype.p, etype.tag
    return [fd for fd in FAMILIES.values() if fd.tag is tag and fd.allowed(p)]


def enumerate_families(etype: ExponentType) -> list[FamilyLabel]:
    """Every instantiated family for the type, in table order."""
    out = []
    for fd in families_for(etype):
        for params in fd.instances(etype.p):
            out.append(FamilyLabel.make(fd.name, params))
    return out


@lru_cache(maxsize=None)
def _tiny_presentation(name: str) -> Presentation:
    return Presentation(TINY_PRESENTATIONS[name], 2, (1, 1, 1), generators=("a", "b", "c"))


def representative(etype: ExponentType, label: FamilyLabel):
    fd = _check_label(label, etype)
    if fd.tag is CaseTag.P2_TINY:
        return _tiny_presentation(fd.name).char_matrix
    return fd.matrix(etype.p, label.param_dict)


# -- torus normalisation ------------------------------------------------------

def _diagonal_form(C):
    """Return (D, U, V) with U C V = D diagonal, over the integers.

    ``C`` is k x 3; U and V are unimodular.  Only diagonality is needed for
    solving, so the divisibility chain of the Smith form is not enforced.
    """
    k = len(C)
    A = [list(r) for r in C]
    U = [[int(i == j) for j in range(k)] for i in range(k)]
    V = [[int(i == j) for j in range(3)] for i in range(3)]
    for t in range(min(k, 3)):
        while True:
            piv = None
            for i in range(t, k):
                for j in range(t, 3):
                    if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                return A, U, V
            i, j = piv
            A[t], A[i] = A[i], A[t]
            U[t], U[i] = U[i], U[t]
            for row in A:
                row[t], row[j] = row[j], row[t]
            for row in V:
                row[t], row[j] = row[j], row[t]
            clean = True
            for i in range(t + 1, k):
                q = A[i][t] // A[t][t]
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[t])]
                clean = clean and A[i][t] == 0
            for j in range(t + 1, 3):
                q = A[t][j] // A[t][t]
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                    for row in V:
                        row[j] -= q * row[t]
                clean = clean and A[t][j] == 0
            if clean:
                break
    return A, U, V


def torus_solve(w, target, p: int):
    """Diagonal ``d`` with ``d_i d_j / (d1 d2 d3) * w_ij == target_ij``.

    ``target`` has the same support as ``w``; entries that are None are left
    free.  Returns the triple ``d`` or None when no scaling works.
    """
    F = PrimeContext.get(p)
    n = p - 1
    rows, rhs = [], []
    for i in range(3):
        for j in range(3):
            if bool(w[i][j]) != (target[i][j] is None or bool(target[i][j])):
                return None
            if w[i][j] and target[i][j] is not None:
                rows.append([int(k == i) + int(k == j) - 1 for k in range(3)])
                rhs.append((F.log(target[i][j]) - F.log(w[i][j])) % n if n > 1 else 0)
    if n == 1 or not rows:
        return (1, 1, 1)
    D, U, V = _diagonal_form(rows)
    c = [sum(U[i][j] * rhs[j] for j in range(len(rhs))) % n for i in range(len(rhs))]
    b = [0, 0, 0]
    for i in range(len(rows)):
        d = D[i][i] if i < 3 else 0
        if d == 0:
            if c[i] % n:
                return None
            continue
        g = gcd(d, n)
        if c[i] % g:
            return None
        b[i] = (c[i] // g) * pow(d // g, -1, n // g) % (n // g) if n // g > 1 else 0
    a = [sum(V[i][j] * b[j] for j in range(3)) % n for i in range(3)]
    return tuple(F.exp(x) for x in a)


# -- results ------------------------------------------------------------------

@dataclass
class Classification:
    label: FamilyLabel
    representative: tuple
    witness: object  # IsoTransform, or generator images for P2_TINY
    method: str


class _Reducer:
    """Tracks the current matrix and the composed transform."""

    def __init__(self, etype: ExponentType, w):
        self.etype = etype
        self.p = etype.p
        self.w = w
        self.t = IsoTransform.identity(etype)

    def act(self, X, X2=None):
        t = IsoTransform(self.etype, mat(X, self.p), mat(X2 if X2 is not None else X, self.p))
        self.w = apply(t, self.w)
        self.t = compose(t, self.t)

    def top(self, x11=1, Y=((1, 0), (0, 1)), u=(0, 0), v=(0, 0)):
        """A transform of the TOP shape: X = [[x11, v], [0, Y]], X2 = [[x11, 0], [u, Y]]."""
        X = ((x11, v[0], v[1]), (0, Y[0][0], Y[0][1]), (0, Y[1][0], Y[1][1]))
        X2 = ((x11, 0, 0), (u[0], Y[0][0], Y[0][1]), (u[1], Y[1][0], Y[1][1]))
        self.act(X, X2)

    def finish(self, family: str, fixed: dict | None = None) -> FamilyLabel:
        """Scale by a diagonal transform onto the family representative."""
        fd = FAMILIES[family]
        p = self.p
        fixed = fixed or {}
        free = ("t",) if "t" in fd.params else ()
        names = [n for n in fd.params if n not in free and n not in fixed]
        for vals in product(*(fd.domain(n, p) for n in names)):
            params = dict(zip(names, vals), **fixed)
            d = torus_solve(self.w, fd.matrix(p, params, free), p)
            if d is None:
                continue
            self.act(((d[0], 0, 0), (0, d[1], 0), (0, 0, d[2])))
            if free:
                tmpl = fd.template
                i, j = next((i, j) for i in range(3) for j in range(3) if tmpl[i][j] == "t")
                params["t"] = self.w[i][j]
            return FamilyLabel.make(family, params)
        raise AssertionError(f"no diagonal scaling maps {self.w} onto {family}")


def _inv(a, p):
    return pow(a % p, -1, p)


def _pair_transform(A, p, relation):
    """Return (label, Y, lam) with ``lam * Y A Y^t`` the pair normal form."""
    label, rep, P, lam = canonical_pair(A, p, relation)
    return label, transpose(P), lam


# -- STRICT -------------------------------------------------------------------

def _strict_family(support) -> str:
    for fd in FAMILIES.values():
        if fd.tag is CaseTag.STRICT:
            s = frozenset((i, j) for i in range(3) for j in range(3) if fd.template[i][j] != 0)
            if s == support:
                return fd.name
    raise AssertionError(f"no family with support {sorted(support)}")


def _classify_strict(red: _Reducer) -> FamilyLabel:
    p = red.p
    pivots = []
    for i in range(3):
        w = red.w
        # clear earlier pivot columns with the (single-entry) pivot rows above
        for (a, b) in pivots:
            if w[i][b]:
                c = -w[i][b] * _inv(w[a][b], p) % p
                X2 = [[int(r == s) for s in range(3)] for r in range(3)]
                X2[i][a] = c
                red.act(identity(3), X2)
                w = red.w
        cols = [j for j in range(3) if w[i][j]]
        if not cols:
            continue
        j = cols[-1]
        for a in cols[:-1]:
            c = -w[i][a] * _inv(w[i][j], p) % p
            X = [[int(r == s) for s in range(3)] for r in range(3)]
            X[a][j] = c
            red.act(X, identity(3))
        w = red.w
        for k in range(i + 1, 3):
            if w[k][j]:
                c = -w[k][j] * _inv(w[i][j], p) % p
                X2 = [[int(r == s) for s in range(3)] for r in range(3)]
                X2[k][i] = c
                red.act(identity(3), X2)
                w = red.w
        pivots.append((i, j))
    support = frozenset((i, j) for i in range(3) for j in range(3) if red.w[i][j])
    return red.finish(_strict_family(support))


# -- TOP ----------------------------------------------------------------------

_TOP_INV_ODD = {1: "D1", 2: "D2", 3: "D3", 4: "D4"}
_TOP_INV_TWO = {1: "D6", 2: "D5", 3: "D7"}
_TOP_SING = {1: "E8", 2: "E9", 3: "F1"}
_TOPB_INV_ODD = {1: "E1", 2: "E2", 3: "E3", 4: "E4"}
_TOPB_INV_TWO = {1: "E6", 2: "E5", 3: "E7"}


def _pair_params(family: str, plabel) -> dict:
    fd = FAMILIES[family]
    out = {}
    if "nu" in fd.params:
        out["nu"] = plabel.nu
    if "r" in fd.params:
        out["r"] = plabel.r
    return out


def _classify_top(red: _Reducer) -> FamilyLabel:
    p = red.p
    w = red.w
    a, b = w[0][0], (w[0][1], w[0][2])
    c = (w[1][0], w[2][0])
    W = ((w[1][1], w[1][2]), (w[2][1], w[2][2]))
    if b == (0, 0) and a:
        ainv = _inv(a, p)
        red.top(u=(-c[0] * ainv % p, -c[1] * ainv % p))
        aW = tuple(tuple(a * x % p for x in row) for row in W)
        plabel, Z, _ = _pair_transform(aW, p, Relation.CONGRUENCE)
        dz = det(Z, p)
        Y = tuple(tuple(x * _inv(dz, p) % p for x in row) for row in Z)
        red.top(x11=det(Y, p) * ainv % p, Y=Y)
        if plabel.invertible:
            fam = (_TOP_INV_TWO if p == 2 else _TOP_INV_ODD)[plabel.index]
        else:
            fam = _TOP_SING[plabel.index]
        return FamilyLabel.make(fam, _pair_params(fam, plabel))
    if b == (0, 0):
        return _top_first_row_zero(red, W, c)
    # rotate the top row to (0, 0, 1), then clear the corner
    b0, b1 = b
    Y = ((b1, -b0), (1, 0)) if b0 else ((b1, -b0), (0, 1))
    red.top(Y=Y)
    red.top(v=(0, -red.w[0][0] % p))
    w = red.w
    if w[1][1]:
        red.top(Y=((1, 0), (-w[2][1] * _inv(w[1][1], p) % p, 1)))
        w = red.w
        red.top(v=(-w[1][0] * _inv(w[1][1], p) % p, 0))
        w = red.w
        red.top(u=(-w[1][2] % p, -w[2][2] % p))
        return red.finish("D8" if red.w[2][0] else "E12")
    red.top(u=(-w[1][2] % p, -w[2][2] % p))
    w = red.w
    if w[2][1]:
        red.top(v=(-w[2][0] * _inv(w[2][1], p) % p, 0))
        return red.finish("D9" if red.w[1][0] else "E13")
    if w[1][0]:
        red.top(Y=((1, 0), (-w[2][0] * _inv(w[1][0], p) % p, 1)))
        return red.finish("E14")
    return red.finish("E15" if w[2][0] else "F6")


def _top_first_row_zero(red: _Reducer, W, c) -> FamilyLabel:
    p = red.p
    detW = det(W, p)
    if detW:
        Winv = inverse(W, p)
        v = tuple(-sum(Winv[i][k] * c[k] for k in range(2)) % p for i in range(2))
        red.top(v=v)
        plabel, Y, lam = _pair_transform(W, p, Relation.SUBCONGRUENCE)
        red.top(x11=_inv(lam * det(Y, p), p), Y=Y)
        fam = (_TOPB_INV_TWO if p == 2 else _TOPB_INV_ODD)[plabel.index]
        return FamilyLabel.make(fam, _pair_params(fam, plabel))
    if any(x for row in W for x in row):
        plabel, Y, lam = _pair_transform(W, p, Relation.SUBCONGRUENCE)
        red.top(x11=_inv(lam * det(Y, p), p), Y=Y)
        w = red.w
        if plabel.index == 1:  # W = [[0, 1], [0, 0]]
            red.top(v=(0, -w[1][0] % p))
            return red.finish("E10" if red.w[2][0] else "F2")
        red.top(v=(0, -w[2][0] % p))  # W = diag(0, 1)
        return red.finish("E11" if red.w[1][0] else "F3")
    if c == (0, 0):
        return red.finish("F5")
    if c[0]:
        red.top(Y=((1, 0), (-c[1] * _inv(c[0], p) % p, 1)))
    else:
        red.top(Y=((0, 1), (1, 0)))
    return red.finish("F4")


# -- BOTTOM via TOP -----------------------------------------------------------

_CYCLE = ((0, 0, 1), (1, 0, 0), (0, 1, 0))
_CYCLE_INV = transpose(_CYCLE)


def to_top_form(w, p):
    """``P w^t P^-1`` for the cyclic permutation matrix P."""
    return mat_mul(mat_mul(_CYCLE, transpose(w), p), _CYCLE_INV, p)


def _top_shadow(p: int) -> ExponentType:
    return ExponentType(p, (3, 2, 2) if p == 2 else (2, 1, 1))


def _classify_bottom(etype: ExponentType, w):
    p = etype.p
    red = _Reducer(_top_shadow(p), to_top_form(w, p))
    top_label = _classify_top(red)
    X = mat_mul(mat_mul(_CYCLE_INV, red.t.X2, p), _CYCLE, p)
    X2 = mat_mul(mat_mul(_CYCLE_INV, red.t.X, p), _CYCLE, p)
    label = FamilyLabel(_TOP_TO_BOTTOM[top_label.family], top_label.params)
    return label, IsoTransform(etype, X, X2)


# -- EQUAL, odd p -------------------------------------------------------------

def _diagonalize_sym3(S, p):
    """X with ``X S X^t`` diagonal (plain congruence)."""
    S = [list(r) for r in S]
    X = [list(r) for r in identity(3)]

    def op(E):
        nonlocal S, X
        S = [list(r) for r in mat_mul(mat_mul(E, S, p), transpose(E), p)]
        X = [list(r) for r in mat_mul(E, X, p)]

    for k in range(3):
        if S[k][k] == 0:
            j = next((j for j in range(k + 1, 3) if S[j][j]), None)
            if j is not None:
                E = [[int(r == s) for s in range(3)] for r in range(3)]
                E[k][k] = E[j][j] = 0
                E[k][j] = E[j][k] = 1
                op(E)
            else:
                j = next((j for j in range(k + 1, 3) if S[k][j]), None)
                if j is None:
                    continue
                E = [[int(r == s) for s in range(3)] for r in range(3)]
                E[k][j] = 1
                op(E)
        inv = _inv(S[k][k], p)
        E = [[int(r == s) for s in range(3)] for r in range(3)]
        for j in range(k + 1, 3):
            E[j][k] = -S[j][k] * inv % p
        op(E)
    return mat(X, p)


def _zeta(F: PrimeContext) -> tuple[int, int]:
    """A non-square zeta with zeta - 1 = gamma^2; returns (zeta, gamma)."""
    for z in range(2, F.p):
        if not F.is_square(z) and F.is_square(z - 1):
            return z, F.sqrt(z - 1)
    raise AssertionError(f"no non-square zeta with zeta - 1 square mod {F.p}")


def _classify_equal_odd(red: _Reducer) -> FamilyLabel:
    p = red.p
    F = PrimeContext.get(p)
    half = _inv(2, p)
    w = red.w
    K = [[(w[i][j] - w[j][i]) * half % p for j in range(3)] for i in range(3)]
    if all(x == 0 for row in K for x in row):
        return _equal_symmetric(red, F)
    # first row of X is (z, -y, x) for K = [[0, x, y], [-x, 0, z], [-y, -z, 0]]
    r0 = (K[1][2], -K[0][2] % p, K[0][1])
    k = next(i for i in range(3) if r0[i])
    rest = [tuple(int(s == j) for s in range(3)) for j in range(3) if j != k]
    red.act((r0, rest[0], rest[1]))
    w = red.w
    i, j, kk = w[0]
    if i:
        red.act(((1, 0, 0), (-j % p, i, 0), (-kk * _inv(i, p) % p, 0, 1)))
        W = ((red.w[1][1], red.w[1][2]), (red.w[2][1], red.w[2][2]))
        plabel, Z, _ = _pair_transform(W, p, Relation.CONGRUENCE)
        Y = tuple(tuple(x * _inv(det(Z, p), p) % p for x in row) for row in Z)
        red.act(((det(Y, p), 0, 0), (0,) + Y[0], (0,) + Y[1]))
        if not plabel.invertible:
            return FamilyLabel.make("K2")
        fam = {1: "J2", 2: "J3", 4: "J4"}[plabel.index]
        return FamilyLabel.make(fam, _pair_params(fam, plabel))
    if j or kk:
        if j:
            red.act(((1, 0, 0), (0, kk, -j % p), (0, 1, 0)))
        else:
            red.act(((1, 0, 0), (0, kk, 0), (0, 0, 1)))
        w = red.w
        kp = w[0][2]
        s12 = (w[1][2] + w[2][1]) * half % p
        red.act(((1, 0, 0), (-s12 * _inv(kp, p) % p, 1, 0), (-w[2][2] * half * _inv(kp, p) % p, 0, 1)))
        w = red.w
        kp, s = w[0][2], w[1][1]
        if s:
            red.act(((1, 0, 0), (0, kp, 0), (0, 0, s * kp % p)))
            return red.finish("J5")
        red.act(((1, 0, 0), (0, kp, 0), (0, 0, 1)))
        red.act(((-1, -1, 0), (-1, 1, 0), (0, 0, 1)))
        return red.finish("K3")
    W = ((w[1][1], w[1][2]), (w[2][1], w[2][2]))
    plabel, Y, lam = _pair_transform(W, p, Relation.SUBCONGRUENCE)
    x11 = _inv(lam * det(Y, p), p)
    red.act(((x11, 0, 0), (0,) + Y[0], (0,) + Y[1]))
    if not plabel.invertible:
        return FamilyLabel.make("L3")
    fam = {1: "K4", 2: "K5", 4: "K6"}[plabel.index]
    return FamilyLabel.make(fam, {"r": plabel.r} if fam == "K6" else {})


def _equal_symmetric(red: _Reducer, F: PrimeContext) -> FamilyLabel:
    p = red.p
    red.act(_diagonalize_sym3(red.w, p))
    d = [red.w[i][i] for i in range(3)]
    order = [i for i in range(3) if d[i]] + [i for i in range(3) if not d[i]]
    if order != [0, 1, 2]:
        red.act(tuple(tuple(int(s == order[r]) for s in range(3)) for r in range(3)))
    d = [red.w[i][i] for i in range(3)]
    nz = sum(1 for x in d if x)
    if nz == 0:
        return FamilyLabel.make("L1")
    if nz == 1:
        return red.finish("L2")
    a = d[0]
    W = ((a * d[1] % p, 0), (0, a * d[2] % p))
    plabel, Z, _ = _pair_transform(W, p, Relation.CONGRUENCE)
    Y = tuple(tuple(x * _inv(det(Z, p), p) % p for x in row) for row in Z)
    red.act(((det(Y, p) * _inv(a, p) % p, 0, 0), (0,) + Y[0], (0,) + Y[1]))
    if nz == 2:
        # now diag(1, 0, nu)
        red.act(((-1, 0, 0), (0, 0, -1), (0, -1, 0)))
        return FamilyLabel.make("K1", {"nu": plabel.nu})
    if plabel.nu != 1:
        zeta, gamma = _zeta(F)
        z = F.sqrt(F.eta * _inv(zeta, p) % p)
        red.act(((0, 0, -1), (z, -z * gamma % p, 0), (-z * gamma % p, -z % p, 0)))
    return FamilyLabel.make("J1")


# -- p = 2 lookups ------------------------------------------------------------

@lru_cache(maxsize=None)
def _orbit_table(etype: ExponentType):
    """For every matrix: (family label, parent matrix, generator index)."""
    gens = generators(etype)
    table = {}
    for label in enumerate_families(etype):
        rep = representative(etype, label)
        if rep in table:
            continue  # representative already reached from an earlier family
        table[rep] = (label, None, None)
        queue = deque([rep])
        while queue:
            u = queue.popleft()
            for k, g in enumerate(gens):
                v = apply(g, u)
                if v not in table:
                    table[v] = (label, u, k)
                    queue.append(v)
    return table, gens


def _classify_lookup(etype: ExponentType, w):
    table, gens = _orbit_table(etype)
    label = table[w][0]
    t = IsoTransform.identity(etype)
    v = w
    while table[v][1] is not None:
        _, u, k = table[v]
        t = compose(t, gens[k])
        v = u
    return label, invert(t)


# -- entry points -------------------------------------------------------------

def classify(etype: ExponentType, w) -> Classification:
    """Family of ``w`` with a transform mapping ``w`` onto its representative."""
    p, tag = etype.p, etype.tag
    w = mat(w, p)
    if tag is CaseTag.P2_TINY:
        raise ActionError("p = 2 with m = (1,1,1) has no matrix action; use classify_tiny")
    method = "constructive"
    if tag is CaseTag.P2_SPECIAL or (tag is CaseTag.EQUAL and p == 2):
        label, witness = _classify_lookup(etype, w)
        method = "orbit-lookup"
    elif tag is CaseTag.BOTTOM:
        label, witness = _classify_bottom(etype, w)
    else:
        red = _Reducer(etype, w)
        if tag is CaseTag.STRICT:
            label = _classify_strict(red)
        elif tag is CaseTag.TOP:
            label = _classify_top(red)
        else:
            label = _classify_equal_odd(red)
        witness = red.t
    rep = representative(etype, label)
    if apply(witness, w) != rep:
        raise AssertionError(f"witness for {w} does not reach {label} at {etype}")
    return Classification(label, rep, witness, method)


def _fingerprint(spec: GroupSpec):
    """Element-order counts, an isomorphism invariant used to prune the search."""
    counts = {}
    for g in spec.elements():
        o = spec.element_order(g)
        counts[o] = counts.get(o, 0) + 1
    return tuple(sorted(counts.items()))


@lru_cache(maxsize=None)
def _tiny_specs():
    out = []
    for name in TINY_PRESENTATIONS:
        pres = _tiny_presentation(name)
        spec = pres.spec()
        if not pres.check(spec):
            raise AssertionError(f"presentation {name} does not hold in its group")
        out.append((name, spec, _fingerprint(spec)))
    return out


def classify_tiny(w) -> Classification:
    """S-label of G(w) for p = 2, m = (1,1,1), by brute-force isomorphism.

    The witness is the triple of images in G(w) of the generators a, b, c of
    the labelled group.
    """
    etype = ExponentType(2, (1, 1, 1))
    spec = GroupSpec(etype, mat(w, 2))
    fp = _fingerprint(spec)
    for name, S, sfp in _tiny_specs():
        if sfp != fp:
            continue
        ok, images = brute_isomorphic(S, spec)
        if ok:
            return Classification(FamilyLabel(name), S.w, images, "group-isomorphism")
    raise AssertionError(f"G({w}) matches none of S1-S10")


def classify_any(etype: ExponentType, w) -> Classification:
    if etype.tag is CaseTag.P2_TINY:
        return classify_tiny(w)
    return classify(etype, w)


# -- exhaustive verification --------------------------------------------------

@dataclass
class VerificationReport:
    etype: ExponentType
    orbit_count: int
    family_count: int
    violations: list = field(default_factory=list)
    orbit_sizes: dict = field(default_factory=dict)
    matrices_checked: int = 0
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations and self.orbit_count == self.family_count

    def summary(self) -> str:
        status = "pass" if self.ok else "FAIL"
        return (
            f"{status} {self.etype}: {self.orbit_count} orbits, {self.family_count} families, "
            f"{len(self.violations)} violations, {self.elapsed:.1f}s"
        )


def _check_codes(etype: ExponentType, start: int, stop: int, lab_slice, rep_keys: dict,
                 max_violations: int):
    """Classify the matrices with codes in [start, stop) against their orbit keys."""
    p = etype.p
    out = []
    for code, key in zip(range(start, stop), lab_slice):
        w = from_code(code, p)
        got = classify(etype, w).label
        if rep_keys[got] != key:
            out.append((code, str(got)))
            if len(out) >= max_violations:
                break
    return out


def verify_transversal(etype: ExponentType, cap: int = MATRIX_SPACE_CAP,
                       max_violations: int = 50, workers: int = 1) -> VerificationReport:
    """Partition all p^9 matrices into orbits and check the family list.

    Checks that there are as many orbits as families, that each orbit holds
    exactly one representative, and that :func:`classify` names the family
    whose representative shares the orbit of every matrix.  With
    ``workers > 1`` the classification pass is split into contiguous code
    ranges and merged in code order, so the report does not depend on it.
    """
    t0 = time.perf_counter()
    p = etype.p
    if etype.tag is CaseTag.P2_TINY:
        return verify_tiny()
    lab = orbit_labels(etype, cap)
    keys, sizes = np.unique(lab, return_counts=True)
    labels = enumerate_families(etype)
    report = VerificationReport(etype, len(keys), len(labels))
    owner = {}
    rep_keys = {}
    for label in labels:
        key = int(lab[to_code(representative(etype, label), p)])
        rep_keys[label] = key
        if key in owner:
            report.violations.append(f"{owner[key]} and {label} share the orbit of {from_code(key, p)}")
        else:
            owner[key] = label
        report.orbit_sizes[str(label)] = int(sizes[np.searchsorted(keys, key)])
    for key in keys.tolist():
        if key not in owner:
            report.violations.append(f"orbit of {from_code(key, p)} has no representative")
    n = p**9
    lab_list = lab.tolist()
    if workers <= 1:
        bad = _check_codes(etype, 0, n, lab_list, rep_keys, max_violations)
    else:
        from concurrent.futures import ProcessPoolExecutor

        step = -(-n // (4 * workers))
        bounds = [(a, min(a + step, n)) for a in range(0, n, step)]
        with ProcessPoolExecutor(workers) as pool:
            parts = pool.map(_check_codes, [etype] * len(bounds), [a for a, _ in bounds],
                             [b for _, b in bounds], [lab_list[a:b] for a, b in bounds],
                             [rep_keys] * len(bounds), [max_violations] * len(bounds))
            bad = [v for part in parts for v in part][:max_violations]
    for code, got in bad:
        want = owner.get(lab_list[code])
        report.violations.append(f"{from_code(code, p)} classified {got}, orbit holds {want}")
    report.matrices_checked = n
    report.elapsed = time.perf_counter() - t0
    return report


def random_transform(etype: ExponentType, rng) -> IsoTransform:
    p = etype.p
    while True:
        P = [[rng.randrange(p) for _ in range(3)] for _ in range(3)]
        if etype.tag is CaseTag.P2_SPECIAL:
            P[0][0] = 1
        try:
            return IsoTransform.from_params(etype, P)
        except ActionError:
            continue


def random_matrix(p: int, rng):
    return tuple(tuple(rng.randrange(p) for _ in range(3)) for _ in range(3))


@dataclass
class CrossCheck:
    etype: ExponentType
    pairs: int
    same: int
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def crosscheck_isomorphism(etype: ExponentType, pairs: int = 100, seed: int = 0) -> CrossCheck:
    """Compare orbit membership with group isomorphism on random pairs.

    Half of the pairs are built as (w, t.w) for a random transform t, the rest
    are independent random matrices, so both outcomes are exercised.
    """
    import random

    from .iso_action import same_orbit

    rng = random.Random(seed)
    p = etype.p
    out = CrossCheck(etype, pairs, 0)
    for k in range(pairs):
        w1 = random_matrix(p, rng)
        w2 = apply(random_transform(etype, rng), w1) if k % 2 == 0 else random_matrix(p, rng)
        in_orbit, _ = same_orbit(etype, w1, w2)
        iso, _ = brute_isomorphic(GroupSpec(etype, w1), GroupSpec(etype, w2))
        out.same += in_orbit
        if in_orbit != iso:
            out.mismatches.append((w1, w2, in_orbit, iso))
    return out


def tiny_partition():
    """Partition the 512 matrices at p = 2, m = (1,1,1) by group isomorphism.

    Independent of the S-list: each new matrix is compared with one member of
    every class found so far.  Returns a list of classes (lists of matrices).
    """
    etype = ExponentType(2, (1, 1, 1))
    classes = []  # (fingerprint, spec, members)
    for code in range(2**9):
        w = from_code(code, 2)
        spec = GroupSpec(etype, w)
        fp = _fingerprint(spec)
        for cfp, cspec, members in classes:
            if cfp == fp and brute_isomorphic(cspec, spec)[0]:
                members.append(w)
                break
        else:
            classes.append((fp, spec, [w]))
    return [members for _, _, members in classes]


def verify_tiny() -> VerificationReport:
    t0 = time.perf_counter()
    etype = ExponentType(2, (1, 1, 1))
    classes = tiny_partition()
    report = VerificationReport(etype, len(classes), len(TINY_PRESENTATIONS))
    seen = {}
    for members in classes:
        names = {classify_tiny(w).label.family for w in members}
        if len(names) != 1:
            report.violations.append(f"class of {members[0]} gets labels {sorted(names)}")
        name = names.pop()
        if name in seen:
            report.violations.append(f"{name} names two classes")
        seen[name] = members[0]
        report.orbit_sizes[name] = len(members)
        report.matrices_checked += len(members)
    report.elapsed = time.perf_counter() - t0
    return report
