"""Concrete p-groups built from a characteristic matrix.

For an exponent type (p, m) and a 3x3 matrix w over F_p, ``G(w)`` is the
group generated by a1, a2, a3 subject to

* ``x = [a2, a3]``, ``y = [a3, a1]``, ``z = [a1, a2]`` central of order p,
* ``a_k^(p^m_k) = x^w[k][0] * y^w[k][1] * z^w[k][2]``,

with the commutator convention ``[g, h] = g^-1 h^-1 g h``.  Its order is
``p^(m1 + m2 + m3 + 3)``; every element has the normal form

    a1^i1 a2^i2 a3^i3 x^e1 y^e2 z^e3,   0 <= i_k < p^m_k,  0 <= e_k < p,

stored as the tuple ``(i1, i2, i3, e1, e2, e3)``.

Everything here is a brute-force oracle: element-level subgroup
enumeration, isomorphism search by generator images, and the minimal and
maximal index of minimal non-abelian subgroups.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import NamedTuple

import numpy as np

from .iso_action import ExponentType
from .matrices import rank, solve

#: Element-level lattice work is refused above this order.
ORACLE_ORDER_CAP = 3**6
#: Full associativity is checked only up to this order.
ASSOC_FULL_CAP = 2**8


class GroupError(ValueError):
    pass


class GroupElement(NamedTuple):
    i1: int
    i2: int
    i3: int
    e1: int
    e2: int
    e3: int


def _cross(u, v, p):
    return (
        (u[1] * v[2] - u[2] * v[1]) % p,
        (u[2] * v[0] - u[0] * v[2]) % p,
        (u[0] * v[1] - u[1] * v[0]) % p,
    )


class GroupSpec:
    """The group G(w) for an exponent type and characteristic matrix."""

    def __init__(self, etype: ExponentType, w):
        self.etype = etype
        self.p = p = etype.p
        self.m = etype.m
        self.w = tuple(tuple(int(x) % p for x in row) for row in w)
        self.N = tuple(p**k for k in self.m)
        self.order = p ** etype.order_exponent

    def __repr__(self):
        return f"GroupSpec({self.etype}, w={self.w})"

    # -- arithmetic ---------------------------------------------------------

    @property
    def identity(self) -> GroupElement:
        return GroupElement(0, 0, 0, 0, 0, 0)

    def generator(self, k: int) -> GroupElement:
        v = [0] * 6
        v[k] = 1
        return GroupElement(*v)

    @property
    def generators(self) -> tuple[GroupElement, GroupElement, GroupElement]:
        return (self.generator(0), self.generator(1), self.generator(2))

    def central(self, e) -> GroupElement:
        p = self.p
        return GroupElement(0, 0, 0, e[0] % p, e[1] % p, e[2] % p)

    def mul(self, g, h) -> GroupElement:
        p, (N1, N2, N3), w = self.p, self.N, self.w
        i1, i2, i3, e1, e2, e3 = g
        j1, j2, j3, f1, f2, f3 = h
        c1 = e1 + f1 - i3 * j2
        c2 = e2 + f2 + i3 * j1
        c3 = e3 + f3 - i2 * j1
        k1, k2, k3 = i1 + j1, i2 + j2, i3 + j3
        if k1 >= N1:
            k1 -= N1
            c1 += w[0][0]; c2 += w[0][1]; c3 += w[0][2]
        if k2 >= N2:
            k2 -= N2
            c1 += w[1][0]; c2 += w[1][1]; c3 += w[1][2]
        if k3 >= N3:
            k3 -= N3
            c1 += w[2][0]; c2 += w[2][1]; c3 += w[2][2]
        return GroupElement(k1, k2, k3, c1 % p, c2 % p, c3 % p)

    def inv(self, g) -> GroupElement:
        N1, N2, N3 = self.N
        h = GroupElement((-g[0]) % N1, (-g[1]) % N2, (-g[2]) % N3, 0, 0, 0)
        r = self.mul(g, h)
        return self.mul(h, self.central((-r[3], -r[4], -r[5])))

    def power(self, g, n: int) -> GroupElement:
        if n < 0:
            g, n = self.inv(g), -n
        out = self.identity
        while n:
            if n & 1:
                out = self.mul(out, g)
            g = self.mul(g, g)
            n >>= 1
        return out

    def commutator(self, g, h) -> GroupElement:
        return self.mul(self.mul(self.inv(g), self.inv(h)), self.mul(g, h))

    def element_order(self, g) -> int:
        n, h = 1, g
        while h != self.identity:
            h = self.mul(h, g)
            n += 1
        return n

    # -- enumeration and coding ---------------------------------------------

    def encode(self, g) -> int:
        p, (N1, N2, N3) = self.p, self.N
        return ((((g[0] * N2 + g[1]) * N3 + g[2]) * p + g[3]) * p + g[4]) * p + g[5]

    def decode(self, c: int) -> GroupElement:
        p, (N1, N2, N3) = self.p, self.N
        c, e3 = divmod(c, p)
        c, e2 = divmod(c, p)
        c, e1 = divmod(c, p)
        c, i3 = divmod(c, N3)
        i1, i2 = divmod(c, N2)
        return GroupElement(i1, i2, i3, e1, e2, e3)

    def elements(self):
        p, (N1, N2, N3) = self.p, self.N
        for t in product(range(N1), range(N2), range(N3), range(p), range(p), range(p)):
            yield GroupElement(*t)

    def abelianization_reps(self):
        """One element per coset of G' (the central part set to zero)."""
        N1, N2, N3 = self.N
        for t in product(range(N1), range(N2), range(N3)):
            yield GroupElement(*t, 0, 0, 0)

    @cached_property
    def table(self) -> np.ndarray:
        """Multiplication table on element codes (vectorised, small orders only)."""
        if self.order > 2**12:
            raise GroupError(f"multiplication table for order {self.order} is too large")
        p, (N1, N2, N3), w = self.p, self.N, np.array(self.w)
        codes = np.arange(self.order)
        c = codes.copy()
        e3 = c % p; c //= p
        e2 = c % p; c //= p
        e1 = c % p; c //= p
        i3 = c % N3; c //= N3
        i2 = c % N2; i1 = c // N2
        G = [a[:, None] for a in (i1, i2, i3, e1, e2, e3)]
        H = [a[None, :] for a in (i1, i2, i3, e1, e2, e3)]
        c1 = G[3] + H[3] - G[2] * H[1]
        c2 = G[4] + H[4] + G[2] * H[0]
        c3 = G[5] + H[5] - G[1] * H[0]
        ks = []
        for k, Nk in enumerate((N1, N2, N3)):
            s = G[k] + H[k]
            carry = s >= Nk
            ks.append(np.where(carry, s - Nk, s))
            c1 = c1 + carry * w[k][0]
            c2 = c2 + carry * w[k][1]
            c3 = c3 + carry * w[k][2]
        return ((((ks[0] * N2 + ks[1]) * N3 + ks[2]) * p + c1 % p) * p + c2 % p) * p + c3 % p

    # -- structure checks ---------------------------------------------------

    def verify_consistency(self, samples: int = 100_000, seed: int = 0) -> list[str]:
        """Check the group axioms and the defining properties; returns problems found."""
        problems = []
        rng = np.random.default_rng(seed)
        if self.order <= ASSOC_FULL_CAP:
            T = self.table
            lhs = T[T[:, :, None], np.arange(self.order)[None, None, :]]
            rhs = T[np.arange(self.order)[:, None, None], T[None, :, :]]
            if not np.array_equal(lhs, rhs):
                problems.append("multiplication is not associative")
        else:
            dec = self.decode
            for _ in range(samples):
                a, b, c = (dec(int(x)) for x in rng.integers(0, self.order, 3))
                if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                    problems.append(f"associativity fails at {a}, {b}, {c}")
                    break
        a1, a2, a3 = self.generators
        p = self.p
        x, y, z = self.central((1, 0, 0)), self.central((0, 1, 0)), self.central((0, 0, 1))
        if (self.commutator(a2, a3), self.commutator(a3, a1), self.commutator(a1, a2)) != (x, y, z):
            problems.append("commutators of the generators are not x, y, z")
        for k, a in enumerate(self.generators):
            pw = self.power(a, self.N[k])
            if pw != self.central(self.w[k]):
                problems.append(f"a{k + 1}^{self.N[k]} != row {k + 1} of w")
            if pw[:3] != (0, 0, 0):
                problems.append(f"a{k + 1} has wrong order modulo G'")
        # Phi(G) = G' G^p is generated by x, y, z and the a_k^p; all must be central.
        phi_gens = [x, y, z] + [self.power(a, p) for a in self.generators]
        for f in phi_gens:
            for a in self.generators:
                if self.commutator(f, a) != self.identity:
                    problems.append(f"{f} is not central")
        for f in (x, y, z):
            if self.power(f, p) != self.identity:
                problems.append("G' is not elementary abelian")
        derived = self.closure([x, y, z])
        if len(derived) != p**3:
            problems.append("G' does not have order p^3")
        return problems

    # -- subgroups ----------------------------------------------------------

    def closure(self, gens) -> frozenset:
        """Subgroup generated by ``gens`` as a set of elements."""
        gens = [GroupElement(*g) for g in gens]
        seen = {self.identity}
        todo = [self.identity]
        while todo:
            u = todo.pop()
            for g in gens:
                v = self.mul(u, g)
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
        return frozenset(seen)

    def is_normal(self, H) -> bool:
        H = frozenset(H)
        for a in self.generators:
            ai = self.inv(a)
            for h in H:
                if self.mul(self.mul(ai, h), a) not in H:
                    return False
        return True


@dataclass(frozen=True)
class SubgroupHandle:
    generators: tuple
    elements: frozenset = field(repr=False, compare=False)

    @property
    def order(self) -> int:
        return len(self.elements)


def subgroup_closure(spec: GroupSpec, gens) -> SubgroupHandle:
    return SubgroupHandle(tuple(gens), spec.closure(gens))


def is_normal(spec: GroupSpec, H: SubgroupHandle) -> bool:
    return spec.is_normal(H.elements)


def _log_p(n: int, p: int) -> int:
    k = 0
    while n > 1:
        if n % p:
            raise GroupError(f"{n} is not a power of {p}")
        n //= p
        k += 1
    return k


# -- minimal non-abelian subgroups --------------------------------------------

def enumerate_a1(spec: GroupSpec, cap: int = ORACLE_ORDER_CAP) -> list[SubgroupHandle]:
    """Every minimal non-abelian subgroup, by closing non-commuting pairs.

    In a group of class 2 a two-generator subgroup is minimal non-abelian
    exactly when its generators do not commute, and any non-commuting pair
    inside such a subgroup generates all of it.
    """
    if spec.order > cap:
        raise GroupError(f"order {spec.order} exceeds the element-level cap {cap}")
    elems = list(spec.elements())
    covered = set()
    found = []
    for g in elems:
        for h in elems:
            if (g, h) in covered:
                continue
            if spec.commutator(g, h) == spec.identity:
                continue
            H = spec.closure([g, h])
            found.append(SubgroupHandle((g, h), H))
            Hl = list(H)
            for u in Hl:
                for v in Hl:
                    covered.add((u, v))
    return found


@dataclass
class A1Profile:
    """Index exponents of minimal non-abelian subgroups."""

    i_min: int
    i_max: int
    all_contain_derived: bool
    min_witness: tuple
    max_witness: tuple
    non_normal_witness: tuple | None = None


def a1_profile(spec: GroupSpec) -> A1Profile:
    """Minimal and maximal index of minimal non-abelian subgroups.

    A minimal non-abelian subgroup H = <g, h> of G(w) satisfies
    ``H = {g^a h^b [g,h]^k}``, so ``H n G'`` is spanned by ``[g, h]`` together
    with the central elements ``(g^p)^a (h^p)^b`` that vanish modulo G'.
    Both that intersection and ``HG'/G'`` depend only on the images of g and h
    modulo G', which reduces the search to pairs of coset representatives.
    """
    p, N = spec.p, spec.N
    reps = list(spec.abelianization_reps())
    info = []
    for u in reps:
        cyc = set()
        t = (0, 0, 0)
        while True:
            cyc.add(t)
            t = tuple((t[k] + u[k]) % N[k] for k in range(3))
            if t == (0, 0, 0):
                break
        U = spec.power(u, p)
        powers = [spec.identity]
        while True:
            nxt = spec.mul(powers[-1], U)
            powers.append(nxt)
            if nxt[:3] == (0, 0, 0):
                break
        info.append((u, frozenset(cyc), len(cyc), powers))
    total = spec.etype.order_exponent
    best_min = best_max = None
    all_contain = True
    non_normal = None
    for a, (u, cyc_u, ord_u, pu) in enumerate(info):
        umod = tuple(x % p for x in u[:3])
        for (v, cyc_v, ord_v, pv) in info[a + 1:]:
            comm = _cross(umod, tuple(x % p for x in v[:3]), p)
            if comm == (0, 0, 0):
                continue
            b, t = 1, tuple(v[k] % N[k] for k in range(3))
            while t not in cyc_u:
                b += 1
                t = tuple((t[k] + v[k]) % N[k] for k in range(3))
            k_order = ord_u * b
            vecs = [comm, pu[-1][3:], pv[-1][3:]]
            for x in pu[:-1]:
                for y in pv[:-1]:
                    if all((x[k] + y[k]) % N[k] == 0 for k in range(3)):
                        vecs.append(spec.mul(x, y)[3:])
            r = rank(vecs, p)
            idx = total - _log_p(k_order, p) - r
            if best_min is None or idx < best_min[0]:
                best_min = (idx, (u, v))
            if best_max is None or idx > best_max[0]:
                best_max = (idx, (u, v))
            if r < 3 and all_contain:
                all_contain = False
                non_normal = (u, v)
    if best_min is None:
        raise GroupError("group is abelian")
    return A1Profile(best_min[0], best_max[0], all_contain, best_min[1], best_max[1], non_normal)


def oracle_invariants(spec: GroupSpec) -> tuple[int, int]:
    """``(i_min, i_max)``: log_p of the minimal and maximal A1-subgroup index."""
    prof = a1_profile(spec)
    return prof.i_min, prof.i_max


# -- metahamiltonian test -----------------------------------------------------

class MetaMode(enum.Enum):
    FULL = "full"
    NECESSARY = "necessary"


@dataclass
class MetaResult:
    value: bool
    mode: MetaMode
    witness: object = None
    subgroups_examined: int = 0


def _subgroup_lattice_search(spec: GroupSpec):
    """Walk all subgroups, stopping at a non-normal non-abelian one."""
    T = spec.table.tolist()
    n = spec.order
    gen_codes = [spec.encode(a) for a in spec.generators]
    inv = [0] * n
    for a in range(n):
        inv[a] = T[a].index(0)

    def generated(gens):
        elems = {0}
        todo = [0]
        while todo:
            u = todo.pop()
            for g in gens:
                v = T[u][g]
                if v not in elems:
                    elems.add(v)
                    todo.append(v)
        return frozenset(elems)

    def normal(H):
        for a in gen_codes:
            ai = inv[a]
            for h in H:
                if T[T[ai][h]][a] not in H:
                    return False
        return True

    def abelian(gens):
        return all(T[a][b] == T[b][a] for a in gens for b in gens)

    seen = {}
    layer = []
    for g in range(n):
        H = generated([g])
        if H not in seen:
            seen[H] = (g,)
            layer.append(H)
    while layer:
        nxt = []
        for H in layer:
            gens = seen[H]
            done = set(H)
            for g in range(n):
                if g in done:
                    continue
                J = generated(list(gens) + [g])
                done |= J
                if J not in seen:
                    seen[J] = tuple(gens) + (g,)
                    nxt.append(J)
        layer = nxt
    examined = 0
    for H, gens in seen.items():
        examined += 1
        if not abelian(gens) and not normal(H):
            return gens, examined
    return None, examined


def metahamiltonian_oracle(spec: GroupSpec, mode: MetaMode = MetaMode.NECESSARY,
                           cap: int = 2**6) -> MetaResult:
    """Whether every non-abelian subgroup is normal.

    FULL walks the whole subgroup lattice (orders up to ``cap``).  NECESSARY
    only checks that every minimal non-abelian subgroup contains G' (which
    forces it to be normal).
    """
    if mode is MetaMode.FULL:
        if spec.order > cap:
            raise GroupError(f"order {spec.order} exceeds the lattice cap {cap}")
        gens, examined = _subgroup_lattice_search(spec)
        witness = None if gens is None else tuple(spec.decode(c) for c in gens)
        return MetaResult(gens is None, mode, witness, examined)
    prof = a1_profile(spec)
    return MetaResult(prof.all_contain_derived, mode, prof.non_normal_witness)


# -- isomorphism --------------------------------------------------------------

def _relations_hold(spec: GroupSpec, w, images) -> bool:
    g1, g2, g3 = images
    X = spec.commutator(g2, g3)
    Y = spec.commutator(g3, g1)
    Z = spec.commutator(g1, g2)
    comms = (X, Y, Z)
    for k, g in enumerate(images):
        target = spec.identity
        for c, e in zip(comms, w[k]):
            if e:
                target = spec.mul(target, spec.power(c, e))
        if spec.power(g, spec.N[k]) != target:
            return False
    return True


def _reps_by_order(spec: GroupSpec):
    """Coset representatives of G' grouped by their order modulo G'."""
    out = {}
    for u in spec.abelianization_reps():
        o = 1
        for k in range(3):
            if u[k]:
                o = max(o, spec.N[k] // np.gcd(u[k], spec.N[k]))
        out.setdefault(o, []).append(u)
    return out


def brute_isomorphic(A: GroupSpec, B: GroupSpec):
    """Search for an isomorphism A -> B by images of a1, a2, a3.

    Returns ``(True, (g1, g2, g3))`` with the images in B, or ``(False, None)``.
    Since G(w) is defined by its presentation, images satisfying the power
    relations and independent modulo the Frattini subgroup give an
    isomorphism; representatives modulo B' suffice because changing an
    image by a central element of order p leaves the relations unchanged.
    """
    if A.etype != B.etype:
        return False, None
    p = B.p
    by_order = _reps_by_order(B)
    cands = [by_order.get(n, []) for n in A.N]
    for g1 in cands[0]:
        for g2 in cands[1]:
            if _cross(tuple(x % p for x in g1[:3]), tuple(x % p for x in g2[:3]), p) == (0, 0, 0):
                continue
            for g3 in cands[2]:
                M = [tuple(x % p for x in g[:3]) for g in (g1, g2, g3)]
                if rank(M, p) < 3:
                    continue
                if _relations_hold(B, A.w, (g1, g2, g3)):
                    return True, (g1, g2, g3)
    return False, None


def char_matrix_for(spec: GroupSpec, images):
    """The characteristic matrix of ``spec`` relative to generators ``images``."""
    p = spec.p
    g1, g2, g3 = images
    basis = [spec.commutator(g2, g3)[3:], spec.commutator(g3, g1)[3:], spec.commutator(g1, g2)[3:]]
    cols = [[basis[c][r] for c in range(3)] for r in range(3)]
    rows = []
    for k, g in enumerate(images):
        pw = spec.power(g, spec.N[k])
        if pw[:3] != (0, 0, 0):
            raise GroupError("generator has the wrong order modulo G'")
        sol = solve(cols, pw[3:], p)
        if sol is None:
            raise GroupError("commutators of the chosen generators do not span G'")
        rows.append(tuple(sol))
    return tuple(rows)


def extract_char_matrix(source, p: int | None = None, m=None):
    """Characteristic matrix of a group.

    ``source`` is either a :class:`GroupSpec`, in which case a generating
    triple of the right type is found by search (not assumed to be the
    defining one), or a :class:`Presentation`.
    """
    if isinstance(source, Presentation):
        return source.char_matrix
    spec = source
    by_order = _reps_by_order(spec)
    cands = [by_order.get(n, []) for n in spec.N]
    for g1 in cands[0]:
        for g2 in cands[1]:
            for g3 in cands[2]:
                M = [tuple(x % spec.p for x in g[:3]) for g in (g1, g2, g3)]
                if rank(M, spec.p) < 3:
                    continue
                if (g1[:3], g2[:3], g3[:3]) == ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                    continue  # prefer a triple other than the defining one
                return char_matrix_for(spec, (g1, g2, g3)), (g1, g2, g3)
    return spec.w, spec.generators


# -- presentations ------------------------------------------------------------

_TOKEN = re.compile(r"\s*(\[|\]|,|\^|-?\d+|[A-Za-z_][A-Za-z_0-9]*|\(|\)|\*)")


def _tokenize(s: str):
    pos, out = 0, []
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            raise GroupError(f"cannot parse {s[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _WordParser:
    """word := factor*;  factor := atom ['^' int];  atom := name | '1' | '[' word ',' word ']' | '(' word ')'"""

    def __init__(self, tokens):
        self.t = tokens
        self.i = 0

    def peek(self):
        return self.t[self.i] if self.i < len(self.t) else None

    def take(self, expect=None):
        tok = self.peek()
        if tok is None or (expect is not None and tok != expect):
            raise GroupError(f"expected {expect!r}, got {tok!r}")
        self.i += 1
        return tok

    def word(self):
        factors = []
        while self.peek() not in (None, ",", "]", ")"):
            if self.peek() == "*":
                self.take()
                continue
            factors.append(self.factor())
        return ("word", factors)

    def factor(self):
        tok = self.take()
        if tok == "[":
            a = self.word()
            self.take(",")
            b = self.word()
            self.take("]")
            atom = ("comm", a, b)
        elif tok == "(":
            atom = self.word()
            self.take(")")
        elif tok == "1":
            atom = ("word", [])
        elif re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", tok):
            atom = ("gen", tok)
        else:
            raise GroupError(f"unexpected token {tok!r}")
        if self.peek() == "^":
            self.take()
            e = self.take()
            if e == "(":
                e = self.take()
                self.take(")")
            atom = ("pow", atom, int(e))
        return atom


class Presentation:
    """A presentation of a group in the class, e.g.

    ``"a1^4=1; a2^4=x; [a2,a3]=x; [a3,a1]=y; [a1,a2]=z"``.

    Relations are separated by ``;`` and may chain equalities
    (``[a,b]=a^2=b^2``).  Three names are the generators a1, a2, a3 (by
    default ``a1, a2, a3`` if present, else ``a, b, c``); every other name
    denotes an element of G'.  Words that must lie in G' may use powers
    ``g^(k p^m_g)`` of generators, other names, commutators and ``1``.
    """

    def __init__(self, text: str, p: int, m, generators=None):
        self.text = text
        self.etype = ExponentType(p, tuple(m))
        self.p = p
        rels = [r for r in re.split(r";|\n", text) if r.strip()]
        self.relations = []
        names = set(re.findall(r"[A-Za-z_][A-Za-z_0-9]*", text))
        if generators is None:
            generators = ("a1", "a2", "a3") if "a1" in names else ("a", "b", "c")
        self.gens = tuple(generators)
        self.aux = sorted(names - set(self.gens))
        for r in rels:
            sides = [_WordParser(_tokenize(s)).word() for s in r.split("=")]
            if len(sides) < 2:
                raise GroupError(f"relation {r!r} has no '='")
            self.relations.append(sides)
        self.char_matrix, self.aux_values = self._solve()

    # linear forms: dict var -> 3x3 block is overkill; use vectors over unknowns
    def _n_unknowns(self):
        return 3 * (3 + len(self.aux))

    def _abelian_image(self, node):
        """Exponent sums of the generators modulo p (image in G/Phi)."""
        p = self.p
        kind = node[0]
        if kind == "word":
            out = [0, 0, 0]
            for f in node[1]:
                v = self._abelian_image(f)
                out = [(a + b) % p for a, b in zip(out, v)]
            return out
        if kind == "gen":
            return [int(node[1] == g) for g in self.gens]
        if kind == "pow":
            return [x * node[2] % p for x in self._abelian_image(node[1])]
        return [0, 0, 0]

    def _linear(self, node):
        """Value of a G'-valued word as (constant 3-vector, 3 x n coefficient rows)."""
        p = self.p
        n = self._n_unknowns()
        const = [0, 0, 0]
        coef = [[0] * n for _ in range(3)]
        kind = node[0]
        if kind == "word":
            for f in node[1]:
                c2, k2 = self._linear(f)
                const = [(a + b) % p for a, b in zip(const, c2)]
                coef = [[(a + b) % p for a, b in zip(r1, r2)] for r1, r2 in zip(coef, k2)]
            return const, coef
        if kind == "comm":
            u, v = self._abelian_image(node[1]), self._abelian_image(node[2])
            return list(_cross(u, v, p)), coef
        if kind == "gen":
            return self._linear(("pow", node, 1))
        if kind == "pow":
            base, e = node[1], node[2]
            if base[0] == "gen" and base[1] in self.gens:
                k = self.gens.index(base[1])
                Nk = self.p ** self.etype.m[k]
                if e % Nk:
                    raise GroupError(f"{base[1]}^{e} does not lie in G'")
                q = (e // Nk) % p
                for r in range(3):
                    coef[r][3 * k + r] = q
                return const, coef
            if base[0] == "gen":
                a = 3 + self.aux.index(base[1])
                for r in range(3):
                    coef[r][3 * a + r] = e % p
                return const, coef
            c2, k2 = self._linear(base)
            return [x * e % p for x in c2], [[x * e % p for x in row] for row in k2]
        raise GroupError(f"cannot evaluate {node!r}")

    def _solve(self):
        p = self.p
        A, b = [], []
        for sides in self.relations:
            lhs = self._linear(sides[0])
            for other in sides[1:]:
                rhs = self._linear(other)
                for r in range(3):
                    A.append([(x - y) % p for x, y in zip(lhs[1][r], rhs[1][r])])
                    b.append((rhs[0][r] - lhs[0][r]) % p)
        n = self._n_unknowns()
        sol = solve(A, b, p) if A else [0] * n
        if sol is None:
            raise GroupError("relations are inconsistent")
        # the rows of w must be determined uniquely: no kernel vector may touch them
        for j in range(9):
            e = [0] * n
            e[j] = 1
            if solve(A + [e], b + [(sol[j] + 1) % p], p) is not None:
                raise GroupError("relations do not determine the powers of the generators")
        w = tuple(tuple(sol[3 * k + r] for r in range(3)) for k in range(3))
        aux = {name: tuple(sol[3 * (3 + i) + r] for r in range(3)) for i, name in enumerate(self.aux)}
        return w, aux

    def spec(self) -> GroupSpec:
        return GroupSpec(self.etype, self.char_matrix)

    def check(self, spec: GroupSpec | None = None) -> bool:
        """Evaluate every relation in the constructed group."""
        spec = spec or self.spec()
        env = {g: spec.generators[k] for k, g in enumerate(self.gens)}
        env.update({name: spec.central(v) for name, v in self.aux_values.items()})

        def ev(node):
            kind = node[0]
            if kind == "word":
                out = spec.identity
                for f in node[1]:
                    out = spec.mul(out, ev(f))
                return out
            if kind == "gen":
                return env[node[1]]
            if kind == "pow":
                return spec.power(ev(node[1]), node[2])
            if kind == "comm":
                return spec.commutator(ev(node[1]), ev(node[2]))
            raise GroupError(node)

        return all(len({ev(s) for s in sides}) == 1 for sides in self.relations)
