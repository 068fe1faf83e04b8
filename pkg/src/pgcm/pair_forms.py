"""Normal forms of 2x2 matrices under (sub)congruence.

Two 2x2 matrices A, B over F_p are *congruent* when ``P^t A P = B`` for an
invertible P, and *subcongruent* when ``lam * P^t A P = B`` for some
nonzero scalar ``lam`` as well.  Over F_2 the two relations coincide.

Every matrix falls into exactly one of the classes below (odd p):

invertible
    1. ``[[0, 1], [-1, 0]]``
    2. ``[[nu, 1], [-1, 0]]`` with ``nu`` in {1, eta} (congruence) or ``nu = 1``
    3. ``diag(1, nu)`` with ``nu`` in {1, eta}
    4. ``[[1, 1], [-1, r]]`` with ``1 <= r <= p - 2``
singular
    1. ``[[0, 1], [0, 0]]``
    2. ``diag(0, nu)`` with ``nu`` in {1, eta} (congruence) or ``nu = 1``
    3. the zero matrix

For p = 2 the invertible classes are ``I``, ``[[0, 1], [1, 0]]`` and
``[[1, 0], [1, 1]]``; the singular ones are as above with ``nu = 1``.

For odd p the invertible case is decided by the symmetric part ``S`` and the
skew coefficient ``k`` (``A = S + k [[0, 1], [-1, 0]]``): congruence by P
sends S to ``P^t S P`` and k to ``det(P) k``, so ``det(S) / k^2`` is an
invariant whenever ``k != 0``.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from itertools import product

from .finite_field import PrimeContext
from .matrices import det, identity, mat, mat_mul, scale, transpose


class Relation(enum.Enum):
    CONGRUENCE = "congruence"
    SUBCONGRUENCE = "subcongruence"


@dataclass(frozen=True)
class PairLabel:
    invertible: bool
    index: int
    nu: int | None = None
    r: int | None = None

    def __str__(self) -> str:
        s = ("inv" if self.invertible else "sing") + str(self.index)
        extra = []
        if self.nu is not None:
            extra.append(f"nu={self.nu}")
        if self.r is not None:
            extra.append(f"r={self.r}")
        return s + (f"[{','.join(extra)}]" if extra else "")


def _effective(relation: Relation, p: int) -> Relation:
    return Relation.CONGRUENCE if p == 2 else relation


def pair_representative(label: PairLabel, p: int) -> tuple:
    """The normal-form matrix of a class."""
    nu, r = label.nu, label.r
    if label.invertible:
        if p == 2:
            return {1: ((1, 0), (0, 1)), 2: ((0, 1), (1, 0)), 3: ((1, 0), (1, 1))}[label.index]
        rows = {
            1: ((0, 1), (-1, 0)),
            2: ((nu, 1), (-1, 0)),
            3: ((1, 0), (0, nu)),
            4: ((1, 1), (-1, r)),
        }[label.index]
        return mat(rows, p)
    rows = {1: ((0, 1), (0, 0)), 2: ((0, 0), (0, nu)), 3: ((0, 0), (0, 0))}[label.index]
    return mat(rows, p)


def pair_labels(p: int, relation: Relation, which: str = "all") -> list[PairLabel]:
    """All class labels, invertible ones first."""
    F = PrimeContext.get(p)
    rel = _effective(relation, p)
    nus = F.nu_values() if rel is Relation.CONGRUENCE else (1,)
    out: list[PairLabel] = []
    if which in ("all", "invertible"):
        if p == 2:
            out += [PairLabel(True, i) for i in (1, 2, 3)]
        else:
            out.append(PairLabel(True, 1))
            out += [PairLabel(True, 2, nu=v) for v in nus]
            out += [PairLabel(True, 3, nu=v) for v in F.nu_values()]
            out += [PairLabel(True, 4, r=r) for r in range(1, p - 1)]
    if which in ("all", "singular"):
        out.append(PairLabel(False, 1))
        out += [PairLabel(False, 2, nu=v) for v in nus]
        out.append(PairLabel(False, 3))
    return out


def _act(A, P, lam, p):
    return scale(lam, mat_mul(mat_mul(transpose(P), A, p), P, p), p)


# -- symmetric binary forms (odd p) -------------------------------------------

def _diagonalize_sym(S, p):
    """P with ``P^t S P`` diagonal, for a symmetric 2x2 S."""
    (a, b), (_, d) = S
    if a:
        return ((1, -b * pow(a, -1, p) % p), (0, 1))
    if d:
        return ((0, 1), (1, -b * pow(d, -1, p) % p))
    if b:
        # e1 + e2 has value 2b != 0; then clear the cross term
        P0 = ((1, p - 1), (1, 1))
        S0 = _act(S, P0, 1, p)
        return mat_mul(P0, _diagonalize_sym(S0, p), p)
    return identity(2)


def _sym_to(S, target, F: PrimeContext):
    """P with ``P^t S P = diag(1, target)`` for nondegenerate symmetric S.

    ``target`` must have the same square class as ``det(S)``.
    """
    p = F.p
    P0 = _diagonalize_sym(S, p)
    D = _act(S, P0, 1, p)
    a, b = D[0][0], D[1][1]
    binv = pow(b, -1, p)
    for x in range(p):
        t = (1 - a * x * x) * binv % p
        if F.is_square(t):
            y = F.sqrt(t)
            break
    else:  # pragma: no cover - a nondegenerate binary form represents 1
        raise AssertionError("binary form does not represent 1")
    v = (x, y)
    sv = (a * v[0] % p, b * v[1] % p)
    w = (-sv[1] % p, sv[0])
    qw = (a * w[0] * w[0] + b * w[1] * w[1]) % p
    f = F.sqrt(target * pow(qw, -1, p) % p)
    w = (w[0] * f % p, w[1] * f % p)
    P1 = ((v[0], w[0]), (v[1], w[1]))
    return mat_mul(P0, P1, p)


# -- classification -----------------------------------------------------------

def _canonical_singular(A, F: PrimeContext, rel: Relation):
    p = F.p
    if all(x == 0 for row in A for x in row):
        return PairLabel(False, 3), identity(2), 1
    P = identity(2)
    if A[0][1] == 0 and A[1][1] == 0:
        P1 = ((0, 1), (1, 0))
        A = _act(A, P1, 1, p)
        P = P1
    a12, a22 = A[0][1], A[1][1]
    if a12:
        k = A[0][0] * pow(a12, -1, p) % p
    else:
        k = A[1][0] * pow(a22, -1, p) % p
    P2 = ((1, 0), (-k % p, 1))
    A = _act(A, P2, 1, p)
    P = mat_mul(P, P2, p)
    b = A[0][1]
    if b:
        binv = pow(b, -1, p)
        P3 = ((binv, -a22 * binv % p), (0, 1))
        return PairLabel(False, 1), mat_mul(P, P3, p), 1
    a22 = A[1][1]
    if rel is Relation.SUBCONGRUENCE:
        return PairLabel(False, 2, nu=1), P, pow(a22, -1, p)
    nu = F.square_class(a22)
    x = F.sqrt(nu * pow(a22, -1, p) % p)
    return PairLabel(False, 2, nu=nu), mat_mul(P, ((1, 0), (0, x)), p), 1


def _gl2(p):
    for a, b, c, d in product(range(p), repeat=4):
        if (a * d - b * c) % p:
            yield ((a, b), (c, d))


def _canonical_invertible_2(A):
    for idx in (1, 2, 3):
        lab = PairLabel(True, idx)
        R = pair_representative(lab, 2)
        for P in _gl2(2):
            if _act(A, P, 1, 2) == R:
                return lab, P, 1
    raise AssertionError("unreachable: every invertible matrix over F_2 is classified")


def _canonical_invertible_odd(A, F: PrimeContext, rel: Relation):
    p = F.p
    inv2 = pow(2, -1, p)
    k = (A[0][1] - A[1][0]) * inv2 % p
    s12 = (A[0][1] + A[1][0]) * inv2 % p
    S = ((A[0][0], s12), (s12, A[1][1]))
    dS = det(S, p)
    if k == 0:
        nu = F.square_class(dS)
        return PairLabel(True, 3, nu=nu), _sym_to(S, nu, F), 1
    if S == ((0, 0), (0, 0)):
        return PairLabel(True, 1), ((1, 0), (0, pow(k, -1, p))), 1
    if dS == 0:
        lam = 1
        i = 0 if S[0][0] else 1
        sigma = S[i][i]
        if rel is Relation.SUBCONGRUENCE:
            lam = pow(sigma, -1, p)
            sigma, k = 1, k * lam % p
            nu = 1
        else:
            nu = F.square_class(sigma)
        sinv = pow(S[i][i], -1, p)
        u = (S[0][i] * sinv % p, S[1][i] * sinv % p)
        c = F.sqrt(nu * pow(sigma, -1, p) % p)
        if u[0]:
            row1 = (c * pow(u[0], -1, p) % p, 0)
        else:
            row1 = (0, c * pow(u[1], -1, p) % p)
        s = pow(k * c % p, -1, p)
        M = (row1, (-u[1] * s % p, u[0] * s % p))
        return PairLabel(True, 2, nu=nu), transpose(M), lam
    r = dS * pow(k * k, -1, p) % p
    P = _sym_to(S, r, F)
    if det(P, p) != pow(k, -1, p):
        P = mat_mul(P, ((1, 0), (0, p - 1)), p)
    return PairLabel(True, 4, r=r), P, 1


def canonical_pair(A, p: int, relation: Relation = Relation.CONGRUENCE):
    """Classify a 2x2 matrix.

    Returns ``(label, rep, P, lam)`` with ``lam * P^t A P == rep``; ``lam`` is
    always 1 under congruence.
    """
    F = PrimeContext.get(p)
    rel = _effective(relation, p)
    A = mat(A, p)
    if det(A, p) == 0:
        label, P, lam = _canonical_singular(A, F, rel)
    elif p == 2:
        label, P, lam = _canonical_invertible_2(A)
    else:
        label, P, lam = _canonical_invertible_odd(A, F, rel)
    rep = pair_representative(label, p)
    if _act(A, P, lam, p) != rep:
        raise AssertionError(f"pair witness failed for {A} -> {label}")
    return label, rep, P, lam


# -- exhaustive check ---------------------------------------------------------

@dataclass
class PairReport:
    p: int
    relation: Relation
    orbit_count: int
    expected_count: int
    violations: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations and self.orbit_count == self.expected_count


def _pair_orbits(p, rel):
    """Union-find partition of all 2x2 matrices under the relation."""
    F = PrimeContext.get(p)
    g = F.generator
    gens = [((1, 1), (0, 1)), ((1, 0), (1, 1)), ((g, 0), (0, 1))]
    lams = [1]
    if rel is Relation.SUBCONGRUENCE:
        lams.append(g)
    allm = [((a, b), (c, d)) for a, b, c, d in product(range(p), repeat=4)]
    parent = {A: A for A in allm}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for A in allm:
        for P in gens:
            for lam in lams:
                B = _act(A, P, lam, p)
                ra, rb = find(A), find(B)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    return {A: find(A) for A in allm}


def verify_pair_transversal(p: int, relation: Relation = Relation.CONGRUENCE) -> PairReport:
    """Check the class list against the true orbits of all p^4 matrices."""
    t0 = time.perf_counter()
    rel = _effective(relation, p)
    root = _pair_orbits(p, rel)
    labels = pair_labels(p, rel)
    report = PairReport(p, relation, len(set(root.values())), len(labels))
    seen = {}
    for lab in labels:
        R = pair_representative(lab, p)
        r = root[R]
        if r in seen:
            report.violations.append(f"{lab} and {seen[r]} lie in one orbit")
        seen[r] = lab
    for A, r in root.items():
        label, rep, _, _ = canonical_pair(A, p, rel)
        if seen.get(r) != label:
            report.violations.append(f"{A} classified {label}, orbit holds {seen.get(r)}")
    report.elapsed = time.perf_counter() - t0
    return report
