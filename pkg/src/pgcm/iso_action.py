"""The isomorphism action on characteristic matrices.

For an exponent triple m = (m1, m2, m3) with m1 >= m2 >= m3 >= 1 the groups
in question are determined by a 3x3 matrix w over F_p, and two matrices give
isomorphic groups exactly when they lie in one orbit of the action below.

A transform is described by a 3x3 parameter matrix P.  Two matrices are
derived from it: ``X`` keeps the entries ``(i, j)`` with ``i > j`` only when
``m_i == m_j``, and ``X2`` keeps the entries with ``i < j`` only when
``m_i == m_j``; everything else, including the diagonal, is shared.  The
action is

    w  ->  det(X)^-1 * X2 * w * X^t

except in the case ``p = 2, m = (m1, 1, 1)`` where ``x11 = 1`` and the
image picks up the additive correction ``C`` with ``C[1][0] = x22 x23`` and
``C[2][0] = x32 x33`` (0-based indices).  The correction satisfies the
cocycle identity needed for composition to stay inside the family.

The exponent triple only matters through its :class:`CaseTag`, which also
records the p = 2 special cases.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Iterator

import numpy as np

from .finite_field import FieldError, PrimeContext
from .matrices import mul3, det, identity, inverse, mat_mul, transpose

#: Refuse to enumerate more transforms than this.
TRANSFORM_CAP = 10**8
#: Largest matrix space p^9 that is partitioned into orbits.
MATRIX_SPACE_CAP = 2_000_000


class ActionError(ValueError):
    """Invalid exponent type or transform."""


class CapError(RuntimeError):
    """An enumeration would exceed its configured cap."""


class CaseTag(enum.Enum):
    STRICT = "m1>m2>m3"
    TOP = "m1>m2=m3"
    BOTTOM = "m1=m2>m3"
    EQUAL = "m1=m2=m3"
    P2_SPECIAL = "p=2,m=(m1,1,1)"
    P2_TINY = "p=2,m=(1,1,1)"


@dataclass(frozen=True)
class ExponentType:
    p: int
    m: tuple[int, int, int]

    def __post_init__(self):
        try:
            PrimeContext.get(self.p)
        except FieldError as exc:
            raise ActionError(str(exc)) from exc
        m = tuple(int(x) for x in self.m)
        if len(m) != 3 or not (m[0] >= m[1] >= m[2] >= 1):
            raise ActionError(f"need m1 >= m2 >= m3 >= 1, got {self.m}")
        object.__setattr__(self, "m", m)

    @property
    def tag(self) -> CaseTag:
        p, (m1, m2, m3) = self.p, self.m
        if p == 2 and m2 == 1 and m3 == 1:
            return CaseTag.P2_TINY if m1 == 1 else CaseTag.P2_SPECIAL
        if m1 > m2 > m3:
            return CaseTag.STRICT
        if m1 > m2 == m3:
            return CaseTag.TOP
        if m1 == m2 > m3:
            return CaseTag.BOTTOM
        return CaseTag.EQUAL

    @property
    def order_exponent(self) -> int:
        """log_p of the group order."""
        return sum(self.m) + 3

    def __str__(self):
        return f"p={self.p}, m={self.m}"


def in_x(m, i: int, j: int) -> bool:
    return i <= j or m[i] == m[j]


def in_x2(m, i: int, j: int) -> bool:
    return i >= j or m[i] == m[j]


class IsoTransform:
    """An element of the acting group, stored as the pair (X, X2)."""

    __slots__ = ("etype", "X", "X2", "special", "_det_inv", "_right")

    def __init__(self, etype: ExponentType, X, X2):
        self.etype = etype
        self.X = X
        self.X2 = X2
        self.special = etype.tag is CaseTag.P2_SPECIAL
        p = etype.p
        d = det(X, p)
        if d == 0 or det(X2, p) == 0:
            raise ActionError("transform is not invertible")
        self._det_inv = pow(d, -1, p)
        # w -> X2 w (det(X)^-1 X^t), with the right factor precomputed
        s = self._det_inv
        (a, b, c), (d_, e, f), (g, h, i) = X
        self._right = ((s * a % p, s * d_ % p, s * g % p), (s * b % p, s * e % p, s * h % p),
                       (s * c % p, s * f % p, s * i % p))

    @classmethod
    def from_params(cls, etype: ExponentType, P) -> "IsoTransform":
        """Build a transform from its parameter matrix; masked entries are ignored."""
        if etype.tag is CaseTag.P2_TINY:
            raise ActionError("p = 2 with m = (1,1,1) has no matrix action")
        p, m = etype.p, etype.m
        P = tuple(tuple(x % p for x in row) for row in P)
        if etype.tag is CaseTag.P2_SPECIAL and P[0][0] != 1:
            raise ActionError("x11 must be 1")
        X = tuple(tuple(P[i][j] if in_x(m, i, j) else 0 for j in range(3)) for i in range(3))
        X2 = tuple(tuple(P[i][j] if in_x2(m, i, j) else 0 for j in range(3)) for i in range(3))
        return cls(etype, X, X2)

    @classmethod
    def identity(cls, etype: ExponentType) -> "IsoTransform":
        return cls(etype, identity(3), identity(3))

    @property
    def params(self):
        m = self.etype.m
        return tuple(
            tuple(self.X[i][j] if in_x(m, i, j) else self.X2[i][j] for j in range(3))
            for i in range(3)
        )

    def correction(self):
        """Additive term of the p = 2 special action (zero matrix otherwise)."""
        if not self.special:
            return ((0, 0, 0),) * 3
        X = self.X
        return ((0, 0, 0), (X[1][1] * X[1][2] % 2, 0, 0), (X[2][1] * X[2][2] % 2, 0, 0))

    def __eq__(self, other):
        return isinstance(other, IsoTransform) and (self.X, self.X2) == (other.X, other.X2)

    def __hash__(self):
        return hash((self.X, self.X2))

    def __repr__(self):
        return f"IsoTransform(params={self.params})"


def validate(t: IsoTransform) -> None:
    """Raise unless ``t`` respects the masks and sharing rules of its type."""
    m = t.etype.m
    for i in range(3):
        for j in range(3):
            a, b = t.X[i][j], t.X2[i][j]
            if not in_x(m, i, j) and a:
                raise ActionError(f"X[{i}][{j}] must vanish")
            if not in_x2(m, i, j) and b:
                raise ActionError(f"X2[{i}][{j}] must vanish")
            if in_x(m, i, j) and in_x2(m, i, j) and a != b:
                raise ActionError(f"entry ({i},{j}) must be shared")
    if t.special and t.X[0][0] != 1:
        raise ActionError("x11 must be 1")


def apply(t: IsoTransform, w):
    p = t.etype.p
    out = mul3(mul3(t.X2, w, p), t._right, p)
    if t.special:
        X = t.X
        c1 = X[1][1] * X[1][2] & 1
        c2 = X[2][1] * X[2][2] & 1
        if c1 or c2:
            out = (out[0], ((out[1][0] + c1) % 2,) + out[1][1:], ((out[2][0] + c2) % 2,) + out[2][1:])
    return out


def compose(t2: IsoTransform, t1: IsoTransform) -> IsoTransform:
    """The transform acting as ``t1`` followed by ``t2``."""
    p = t1.etype.p
    return IsoTransform(t1.etype, mat_mul(t2.X, t1.X, p), mat_mul(t2.X2, t1.X2, p))


def invert(t: IsoTransform) -> IsoTransform:
    p = t.etype.p
    return IsoTransform(t.etype, inverse(t.X, p), inverse(t.X2, p))


def group_order(etype: ExponentType) -> int:
    """Number of transforms, computed from the mask structure."""
    p, tag = etype.p, etype.tag
    gl2 = (p * p - 1) * (p * p - p)
    gl3 = (p**3 - 1) * (p**3 - p) * (p**3 - p * p)
    if tag is CaseTag.STRICT:
        return (p - 1) ** 3 * p**6
    if tag in (CaseTag.TOP, CaseTag.BOTTOM):
        return gl2 * (p - 1) * p**4
    if tag is CaseTag.EQUAL:
        return gl3
    if tag is CaseTag.P2_SPECIAL:
        return gl2 * p**4
    raise ActionError("p = 2 with m = (1,1,1) has no matrix action")


def enumerate_transforms(etype: ExponentType, cap: int = TRANSFORM_CAP) -> Iterator[IsoTransform]:
    """Every transform of the type, refusing when the count exceeds ``cap``."""
    n = group_order(etype)
    if n > cap:
        raise CapError(f"{n} transforms for {etype} exceeds the cap {cap}")
    p, m = etype.p, etype.m
    free = [(i, j) for i in range(3) for j in range(3) if in_x(m, i, j) or in_x2(m, i, j)]
    special = etype.tag is CaseTag.P2_SPECIAL
    ranges = []
    for i, j in free:
        if special and i == j == 0:
            ranges.append((1,))
        else:
            ranges.append(range(p))
    for vals in product(*ranges):
        P = [[0] * 3 for _ in range(3)]
        for (i, j), v in zip(free, vals):
            P[i][j] = v
        try:
            yield IsoTransform.from_params(etype, P)
        except ActionError:
            continue


def generators(etype: ExponentType) -> list[IsoTransform]:
    """A generating set: diagonal scalings and single elementary entries."""
    p, m = etype.p, etype.m
    gens = []
    if p > 2:
        g = PrimeContext.get(p).generator
        for i in range(3):
            P = [[int(a == b) for b in range(3)] for a in range(3)]
            P[i][i] = g
            gens.append(IsoTransform.from_params(etype, P))
    for i in range(3):
        for j in range(3):
            if i != j and (in_x(m, i, j) or in_x2(m, i, j)):
                P = [[int(a == b) for b in range(3)] for a in range(3)]
                P[i][j] = 1
                gens.append(IsoTransform.from_params(etype, P))
    return gens


def scalar(etype: ExponentType, lam: int) -> IsoTransform:
    return IsoTransform.from_params(etype, [[lam if i == j else 0 for j in range(3)] for i in range(3)])


# -- single-orbit search ------------------------------------------------------

def _check_feasible(etype: ExponentType, cap: int) -> None:
    if etype.tag is CaseTag.P2_TINY:
        raise ActionError("p = 2 with m = (1,1,1) has no matrix action; compare groups instead")
    size = min(etype.p**9, group_order(etype))
    if size > cap:
        raise CapError(
            f"orbit search for {etype} may visit {size} matrices (cap {cap}); "
            "compare classifier labels instead"
        )


def orbit(etype: ExponentType, w, cap: int = MATRIX_SPACE_CAP) -> set:
    _check_feasible(etype, cap)
    gens = generators(etype)
    seen = {w}
    todo = [w]
    while todo:
        u = todo.pop()
        for g in gens:
            v = apply(g, u)
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def orbit_key(etype: ExponentType, w, cap: int = MATRIX_SPACE_CAP):
    """Lexicographically least matrix (row-major) in the orbit of ``w``."""
    return min(orbit(etype, w, cap))


def same_orbit(etype: ExponentType, w1, w2, cap: int = MATRIX_SPACE_CAP):
    """Return ``(True, t)`` with ``apply(t, w1) == w2``, or ``(False, None)``."""
    _check_feasible(etype, cap)
    gens = generators(etype)
    parent = {w1: None}
    queue = deque([w1])
    while queue and w2 not in parent:
        u = queue.popleft()
        for k, g in enumerate(gens):
            v = apply(g, u)
            if v not in parent:
                parent[v] = (u, k)
                queue.append(v)
    if w2 not in parent:
        return False, None
    t = IsoTransform.identity(etype)
    v = w2
    while parent[v] is not None:
        u, k = parent[v]
        t = compose(t, gens[k])
        v = u
    return True, t


# -- vectorised partition of the whole matrix space ---------------------------

def all_digits(p: int) -> np.ndarray:
    """All p^9 matrices as an (N, 9) array of row-major digits, code order."""
    n = p**9
    codes = np.arange(n, dtype=np.int64)
    out = np.empty((n, 9), dtype=np.int64)
    for k in range(8, -1, -1):
        out[:, k] = codes % p
        codes //= p
    return out


def _image_codes(t: IsoTransform, digits: np.ndarray) -> np.ndarray:
    p = t.etype.p
    M = (np.kron(np.array(t.X2), np.array(t.X)) * t._det_inv) % p
    img = digits @ M.T
    if t.special:
        C = np.array(t.correction()).reshape(9)
        img = img + C
    img %= p
    weights = p ** np.arange(8, -1, -1, dtype=np.int64)
    return img @ weights


def orbit_labels(etype: ExponentType, cap: int = MATRIX_SPACE_CAP) -> np.ndarray:
    """For each code, the least code in its orbit (i.e. the orbit key)."""
    _check_feasible(etype, cap)
    if etype.p**9 > cap:
        raise CapError(f"{etype.p}^9 matrices exceeds the cap {cap}")
    digits = all_digits(etype.p)
    images = [_image_codes(g, digits) for g in generators(etype)]
    del digits
    lab = np.arange(etype.p**9, dtype=np.int64)
    while True:
        old = lab.copy()
        for img in images:
            m = np.minimum(lab, lab[img])
            m[img] = np.minimum(m[img], m)
            lab = m
        while True:
            jumped = lab[lab]
            if np.array_equal(jumped, lab):
                break
            lab = jumped
        if np.array_equal(lab, old):
            return lab
