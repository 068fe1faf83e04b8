"""Small dense matrices over F_p.

Matrices are tuples of row tuples with entries already reduced into
``range(p)``; a 3x3 matrix is ``((a, b, c), (d, e, f), (g, h, i))``.  Being
plain tuples they hash, compare and sort lexicographically in row-major
order, which is the ordering used for orbit keys.

The text form accepted by :func:`parse_matrix` is row-major with ``;``
between rows and ``,`` between entries, e.g. ``"0,0,0;0,0,1;0,2,0"``.
Negative entries are reduced, so ``-1`` is stored as ``p - 1``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

Mat = tuple  # tuple[tuple[int, ...], ...]
Mat2 = tuple
Mat3 = tuple


class MatrixParseError(ValueError):
    pass


def mat(rows: Iterable[Iterable[int]], p: int) -> Mat:
    """Build a reduced matrix from nested iterables."""
    return tuple(tuple(int(x) % p for x in row) for row in rows)


def zero(n: int) -> Mat:
    return tuple((0,) * n for _ in range(n))


_I3 = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def identity(n: int) -> Mat:
    if n == 3:
        return _I3
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def diag(entries: Sequence[int], p: int) -> Mat:
    n = len(entries)
    return tuple(tuple(entries[i] % p if i == j else 0 for j in range(n)) for i in range(n))


def transpose(A: Mat) -> Mat:
    return tuple(zip(*A))


def mul3(A: Mat3, B: Mat3, p: int) -> Mat3:
    # unrolled: this is the inner loop of every classification step
    (a0, a1, a2), (a3, a4, a5), (a6, a7, a8) = A
    (b0, b1, b2), (b3, b4, b5), (b6, b7, b8) = B
    return (
        ((a0 * b0 + a1 * b3 + a2 * b6) % p, (a0 * b1 + a1 * b4 + a2 * b7) % p, (a0 * b2 + a1 * b5 + a2 * b8) % p),
        ((a3 * b0 + a4 * b3 + a5 * b6) % p, (a3 * b1 + a4 * b4 + a5 * b7) % p, (a3 * b2 + a4 * b5 + a5 * b8) % p),
        ((a6 * b0 + a7 * b3 + a8 * b6) % p, (a6 * b1 + a7 * b4 + a8 * b7) % p, (a6 * b2 + a7 * b5 + a8 * b8) % p),
    )


def mat_mul(A: Mat, B: Mat, p: int) -> Mat:
    if len(A) == 3 and len(B) == 3 and len(A[0]) == 3 and len(B[0]) == 3:
        return mul3(A, B, p)
    Bt = tuple(zip(*B))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) % p for col in Bt) for row in A)


def mat_add(A: Mat, B: Mat, p: int) -> Mat:
    return tuple(tuple((a + b) % p for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def scale(c: int, A: Mat, p: int) -> Mat:
    return tuple(tuple(c * a % p for a in row) for row in A)


def det(A: Mat, p: int) -> int:
    n = len(A)
    if n == 1:
        return A[0][0] % p
    if n == 2:
        return (A[0][0] * A[1][1] - A[0][1] * A[1][0]) % p
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = A
        return (a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)) % p
    raise ValueError("only 1x1, 2x2 and 3x3 matrices are supported")


def rank(A: Mat, p: int) -> int:
    """Rank by Gaussian elimination, pivoting on the first nonzero entry."""
    rows = [list(r) for r in A]
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        for i in range(r + 1, len(rows)):
            f = rows[i][c] * inv % p
            if f:
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def adjugate3(A: Mat3, p: int) -> Mat3:
    """Classical adjoint, so that ``A * adj(A) = det(A) * I``."""
    (a, b, c), (d, e, f), (g, h, i) = A
    return (
        ((e * i - f * h) % p, (c * h - b * i) % p, (b * f - c * e) % p),
        ((f * g - d * i) % p, (a * i - c * g) % p, (c * d - a * f) % p),
        ((d * h - e * g) % p, (b * g - a * h) % p, (a * e - b * d) % p),
    )


def adjugate2(A: Mat2, p: int) -> Mat2:
    (a, b), (c, d) = A
    return ((d % p, -b % p), (-c % p, a % p))


def inverse(A: Mat, p: int) -> Mat:
    d = det(A, p)
    if d == 0:
        raise ValueError("matrix is singular")
    adj = adjugate2(A, p) if len(A) == 2 else adjugate3(A, p)
    return scale(pow(d, -1, p), adj, p)


def block(A: Mat, rows: Sequence[int], cols: Sequence[int]) -> Mat:
    return tuple(tuple(A[i][j] for j in cols) for i in rows)


def parse_matrix(text: str, p: int, n: int = 3) -> Mat:
    """Parse ``"a,b,c;d,e,f;g,h,i"`` into a reduced n x n matrix."""
    rows = [r for r in text.strip().split(";")]
    if len(rows) != n:
        raise MatrixParseError(f"expected {n} rows separated by ';', got {len(rows)}")
    out = []
    for r in rows:
        parts = [x.strip() for x in r.split(",")]
        if len(parts) != n:
            raise MatrixParseError(f"expected {n} entries in row {r!r}")
        try:
            out.append(tuple(int(x) % p for x in parts))
        except ValueError as exc:
            raise MatrixParseError(f"bad entry in row {r!r}") from exc
    return tuple(out)


def format_matrix(A: Mat) -> str:
    return ";".join(",".join(str(x) for x in row) for row in A)


def to_code(A: Mat3, p: int) -> int:
    """Row-major base-p code; numeric order equals lexicographic order."""
    c = 0
    for row in A:
        for x in row:
            c = c * p + x
    return c


def from_code(code: int, p: int, n: int = 3) -> Mat:
    digits = []
    for _ in range(n * n):
        code, r = divmod(code, p)
        digits.append(r)
    digits.reverse()
    return tuple(tuple(digits[i * n:(i + 1) * n]) for i in range(n))


def all_matrices(p: int, n: int = 3):
    """Every n x n matrix over F_p, in lexicographic order."""
    for code in range(p ** (n * n)):
        yield from_code(code, p, n)


def solve(A: Sequence[Sequence[int]], b: Sequence[int], p: int) -> list[int] | None:
    """One solution of ``A x = b`` over F_p, or None if inconsistent.

    ``A`` may be any rectangular matrix; free variables are set to zero.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    rows = [[x % p for x in A[i]] + [b[i] % p] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(rows[i][n] for i in range(r, m)):
        return None
    x = [0] * n
    for i, c in enumerate(pivots):
        x[c] = rows[i][n]
    return x
