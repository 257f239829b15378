"""Dense linear algebra over Q(i) for small constant matrices."""

from __future__ import annotations

from .errors import DimensionError
from .scalars import ONE, ZERO, as_gr

__all__ = ["to_matrix", "det", "inverse", "rank", "identity"]


def to_matrix(rows):
    out = [[as_gr(a) for a in r] for r in rows]
    widths = {len(r) for r in out}
    if len(widths) > 1:
        raise DimensionError("ragged matrix")
    return out


def identity(n: int):
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def _eliminate(a, want_inverse=False):
    """Gauss-Jordan with exact pivots. Returns (rank, det, inverse or None)."""
    n = len(a)
    m = len(a[0]) if a else 0
    a = [list(r) for r in a]
    inv = identity(n) if want_inverse else None
    det = ONE
    r = 0
    for c in range(m):
        p = next((i for i in range(r, n) if a[i][c]), None)
        if p is None:
            det = ZERO
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
            if inv is not None:
                inv[r], inv[p] = inv[p], inv[r]
            det = -det
        piv = a[r][c]
        det = det * piv
        piv_inv = piv.inverse()
        a[r] = [v * piv_inv for v in a[r]]
        if inv is not None:
            inv[r] = [v * piv_inv for v in inv[r]]
        for i in range(n):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
                if inv is not None:
                    inv[i] = [x - f * y for x, y in zip(inv[i], inv[r])]
        r += 1
        if r == n:
            break
    if r < n:
        det = ZERO
    return r, det, inv


def det(rows):
    a = to_matrix(rows)
    if len(a) != (len(a[0]) if a else 0):
        raise DimensionError("determinant of a non-square matrix")
    if not a:
        return ONE
    return _eliminate(a)[1]


def inverse(rows):
    a = to_matrix(rows)
    n = len(a)
    if any(len(r) != n for r in a):
        raise DimensionError("inverse of a non-square matrix")
    r, d, inv = _eliminate(a, want_inverse=True)
    if r < n:
        raise ZeroDivisionError("matrix is singular")
    return inv


def rank(rows) -> int:
    a = to_matrix(rows)
    if not a or not a[0]:
        return 0
    return _eliminate(a)[0]


def matmul(a, b):
    return [[sum((x * y for x, y in zip(row, col)), ZERO) for col in zip(*b)] for row in a]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), ZERO) for row in a]
