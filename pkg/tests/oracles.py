"""Slow, obviously-correct reference implementations used only by tests."""

from nilmap.polymap import PolyMap
from nilmap.polynomial import Polynomial


def cofactor_det(rows):
    """Laplace expansion along the first row; rows is a list of lists of Polynomial."""
    n = len(rows)
    if n == 0:
        raise ValueError("empty matrix")
    if n == 1:
        return rows[0][0]
    total = None
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * cofactor_det(minor)
        total = term if total is None else (total + term if j % 2 == 0 else total - term)
    return total


def charpoly_nilpotent(rows) -> bool:
    """det(t E - M) == t^n, computed by cofactor expansion in a ring with one extra variable."""
    ring = rows[0][0].ring
    n = len(rows)
    big = ring + ("t_oracle",)
    pos = list(range(len(ring)))
    t = Polynomial.var(big, len(ring))
    m = [[(t if i == j else Polynomial.zero(big)) - rows[i][j].embed(big, pos) for j in range(n)]
         for i in range(n)]
    return cofactor_det(m) == t ** n


def substitute_by_evaluation(F: PolyMap, G: PolyMap, points):
    """F(G(p)) evaluated pointwise, to cross-check symbolic composition."""
    return [F.evaluate(G.evaluate(p)) for p in points]
