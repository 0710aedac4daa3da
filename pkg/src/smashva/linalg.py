"""Small exact linear-algebra routines over the scalar field."""

from __future__ import annotations

from fractions import Fraction

from .errors import DomainError
from .scalars import sc_div, sc_is_zero


def mat_inverse(m):
    """Exact inverse of a square rational matrix (list of rows of Fractions)."""
    n = len(m)
    aug = [[Fraction(m[i][j]) for j in range(n)] +
           [Fraction(1) if i == j else Fraction(0) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise DomainError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def solve_exact(rows, rhs):
    """Solve rows * x = rhs exactly.

    Returns ``("unique", x)``, ``("underdetermined", None)`` or
    ``("inconsistent", None)``.  Entries may be Fractions or cyclotomic
    scalars; all arithmetic is exact.
    """
    if not rows:
        return ("underdetermined", None)
    ncols = len(rows[0])
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    row = 0
    for col in range(ncols):
        pivot = next((r for r in range(row, len(a)) if not sc_is_zero(a[r][col])), None)
        if pivot is None:
            continue
        a[row], a[pivot] = a[pivot], a[row]
        lead = a[row][col]
        a[row] = [sc_div(x, lead) for x in a[row]]
        for r in range(len(a)):
            if r != row and not sc_is_zero(a[r][col]):
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append(col)
        row += 1
        if row == len(a):
            break
    for r in range(row, len(a)):
        if not sc_is_zero(a[r][ncols]):
            return ("inconsistent", None)
    if len(pivots) < ncols:
        return ("underdetermined", None)
    x = [None] * ncols
    for r, col in enumerate(pivots):
        x[col] = a[r][ncols]
    return ("unique", x)
