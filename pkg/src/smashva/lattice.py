"""Even nondegenerate lattices, bilinear 2-cocycles, and the dual lattice.

Lattice points are coordinate tuples in the chosen basis; dual-lattice points
carry rational coordinates constrained by integral pairing against the basis.
Cocycles are stored as bilinear *exponent* matrices: the value on a pair is a
root of unity whose exponent is the bilinear form, which makes the 2-cocycle
identity automatic and reduces the commutator condition to a finite check.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .errors import DomainError
from .linalg import mat_inverse
from .reporting import CheckReport
from .scalars import Scalar, rational_power_root

Point = tuple


def _norm(x):
    # integer coordinates hash much faster than Fractions as dict-key parts
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else x
    return int(x)


def point(*coords) -> Point:
    return tuple(_norm(Fraction(c)) for c in coords)


def add_points(a: Point, b: Point) -> Point:
    return tuple(_norm(x + y) for x, y in zip(a, b))


def neg_point(a: Point) -> Point:
    return tuple(-x for x in a)


def scale_point(a: Point, s) -> Point:
    return tuple(_norm(Fraction(s) * x) for x in a)


def _det(m) -> Fraction:
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        inv = Fraction(1) / a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


class Lattice:
    """A free abelian group of finite rank with an even nondegenerate form."""

    __slots__ = ("rank", "gram")

    def __init__(self, gram):
        rows = [tuple(int(x) for x in row) for row in gram]
        n = len(rows)
        if any(len(r) != n for r in rows) or n == 0:
            raise DomainError("gram matrix must be square and nonempty")
        for i in range(n):
            for j in range(n):
                if rows[i][j] != rows[j][i]:
                    raise DomainError("gram matrix is not symmetric")
        for i in range(n):
            if rows[i][i] % 2 != 0:
                raise DomainError("odd diagonal entry: lattice is not even")
        if _det(rows) == 0:
            raise DomainError("zero determinant: lattice is degenerate")
        self.rank = n
        self.gram = tuple(rows)

    def basis_point(self, i: int) -> Point:
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def zero(self) -> Point:
        return (0,) * self.rank

    def pairing(self, a: Point, b: Point) -> Fraction:
        total = Fraction(0)
        for i, ai in enumerate(a):
            if ai:
                row = self.gram[i]
                for j, bj in enumerate(b):
                    if bj:
                        total += ai * row[j] * bj
        return total

    def in_lattice(self, p: Point) -> bool:
        return all(Fraction(x).denominator == 1 for x in p)

    def in_dual(self, p: Point) -> bool:
        return all(self.pairing(self.basis_point(i), p).denominator == 1
                   for i in range(self.rank))

    def dual_basis(self):
        """Points pairing to the identity matrix against the lattice basis."""
        inv = mat_inverse(self.gram)
        return [tuple(_norm(x) for x in inv[i]) for i in range(self.rank)]

    def points_in_box(self, radius: int):
        coords = range(-radius, radius + 1)
        pts = [()]
        for _ in range(self.rank):
            pts = [p + (c,) for p in pts for c in coords]
        return pts


def make_lattice(gram) -> Lattice:
    return Lattice(gram)


class CocycleTable:
    """A group 2-cocycle given by a bilinear exponent matrix at a root order.

    The value on (a, b) is zeta_order ** B(a, b) with B the bilinear form of
    the exponent matrix.  Rational exponents (as arise on lattice x dual
    pairs) are realized at an enlarged order, so extension to the dual comes
    for free from biadditivity.
    """

    __slots__ = ("order", "exponents", "extended")

    def __init__(self, order: int, exponents, extended: bool = False):
        if order < 1:
            raise DomainError("cocycle order must be positive")
        self.order = order
        self.exponents = tuple(tuple(int(x) for x in row) for row in exponents)
        self.extended = extended

    def exponent(self, a: Point, b: Point) -> Fraction:
        total = Fraction(0)
        for i, ai in enumerate(a):
            if ai:
                row = self.exponents[i]
                for j, bj in enumerate(b):
                    if bj:
                        total += ai * row[j] * bj
        return total

    def value(self, a: Point, b: Point) -> Scalar:
        e = self.exponent(a, b)
        if e.denominator != 1 and not self.extended:
            raise DomainError("rational cocycle exponent outside L x L; extend the cocycle first")
        return rational_power_root(self.order, e)

    def values_equal(self, a1, b1, a2, b2) -> bool:
        return (self.exponent(a1, b1) - self.exponent(a2, b2)) % self.order == 0


def standard_cocycle(lat: Lattice) -> CocycleTable:
    """The order-2 cocycle with exponent <ai, aj> below the diagonal."""
    b = [[lat.gram[i][j] if i > j else 0 for j in range(lat.rank)]
         for i in range(lat.rank)]
    return CocycleTable(2, b)


def extend_cocycle(lat: Lattice, table: CocycleTable) -> CocycleTable:
    """Biadditive extension of the cocycle to lattice x dual pairs."""
    return CocycleTable(table.order, table.exponents, extended=True)


def cocycle_check(lat: Lattice, table: CocycleTable, radius: int) -> CheckReport:
    """Exhaustively verify the cocycle axioms on a coordinate box.

    Checks normalization, the 2-cocycle identity on every triple, and the
    commutator condition value(a,b)/value(b,a) = (-1)**<a,b> on every pair
    with coordinates in [-radius, radius].
    """
    report = CheckReport(f"cocycle_check(radius={radius})")
    pts = lat.points_in_box(radius)
    zero = lat.zero()
    ok = all(table.exponent(p, zero) % table.order == 0
             and table.exponent(zero, p) % table.order == 0 for p in pts)
    report.add("normalization", ok, None if ok else "value on (a,0) or (0,a) is not 1")
    first_bad = None
    for a in pts:
        for b in pts:
            for c in pts:
                lhs = table.exponent(a, add_points(b, c)) + table.exponent(b, c)
                rhs = table.exponent(add_points(a, b), c) + table.exponent(a, b)
                if (lhs - rhs) % table.order != 0:
                    first_bad = (a, b, c)
                    break
            if first_bad:
                break
        if first_bad:
            break
    report.add("two-cocycle identity", first_bad is None,
               None if first_bad is None else f"violated at {first_bad}")
    first_bad = None
    for a in pts:
        for b in pts:
            skew = table.exponent(a, b) - table.exponent(b, a)
            # (-1)^<a,b> as an exponent at the table's order
            target = Fraction(table.order, 2) * lat.pairing(a, b)
            if table.order % 2 != 0 or (skew - target) % table.order != 0:
                first_bad = (a, b)
                break
        if first_bad:
            break
    report.add("commutator condition", first_bad is None,
               None if first_bad is None else f"violated at {first_bad}")
    return report
