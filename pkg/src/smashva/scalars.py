"""Exact scalar arithmetic: rationals and cyclotomic extensions Q(zeta_m).

Rationals are plain ``fractions.Fraction`` (ints are accepted wherever a
scalar is expected).  ``CycScalar`` represents an element of Q(zeta_m) as a
polynomial in zeta_m reduced modulo the m-th cyclotomic polynomial, with
Fraction coefficients.  Values that turn out to be rational are demoted to
``Fraction`` so that equality is canonical across representations.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Union

from .errors import DomainError

Scalar = Union[int, Fraction, "CycScalar"]

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# dense univariate polynomials over Q, ascending degree, trimmed
# ---------------------------------------------------------------------------

def _trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return _trim(out)


def _poly_divmod(a, b):
    a = list(a)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [ZERO] * max(0, len(a) - len(b) + 1)
    inv_lead = Fraction(1, 1) / b[-1]
    while len(a) >= len(b) and _trim(a):
        shift = len(a) - len(b)
        c = a[-1] * inv_lead
        q[shift] = c
        for j, bj in enumerate(b):
            a[shift + j] -= c * bj
        _trim(a)
    return _trim(q), _trim(a)


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple:
    """Coefficients of the m-th cyclotomic polynomial, ascending degree."""
    if m < 1:
        raise DomainError("cyclotomic order must be positive")
    # x^m - 1 divided by the product of Phi_d over proper divisors d of m
    num = [Fraction(-1)] + [ZERO] * (m - 1) + [Fraction(1)]
    den = [ONE]
    for d in range(1, m):
        if m % d == 0:
            den = _poly_mul(den, list(cyclotomic_poly(d)))
    q, r = _poly_divmod(num, den)
    assert not r, "cyclotomic division must be exact"
    return tuple(q)


def euler_phi(m: int) -> int:
    return len(cyclotomic_poly(m)) - 1


def _reduce_mod_cyclotomic(coeffs, m):
    _, r = _poly_divmod(list(coeffs), list(cyclotomic_poly(m)))
    return r


def _poly_sub(a, b):
    out = [(a[i] if i < len(a) else ZERO) - (b[i] if i < len(b) else ZERO)
           for i in range(max(len(a), len(b)))]
    return _trim(out)


def _poly_inverse_mod(a, mod):
    """Inverse of a modulo mod in Q[x], via the extended Euclidean algorithm."""
    if not _trim(list(a)):
        raise DomainError("division by zero")
    r0, r1 = list(mod), list(a)
    s0, s1 = [], [ONE]
    while r1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    if len(r0) != 1:
        raise DomainError("element is not invertible")
    c = r0[0]
    return [x / c for x in s0]


class CycScalar:
    """An element of the cyclotomic field Q(zeta_m), canonically reduced."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order, coeffs):
        self.order = order
        self.coeffs = tuple(coeffs)

    # -- construction -------------------------------------------------------

    @staticmethod
    def make(order: int, coeffs) -> Scalar:
        """Reduce mod Phi_order; demote to Fraction when the value is rational."""
        reduced = _reduce_mod_cyclotomic([Fraction(c) for c in coeffs], order)
        if len(reduced) <= 1:
            return reduced[0] if reduced else ZERO
        padded = reduced + [ZERO] * (euler_phi(order) - len(reduced))
        return CycScalar(order, padded)

    def _at_order(self, target: int):
        """Coefficient list of this value rewritten at order ``target``."""
        step = target // self.order
        out = [ZERO] * (max(len(self.coeffs) - 1, 0) * step + 1)
        for j, c in enumerate(self.coeffs):
            out[j * step] += c
        return _reduce_mod_cyclotomic(out, target)

    @staticmethod
    def _coerce(x, order):
        if isinstance(x, CycScalar):
            m = lcm(x.order, order)
            return m, x._at_order(m)
        return order, [Fraction(x)]

    # -- arithmetic ---------------------------------------------------------

    def _binop(self, other, combine):
        if not isinstance(other, (int, Fraction, CycScalar)):
            return NotImplemented
        m = lcm(self.order,
                other.order if isinstance(other, CycScalar) else 1)
        a = self._at_order(m)
        _, b = CycScalar._coerce(other, m)
        return CycScalar.make(m, combine(a, b))

    def __add__(self, other):
        return self._binop(other, lambda a, b: [
            (a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO)
            for i in range(max(len(a), len(b)))])

    __radd__ = __add__

    def __neg__(self):
        return CycScalar(self.order, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other if isinstance(other, CycScalar) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return self._binop(other, _poly_mul)

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        inv = _poly_inverse_mod(list(self.coeffs), list(cyclotomic_poly(self.order)))
        return CycScalar.make(self.order, inv)

    def __truediv__(self, other):
        if isinstance(other, CycScalar):
            return self * other.inverse()
        if other == 0:
            raise DomainError("division by zero")
        return self * (ONE / Fraction(other))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out: Scalar = ONE
        base: Scalar = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison / rendering ---------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return False  # rational values are always demoted to Fraction
        if isinstance(other, CycScalar):
            m = lcm(self.order, other.order)
            return self._at_order(m) == other._at_order(m)
        return NotImplemented

    def __hash__(self):
        raise TypeError("CycScalar is order-dependent; not hashable")

    def is_zero(self):
        return not any(self.coeffs)

    def __repr__(self):
        return f"CycScalar({self.order}, {list(self.coeffs)})"

    def __str__(self):
        parts = []
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if j == 0:
                parts.append(str(c))
            elif j == 1:
                parts.append(f"{c}*z")
            else:
                parts.append(f"{c}*z^{j}")
        body = " + ".join(parts) if parts else "0"
        return f"{body} (z = zeta_{self.order})"


def root_of_unity(order: int, power: int) -> Scalar:
    """zeta_order ** power, reduced canonically (depends only on power mod order)."""
    if order < 1:
        raise DomainError("order must be >= 1")
    k = power % order
    return CycScalar.make(order, [ZERO] * k + [ONE])


def rational_power_root(order: int, exponent: Fraction) -> Scalar:
    """zeta_order raised to a rational exponent p/q, realized as zeta_{order*q}^p."""
    e = Fraction(exponent)
    return root_of_unity(order * e.denominator, e.numerator)


# ---------------------------------------------------------------------------
# scalar helpers shared by the vector/series layers
# ---------------------------------------------------------------------------

def sc_is_zero(s) -> bool:
    t = type(s)
    if t is int:
        return s == 0
    if t is Fraction:
        return s.numerator == 0
    if t is CycScalar:
        return s.is_zero()
    return s == 0


def sc_div(a, b):
    if sc_is_zero(b):
        raise DomainError("division by zero")
    if isinstance(a, CycScalar) or isinstance(b, CycScalar):
        if not isinstance(b, CycScalar):
            return a * (ONE / Fraction(b))
        return (a if isinstance(a, CycScalar) else Fraction(a)) / b
    return Fraction(a) / Fraction(b)


def sc_str(s) -> str:
    if isinstance(s, CycScalar):
        return str(s)
    f = Fraction(s)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
