"""Windowed formal Laurent series with certified-exact regions.

A :class:`WindowedSeries` stores finitely many coefficients together with a
certified window: the contiguous exponent range on which the stored data
provably agrees with the untruncated series.  Optional ``floor``/``ceiling``
attributes record proven zero-regions of the *exact* object (coefficients
strictly below the floor or strictly above the ceiling vanish), which is what
makes truncated products sound: a coefficient of a product is certified only
when every contributing splitting lies in certified or provably-zero
territory.

Two-variable objects (:class:`BivariateSeries`) track a certified rectangle
plus per-variable and anti-diagonal zero bounds.  The substitution
``x -> x1 +/- x2`` always expands powers of binomials in *nonnegative* powers
of the second variable.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import DomainError, TruncationError
from .scalars import sc_is_zero
from .vectors import LinComb

_NEG_INF = float("-inf")
_POS_INF = float("inf")


def _czero(c) -> bool:
    if isinstance(c, LinComb):
        return c.is_zero()
    return sc_is_zero(c)


def gbinom(n: int, k: int):
    """Generalized binomial coefficient C(n, k) for integer n, k >= 0."""
    if k < 0:
        return 0
    if n >= 0:
        return comb(n, k)
    return (-1) ** k * comb(-n + k - 1, k)


@dataclass(frozen=True)
class Window:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError(f"empty window [{self.lo}, {self.hi}]")

    def shift(self, d: int) -> "Window":
        return Window(self.lo + d, self.hi + d)

    def widen(self, d: int) -> "Window":
        return Window(self.lo - d, self.hi + d)

    def intersect(self, other: "Window"):
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Window(lo, hi) if lo <= hi else None

    def __contains__(self, n: int) -> bool:
        return self.lo <= n <= self.hi

    def __iter__(self):
        return iter(range(self.lo, self.hi + 1))

    def __str__(self):
        return f"[{self.lo}..{self.hi}]"


class WindowedSeries:
    """A truncated Laurent series plus the window on which it is exact."""

    __slots__ = ("coeffs", "exact", "floor", "ceiling")

    def __init__(self, coeffs, exact: Window, floor=None, ceiling=None):
        clean = {}
        for n, c in coeffs.items():
            if _czero(c):
                continue
            if n not in exact:
                raise DomainError(f"stored exponent {n} outside exact window {exact}")
            if floor is not None and n < floor:
                raise DomainError(f"exponent {n} contradicts support floor {floor}")
            if ceiling is not None and n > ceiling:
                raise DomainError(f"exponent {n} contradicts support ceiling {ceiling}")
            clean[n] = c
        self.coeffs = clean
        self.exact = exact
        self.floor = floor
        self.ceiling = ceiling

    # -- basic queries -------------------------------------------------------

    def known(self, n: int) -> bool:
        """Is the coefficient of x**n certified (computed or provably zero)?"""
        if n in self.exact:
            return True
        if self.floor is not None and n < self.floor:
            return True
        if self.ceiling is not None and n > self.ceiling:
            return True
        return False

    def get(self, n: int):
        """Certified coefficient of x**n; None encodes a certified zero."""
        if not self.known(n):
            raise TruncationError(f"coefficient at {n} not certified (window {self.exact})")
        return self.coeffs.get(n)

    @property
    def is_entire(self) -> bool:
        """True when every coefficient of the exact object is certified."""
        return (self.floor is not None and self.ceiling is not None
                and self.exact.lo <= self.floor and self.ceiling <= self.exact.hi)

    def _eff_lo(self):
        return _NEG_INF if (self.floor is not None and self.floor >= self.exact.lo) else self.exact.lo

    def _eff_hi(self):
        return _POS_INF if (self.ceiling is not None and self.ceiling <= self.exact.hi) else self.exact.hi

    def support(self):
        return sorted(self.coeffs)

    def is_zero_on_window(self) -> bool:
        return not self.coeffs

    # -- linear structure ------------------------------------------------------

    def add(self, other: "WindowedSeries") -> "WindowedSeries":
        floor = None
        if self.floor is not None and other.floor is not None:
            floor = min(self.floor, other.floor)
        ceiling = None
        if self.ceiling is not None and other.ceiling is not None:
            ceiling = max(self.ceiling, other.ceiling)
        lo = max(self._eff_lo(), other._eff_lo())
        hi = min(self._eff_hi(), other._eff_hi())
        if lo == _NEG_INF:
            lo = floor if hi == _POS_INF else min(floor, hi)
        if hi == _POS_INF:
            hi = max(ceiling, lo)
        if lo > hi:
            raise TruncationError("sum has empty certified window")
        out = {}
        for src in (self.coeffs, other.coeffs):
            for n, c in src.items():
                if lo <= n <= hi:
                    s = out.get(n)
                    out[n] = c if s is None else s + c
        return WindowedSeries(out, Window(int(lo), int(hi)), floor, ceiling)

    def neg(self) -> "WindowedSeries":
        return WindowedSeries({n: -c for n, c in self.coeffs.items()},
                              self.exact, self.floor, self.ceiling)

    def sub(self, other: "WindowedSeries") -> "WindowedSeries":
        return self.add(other.neg())

    def scale(self, s) -> "WindowedSeries":
        if sc_is_zero(s):
            return WindowedSeries({}, self.exact, self.floor, self.ceiling)
        return WindowedSeries({n: c * s if isinstance(c, LinComb) else s * c
                               for n, c in self.coeffs.items()},
                              self.exact, self.floor, self.ceiling)

    def shift(self, d: int) -> "WindowedSeries":
        return WindowedSeries({n + d: c for n, c in self.coeffs.items()},
                              self.exact.shift(d),
                              None if self.floor is None else self.floor + d,
                              None if self.ceiling is None else self.ceiling + d)

    def parity_flip(self) -> "WindowedSeries":
        """Substitute x -> -x."""
        out = {n: (c if n % 2 == 0 else -c) for n, c in self.coeffs.items()}
        return WindowedSeries(out, self.exact, self.floor, self.ceiling)

    def restrict(self, window: Window) -> "WindowedSeries":
        inter = self.exact.intersect(window)
        if inter is None:
            raise TruncationError(f"window {window} disjoint from certified {self.exact}")
        return WindowedSeries({n: c for n, c in self.coeffs.items() if n in inter},
                              inter, self.floor, self.ceiling)

    # -- calculus -------------------------------------------------------------

    def derivative(self, k: int = 1) -> "WindowedSeries":
        if k < 0:
            raise DomainError("derivative order must be nonnegative")
        if k == 0:
            return self
        out = {}
        for n, c in self.coeffs.items():
            fall = 1
            for j in range(k):
                fall *= (n - j)
            if fall:
                out[n - k] = c * Fraction(fall) if isinstance(c, LinComb) else Fraction(fall) * c
        return WindowedSeries(out, self.exact.shift(-k),
                              None if self.floor is None else self.floor - k,
                              None if self.ceiling is None else self.ceiling - k)

    def residue(self, zero=Fraction(0)):
        """Certified coefficient of x**-1."""
        c = self.get(-1)
        return zero if c is None else c

    # -- multiplicative structure ----------------------------------------------

    def mul(self, other: "WindowedSeries", mul=None) -> "WindowedSeries":
        """Cauchy product with conservative exactness propagation."""
        return series_mul(self, other, mul)

    def __str__(self):
        body = " + ".join(f"({c})*x^{n}" for n, c in sorted(self.coeffs.items())) or "0"
        return f"{body} [exact {self.exact}]"


def constant_series(value, window: Window) -> WindowedSeries:
    """The constant series `value` (entire: zero away from exponent 0)."""
    exact = Window(min(window.lo, 0), max(window.hi, 0))
    return WindowedSeries({0: value}, exact, 0, 0)


def monomial_series(value, n: int, window: Window) -> WindowedSeries:
    exact = Window(min(window.lo, n), max(window.hi, n))
    return WindowedSeries({n: value}, exact, n, n)


def entire_series(coeffs, window: Window) -> WindowedSeries:
    """Wrap a fully-known finite Laurent object, certifying everything."""
    supp = [n for n, c in coeffs.items() if not _czero(c)]
    floor = min(supp, default=0)
    ceiling = max(supp, default=0)
    exact = Window(min(window.lo, floor), max(window.hi, ceiling))
    return WindowedSeries(coeffs, exact, floor, ceiling)


def series_mul(a: WindowedSeries, b: WindowedSeries, mul=None) -> WindowedSeries:
    mul = mul or operator.mul
    fa, ca = a.floor, a.ceiling
    fb, cb = b.floor, b.ceiling
    if fa is None or fb is None:
        raise TruncationError("product requires support floors on both operands")
    floor = fa + fb
    ceiling = (ca + cb) if (ca is not None and cb is not None) else None

    bounds = []
    if not (ca is not None and ca <= a.exact.hi):
        bounds.append(a.exact.hi + fb)
    if not (cb is not None and cb <= b.exact.hi):
        bounds.append(b.exact.hi + fa)
    hmax = min(bounds) if bounds else ceiling

    def pulls_known(n: int) -> bool:
        p_lo = fa if cb is None else max(fa, n - cb)
        p_hi = (n - fb) if ca is None else min(ca, n - fb)
        if p_lo > p_hi:
            return True
        if p_lo < a.exact.lo or p_hi > a.exact.hi:
            return False
        q_lo = fb if ca is None else max(fb, n - ca)
        q_hi = (n - fa) if cb is None else min(cb, n - fa)
        return q_lo >= b.exact.lo and q_hi <= b.exact.hi

    certified = [n for n in range(floor, hmax + 1) if pulls_known(n)]
    if not certified:
        raise TruncationError("product has empty certified window")
    # keep the longest contiguous certified run (highest on ties)
    runs = []
    start = prev = certified[0]
    for n in certified[1:]:
        if n == prev + 1:
            prev = n
            continue
        runs.append((start, prev))
        start = prev = n
    runs.append((start, prev))
    lo, hi = max(runs, key=lambda r: (r[1] - r[0], r[1]))

    out = {}
    for p, cpa in a.coeffs.items():
        for q, cqb in b.coeffs.items():
            n = p + q
            if lo <= n <= hi:
                v = mul(cpa, cqb)
                if _czero(v):
                    continue
                s = out.get(n)
                out[n] = v if s is None else s + v
    return WindowedSeries(out, Window(lo, hi), floor, ceiling)


def compare_series(a: WindowedSeries, b: WindowedSeries, window: Window,
                   strict: bool = True):
    """Compare certified coefficients on a window.

    Returns ``(checked, mismatches)`` where mismatches is a list of
    ``(exponent, left, right)``.  With ``strict`` every exponent must be
    certified on both sides, otherwise unknown exponents are skipped (and it
    is a :class:`TruncationError` if nothing at all can be compared).
    """
    checked = 0
    mismatches = []
    for n in window:
        if not (a.known(n) and b.known(n)):
            if strict:
                raise TruncationError(f"coefficient at {n} undecidable")
            continue
        checked += 1
        ca, cb = a.coeffs.get(n), b.coeffs.get(n)
        if ca is None and cb is None:
            continue
        if ca is None or cb is None or ca != cb:
            mismatches.append((n, ca, cb))
    if checked == 0:
        raise TruncationError("no certified coefficients to compare")
    return checked, mismatches


# ---------------------------------------------------------------------------
# exponentials of graded operators
# ---------------------------------------------------------------------------

_EXP_CAP = 10_000


def exp_action_terms(terms, v, window: Window) -> WindowedSeries:
    """Apply exp( sum_i x**t_i · L_i ) to a vector, exactly per coefficient.

    ``terms`` is a sequence of ``(t, op)`` pairs.  Either every t is >= 1
    (each application raises the exponent, so the window bounds the loop) or
    repeated application must annihilate v (locally nilpotent lowering
    operators); anything else cannot be summed coefficientwise.
    """
    terms = [(t, op) for t, op in terms]
    raising = all(t >= 1 for t, _ in terms)
    lowering = all(t <= -1 for t, _ in terms)
    if terms and not (raising or lowering):
        raise DomainError("mixed raising/lowering exponential has no contribution bound")
    out = {0: v}
    cur = {0: v}
    k = 0
    while cur:
        k += 1
        if k > _EXP_CAP:
            raise DomainError("exponential did not terminate (missing nilpotence?)")
        nxt = {}
        for d, u in cur.items():
            for t, op in terms:
                e = d + t
                if raising and e > window.hi:
                    continue
                w = op(u)
                if w.is_zero():
                    continue
                s = nxt.get(e)
                nxt[e] = w if s is None else s + w
        inv = Fraction(1, k)
        cur = {}
        for e, u in nxt.items():
            u = u.scale(inv)
            if not u.is_zero():
                cur[e] = u
                s = out.get(e)
                out[e] = u if s is None else s + u
    out = {e: u for e, u in out.items() if not u.is_zero()}
    if lowering or not terms:
        return entire_series(out, window)
    exact = Window(min(window.lo, 0), window.hi)
    return WindowedSeries({e: u for e, u in out.items() if e in exact}, exact, floor=0)


def exp_action(op, t_weight: int, v, window: Window) -> WindowedSeries:
    """exp(x**t_weight · op) applied to v, certified on the window."""
    return exp_action_terms([(t_weight, op)], v, window)


def series_opmul(op, s: WindowedSeries, window: Window) -> WindowedSeries:
    """Operator-series times series in one variable: sum_q shift_q(op(s_q)).

    ``op(vec, window)`` must return a series certified on the request.  The
    inner series must be entire so every contribution is enumerable.
    """
    if not s.is_entire:
        raise TruncationError("operator product needs an entire inner series")
    parts = []
    for q, vec in s.coeffs.items():
        parts.append(op(vec, window.shift(-q)).shift(q))
    if not parts:
        return WindowedSeries({}, window, 0, 0)
    acc = parts[0]
    for p in parts[1:]:
        acc = acc.add(p)
    # every contribution was certified on the request, so the target window is
    out = {n: c for n, c in acc.coeffs.items() if n in window}
    floor = acc.floor
    ceiling = acc.ceiling
    if floor is not None:
        exact = Window(min(window.lo, floor), window.hi)
        if ceiling is not None and ceiling <= window.hi:
            exact = Window(min(window.lo, floor), max(window.hi, ceiling))
            out = {n: c for n, c in acc.coeffs.items() if n in exact}
        return WindowedSeries(out, exact, floor, ceiling)
    return WindowedSeries(out, window, floor, ceiling)


def series_opmul_floor(op, op_floor: int, s: WindowedSeries,
                       window: Window) -> WindowedSeries:
    """Operator-series product when op outputs have exponents >= op_floor.

    Contributions to exponent N come from inner coefficients s_q with
    q <= N - op_floor, so a floor-complete inner series certified up to
    window.hi - op_floor suffices.
    """
    if s.floor is None or s.floor < s.exact.lo:
        raise TruncationError("operator product needs a floor-complete inner series")
    if not s.is_entire and s.exact.hi < window.hi - op_floor:
        raise TruncationError("inner series window too small for the operator product")
    floor = s.floor + op_floor
    acc = None
    for q, vec in s.coeffs.items():
        part = op(vec, Window(min(window.lo, floor) - q, window.hi - q)).shift(q)
        acc = part if acc is None else acc.add(part)
    out = {}
    if acc is not None:
        floor = acc.floor if acc.floor is not None else floor
        out = {n: c for n, c in acc.coeffs.items() if window.lo <= n <= window.hi or n >= floor}
    exact = Window(min(window.lo, floor), window.hi)
    out = {n: c for n, c in out.items() if n in exact}
    return WindowedSeries(out, exact, floor, None)


def exp_series_action(op, s: WindowedSeries, window: Window) -> WindowedSeries:
    """Apply exp(x·op) to a series: U_N = sum_k op^k(S_{N-k}) / k!."""
    if s.floor is None or s.floor < s.exact.lo:
        raise TruncationError("exponential action needs a floor-complete series")
    hi = window.hi if s._eff_hi() == _POS_INF else min(window.hi, s.exact.hi)
    if hi < s.floor:
        raise TruncationError("window starves the exponential action")
    out = {}
    for q, vec in s.coeffs.items():
        k = 0
        cur = vec
        while q + k <= hi and not cur.is_zero():
            s0 = out.get(q + k)
            out[q + k] = cur if s0 is None else s0 + cur
            k += 1
            cur = op(cur).scale(Fraction(1, k))
    exact = Window(min(window.lo, s.floor, hi), hi)
    out = {n: c for n, c in out.items() if n in exact and not c.is_zero()}
    return WindowedSeries(out, exact, s.floor, None)


# ---------------------------------------------------------------------------
# two-variable series
# ---------------------------------------------------------------------------

class BivariateSeries:
    """A truncated two-variable Laurent series with a certified rectangle.

    Beyond the rectangle ``exact1 x exact2``, optional zero bounds certify
    cells: per-variable floors/ceilings and anti-diagonal bounds (the total
    degree e1+e2 of every nonzero cell of the exact object lies between
    ``diag_floor`` and ``diag_ceiling`` when set).
    """

    __slots__ = ("coeffs", "exact1", "exact2", "floor1", "ceiling1",
                 "floor2", "ceiling2", "diag_floor", "diag_ceiling")

    def __init__(self, coeffs, exact1: Window, exact2: Window,
                 floor1=None, ceiling1=None, floor2=None, ceiling2=None,
                 diag_floor=None, diag_ceiling=None):
        clean = {}
        for (p, q), c in coeffs.items():
            if _czero(c):
                continue
            if p not in exact1 or q not in exact2:
                raise DomainError(f"stored cell ({p},{q}) outside exact rectangle")
            if ((floor1 is not None and p < floor1)
                    or (ceiling1 is not None and p > ceiling1)
                    or (floor2 is not None and q < floor2)
                    or (ceiling2 is not None and q > ceiling2)
                    or (diag_floor is not None and p + q < diag_floor)
                    or (diag_ceiling is not None and p + q > diag_ceiling)):
                raise DomainError(f"stored cell ({p},{q}) contradicts a zero bound")
            clean[(p, q)] = c
        self.coeffs = clean
        self.exact1, self.exact2 = exact1, exact2
        self.floor1, self.ceiling1 = floor1, ceiling1
        self.floor2, self.ceiling2 = floor2, ceiling2
        self.diag_floor, self.diag_ceiling = diag_floor, diag_ceiling

    def known(self, p: int, q: int) -> bool:
        if p in self.exact1 and q in self.exact2:
            return True
        if self.floor1 is not None and p < self.floor1:
            return True
        if self.ceiling1 is not None and p > self.ceiling1:
            return True
        if self.floor2 is not None and q < self.floor2:
            return True
        if self.ceiling2 is not None and q > self.ceiling2:
            return True
        if self.diag_floor is not None and p + q < self.diag_floor:
            return True
        if self.diag_ceiling is not None and p + q > self.diag_ceiling:
            return True
        return False

    def get(self, p: int, q: int):
        if not self.known(p, q):
            raise TruncationError(f"cell ({p},{q}) not certified")
        return self.coeffs.get((p, q))

    def _merge_bounds(self, other, pick):
        def m(a, b):
            return None if (a is None or b is None) else pick(a, b)
        return m

    def add(self, other: "BivariateSeries") -> "BivariateSeries":
        e1 = self.exact1.intersect(other.exact1)
        e2 = self.exact2.intersect(other.exact2)
        if e1 is None or e2 is None:
            raise TruncationError("sum has empty certified rectangle")
        lo = self._merge_bounds(other, min)
        hi = self._merge_bounds(other, max)
        out = {}
        for src in (self.coeffs, other.coeffs):
            for cell, c in src.items():
                if cell[0] in e1 and cell[1] in e2:
                    s = out.get(cell)
                    out[cell] = c if s is None else s + c
        return BivariateSeries(out, e1, e2,
                               lo(self.floor1, other.floor1), hi(self.ceiling1, other.ceiling1),
                               lo(self.floor2, other.floor2), hi(self.ceiling2, other.ceiling2),
                               lo(self.diag_floor, other.diag_floor),
                               hi(self.diag_ceiling, other.diag_ceiling))

    def neg(self) -> "BivariateSeries":
        out = BivariateSeries.__new__(BivariateSeries)
        out.coeffs = {cell: -c for cell, c in self.coeffs.items()}
        for f in ("exact1", "exact2", "floor1", "ceiling1", "floor2",
                  "ceiling2", "diag_floor", "diag_ceiling"):
            setattr(out, f, getattr(self, f))
        return out

    def sub(self, other):
        return self.add(other.neg())

    def scale(self, s) -> "BivariateSeries":
        out = BivariateSeries.__new__(BivariateSeries)
        out.coeffs = {} if sc_is_zero(s) else {
            cell: (c * s if isinstance(c, LinComb) else s * c)
            for cell, c in self.coeffs.items()}
        for f in ("exact1", "exact2", "floor1", "ceiling1", "floor2",
                  "ceiling2", "diag_floor", "diag_ceiling"):
            setattr(out, f, getattr(self, f))
        return out

    def mul_poly(self, poly: dict) -> "BivariateSeries":
        """Multiply by an entire two-variable Laurent polynomial.

        ``poly`` maps cells (i, j) to scalars; every pull the product needs
        must land in certified or provably-zero territory, so the rectangle
        shrinks by the spread of the polynomial's support (low sides are kept
        when the operand is floor-complete in that variable).
        """
        supp = [cell for cell, c in poly.items() if not sc_is_zero(c)]
        if not supp:
            raise DomainError("multiplication by the zero polynomial loses all certification")
        min_i = min(i for i, _ in supp)
        max_i = max(i for i, _ in supp)
        min_j = min(j for _, j in supp)
        max_j = max(j for _, j in supp)
        lo1 = (self.exact1.lo + min_i
               if self.floor1 is not None and self.floor1 >= self.exact1.lo
               else self.exact1.lo + max_i)
        hi1 = self.exact1.hi + min_i
        lo2 = (self.exact2.lo + min_j
               if self.floor2 is not None and self.floor2 >= self.exact2.lo
               else self.exact2.lo + max_j)
        hi2 = self.exact2.hi + min_j
        if lo1 > hi1 or lo2 > hi2:
            raise TruncationError("polynomial multiple has empty certified rectangle")
        e1, e2 = Window(lo1, hi1), Window(lo2, hi2)
        out = {}
        for (p, q), c in self.coeffs.items():
            for (i, j) in supp:
                cell = (p + i, q + j)
                if cell[0] in e1 and cell[1] in e2:
                    v = c * poly[(i, j)] if isinstance(c, LinComb) else poly[(i, j)] * c
                    if _czero(v):
                        continue
                    s = out.get(cell)
                    out[cell] = v if s is None else s + v
        dmin = min(i + j for i, j in supp)
        dmax = max(i + j for i, j in supp)
        return BivariateSeries(
            out, e1, e2,
            None if self.floor1 is None else self.floor1 + min_i,
            None if self.ceiling1 is None else self.ceiling1 + max_i,
            None if self.floor2 is None else self.floor2 + min_j,
            None if self.ceiling2 is None else self.ceiling2 + max_j,
            None if self.diag_floor is None else self.diag_floor + dmin,
            None if self.diag_ceiling is None else self.diag_ceiling + dmax)

    def subst_var1_to_sum(self, s_hi: int) -> "BivariateSeries":
        """Substitute x1 -> x0 + x2, expanding in nonnegative powers of x2.

        Output cell (r, s) collects C(r+k, k) * A[r+k, s-k] over k >= 0; the
        operand must be floor-complete in variable 2 so those pulls are
        enumerable, and the var-1 certified range pays for the x2 ceiling.
        """
        if self.floor2 is None or self.floor2 < self.exact2.lo:
            raise TruncationError("substitution needs a floor-complete second variable")
        if s_hi > self.exact2.hi:
            raise TruncationError("requested x2 ceiling exceeds certified columns")
        span = s_hi - self.floor2
        if self.ceiling1 is not None and self.ceiling1 <= self.exact1.hi:
            lo1, hi1 = self.exact1.lo, self.ceiling1
        else:
            lo1, hi1 = self.exact1.lo, self.exact1.hi - span
        if lo1 > hi1:
            raise TruncationError("substitution exhausts the first-variable window")
        e1 = Window(lo1, hi1)
        e2 = Window(min(self.exact2.lo, self.floor2), s_hi)
        out = {}
        for (n, q), c in self.coeffs.items():
            for k in range(0, s_hi - q + 1):
                cell = (n - k, q + k)
                if cell[0] in e1 and cell[1] in e2:
                    v = c * Fraction(gbinom(n, k)) if isinstance(c, LinComb) \
                        else Fraction(gbinom(n, k)) * c
                    if _czero(v):
                        continue
                    s = out.get(cell)
                    out[cell] = v if s is None else s + v
        return BivariateSeries(out, e1, e2,
                               None, self.ceiling1, self.floor2, None,
                               self.diag_floor, self.diag_ceiling)

    def __str__(self):
        body = " + ".join(f"({c})*x1^{p}*x2^{q}"
                          for (p, q), c in sorted(self.coeffs.items())) or "0"
        return f"{body} [exact {self.exact1} x {self.exact2}]"


def iota_substitute(a: WindowedSeries, sign: int, x2_hi: int) -> BivariateSeries:
    """Expand a(x1 +/- x2) in nonnegative powers of x2 (|x1| > |x2|).

    Every integral power (x1 +/- x2)**n becomes
    sum_{k>=0} C(n, k) x1**(n-k) (+/-x2)**k; the operand needs a support
    floor so each output cell is a finite sum.
    """
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    if a.floor is None:
        raise TruncationError("iota substitution requires a support floor")
    if a.floor < a.exact.lo:
        raise TruncationError("iota substitution requires a floor-complete window")
    if x2_hi < 0:
        raise DomainError("x2 ceiling must be nonnegative")
    if a.ceiling is not None and a.ceiling <= a.exact.hi:
        # entire input: pulls above the ceiling are certified zeros
        e1_hi = a.ceiling
    else:
        e1_hi = a.exact.hi - x2_hi
    if a.floor - x2_hi > e1_hi:
        raise TruncationError("iota substitution exhausts the certified window")
    e1 = Window(a.floor - x2_hi, e1_hi)
    e2 = Window(0, x2_hi)
    out = {}
    for n, c in a.coeffs.items():
        for k in range(0, x2_hi + 1):
            cell = (n - k, k)
            if cell[0] not in e1:
                continue
            coef = Fraction(gbinom(n, k) * (sign ** k))
            v = c * coef if isinstance(c, LinComb) else coef * c
            if _czero(v):
                continue
            s = out.get(cell)
            out[cell] = v if s is None else s + v
    return BivariateSeries(out, e1, e2,
                           floor1=None, ceiling1=a.ceiling,
                           floor2=0, ceiling2=None,
                           diag_floor=a.floor, diag_ceiling=a.ceiling)


def apply_op_columns(op, s: WindowedSeries, w_out: Window, out_var: int = 1,
                     diag_floor=None, diag_ceiling=None) -> BivariateSeries:
    """Evaluate an operator series against every coefficient of a series.

    With ``out_var=1`` this realizes A(x1, x2) = op(x1)·s(x2): column q of
    the output is op applied to the x2-coefficient s_q, certified on
    ``w_out``.  ``out_var=2`` produces the transposed orientation.
    """
    cols = {}
    for q, vec in s.coeffs.items():
        r = op(vec, w_out)
        for p, c in r.coeffs.items():
            if p in w_out:
                cols[(p, q) if out_var == 1 else (q, p)] = c
    if out_var == 1:
        return BivariateSeries(cols, w_out, s.exact,
                               floor1=None, ceiling1=None,
                               floor2=s.floor, ceiling2=s.ceiling,
                               diag_floor=diag_floor, diag_ceiling=diag_ceiling)
    return BivariateSeries(cols, s.exact, w_out,
                           floor1=s.floor, ceiling1=s.ceiling,
                           floor2=None, ceiling2=None,
                           diag_floor=diag_floor, diag_ceiling=diag_ceiling)


def covariance_rhs(y_op, y_floor, inner: WindowedSeries, sign: int,
                   operand: WindowedSeries, rect1: Window, rect2: Window
                   ) -> BivariateSeries:
    """Assemble  sum  Y( inner(x1 +/- x2) , x2 ) · operand(x1)  exactly.

    ``inner`` (the acting element's field applied to an argument) and
    ``operand`` must be entire; ``y_op(vec, vec, window)`` is the carrier's
    vertex evaluator and ``y_floor(vec, vec)`` a lower bound for the exponent
    support of its output.  The result is certified on rect1 x rect2.
    """
    if not inner.is_entire or not operand.is_entire:
        raise TruncationError("covariance assembly requires entire constituents")
    if not inner.coeffs or not operand.coeffs:
        return BivariateSeries({}, rect1, rect2, diag_floor=0, diag_ceiling=0)
    f_bound = min(y_floor(c, d) for c in inner.coeffs.values()
                  for d in operand.coeffs.values())
    x2cap = max(0, rect2.hi - f_bound)
    req = Window(rect2.lo - x2cap, rect2.hi)
    # one evaluator call per (inner coefficient, operand coefficient) pair
    evaluated = {}
    for n, c in inner.coeffs.items():
        for m, d in operand.coeffs.items():
            evaluated[(n, m)] = y_op(c, d, req)
    out = {}
    for n, c in inner.coeffs.items():
        for k in range(0, x2cap + 1):
            coef = Fraction(gbinom(n, k) * (sign ** k))
            if coef == 0:
                continue
            p1 = n - k
            for m, d in operand.coeffs.items():
                base = evaluated[(n, m)]
                for j, vec in base.coeffs.items():
                    cell = (p1 + m, k + j)
                    if cell[0] not in rect1 or cell[1] not in rect2:
                        continue
                    v = vec.scale(coef)
                    if v.is_zero():
                        continue
                    s = out.get(cell)
                    out[cell] = v if s is None else s + v
    diag = (min(inner.coeffs) + min(operand.coeffs) + f_bound)
    return BivariateSeries(out, rect1, rect2, floor2=f_bound,
                           diag_floor=diag)


def compare_bivariate(a: BivariateSeries, b: BivariateSeries,
                      rect1: Window, rect2: Window, strict: bool = True):
    """Compare certified cells on a rectangle; see :func:`compare_series`."""
    checked = 0
    mismatches = []
    for p in rect1:
        for q in rect2:
            if not (a.known(p, q) and b.known(p, q)):
                if strict:
                    raise TruncationError(f"cell ({p},{q}) undecidable")
                continue
            checked += 1
            ca, cb = a.coeffs.get((p, q)), b.coeffs.get((p, q))
            if ca is None and cb is None:
                continue
            if ca is None or cb is None or ca != cb:
                mismatches.append(((p, q), ca, cb))
    if checked == 0:
        raise TruncationError("no certified cells to compare")
    return checked, mismatches
