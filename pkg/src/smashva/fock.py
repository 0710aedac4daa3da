"""Bosonic Fock space over a lattice form, with its vertex structure.

The space is the symmetric algebra on lowering modes ``a_i(-n)``, n >= 1,
for basis directions i of a nondegenerate form.  Monomial keys are sorted
tuples of ``(direction, mode)``; the vacuum is the empty tuple.  Raising
modes act by multiplication, lowering modes by the derivation determined by
``[a(m), b(n)] = m <a,b> delta_{m+n,0}`` at level one, and the translation
operator is the weight-raising derivation sending ``h(-n)`` to ``n h(-n-1)``.

``vertex_field`` is the normal-ordered vertex structure (the full two-sided
field), used as the independent oracle the smash-product construction is
checked against.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

from .errors import DomainError
from .series import (Window, WindowedSeries, constant_series, entire_series,
                     exp_action_terms, series_opmul, series_opmul_floor)
from .vectors import FockVector

VACUUM_KEY = ()


def mono_weight(mono) -> int:
    return sum(n for _, n in mono)


@lru_cache(maxsize=1 << 18)
def mono_mul(m1, m2):
    return tuple(sorted(m1 + m2))


def mono_str(mono) -> str:
    if not mono:
        return "|0>"
    parts = []
    i = 0
    while i < len(mono):
        j = i
        while j < len(mono) and mono[j] == mono[i]:
            j += 1
        d, n = mono[i]
        power = f"^{j - i}" if j - i > 1 else ""
        parts.append(f"a{d + 1}(-{n}){power}")
        i = j
    return " ".join(parts) + " |0>"


class FockSpace:
    """Fock space attached to an integer Gram matrix (level fixed at one)."""

    def __init__(self, gram):
        self.gram = tuple(tuple(int(x) for x in row) for row in gram)
        self.rank = len(self.gram)
        self._y_cache = {}

    # -- vectors ---------------------------------------------------------

    def vacuum(self) -> FockVector:
        return FockVector.from_key(VACUUM_KEY)

    def gen(self, i: int, n: int = 1) -> FockVector:
        """The vector a_i(-n) applied to the vacuum."""
        return FockVector.from_key(((i, n),))

    def basis_coords(self, i: int):
        return tuple(Fraction(1) if j == i else Fraction(0) for j in range(self.rank))

    def form(self, h1, h2) -> Fraction:
        total = Fraction(0)
        for i, a in enumerate(h1):
            if a:
                row = self.gram[i]
                for j, b in enumerate(h2):
                    if b:
                        total += Fraction(a) * row[j] * Fraction(b)
        return total

    def pair_with_basis(self, h, i: int) -> Fraction:
        return sum((Fraction(h[j]) * self.gram[j][i] for j in range(self.rank)),
                   Fraction(0))

    def weight_max(self, v: FockVector) -> int:
        return max((mono_weight(m) for m in v.terms), default=0)

    def monomials_up_to(self, max_weight: int):
        """All monomial keys of weight <= max_weight, by increasing weight."""
        modes = [(i, n) for i in range(self.rank) for n in range(1, max_weight + 1)]
        found = [VACUUM_KEY]
        for size in range(1, max_weight + 1):
            for combo in combinations_with_replacement(modes, size):
                if mono_weight(combo) <= max_weight:
                    found.append(tuple(sorted(combo)))
        return sorted(set(found), key=lambda m: (mono_weight(m), m))

    # -- mode operators ----------------------------------------------------

    def create(self, i: int, n: int, v: FockVector) -> FockVector:
        if n <= 0:
            raise DomainError("creation mode must be positive")
        return v.apply_linear(lambda m: FockVector.from_key(mono_mul(m, ((i, n),))))

    def create_h(self, h, n: int, v: FockVector) -> FockVector:
        out = FockVector.zero()
        for i in range(self.rank):
            if h[i]:
                out = out + self.create(i, n, v).scale(h[i] if isinstance(h[i], int) else Fraction(h[i]))
        return out

    def annihilate(self, h, n: int, v: FockVector) -> FockVector:
        """h(n) for n >= 0: zero for n = 0, else the level-one derivation."""
        if n < 0:
            raise DomainError("annihilation mode must be nonnegative")
        if n == 0:
            return FockVector.zero()

        def on_mono(m):
            out = {}
            seen = set()
            for idx, (i, mode) in enumerate(m):
                if mode != n or (i, mode) in seen:
                    continue
                seen.add((i, mode))
                mult = sum(1 for f in m if f == (i, mode))
                coef = Fraction(mult * n) * self.pair_with_basis(h, i)
                if coef:
                    rest = list(m)
                    rest.pop(idx)
                    key = tuple(rest)
                    out[key] = out.get(key, Fraction(0)) + coef
            return FockVector(out)

        return v.apply_linear(on_mono)

    def translate(self, v: FockVector) -> FockVector:
        """The derivation h(-n) -> n h(-n-1), extended by Leibniz."""

        def on_mono(m):
            out = {}
            for idx in range(len(m)):
                if idx > 0 and m[idx] == m[idx - 1]:
                    continue
                i, n = m[idx]
                mult = sum(1 for f in m if f == (i, n))
                rest = list(m)
                rest.pop(idx)
                key = tuple(sorted(rest + [(i, n + 1)]))
                out[key] = out.get(key, Fraction(0)) + Fraction(mult * n)
            return FockVector(out)

        return v.apply_linear(on_mono)

    def mul(self, u: FockVector, v: FockVector) -> FockVector:
        """Symmetric-algebra product."""
        out = {}
        for m1, c1 in u.terms.items():
            for m2, c2 in v.terms.items():
                key = mono_mul(m1, m2)
                c = c1 * c2
                s = out.get(key)
                out[key] = c if s is None else s + c
        return FockVector(out)

    # -- fields --------------------------------------------------------------

    def exp_field(self, h, sign: int, v: FockVector, window: Window) -> WindowedSeries:
        """exp( sum_{n in sign*Z+} h(n)/n x^-n ) applied to v.

        The annihilation exponential (sign +) is an entire Laurent polynomial
        in 1/x; the creation exponential (sign -) is a power series exact on
        the window.
        """
        if sign == 1:
            terms = [(-n, (lambda n: lambda u: self.annihilate(h, n, u).scale(Fraction(1, n)))(n))
                     for n in range(1, self.weight_max(v) + 1)]
        elif sign == -1:
            terms = [(m, (lambda m: lambda u: self.create_h(h, m, u).scale(Fraction(-1, m)))(m))
                     for m in range(1, max(window.hi, 0) + 1)]
        else:
            raise DomainError("sign must be +1 or -1")
        return exp_action_terms(terms, v, window)

    def heis_field(self, h, v: FockVector, window: Window) -> WindowedSeries:
        """The full Heisenberg field: creation and annihilation halves."""
        wmax = self.weight_max(v)
        out = {}
        for m in range(1, window.hi + 2):
            if m - 1 in window:
                c = self.create_h(h, m, v)
                if not c.is_zero():
                    out[m - 1] = c
        for n in range(1, wmax + 1):
            a = self.annihilate(h, n, v)
            if not a.is_zero():
                out[-n - 1] = a
        exact = Window(min(window.lo, -wmax - 1), window.hi)
        out = {e: c for e, c in out.items() if e in exact}
        return WindowedSeries(out, exact, floor=-wmax - 1)

    # -- the vertex structure oracle -----------------------------------------

    def y_floor(self, u: FockVector, v: FockVector) -> int:
        return -(self.weight_max(u) + self.weight_max(v))

    def diag_bound(self, a, b, c) -> int:
        return -(self.weight_max(a) + self.weight_max(b) + self.weight_max(c))

    def vertex_field(self, u: FockVector, v: FockVector, window: Window) -> WindowedSeries:
        """Normal-ordered vertex structure: the field of u applied to v."""
        acc = None
        for um, uc in u.terms.items():
            for vm, vc in v.terms.items():
                part = self._y_mono(um, vm, window).scale(uc * vc)
                acc = part if acc is None else acc.add(part)
        if acc is None:
            return WindowedSeries({}, window, 0, 0)
        return acc

    def _y_mono(self, um, vm, window: Window) -> WindowedSeries:
        key = (um, vm, window.lo, window.hi)
        hit = self._y_cache.get(key)
        if hit is not None:
            return hit
        if not um:
            res = constant_series(FockVector.from_key(vm), window)
        else:
            i, n = um[0]
            rest = um[1:]
            h = self.basis_coords(i)
            f_inner = -(mono_weight(rest) + mono_weight(vm))
            inner_w = Window(min(f_inner, window.lo), window.hi + n - 1)
            inner = self._y_mono(rest, vm, inner_w)
            # creation half of the n-th derivative field times the inner field
            term1 = series_opmul_floor(
                lambda vec, w: self._creation_half(i, n, vec, w), 0, inner, window)
            # inner field times the annihilation half applied first
            lowered = self._lowering_half(h, n, FockVector.from_key(vm))
            term2 = series_opmul(lambda vec, w: self._y_rest(rest, vec, w),
                                 lowered, window)
            res = term1.add(term2)
        if len(self._y_cache) < 200_000:
            self._y_cache[key] = res
        return res

    def _y_rest(self, rest, vec: FockVector, window: Window) -> WindowedSeries:
        acc = None
        for vm, vc in vec.terms.items():
            part = self._y_mono(rest, vm, window).scale(vc)
            acc = part if acc is None else acc.add(part)
        if acc is None:
            return WindowedSeries({}, window, 0, 0)
        return acc

    def _creation_half(self, i: int, n: int, vec: FockVector, window: Window) -> WindowedSeries:
        """(1/(n-1)!) d^{n-1}/dx^{n-1} of the creation half, applied to vec."""
        out = {}
        for m in range(n, window.hi + n + 1):
            e = m - n
            if e in window and e >= 0:
                c = self.create(i, m, vec).scale(Fraction(comb(m - 1, n - 1)))
                if not c.is_zero():
                    out[e] = c
        exact = Window(min(window.lo, 0), window.hi)
        return WindowedSeries(out, exact, floor=0)

    def _lowering_half(self, h, n: int, vec: FockVector) -> WindowedSeries:
        """Entire series: derivative of the annihilation half applied to vec."""
        out = {}
        sign = Fraction((-1) ** (n - 1))
        for m in range(1, self.weight_max(vec) + 1):
            c = self.annihilate(h, m, vec).scale(sign * comb(m + n - 1, n - 1))
            if not c.is_zero():
                out[-m - n] = c
        return entire_series(out, Window(-n, 0))


def fock_str(v: FockVector) -> str:
    if v.is_zero():
        return "0"
    return " + ".join(f"({c}) {mono_str(m)}"
                      for m, c in sorted(v.terms.items(), key=lambda kv: (mono_weight(kv[0]), kv[0])))
