"""Twisted group algebras over Fock space, their differential structure,
Borcherds fields, and the coalgebra layer.

Four ambient flavours share the key shape ``(lattice_point, fock_monomial)``:

* ``twisted`` -- the cocycle-twisted group algebra tensored with Fock space
  (a noncommutative differential algebra, hence a nonlocal vertex algebra
  via the Borcherds construction; never a coalgebra),
* ``group``   -- the untwisted group algebra (a differential bialgebra:
  group elements are group-like, lowering modes primitive),
* ``vl``      -- the same space as ``twisted`` carrying the full lattice
  vertex structure (generator fields only, see :meth:`GroupFockAlgebra.y_vl`),
* ``dual``    -- the module over the twisted algebra with group part in the
  dual lattice (no algebra structure of its own).
"""

from __future__ import annotations

from fractions import Fraction
from math import floor as _floorfn

from .errors import DomainError, TruncationError
from .fieldops import VertexOps
from .fock import FockSpace, VACUUM_KEY, fock_str, mono_mul, mono_weight
from .lattice import (CocycleTable, Lattice, _norm, add_points,
                      extend_cocycle, standard_cocycle)
from .reporting import CheckReport
from .series import (Window, WindowedSeries, apply_op_columns, constant_series,
                     entire_series, exp_action)
from .vectors import FockVector, LatticeVector, TensorVector

AMBIENTS = ("twisted", "group", "vl", "dual")


class LatticeModel:
    """A lattice with a chosen cocycle and the Fock space over it."""

    def __init__(self, lattice: Lattice, cocycle: CocycleTable | None = None):
        self.lattice = lattice
        self.cocycle = cocycle if cocycle is not None else standard_cocycle(lattice)
        self.extended = extend_cocycle(lattice, self.cocycle)
        self.fock = FockSpace(lattice.gram)
        self._pos_def = self._check_pos_def()

    def _check_pos_def(self) -> bool:
        g = [list(row) for row in self.lattice.gram]
        # leading principal minors via fraction-free elimination
        from .lattice import _det
        return all(_det([row[:k] for row in g[:k]]) > 0
                   for k in range(1, self.lattice.rank + 1))

    def algebra(self, ambient: str) -> "GroupFockAlgebra":
        if not hasattr(self, "_algebras"):
            self._algebras = {}
        if ambient not in self._algebras:
            self._algebras[ambient] = GroupFockAlgebra(self, ambient)
        return self._algebras[ambient]

    def conformal_shift(self, p) -> Fraction:
        """<p, p>/2, the group contribution to the conformal weight."""
        return self.lattice.pairing(p, p) / 2


class GroupFockAlgebra:
    """One ambient flavour of the group-Fock space (see module docstring)."""

    def __init__(self, model: LatticeModel, ambient: str):
        if ambient not in AMBIENTS:
            raise DomainError(f"unknown ambient {ambient!r}")
        self.model = model
        self.ambient = ambient
        self.fock = model.fock
        self.lattice = model.lattice
        self._exp_cache = {}
        self._eps_cache = {}
        self._field_cache = {}

    # -- element constructors -------------------------------------------------

    def _check_point(self, p):
        if self.ambient == "dual":
            if not self.lattice.in_dual(p):
                raise DomainError(f"point {p} is not in the dual lattice")
        elif not self.lattice.in_lattice(p):
            raise DomainError(f"point {p} is not a lattice point")

    def elem(self, p, fockvec: FockVector | None = None) -> LatticeVector:
        p = tuple(_norm(Fraction(c)) for c in p)
        self._check_point(p)
        u = fockvec if fockvec is not None else self.fock.vacuum()
        return LatticeVector({(p, m): c for m, c in u.terms.items()})

    def vacuum(self) -> LatticeVector:
        return self.elem(self.lattice.zero())

    def fock_weight_max(self, v: LatticeVector) -> int:
        return max((mono_weight(m) for _, m in v.terms), default=0)

    def group_support(self, v: LatticeVector):
        return sorted({p for p, _ in v.terms})

    # -- algebra structure -----------------------------------------------------

    def eps(self, a, b):
        if self.ambient == "group":
            return 1
        hit = self._eps_cache.get((a, b))
        if hit is None:
            hit = self.model.cocycle.value(a, b)
            self._eps_cache[(a, b)] = hit
        return hit

    def mul(self, u: LatticeVector, v: LatticeVector) -> LatticeVector:
        """Cocycle-twisted convolution with commuting Fock parts."""
        if self.ambient == "dual":
            raise DomainError("the dual-lattice module carries no algebra product")
        out = {}
        for (p1, m1), c1 in u.terms.items():
            for (p2, m2), c2 in v.terms.items():
                coef = c1 * c2 * self.eps(p1, p2)
                key = (add_points(p1, p2), mono_mul(m1, m2))
                s = out.get(key)
                out[key] = coef if s is None else s + coef
        return LatticeVector(out)

    def module_mul(self, u: LatticeVector, w: LatticeVector) -> LatticeVector:
        """Action of the twisted algebra on the dual-lattice module."""
        out = {}
        ext = self.model.extended
        for (p1, m1), c1 in u.terms.items():
            for (p2, m2), c2 in w.terms.items():
                coef = c1 * c2 * ext.value(p1, p2)
                key = (add_points(p1, p2), mono_mul(m1, m2))
                s = out.get(key)
                out[key] = coef if s is None else s + coef
        return LatticeVector(out)

    # -- differential and mode structure ----------------------------------------

    def translate(self, v: LatticeVector) -> LatticeVector:
        """L(-1): the group-part lowering mode plus the Fock translation."""

        def on_key(key):
            p, m = key
            u = FockVector.from_key(m)
            shifted = self.fock.create_h(p, 1, u) + self.fock.translate(u)
            return LatticeVector({(p, m2): c for m2, c in shifted.terms.items()})

        return v.apply_linear(on_key)

    def h_mode(self, h, n: int, v: LatticeVector) -> LatticeVector:
        """h(n): Fock action for n != 0, pairing eigenvalue for n = 0."""
        if n == 0:
            return v.apply_linear(lambda key: LatticeVector(
                {key: self.lattice.pairing(h, key[0])}))
        if n < 0:
            return v.apply_linear(lambda key: LatticeVector(
                {(key[0], m): c for m, c in
                 self.fock.create_h(h, -n, FockVector.from_key(key[1])).terms.items()}))
        return v.apply_linear(lambda key: LatticeVector(
            {(key[0], m): c for m, c in
             self.fock.annihilate(h, n, FockVector.from_key(key[1])).terms.items()}))

    def exp_field(self, h, sign: int, v: LatticeVector, window: Window) -> WindowedSeries:
        """E^sign(h, x) applied componentwise (no zero-mode factor)."""
        acc = None
        for (p, m), c in v.terms.items():
            inner = self.fock.exp_field(h, sign, FockVector.from_key(m), window)
            lifted = WindowedSeries(
                {e: LatticeVector({(p, m2): c * c2 for m2, c2 in u.terms.items()})
                 for e, u in inner.coeffs.items()},
                inner.exact, inner.floor, inner.ceiling)
            acc = lifted if acc is None else acc.add(lifted)
        if acc is None:
            return WindowedSeries({}, window, 0, 0)
        return acc

    # -- vertex structures -------------------------------------------------------

    def _exp_powers(self, key, hi: int):
        """Cached list of translate^k (key) / k! for k = 0..hi."""
        lst = self._exp_cache.get(key)
        if lst is None:
            lst = [LatticeVector.from_key(key)]
            self._exp_cache[key] = lst
        while len(lst) <= hi:
            k = len(lst)
            lst.append(self.translate(lst[-1]).scale(Fraction(1, k)))
        return lst

    def exp_translation(self, a: LatticeVector, window: Window) -> WindowedSeries:
        """exp(x L(-1)) a, certified on the window (power series, floor 0)."""
        out = {}
        for key, c in a.terms.items():
            powers = self._exp_powers(key, max(window.hi, 0))
            for k in range(0, max(window.hi, 0) + 1):
                vec = powers[k].scale(c)
                if vec.is_zero():
                    continue
                s = out.get(k)
                out[k] = vec if s is None else s + vec
        exact = Window(min(window.lo, 0), window.hi)
        return WindowedSeries({k: v for k, v in out.items() if k in exact},
                              exact, floor=0)

    def _field_key_powers(self, akey, bkey, hi: int):
        """Cached coefficients of the field of one basis key against another."""
        lst = self._field_cache.get((akey, bkey))
        if lst is None:
            lst = []
            self._field_cache[(akey, bkey)] = lst
        if len(lst) <= hi:
            b = LatticeVector.from_key(bkey)
            powers = self._exp_powers(akey, hi)
            for k in range(len(lst), hi + 1):
                lst.append(self.mul(powers[k], b))
        return lst

    def borcherds_y(self, a: LatticeVector, b: LatticeVector,
                    window: Window) -> WindowedSeries:
        """Differential-algebra field: exponentiated translation then multiply."""
        hi = max(window.hi, 0)
        out = {}
        for akey, ca in a.terms.items():
            for bkey, cb in b.terms.items():
                c = ca * cb
                prods = self._field_key_powers(akey, bkey, hi)
                for k in range(0, hi + 1):
                    vec = prods[k].scale(c)
                    if vec.is_zero():
                        continue
                    s = out.get(k)
                    out[k] = vec if s is None else s + vec
        exact = Window(min(window.lo, 0), window.hi)
        return WindowedSeries({k: v for k, v in out.items() if k in exact},
                              exact, floor=0)

    def y_vl(self, a: LatticeVector, b: LatticeVector, window: Window) -> WindowedSeries:
        """Full lattice vertex operator for group-algebra generators.

        Defined on the span of pure group elements (vacuum Fock part); the
        composition per argument component is: zero-mode power shift, twisted
        translation, annihilation exponential, then creation exponential.
        """
        acc = None
        for (alpha, am), ca in a.terms.items():
            if am != VACUUM_KEY:
                raise DomainError("lattice vertex fields are defined on group generators")
            for (gamma, m), cb in b.terms.items():
                shift = self.lattice.pairing(alpha, gamma)
                if shift.denominator != 1:
                    raise DomainError("non-integral zero-mode shift")
                shift = int(shift)
                coef = ca * cb * (self.model.extended.value(alpha, gamma)
                                  if self.ambient == "dual"
                                  else self.eps(alpha, gamma))
                point = add_points(alpha, gamma)
                neg = tuple(-x for x in alpha)
                u = FockVector.from_key(m)
                plus = self.fock.exp_field(neg, 1, u, window.shift(-shift))
                part = None
                for e, vec in plus.coeffs.items():
                    em = self.fock.exp_field(neg, -1, vec,
                                             Window(window.lo - shift - e,
                                                    window.hi - shift - e))
                    lifted = WindowedSeries(
                        {e2 + e: LatticeVector({(point, m2): c2 * coef
                                                for m2, c2 in w2.terms.items()})
                         for e2, w2 in em.coeffs.items()},
                        em.exact.shift(e),
                        em.floor + e if em.floor is not None else None, None)
                    part = lifted if part is None else part.add(lifted)
                if part is None:
                    continue
                part = part.shift(shift)
                acc = part if acc is None else acc.add(part)
        if acc is None:
            return WindowedSeries({}, window, 0, 0)
        return acc

    def y_vl_floor(self, a: LatticeVector, b: LatticeVector) -> int:
        out = None
        for (alpha, _), _c in a.terms.items():
            for (gamma, m), _c2 in b.terms.items():
                f = int(self.lattice.pairing(alpha, gamma)) - mono_weight(m)
                out = f if out is None else min(out, f)
        return 0 if out is None else out

    def vl_diag_bound(self, a, b, c) -> int | None:
        """Total-degree floor for iterated generator fields (either order)."""
        pair = self.lattice.pairing
        best = None
        for (al, am) in a.terms:
            for (be, bm) in b.terms:
                for (ga, cm) in c.terms:
                    val = (pair(al, be) + pair(al, ga) + pair(be, ga)
                           - mono_weight(am) - mono_weight(bm) - mono_weight(cm))
                    best = val if best is None else min(best, val)
        return None if best is None else _floorfn(best)

    # -- evaluator bundles ---------------------------------------------------------

    def borcherds_ops(self) -> VertexOps:
        return VertexOps(
            label=f"borcherds[{self.ambient}]",
            y=self.borcherds_y,
            y_floor=lambda a, b: 0,
            translate=self.translate,
            vacuum=self.vacuum(),
            diag_bound=lambda a, b, c: 0)

    def vl_ops(self) -> VertexOps:
        return VertexOps(
            label="lattice_vertex",
            y=self.y_vl,
            y_floor=self.y_vl_floor,
            translate=self.translate,
            vacuum=self.vacuum(),
            diag_bound=self.vl_diag_bound)

    def render(self, v: LatticeVector) -> str:
        if v.is_zero():
            return "0"
        parts = []
        for (p, m), c in sorted(v.terms.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            pt = ",".join(str(x) for x in p)
            parts.append(f"({c}) e[{pt}] {fock_str(FockVector.from_key(m))}")
        return " + ".join(parts)


def fock_borcherds_ops(fock: FockSpace) -> VertexOps:
    """Borcherds structure of the symmetric algebra with its translation."""
    cache = {}

    def powers(key, hi):
        lst = cache.get(key)
        if lst is None:
            lst = [FockVector.from_key(key)]
            cache[key] = lst
        while len(lst) <= hi:
            k = len(lst)
            lst.append(fock.translate(lst[-1]).scale(Fraction(1, k)))
        return lst

    def y(a, b, window):
        out = {}
        hi = max(window.hi, 0)
        for key, c in a.terms.items():
            pw = powers(key, hi)
            for k in range(0, hi + 1):
                vec = fock.mul(pw[k], b).scale(c)
                if vec.is_zero():
                    continue
                s = out.get(k)
                out[k] = vec if s is None else s + vec
        exact = Window(min(window.lo, 0), window.hi)
        return WindowedSeries({k: v for k, v in out.items() if k in exact},
                              exact, floor=0)

    return VertexOps(
        label="borcherds[fock]",
        y=y,
        y_floor=lambda a, b: 0,
        translate=fock.translate,
        vacuum=fock.vacuum(),
        diag_bound=lambda a, b, c: 0)


def fock_oracle_ops(fock: FockSpace) -> VertexOps:
    """The normal-ordered vertex structure as an evaluator bundle."""
    return VertexOps(
        label="fock_vertex_oracle",
        y=fock.vertex_field,
        y_floor=fock.y_floor,
        translate=fock.translate,
        vacuum=fock.vacuum(),
        diag_bound=fock.diag_bound)


# ---------------------------------------------------------------------------
# coalgebra structure
# ---------------------------------------------------------------------------

def _mono_coproduct(mono):
    """Expand a product of primitive modes into its two-sided splits."""
    from math import comb
    splits = {(VACUUM_KEY, VACUUM_KEY): Fraction(1)}
    i = 0
    while i < len(mono):
        j = i
        while j < len(mono) and mono[j] == mono[i]:
            j += 1
        factor, mult = mono[i], j - i
        nxt = {}
        for (l, r), c in splits.items():
            for k in range(mult + 1):
                key = (tuple(sorted(l + (factor,) * k)),
                       tuple(sorted(r + (factor,) * (mult - k))))
                nxt[key] = nxt.get(key, Fraction(0)) + c * comb(mult, k)
        splits = nxt
        i = j
    return splits


def fock_coproduct(v: FockVector) -> TensorVector:
    """Algebra-map extension of 'lowering modes are primitive'."""
    out = {}
    for mono, c in v.terms.items():
        for key, c2 in _mono_coproduct(mono).items():
            out[key] = out.get(key, Fraction(0)) + c * c2
    return TensorVector(out)


def fock_counit(v: FockVector):
    return v.terms.get(VACUUM_KEY, Fraction(0))


def group_coproduct(alg: GroupFockAlgebra, v: LatticeVector) -> TensorVector:
    """Group elements are group-like, lowering modes primitive."""
    if alg.ambient != "group":
        raise DomainError("only the untwisted group algebra is a bialgebra")
    out = {}
    for (p, mono), c in v.terms.items():
        for (l, r), c2 in _mono_coproduct(mono).items():
            key = ((p, l), (p, r))
            out[key] = out.get(key, Fraction(0)) + c * c2
    return TensorVector(out)


def group_counit(alg: GroupFockAlgebra, v: LatticeVector):
    if alg.ambient != "group":
        raise DomainError("only the untwisted group algebra is a bialgebra")
    total = Fraction(0)
    for (p, mono), c in v.terms.items():
        if mono == VACUUM_KEY:
            total = total + c
    return total


class BialgebraHandle:
    """A differential bialgebra presented through key-level primitives."""

    def __init__(self, label, vacuum, mul, translate, coproduct, counit,
                 single):
        self.label = label
        self.vacuum = vacuum
        self.mul = mul
        self.translate = translate
        self.coproduct = coproduct
        self.counit = counit
        self.single = single  # key -> one-term vector

    @staticmethod
    def for_fock(fock: FockSpace) -> "BialgebraHandle":
        return BialgebraHandle(
            label="fock_bialgebra",
            vacuum=fock.vacuum(),
            mul=fock.mul,
            translate=fock.translate,
            coproduct=fock_coproduct,
            counit=fock_counit,
            single=lambda k: FockVector.from_key(k))

    @staticmethod
    def for_group(alg: GroupFockAlgebra) -> "BialgebraHandle":
        if alg.ambient != "group":
            raise DomainError("only the untwisted group algebra is a bialgebra")
        return BialgebraHandle(
            label="group_bialgebra",
            vacuum=alg.vacuum(),
            mul=alg.mul,
            translate=alg.translate,
            coproduct=lambda v: group_coproduct(alg, v),
            counit=lambda v: group_counit(alg, v),
            single=lambda k: LatticeVector.from_key(k))

    # -- tensor utilities ----------------------------------------------------

    def tensor_mul(self, t1: TensorVector, t2: TensorVector) -> TensorVector:
        out = TensorVector.zero()
        for k1, c1 in t1.terms.items():
            for k2, c2 in t2.terms.items():
                prods = [self.mul(self.single(a), self.single(b))
                         for a, b in zip(k1, k2)]
                combo = TensorVector({(): c1 * c2})
                for p in prods:
                    combo = TensorVector({
                        key + (k3,): c * c3
                        for key, c in combo.terms.items()
                        for k3, c3 in p.terms.items()})
                out = out + combo
        return out

    def tensor_translate(self, t: TensorVector) -> TensorVector:
        out = TensorVector.zero()
        for key, c in t.terms.items():
            for slot in range(len(key)):
                moved = self.translate(self.single(key[slot]))
                out = out + TensorVector({
                    key[:slot] + (k2,) + key[slot + 1:]: c * c2
                    for k2, c2 in moved.terms.items()})
        return out

    def tensor_expand_slot(self, t: TensorVector, slot: int) -> TensorVector:
        """Apply the coproduct to one slot, yielding one more slot."""
        out = TensorVector.zero()
        for key, c in t.terms.items():
            inner = self.coproduct(self.single(key[slot]))
            out = out + TensorVector({
                key[:slot] + pair + key[slot + 1:]: c * c2
                for pair, c2 in inner.terms.items()})
        return out

    def tensor_counit_slot(self, t: TensorVector, slot: int):
        """Apply the counit to one slot, contracting it away."""
        out = {}
        for key, c in t.terms.items():
            e = self.counit(self.single(key[slot]))
            rest = key[:slot] + key[slot + 1:]
            if len(rest) == 1:
                rest = rest[0]
            cur = out.get(rest, Fraction(0))
            out[rest] = cur + c * e
        return out


def check_diff_bialgebra(handle: BialgebraHandle, samples) -> CheckReport:
    """Verify coalgebra axioms, algebra-map property, and differential
    compatibility of a bialgebra handle on concrete samples."""
    report = CheckReport(f"diff_bialgebra[{handle.label}]")

    def as_vec(d):
        out = None
        for k, c in d.items():
            term = handle.single(k).scale(c)
            out = term if out is None else out + term
        return out if out is not None else handle.vacuum().scale(0)

    ok_coassoc = True
    ok_counit = True
    ok_algmap_d = True
    ok_algmap_e = True
    ok_diff = True
    witness = {}
    for v in samples:
        t = handle.coproduct(v)
        left = handle.tensor_expand_slot(t, 0)
        right = handle.tensor_expand_slot(t, 1)
        if left != right:
            ok_coassoc = False
            witness.setdefault("coassociativity", v)
        id_left = as_vec(handle.tensor_counit_slot(t, 0))
        id_right = as_vec(handle.tensor_counit_slot(t, 1))
        if id_left != v or id_right != v:
            ok_counit = False
            witness.setdefault("counit identity", v)
        dv = handle.translate(v)
        if handle.coproduct(dv) != handle.tensor_translate(t):
            ok_diff = False
            witness.setdefault("differential compatibility", v)
        from .scalars import sc_is_zero
        if not sc_is_zero(handle.counit(dv)):
            ok_diff = False
            witness.setdefault("counit kills the derivative", v)
    for u in samples:
        for v in samples:
            uv = handle.mul(u, v)
            if handle.coproduct(uv) != handle.tensor_mul(handle.coproduct(u),
                                                         handle.coproduct(v)):
                ok_algmap_d = False
                witness.setdefault("coproduct is an algebra map", (u, v))
            if handle.counit(uv) != handle.counit(u) * handle.counit(v):
                ok_algmap_e = False
                witness.setdefault("counit is an algebra map", (u, v))
    report.add("coassociativity", ok_coassoc, witness.get("coassociativity"))
    report.add("counit identities", ok_counit, witness.get("counit identity"))
    report.add("coproduct is an algebra map", ok_algmap_d,
               witness.get("coproduct is an algebra map"))
    report.add("counit is an algebra map", ok_algmap_e,
               witness.get("counit is an algebra map"))
    report.add("differential compatibility", ok_diff,
               witness.get("differential compatibility")
               or witness.get("counit kills the derivative"))
    return report


def check_weak_commutativity(ops: VertexOps, a, b, args, kmax: int,
                             rect1: Window, rect2: Window):
    """Smallest k with (x1-x2)^k [Y(a,x1), Y(b,x2)] = 0 on the samples.

    Returns the smallest such k, or None when no k <= kmax works on the
    certified region.
    """
    diffs = []
    for w in args:
        sb = ops.y(b, w, rect2)
        lhs = apply_op_columns(lambda v, win: ops.y(a, v, win), sb, rect1,
                               out_var=1, diag_floor=ops.diag(a, b, w))
        sa = ops.y(a, w, rect1)
        rhs = apply_op_columns(lambda v, win: ops.y(b, v, win), sa, rect2,
                               out_var=2, diag_floor=ops.diag(a, b, w))
        diffs.append(lhs.sub(rhs))
    for k in range(kmax + 1):
        poly = {(k - j, j): Fraction((-1) ** j) * Fraction(_comb(k, j))
                for j in range(k + 1)}
        good = True
        for d in diffs:
            try:
                prod = d.mul_poly(poly) if k else d
            except TruncationError:
                good = False
                break
            if prod.coeffs:
                good = False
                break
        if good:
            return k
    return None


def _comb(n, k):
    from math import comb
    return comb(n, k)
