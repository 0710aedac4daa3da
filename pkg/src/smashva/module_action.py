"""Module actions of the Fock and group bialgebras, and the module-algebra
axiom checker.

Both actions send every acting element to an *entire* operator series (a
Laurent polynomial per argument), which is what makes the covariance
comparisons fully certifiable: the Fock bialgebra acts on itself through
annihilation fields, and the untwisted group bialgebra acts on the twisted
algebra (or on the dual-lattice module) through annihilation exponentials
with a zero-mode power shift.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import comb
from math import floor as _floorfn
from typing import Callable

from .bialgebra import (GroupFockAlgebra, fock_coproduct, fock_counit,
                        group_coproduct, group_counit)
from .errors import DomainError
from .fieldops import VertexOps
from .fock import FockSpace, VACUUM_KEY, mono_weight
from .reporting import CheckReport
from .series import (Window, WindowedSeries, apply_op_columns, compare_bivariate,
                     constant_series, covariance_rhs, entire_series)
from .vectors import FockVector, LatticeVector, TensorVector


def _compose_entire(ops, start: dict) -> dict:
    """Apply a list of entire operators (dicts of exponent shifts) in order."""
    cur = start
    for op in ops:
        nxt = {}
        for e, vec in cur.items():
            for e2, v2 in op(vec).items():
                if v2.is_zero():
                    continue
                key = e + e2
                s = nxt.get(key)
                nxt[key] = v2 if s is None else s + v2
        cur = {e: v for e, v in nxt.items() if not v.is_zero()}
    return cur


class HeisenbergAction:
    """The Fock bialgebra acting on itself by annihilation fields."""

    def __init__(self, fock: FockSpace):
        self.fock = fock

    def annihilation_field(self, h, v: FockVector, window: Window) -> WindowedSeries:
        """sum_{n>=0} h(n) v x^{-n-1}: an entire Laurent polynomial in 1/x."""
        return entire_series(self._lowering(h, 1, v), window)

    def _lowering(self, h, order: int, v: FockVector) -> dict:
        """Derivative field (1/(order-1)!) d^{order-1} of the annihilation field."""
        out = {}
        sign = Fraction((-1) ** (order - 1))
        for m in range(1, self.fock.weight_max(v) + 1):
            c = self.fock.annihilate(h, m, v).scale(sign * comb(m + order - 1, order - 1))
            if not c.is_zero():
                out[-m - order] = c
        return out

    def y_m(self, h_elem: FockVector, v: FockVector, window: Window) -> WindowedSeries:
        """Extension to products of generators: commuting derivative fields."""
        out = {}
        for mono, c in h_elem.terms.items():
            ops = [(lambda i, n: lambda u: self._lowering(self.fock.basis_coords(i), n, u))(i, n)
                   for (i, n) in mono]
            for e, vec in _compose_entire(ops, {0: v}).items():
                s = out.get(e)
                vec = vec.scale(c)
                out[e] = vec if s is None else s + vec
        return entire_series({e: v2 for e, v2 in out.items() if not v2.is_zero()}, window)

    def y_floor(self, h_elem: FockVector, v: FockVector) -> int:
        return -(self.fock.weight_max(h_elem) + self.fock.weight_max(v)) - 1

    def diag_bound(self, h, u, v) -> int:
        return -(self.fock.weight_max(h) + self.fock.weight_max(u)
                 + self.fock.weight_max(v)) - 1


class LatticeAction:
    """The untwisted group bialgebra acting on a twisted or dual carrier."""

    def __init__(self, carrier: GroupFockAlgebra):
        if carrier.ambient not in ("twisted", "dual", "vl"):
            raise DomainError("carrier must be the twisted algebra or the dual module")
        self.carrier = carrier
        self.model = carrier.model
        self.fock = carrier.fock
        self.include_zero_mode = True

    def shift_field(self, alpha, v: LatticeVector, window: Window) -> WindowedSeries:
        """The group-generator field: annihilation exponential times x^(zero mode).

        Per group component e_g (x) u the result is
        x^(<alpha, g>) e_g (x) (annihilation exponential of -alpha applied to u).
        """
        out = {}
        neg = tuple(-Fraction(x) for x in alpha)
        for (p, m), c in v.terms.items():
            pairing = self.model.lattice.pairing(alpha, p)
            if pairing.denominator != 1:
                raise DomainError("non-integral zero-mode shift")
            shift = int(pairing) if self.include_zero_mode else 0
            plus = self.fock.exp_field(neg, 1, FockVector.from_key(m),
                                       window.shift(-shift))
            for e, vec in plus.coeffs.items():
                key_e = e + shift
                lifted = LatticeVector({(p, m2): c * c2 for m2, c2 in vec.terms.items()})
                s = out.get(key_e)
                out[key_e] = lifted if s is None else s + lifted
        return entire_series({e: v2 for e, v2 in out.items() if not v2.is_zero()}, window)

    def _lowering(self, h, order: int, v: LatticeVector) -> dict:
        """Derivative annihilation field on the carrier (zero mode included)."""
        out = {}
        sign = Fraction((-1) ** (order - 1))
        top = self.carrier.fock_weight_max(v)
        for m in range(0, top + 1):
            c = self.carrier.h_mode(h, m, v)
            if m == 0 and not self.include_zero_mode:
                c = LatticeVector.zero()
            c = c.scale(sign * comb(m + order - 1, order - 1))
            if not c.is_zero():
                out[-m - order] = c
        return out

    def y_m(self, h_elem: LatticeVector, v: LatticeVector, window: Window) -> WindowedSeries:
        """Monomials e_g (x) fock part act by the shift field times derivative fields."""
        out = {}
        for (p, mono), c in h_elem.terms.items():
            ops = [(lambda i, n: lambda u: self._lowering(self.fock.basis_coords(i), n, u))(i, n)
                   for (i, n) in mono]
            start = {e: vec for e, vec in
                     self.shift_field(p, v, window).coeffs.items()}
            for e, vec in _compose_entire(ops, start).items():
                vec = vec.scale(c)
                s = out.get(e)
                out[e] = vec if s is None else s + vec
        return entire_series({e: v2 for e, v2 in out.items() if not v2.is_zero()}, window)

    def y_floor(self, h_elem: LatticeVector, v: LatticeVector) -> int:
        best = None
        for (p, mono) in h_elem.terms:
            for (g, m) in v.terms:
                f = (self.model.lattice.pairing(p, g)
                     - mono_weight(mono) - mono_weight(m) - 1)
                best = f if best is None else min(best, f)
        return 0 if best is None else _floorfn(best)

    def diag_bound(self, h, u, v) -> int | None:
        pair = self.model.lattice.pairing
        best = None
        for (p, hm) in h.terms:
            for (gu, um) in u.terms:
                for (gv, vm) in v.terms:
                    val = (pair(p, add_pts(gu, gv))
                           - mono_weight(hm) - mono_weight(um) - mono_weight(vm) - 1)
                    best = val if best is None else min(best, val)
        return None if best is None else _floorfn(best)


def add_pts(a, b):
    return tuple(x + y for x, y in zip(a, b))


@dataclass
class ModuleSetup:
    """Everything the module-algebra axiom checker needs."""

    label: str
    y_m: Callable                 # (h, v, window) -> WindowedSeries
    y_m_floor: Callable           # (h, v) -> int
    coproduct: Callable           # h -> TensorVector over H keys
    counit: Callable              # h -> Scalar
    h_single: Callable            # H key -> one-term H vector
    carrier: VertexOps            # the carrier's own vertex structure
    diag_bound: Callable = None   # (h, u, v) -> int | None

    def copy(self, **kw):
        return replace(self, **kw)


def heisenberg_setup(fock: FockSpace, carrier_ops: VertexOps) -> ModuleSetup:
    act = HeisenbergAction(fock)
    return ModuleSetup(
        label="fock_on_fock",
        y_m=act.y_m,
        y_m_floor=act.y_floor,
        coproduct=fock_coproduct,
        counit=fock_counit,
        h_single=lambda k: FockVector.from_key(k),
        carrier=carrier_ops,
        diag_bound=act.diag_bound)


def lattice_setup(group_alg: GroupFockAlgebra, carrier: GroupFockAlgebra,
                  carrier_ops: VertexOps) -> ModuleSetup:
    act = LatticeAction(carrier)
    return ModuleSetup(
        label=f"group_on_{carrier.ambient}",
        y_m=act.y_m,
        y_m_floor=act.y_floor,
        coproduct=lambda h: group_coproduct(group_alg, h),
        counit=lambda h: group_counit(group_alg, h),
        h_single=lambda k: LatticeVector.from_key(k),
        carrier=carrier_ops,
        diag_bound=act.diag_bound)


def check_module_va(setup: ModuleSetup, gens, args, rect1: Window,
                    rect2: Window) -> CheckReport:
    """Verify the three module-algebra conditions on samples.

    (i) every action field lands in carrier x Laurent series (bounded below
    and fully computed), (ii) the vacuum goes to its counit multiple, and
    (iii) the field of h moves past the carrier's vertex operator through
    the coproduct of h, with the inner argument expanded at x1 - x2.
    """
    report = CheckReport(f"module_va[{setup.label}]")
    vac = setup.carrier.vacuum
    ok_range = True
    ok_vac = True
    witness = {}
    for h in gens:
        s = setup.y_m(h, vac, Window(-2, 2))
        want = constant_series(vac, Window(-2, 2)).scale(setup.counit(h))
        if any(s.coeffs.get(n) != want.coeffs.get(n)
               for n in set(s.coeffs) | set(want.coeffs)):
            ok_vac = False
            witness.setdefault("vacuum", h)
        for v in args:
            out = setup.y_m(h, v, Window(-2, 2))
            if not out.is_entire or out.floor is None:
                ok_range = False
                witness.setdefault("range", (h, v))
    report.add("fields land in V ((x))", ok_range, witness.get("range"))
    report.add("vacuum goes to counit multiple", ok_vac, witness.get("vacuum"))

    ok_cov = True
    for h in gens:
        for u in args:
            for v in args:
                if not _covariance_holds(setup, h, u, v, rect1, rect2):
                    ok_cov = False
                    witness.setdefault("covariance", (h, u, v))
    report.add("coproduct covariance", ok_cov, witness.get("covariance"))
    return report


def _covariance_holds(setup: ModuleSetup, h, u, v, rect1: Window,
                      rect2: Window) -> bool:
    carrier = setup.carrier
    s_uv = carrier.y(u, v, rect2)
    diag = None if setup.diag_bound is None else setup.diag_bound(h, u, v)
    lhs = apply_op_columns(lambda vec, w: setup.y_m(h, vec, w), s_uv, rect1,
                           out_var=1, diag_floor=diag)
    rhs = None
    inner_w = Window(min(setup.y_m_floor(h, u), 0), rect1.hi + rect2.hi + 1)
    for (k1, k2), c in setup.coproduct(h).terms.items():
        inner = setup.y_m(setup.h_single(k1), u, inner_w)
        t = setup.y_m(setup.h_single(k2), v, rect1)
        part = covariance_rhs(carrier.y, carrier.y_floor, inner, -1, t,
                              rect1, rect2).scale(c)
        rhs = part if rhs is None else rhs.add(part)
    if rhs is None:
        return lhs.coeffs == {}
    _, mismatches = compare_bivariate(lhs, rhs, rect1, rect2, strict=True)
    return not mismatches
