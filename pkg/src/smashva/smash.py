"""Smash products V # H, their vertex structure, the diagonal and lattice
realizations, smash modules, and the generic associativity checkers.

The smash field of ``u (x) g`` against ``v (x) k`` is assembled per coproduct
term of g: the module field of the left leg applied to v, the carrier field
of u on top, tensored with the field of the right leg on k.  Exactness flows
through every factor, so a failed comparison can always be told apart from an
undecidable one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from math import floor as _floorfn
from typing import Callable, Optional

from .bialgebra import (GroupFockAlgebra, LatticeModel, fock_borcherds_ops,
                        fock_coproduct, fock_counit, group_coproduct,
                        group_counit)
from .errors import DomainError, TruncationError
from .fieldops import VertexOps
from .fock import FockSpace, VACUUM_KEY, mono_weight
from .module_action import HeisenbergAction, LatticeAction
from .reporting import CheckReport
from .series import (Window, WindowedSeries, apply_op_columns,
                     compare_bivariate, compare_series, exp_series_action,
                     series_mul, series_opmul)
from .vectors import (FockVector, LatticeVector, SmashVector, TensorVector,
                      tensor_pairs)


class SmashProduct:
    """V # H with registered constituent evaluators."""

    def __init__(self, label, v_single, h_single, y_v, y_v_floor, y_h,
                 y_m, y_m_floor, coproduct_h, counit_h, translate_v,
                 translate_h, vacuum_key, diag_bound=None):
        self.label = label
        self.v_single = v_single
        self.h_single = h_single
        self.y_v = y_v
        self.y_v_floor = y_v_floor
        self.y_h = y_h
        self.y_m = y_m
        self.y_m_floor = y_m_floor
        self.coproduct_h = coproduct_h
        self.counit_h = counit_h
        self.translate_v = translate_v
        self.translate_h = translate_h
        self.vacuum_key = vacuum_key
        self._diag_bound = diag_bound

    # -- element helpers -------------------------------------------------------

    def elem(self, vvec, hvec) -> SmashVector:
        return tensor_pairs(vvec, hvec, SmashVector)

    def vacuum(self) -> SmashVector:
        return SmashVector.from_key(self.vacuum_key)

    def translate(self, s: SmashVector) -> SmashVector:
        out = SmashVector.zero()
        for (vk, hk), c in s.terms.items():
            tv = self.translate_v(self.v_single(vk))
            out = out + SmashVector({(k2, hk): c * c2 for k2, c2 in tv.terms.items()})
            th = self.translate_h(self.h_single(hk))
            out = out + SmashVector({(vk, k2): c * c2 for k2, c2 in th.terms.items()})
        return out

    # -- the smash field ----------------------------------------------------------

    def y_sharp(self, a: SmashVector, b: SmashVector, window: Window) -> WindowedSeries:
        acc = None
        for (vk, hk), ca in a.terms.items():
            uvec = self.v_single(vk)
            for (wk, kk), cb in b.terms.items():
                wvec = self.v_single(wk)
                kvec = self.h_single(kk)
                for (h1k, h2k), cd in self.coproduct_h(self.h_single(hk)).terms.items():
                    t = self.y_m(self.h_single(h1k), wvec,
                                 Window(min(0, window.lo), window.hi))
                    s1 = series_opmul(lambda vec, w2: self.y_v(uvec, vec, w2),
                                      t, Window(min(window.lo, t.floor), window.hi))
                    f1 = s1.floor if s1.floor is not None else t.floor
                    s2 = self.y_h(self.h_single(h2k), kvec,
                                  Window(0, max(0, window.hi - f1)))
                    part = series_mul(
                        s1, s2,
                        mul=lambda x, y: tensor_pairs(x, y, SmashVector))
                    part = part.scale(ca * cb * cd)
                    acc = part if acc is None else acc.add(part)
        if acc is None:
            return WindowedSeries({}, window, 0, 0)
        return acc

    def sharp_floor(self, a: SmashVector, b: SmashVector) -> int:
        best = None
        for (vk, hk) in a.terms:
            for (wk, kk) in b.terms:
                f = self.y_m_floor(self.h_single(hk), self.v_single(wk))
                best = f if best is None else min(best, f)
        return 0 if best is None else best

    def sharp_mode(self, a: SmashVector, n: int, b: SmashVector) -> SmashVector:
        """Extract the n-th mode a_n b from the smash field."""
        e = -n - 1
        s = self.y_sharp(a, b, Window(min(e, 0), max(e, 0)))
        c = s.get(e)
        return SmashVector.zero() if c is None else c

    def ops(self) -> VertexOps:
        return VertexOps(
            label=self.label,
            y=self.y_sharp,
            y_floor=self.sharp_floor,
            translate=self.translate,
            vacuum=self.vacuum(),
            diag_bound=self._diag_bound)


def heisenberg_double(fock: FockSpace) -> SmashProduct:
    """The Fock bialgebra smashed with itself through annihilation fields."""
    act = HeisenbergAction(fock)
    carrier = fock_borcherds_ops(fock)

    def diag_bound(a, b, c):
        def wt(s):
            return max((mono_weight(vk) + mono_weight(hk) for vk, hk in s.terms),
                       default=0)
        return -(wt(a) + wt(b) + wt(c)) - 1

    return SmashProduct(
        label="fock_smash",
        v_single=lambda k: FockVector.from_key(k),
        h_single=lambda k: FockVector.from_key(k),
        y_v=carrier.y,
        y_v_floor=carrier.y_floor,
        y_h=carrier.y,
        y_m=act.y_m,
        y_m_floor=act.y_floor,
        coproduct_h=fock_coproduct,
        counit_h=fock_counit,
        translate_v=fock.translate,
        translate_h=fock.translate,
        vacuum_key=(VACUUM_KEY, VACUUM_KEY),
        diag_bound=diag_bound)


def lattice_double(model: LatticeModel) -> SmashProduct:
    """The twisted algebra smashed with the untwisted group bialgebra."""
    twisted = model.algebra("twisted")
    group = model.algebra("group")
    act = LatticeAction(twisted)
    carrier = twisted.borcherds_ops()
    hops = group.borcherds_ops()
    pair = model.lattice.pairing

    def diag_bound(a, b, c):
        best = None
        for (avk, ahk) in a.terms:
            for (bvk, bhk) in b.terms:
                for (cvk, chk) in c.terms:
                    g_ah, g_bv, g_bh, g_cv = ahk[0], bvk[0], bhk[0], cvk[0]
                    focks = (mono_weight(avk[1]) + mono_weight(ahk[1])
                             + mono_weight(bvk[1]) + mono_weight(bhk[1])
                             + mono_weight(cvk[1]) + mono_weight(chk[1]))
                    pairs_a = (pair(g_ah, g_bv) + pair(g_ah, g_bh)
                               + pair(g_ah, g_cv) + pair(g_bh, g_cv))
                    pairs_b = (pair(g_ah, g_bv) + pair(g_ah, g_cv)
                               + pair(g_bh, g_cv))
                    val = min(pairs_a, pairs_b) - focks - 1
                    best = val if best is None else min(best, val)
        return None if best is None else _floorfn(best)

    vac = model.lattice.zero()
    return SmashProduct(
        label="lattice_smash",
        v_single=lambda k: LatticeVector.from_key(k),
        h_single=lambda k: LatticeVector.from_key(k),
        y_v=carrier.y,
        y_v_floor=carrier.y_floor,
        y_h=hops.y,
        y_m=act.y_m,
        y_m_floor=act.y_floor,
        coproduct_h=lambda h: group_coproduct(group, h),
        counit_h=lambda h: group_counit(group, h),
        translate_v=twisted.translate,
        translate_h=group.translate,
        vacuum_key=((vac, VACUUM_KEY), (vac, VACUUM_KEY)),
        diag_bound=diag_bound)


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------

def diag_embed(u: FockVector) -> SmashVector:
    """The coproduct of the Fock bialgebra, retagged as a smash element."""
    return SmashVector(dict(fock_coproduct(u).terms))


def lattice_embed(model: LatticeModel, v: LatticeVector) -> SmashVector:
    """e_g (x) u  |->  (e_g (x) group-like leg) (x) coproduct of u."""
    out = {}
    for (p, m), c in v.terms.items():
        if not model.lattice.in_lattice(p):
            raise DomainError("lattice embedding is defined on lattice points only")
        for (m1, m2), c2 in fock_coproduct(FockVector.from_key(m)).terms.items():
            key = ((p, m1), (p, m2))
            out[key] = out.get(key, Fraction(0)) + c * c2
    return SmashVector(out)


# ---------------------------------------------------------------------------
# smash modules
# ---------------------------------------------------------------------------

@dataclass
class SmashModuleSetup:
    """A carrier W that is both a module for V and for H."""

    label: str
    smash: SmashProduct
    y_vw: Callable          # (v, w, window) -> WindowedSeries
    y_vw_floor: Callable
    y_mw: Callable          # (h, w, window) -> WindowedSeries (entire)
    y_mw_floor: Callable
    diag_bound: Optional[Callable] = None


def dual_module_setup(model: LatticeModel) -> SmashModuleSetup:
    """The dual-lattice module over the lattice smash product."""
    smash = lattice_double(model)
    twisted = model.algebra("twisted")
    dual = model.algebra("dual")
    act = LatticeAction(dual)
    pair = model.lattice.pairing

    def y_vw(v, w, window):
        s = twisted.exp_translation(v, window)
        out = {n: twisted.module_mul(c, w) for n, c in s.coeffs.items()}
        return WindowedSeries({n: c for n, c in out.items() if not c.is_zero()},
                              s.exact, s.floor, s.ceiling)

    def diag_bound(a, b, w):
        best = None
        for (avk, ahk) in a.terms:
            for (bvk, bhk) in b.terms:
                for (gw, mw) in w.terms:
                    g_ah, g_bv, g_bh = ahk[0], bvk[0], bhk[0]
                    focks = (mono_weight(avk[1]) + mono_weight(ahk[1])
                             + mono_weight(bvk[1]) + mono_weight(bhk[1])
                             + mono_weight(mw))
                    pairs_a = (pair(g_ah, g_bv) + pair(g_ah, g_bh)
                               + pair(g_ah, gw) + pair(g_bh, gw))
                    pairs_b = (pair(g_ah, g_bv) + pair(g_ah, gw)
                               + pair(g_bh, gw))
                    val = min(pairs_a, pairs_b) - focks - 1
                    best = val if best is None else min(best, val)
        return None if best is None else _floorfn(best)

    def y_vw_floor(v, w):
        return 0

    return SmashModuleSetup(
        label="dual_lattice_module",
        smash=smash,
        y_vw=y_vw,
        y_vw_floor=y_vw_floor,
        y_mw=act.y_m,
        y_mw_floor=act.y_floor,
        diag_bound=diag_bound)


def y_w_smash(setup: SmashModuleSetup, a: SmashVector, w, window: Window) -> WindowedSeries:
    """Composite module field of a smash element on the carrier W."""
    smash = setup.smash
    acc = None
    for (vk, hk), c in a.terms.items():
        t = setup.y_mw(smash.h_single(hk), w, Window(min(0, window.lo), window.hi))
        part = series_opmul(
            lambda vec, w2: setup.y_vw(smash.v_single(vk), vec, w2),
            t, Window(min(window.lo, t.floor), window.hi)).scale(c)
        acc = part if acc is None else acc.add(part)
    if acc is None:
        return WindowedSeries({}, window, 0, 0)
    return acc


def smash_module_ops(setup: SmashModuleSetup) -> VertexOps:
    """Evaluator bundle for the weak-associativity check of a smash module.

    The first argument of ``y`` is a smash element, the second a carrier
    element, so this bundle is only used where that asymmetry is respected
    (the iterate side applies the smash product's own field first).
    """

    def floor_fn(a, w):
        best = None
        for (vk, hk) in a.terms:
            f = setup.y_mw_floor(setup.smash.h_single(hk), w)
            best = f if best is None else min(best, f)
        return 0 if best is None else best

    return VertexOps(
        label=setup.label,
        y=lambda a, w, win: y_w_smash(setup, a, w, win),
        y_floor=floor_fn,
        translate=setup.smash.translate,
        vacuum=setup.smash.vacuum(),
        diag_bound=setup.diag_bound)


# ---------------------------------------------------------------------------
# the full lattice vertex structure, realized on smash generators
# ---------------------------------------------------------------------------

def lattice_vertex_ops(model: LatticeModel) -> VertexOps:
    return model.algebra("vl").vl_ops()


# ---------------------------------------------------------------------------
# generic checkers
# ---------------------------------------------------------------------------

def check_weak_assoc(ops: VertexOps, u, v, w, rect0: Window, rect2: Window,
                     lmax: int = 20, iter_ops: Optional[VertexOps] = None):
    """Search the smallest l certifying weak associativity on a rectangle.

    Compares (x0+x2)^l times both association orders of the field of u and v
    against w, on the certified intersection; returns ``(l, cells)`` on the
    first success, or ``(None, reason)`` when no l <= lmax works.

    ``iter_ops`` supplies the evaluators used against w when they differ from
    the pair evaluators (module carriers).
    """
    outer = iter_ops if iter_ops is not None else ops
    diag = outer.diag(u, v, w) if outer.diag_bound else None
    s = outer.y(v, w, rect2)
    f2 = s.floor if s.floor is not None else outer.y_floor(v, w)
    w1 = Window(rect0.lo, rect0.hi + max(0, rect2.hi - f2))
    a_cols = apply_op_columns(lambda vec, win: outer.y(u, vec, win), s, w1,
                              out_var=1, diag_floor=diag)
    a_sub = a_cols.subst_var1_to_sum(rect2.hi)

    inner = ops.y(u, v, Window(min(ops.y_floor(u, v), rect0.lo), rect0.hi))
    b_cols = apply_op_columns(lambda vec, win: outer.y(vec, w, win), inner,
                              rect2, out_var=2, diag_floor=diag)

    last_reason = "no l certified"
    for l in range(lmax + 1):
        poly = {(l - j, j): Fraction(comb(l, j)) for j in range(l + 1)}
        try:
            lhs = a_sub.mul_poly(poly) if l else a_sub
            rhs = b_cols.mul_poly(poly) if l else b_cols
            checked, mismatches = compare_bivariate(lhs, rhs, rect0, rect2,
                                                    strict=False)
        except TruncationError as exc:
            last_reason = str(exc)
            continue
        if not mismatches:
            return l, checked
        last_reason = f"l={l}: first mismatch at {mismatches[0][0]}"
    return None, last_reason


def check_skew_symmetry(ops: VertexOps, u, v, window: Window) -> CheckReport:
    """Field of u on v versus the translated, reflected field of v on u."""
    report = CheckReport(f"skew_symmetry[{ops.label}]")
    lhs = ops.y(u, v, window)
    reflected = ops.y(v, u, window).parity_flip()
    rhs = exp_series_action(ops.translate, reflected, window)
    try:
        checked, mismatches = compare_series(lhs, rhs, window, strict=False)
        report.add(f"coefficients agree on {window}", not mismatches,
                   None if not mismatches else mismatches[0])
    except TruncationError as exc:
        report.add("comparison certified", False, f"undecidable: {exc}")
    return report


def check_vacuum_axioms(ops: VertexOps, samples) -> CheckReport:
    """Vacuum and creation axioms for an evaluator bundle."""
    report = CheckReport(f"vacuum_axioms[{ops.label}]")
    ok_vac = True
    ok_create = True
    witness = {}
    for a in samples:
        s = ops.y(ops.vacuum, a, Window(-2, 2))
        expected = {0: a} if not _vec_is_zero(a) else {}
        if dict(s.coeffs) != expected:
            ok_vac = False
            witness.setdefault("vacuum acts as identity", a)
        s2 = ops.y(a, ops.vacuum, Window(ops.y_floor(a, ops.vacuum), 2))
        if any(n < 0 for n in s2.coeffs):
            ok_create = False
            witness.setdefault("creation regularity", a)
        c0 = s2.coeffs.get(0)
        c0 = c0 if c0 is not None else a - a
        if c0 != a:
            ok_create = False
            witness.setdefault("creation limit", a)
    report.add("vacuum acts as identity", ok_vac,
               witness.get("vacuum acts as identity"))
    report.add("creation axiom", ok_create,
               witness.get("creation regularity") or witness.get("creation limit"))
    return report


def _vec_is_zero(a):
    return a.is_zero()
