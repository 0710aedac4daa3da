"""Sparse exact linear combinations over hashable basis keys.

All vector spaces in the package (Fock vectors, twisted group-algebra
elements, tensors, smash-product elements) share one dict-backed
representation: ``{basis_key: scalar}`` with no stored zero coefficients.
The key shape is what distinguishes the spaces:

* Fock monomial: sorted tuple of ``(direction, mode)`` pairs, mode >= 1,
  standing for a product of creation operators applied to the vacuum.
* group-algebra key: ``(lattice_point, fock_monomial)``.
* tensor key: tuple of component keys.
* smash key: ``(carrier_key, bialgebra_key)``.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import sc_is_zero


class LinComb:
    """A finite linear combination of basis keys with exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for k, c in (terms or {}).items():
            if not sc_is_zero(c):
                clean[k] = c
        self.terms = clean

    @classmethod
    def from_key(cls, key, coeff=1):
        return cls({key: coeff})

    @classmethod
    def zero(cls):
        return cls({})

    def is_zero(self):
        return not self.terms

    def items(self):
        return self.terms.items()

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, 0) + c
            if sc_is_zero(s):
                out.pop(k, None)
            else:
                out[k] = s
        return self._wrap(out)

    def _wrap(self, d):
        v = object.__new__(type(self))
        v.terms = d
        return v

    def __neg__(self):
        return self._wrap({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        if type(s) is int and s == 1:
            return self
        if sc_is_zero(s):
            return self._wrap({})
        out = {}
        for k, c in self.terms.items():
            p = c * s
            if not sc_is_zero(p):
                out[k] = p
        return self._wrap(out)

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    __hash__ = None

    def __eq__(self, other):
        if isinstance(other, LinComb):
            return self.terms == other.terms
        return NotImplemented

    def apply_linear(self, fn):
        """Extend a key-wise map ``fn(key) -> LinComb`` linearly to self."""
        out = {}
        for k, c in self.terms.items():
            img = fn(k)
            for k2, c2 in img.terms.items():
                s = out.get(k2, 0) + c * c2
                if sc_is_zero(s):
                    out.pop(k2, None)
                else:
                    out[k2] = s
        return self._wrap(out)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{k}" for k, c in sorted(
            self.terms.items(), key=lambda kv: repr(kv[0])))


class FockVector(LinComb):
    """Element of the symmetric algebra on the lowering modes."""

    __slots__ = ()


class LatticeVector(LinComb):
    """Element of a (possibly twisted) group algebra tensored with Fock space."""

    __slots__ = ()


class TensorVector(LinComb):
    """Canonicalized element of a tensor power, keys are tuples of keys."""

    __slots__ = ()

    def flip(self):
        return self._wrap({tuple(reversed(k)): c for k, c in self.terms.items()})


class SmashVector(LinComb):
    """Element of a smash product V # H, keys are (carrier key, bialgebra key)."""

    __slots__ = ()


def tensor_pairs(left: LinComb, right: LinComb, cls=TensorVector):
    """Tensor two vectors into a pair-keyed vector of class ``cls``."""
    out = {}
    for k1, c1 in left.terms.items():
        for k2, c2 in right.terms.items():
            p = c1 * c2
            if not sc_is_zero(p):
                out[(k1, k2)] = out.get((k1, k2), 0) + p
    return cls({k: c for k, c in out.items() if not sc_is_zero(c)})
