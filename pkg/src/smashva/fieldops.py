"""Uniform bundle of a carrier's vertex-structure evaluators.

Checkers are generic over the algebra being verified; each concrete carrier
(Fock oracle, Borcherds structures, lattice fields, smash products) exposes a
:class:`VertexOps` with:

* ``y(a, b, window)``   -- the state-field map applied to an argument,
  certified on at least the requested window (or TruncationError),
* ``y_floor(a, b)``     -- a proven lower bound for the exponent support,
* ``translate``         -- the canonical translation operator,
* ``vacuum``            -- the vacuum vector,
* ``diag_bound(a,b,c)`` -- optional lower bound for the total degree of
  nonzero cells of the iterated field of a against b against c (both
  association orders), used to certify two-variable comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional


@dataclass
class VertexOps:
    label: str
    y: Callable
    y_floor: Callable
    translate: Callable
    vacuum: object
    diag_bound: Optional[Callable] = None

    def diag(self, a, b, c):
        return None if self.diag_bound is None else self.diag_bound(a, b, c)
