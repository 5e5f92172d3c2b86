"""Goodness ratio: the fraction of input valuations a candidate gets wrong."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import circuit as C
from . import sat
from .phase1 import ErrorFormula

# thresholds used when summarising how far a candidate vector is from correct
NEARLY_DONE = Fraction(2, 1000)
CLOSE = Fraction(1, 10)
FAR = Fraction(9, 10)


@dataclass(frozen=True)
class Goodness:
    numerator: int
    denominator: int
    exact: bool

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def band(self) -> str:
        r = self.ratio
        if r == 0:
            return "correct"
        if r < NEARLY_DONE:
            return "nearly-done"
        if r < CLOSE:
            return "close"
        if r > FAR:
            return "far"
        return "partial"


def goodness_ratio(eps: ErrorFormula, inputs: Optional[Sequence[int]] = None, cap: Optional[int] = None,
                   budget: sat.Budget = sat.UNLIMITED, backend: str = sat.DEFAULT_BACKEND) -> Goodness:
    """Count Y-projections of error-formula models over ``2**|Y|``.

    When ``cap`` cuts the enumeration short, ``exact`` is False and the
    ratio is a lower bound.
    """
    if inputs is None:
        inputs = eps.spec.inputs
    den = 1 << len(inputs)
    if eps.circuit.kind == C.CONST:
        return Goodness(den if eps.circuit.var else 0, den, True)
    inst = sat.encode(eps.circuit)
    count, exhausted = sat.enumerate_projected(inst, list(inputs), cap, budget, backend)
    return Goodness(count, den, exhausted)
