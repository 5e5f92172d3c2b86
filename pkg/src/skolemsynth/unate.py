"""Unate output detection and constant elimination.

An output is positive (negative) unate when flipping it from 0 to 1 (1 to
0) can never falsify the relation; the constant 1 (0) is then a
correct Skolem function for it.  Detection first looks for pure literals
and only then asks the oracle whether the cofactor-implication violation
formula is satisfiable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

from . import circuit as C
from . import sat
from .nnf import NnfCircuit

POS = "pos-unate"
NEG = "neg-unate"
BINATE = "binate"


@dataclass
class UnateResult:
    U0: frozenset
    U1: frozenset
    reduced: NnfCircuit
    oracle_calls: int = 0
    rounds: int = 0
    # (variable, verdict, how) in detection order; how is "pure" or "sat"
    trace: List[tuple] = field(default_factory=list)


def violation_formula(f: C.Circuit, x: int, positive: bool) -> C.Circuit:
    """``F|x=0 & ~F|x=1`` for positive, ``F|x=1 & ~F|x=0`` for negative."""
    lo, hi = C.cofactor(f, x, 0), C.cofactor(f, x, 1)
    if positive:
        return C.conj(lo, C.negate(hi))
    return C.conj(hi, C.negate(lo))


def _sat_unate(f: C.Circuit, x: int, budget: sat.Budget, backend: str):
    """Returns (verdict, oracle calls used).  Both-unate reports POS."""
    calls = 0
    for positive, verdict in ((True, POS), (False, NEG)):
        eta = violation_formula(f, x, positive)
        if eta.kind == C.CONST:
            if not eta.var:
                return verdict, calls
            continue
        calls += 1
        if not sat.solve(sat.encode(eta), budget=budget, backend=backend):
            return verdict, calls
    return BINATE, calls


def semantic_unate_check(s: NnfCircuit, x: int, budget: sat.Budget = sat.UNLIMITED,
                         backend: str = sat.DEFAULT_BACKEND) -> str:
    verdict, _ = _sat_unate(s.to_formula(), x, budget, backend)
    return verdict


def _pure_verdict(s: NnfCircuit, x: int) -> Optional[str]:
    sup = s.circuit.support
    has_pos = x in sup
    has_neg = s.xbar_map[x] in sup
    if has_pos and has_neg:
        return None
    # absent outputs are unate both ways; report positive
    return NEG if has_neg else POS


def _fix(s: NnfCircuit, x: int, value: int) -> NnfCircuit:
    return s.with_circuit(C.assign(s.circuit, {x: value, s.xbar_map[x]: 1 - value}))


def unate_fixpoint(s: NnfCircuit, budget: sat.Budget = sat.UNLIMITED,
                   backend: str = sat.DEFAULT_BACKEND) -> UnateResult:
    """Repeatedly remove unate outputs until a full pass finds none.

    Within a pass outputs are scanned in ascending id order and each
    detected constant is substituted before the next output is examined.
    """
    U0, U1 = set(), set()
    calls = 0
    rounds = 0
    trace = []
    remaining = sorted(s.xbar_map)
    while remaining:
        rounds += 1
        changed = False
        for x in list(remaining):
            budget.check()
            verdict = _pure_verdict(s, x)
            how = "pure"
            if verdict is None:
                verdict, used = _sat_unate(s.to_formula(), x, budget, backend)
                calls += used
                how = "sat"
            if verdict == BINATE:
                continue
            value = 1 if verdict == POS else 0
            s = _fix(s, x, value)
            (U1 if value else U0).add(x)
            remaining.remove(x)
            trace.append((x, verdict, how))
            changed = True
        if not changed:
            break
    return UnateResult(frozenset(U0), frozenset(U1), s, calls, rounds, trace)
