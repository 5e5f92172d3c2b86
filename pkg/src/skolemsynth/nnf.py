"""NNF ingestion, the output-renaming transform, and structural checks.

The renamed circuit ("hat" form) replaces every negative leaf of an output
variable ``x`` by a positive leaf of a fresh partner variable ``xbar``.
It is positive unate in every output and every partner, and plugging
``xbar := ~x`` back in recovers the original function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import circuit as C
from .circuit import Circuit, Spec
from .frontend import Aig, aig_literal_circuits


def to_nnf(aig: Aig, lit: Optional[int] = None, var_of_input: Optional[Mapping[int, int]] = None) -> Circuit:
    """NNF circuit for an AIG literal (default: the first output).

    Input variables keep their AIGER indices unless ``var_of_input`` says
    otherwise.  Every gate is materialised at most once per polarity.
    """
    if lit is None:
        lit = aig.outputs[0]
    if var_of_input is None:
        var_of_input = {l >> 1: l >> 1 for l in aig.inputs}
    return aig_literal_circuits(aig, var_of_input)(lit)


@dataclass(frozen=True)
class NnfCircuit:
    """A renamed NNF circuit together with its output/partner pairing."""

    circuit: Circuit
    xbar_map: Mapping[int, int]
    origin: Optional[Spec] = None
    partner_of: Dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "partner_of", {xb: x for x, xb in self.xbar_map.items()})

    def with_circuit(self, circuit: Circuit) -> "NnfCircuit":
        return NnfCircuit(circuit, self.xbar_map, self.origin)

    def to_formula(self) -> Circuit:
        """Plug ``xbar := ~x`` back in, giving a circuit equivalent to F."""
        return C.substitute(self.circuit, {xb: C.lit(x, False) for x, xb in self.xbar_map.items()})

    def literal_of(self, v: int, positive: bool) -> Tuple[int, bool]:
        """Literal a leaf stands for once partners are read as negations."""
        x = self.partner_of.get(v)
        if x is not None:
            return x, not positive
        return v, positive


def hat_transform(nnf: Circuit, outputs: Sequence[int], first_fresh: Optional[int] = None,
                  origin: Optional[Spec] = None) -> NnfCircuit:
    """Rename negative output leaves to fresh partner variables.

    Partners are allocated for every output, used or not, starting at
    ``first_fresh`` (default: one past the largest variable in sight).
    """
    if first_fresh is None:
        seen = list(nnf.support) + list(outputs)
        if origin is not None:
            seen += list(origin.variables)
        first_fresh = max(seen, default=0) + 1
    xbar = {x: first_fresh + i for i, x in enumerate(outputs)}
    new: Dict[int, Circuit] = {}
    for n in C.postorder(nnf):
        if n.kind == C.VAR:
            if n.var in xbar and not n.positive:
                new[n.uid] = C.lit(xbar[n.var])
            else:
                new[n.uid] = n
        elif n.kind == C.CONST:
            new[n.uid] = n
        else:
            kids = [new[ch.uid] for ch in n.children]
            new[n.uid] = C.conj(kids) if n.kind == C.AND else C.disj(kids)
    return NnfCircuit(new[nnf.uid], xbar, origin)


def spec_hat(spec: Spec) -> NnfCircuit:
    return hat_transform(spec.circuit, spec.outputs, origin=spec)


def literal_sets(c: Circuit, read=None) -> Dict[int, Tuple[int, int]]:
    """Per-node literal sets as ``(positive_vars, negative_vars)`` bitmasks.

    ``read(var, positive)`` can reinterpret a leaf (used to read partner
    variables as negated outputs).  Bit positions are variable ids.
    """
    sets: Dict[int, Tuple[int, int]] = {}
    for n in C.postorder(c):
        if n.kind == C.CONST:
            sets[n.uid] = (0, 0)
        elif n.kind == C.VAR:
            v, pos = read(n.var, n.positive) if read else (n.var, n.positive)
            sets[n.uid] = (1 << v, 0) if pos else (0, 1 << v)
        else:
            p = q = 0
            for ch in n.children:
                cp, cq = sets[ch.uid]
                p |= cp
                q |= cq
            sets[n.uid] = (p, q)
    return sets


@dataclass
class WdnnfViolation:
    node: Circuit
    first: int          # child index holding the literal
    second: int         # child index holding its complement
    literals: List[Tuple[int, bool]] = field(default_factory=list)

    @property
    def literal(self) -> Tuple[int, bool]:
        return self.literals[0]


@dataclass
class WdnnfResult:
    ok: bool
    violation: Optional[WdnnfViolation] = None

    def __bool__(self):
        return self.ok


def _bits(mask: int) -> List[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def check_wdnnf(c) -> WdnnfResult:
    """Check that no AND node has a literal under one child and its
    complement under a different child.

    Accepts a plain circuit or an :class:`NnfCircuit`; for the latter,
    partner leaves are read as negated outputs.
    """
    if isinstance(c, NnfCircuit):
        circuit, read = c.circuit, c.literal_of
    else:
        circuit, read = c, None
    sets = literal_sets(circuit, read)
    for n in C.postorder(circuit):
        if n.kind != C.AND:
            continue
        seen_p = seen_q = 0
        for j, ch in enumerate(n.children):
            p, q = sets[ch.uid]
            if (p & seen_q) or (q & seen_p):
                for i in range(j):
                    ip, iq = sets[n.children[i].uid]
                    clash = [(v, True) for v in _bits(ip & q)] + [(v, False) for v in _bits(iq & p)]
                    if clash:
                        clash.sort()
                        return WdnnfResult(False, WdnnfViolation(n, i, j, clash))
            seen_p |= p
            seen_q |= q
    return WdnnfResult(True)


POS_PURE = "pos-pure"
NEG_PURE = "neg-pure"
MIXED = "mixed"
ABSENT = "absent"


def pure_literals(c, outputs: Optional[Sequence[int]] = None) -> Dict[int, str]:
    """Classify each output by the polarities of its leaves."""
    if isinstance(c, NnfCircuit):
        circuit, read = c.circuit, c.literal_of
        if outputs is None:
            outputs = list(c.xbar_map)
    else:
        circuit, read = c, (lambda v, p: (v, p))
    pos, neg = set(), set()
    for n in C.postorder(circuit):
        if n.kind == C.VAR:
            v, p = read(n.var, n.positive)
            (pos if p else neg).add(v)
    out = {}
    for x in outputs:
        if x in pos and x in neg:
            out[x] = MIXED
        elif x in pos:
            out[x] = POS_PURE
        elif x in neg:
            out[x] = NEG_PURE
        else:
            out[x] = ABSENT
    return out
