"""Polynomial first phase: candidate Skolem functions by constant substitution.

After unate outputs are fixed, the remaining outputs are ordered
``x_1 < ... < x_n``.  For position ``i`` the outputs before it (and their
partners) are set to 1, which over-approximates existential quantification
in the positively-unate renamed circuit; ``x_i``/``xbar_i`` are set to
``0/1`` or ``1/0``; the partners of later outputs are read back as
negations.  Negating the two resulting circuits gives under-approximations
of the two characteristic Skolem functions, and the smaller one becomes the
stage function ``psi_i(x_{i+1}..x_n, Y)``.  Stage functions are then
composed from the last position back to the first, and the whole vector is
certified with one call on the error formula.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence

from . import circuit as C
from . import sat
from .circuit import Circuit, Spec
from .nnf import NnfCircuit, hat_transform
from .unate import UnateResult, unate_fixpoint

UNATE_CONST = "unate-const"
DELTA_BAR = "delta-bar"
NOT_GAMMA_BAR = "not-gamma-bar"
REFINED = "refined"


@dataclass(frozen=True)
class OutputOrder:
    order: tuple
    scores: Mapping[int, int] = field(default_factory=dict)

    def __iter__(self):
        return iter(self.order)

    def __len__(self):
        return len(self.order)


@dataclass(frozen=True)
class CandidatePair:
    delta_bar: Circuit
    gamma_bar: Circuit


@dataclass
class SkolemEntry:
    stage: Circuit
    provenance: str
    final: Optional[Circuit] = None


@dataclass
class SkolemVector:
    """Per-output functions; ``order`` lists outputs first to last.

    Stage functions of an output may mention outputs later in ``order``;
    final functions mention inputs only.
    """

    order: tuple
    entries: Dict[int, SkolemEntry]

    def finals(self) -> Dict[int, Circuit]:
        return {x: e.final for x, e in self.entries.items()}

    def stages(self) -> Dict[int, Circuit]:
        return {x: e.stage for x, e in self.entries.items()}

    def copy(self) -> "SkolemVector":
        return SkolemVector(self.order, {x: SkolemEntry(e.stage, e.provenance, e.final)
                                         for x, e in self.entries.items()})

    @classmethod
    def from_finals(cls, order: Sequence[int], functions: Mapping[int, Circuit],
                    provenance: str = REFINED) -> "SkolemVector":
        return cls(tuple(order), {x: SkolemEntry(functions[x], provenance, functions[x]) for x in order})


@dataclass
class ErrorFormula:
    """``F(X', Y) & AND_i (x_i <-> psi_i) & ~F(X, Y)``."""

    circuit: Circuit
    xprime: Dict[int, int]
    spec: Spec


def choose_order(s: NnfCircuit, outputs: Optional[Sequence[int]] = None, method: str = "fanin") -> OutputOrder:
    """Order outputs by how many nodes have them in their transitive fan-in.

    An output and its partner count as one variable.  Ties (and
    ``method="index"``) fall back to ascending variable id.
    """
    if outputs is None:
        outputs = sorted(s.xbar_map)
    outputs = list(outputs)
    scores = {x: 0 for x in outputs}
    if method == "fanin":
        owner = {}
        for x in outputs:
            owner[x] = x
            owner[s.xbar_map[x]] = x
        for n in C.postorder(s.circuit):
            hit = {owner[v] for v in n.support if v in owner}
            for x in hit:
                scores[x] += 1
        order = sorted(outputs, key=lambda x: (scores[x], x))
    elif method == "index":
        order = sorted(outputs)
    else:
        raise ValueError(f"unknown ordering method {method!r}")
    return OutputOrder(tuple(order), scores)


def build_candidates(s: NnfCircuit, order: Sequence[int], i: int) -> CandidatePair:
    """Candidate pair for the output at 0-based position ``i`` of ``order``."""
    order = list(order)
    xb = s.xbar_map
    base: Dict[int, Circuit] = {}
    for x in order[:i]:
        base[x] = C.TRUE
        base[xb[x]] = C.TRUE
    for x in order[i + 1:]:
        base[xb[x]] = C.lit(x, False)
    xi = order[i]
    delta_arg = dict(base)
    delta_arg[xi] = C.FALSE
    delta_arg[xb[xi]] = C.TRUE
    gamma_arg = dict(base)
    gamma_arg[xi] = C.TRUE
    gamma_arg[xb[xi]] = C.FALSE
    delta_bar = C.negate(C.substitute(s.circuit, delta_arg))
    gamma_bar = C.negate(C.substitute(s.circuit, gamma_arg))
    return CandidatePair(delta_bar, gamma_bar)


def select_candidate(pair: CandidatePair):
    """Smaller of the two candidates by node count; ties go to delta_bar."""
    not_gamma = C.negate(pair.gamma_bar)
    if C.count_nodes(pair.delta_bar) <= C.count_nodes(not_gamma):
        return pair.delta_bar, DELTA_BAR
    return not_gamma, NOT_GAMMA_BAR


def reverse_substitute(psi: SkolemVector) -> SkolemVector:
    """Fill in final functions by composing stage functions back to front."""
    out = psi.copy()
    finals: Dict[int, Circuit] = {}
    for x in reversed(out.order):
        e = out.entries[x]
        deps = {v: finals[v] for v in e.stage.support if v in finals}
        e.final = C.substitute(e.stage, deps) if deps else e.stage
        finals[x] = e.final
    return out


def build_error_formula(spec: Spec, functions: Mapping[int, Circuit],
                        first_fresh: Optional[int] = None) -> ErrorFormula:
    """Error formula for stage or final functions (one per spec output)."""
    if first_fresh is None:
        seen = [spec.max_var] + [max(f.support, default=0) for f in functions.values()]
        first_fresh = max(seen) + 1
    xprime = {x: first_fresh + k for k, x in enumerate(spec.outputs)}
    f_prime = C.rename(spec.circuit, xprime)
    links = [C.iff(C.lit(x), functions[x]) for x in spec.outputs]
    eps = C.conj([f_prime] + links + [C.negate(spec.circuit)])
    return ErrorFormula(eps, xprime, spec)


def check_error_formula(eps: ErrorFormula, budget: sat.Budget = sat.UNLIMITED,
                        backend: str = sat.DEFAULT_BACKEND) -> sat.SatOutcome:
    if eps.circuit.kind == C.CONST:
        return sat.SatOutcome(bool(eps.circuit.var), None)
    inst = sat.encode(eps.circuit)
    for v in eps.spec.variables:
        inst.solver_var(v)
    for v in eps.xprime.values():
        inst.solver_var(v)
    return sat.solve(inst, budget=budget, backend=backend)


@dataclass
class Phase1Result:
    done: bool
    skolem: SkolemVector
    error: ErrorFormula
    unate: Optional[UnateResult]
    hat: NnfCircuit
    order: OutputOrder
    counterexample: Optional[Dict[int, int]] = None
    oracle_calls: int = 0
    candidate_sizes: Dict[int, tuple] = field(default_factory=dict)
    time_ms: int = 0

    @property
    def status(self) -> str:
        return "done" if self.done else "phase2"


def phase1_synthesize(spec: Spec, budget: sat.Budget = sat.UNLIMITED, order_method: str = "fanin",
                      backend: str = sat.DEFAULT_BACKEND, unate: bool = True) -> Phase1Result:
    """Unate elimination, candidate construction, composition, certification."""
    t0 = time.perf_counter()
    hat = hat_transform(spec.circuit, spec.outputs, origin=spec)
    if unate:
        ures = unate_fixpoint(hat, budget=budget, backend=backend)
        reduced = ures.reduced
    else:
        ures = None
        reduced = hat
    fixed = set()
    entries: Dict[int, SkolemEntry] = {}
    if ures is not None:
        for x in sorted(ures.U1):
            entries[x] = SkolemEntry(C.TRUE, UNATE_CONST)
        for x in sorted(ures.U0):
            entries[x] = SkolemEntry(C.FALSE, UNATE_CONST)
        fixed = set(ures.U0) | set(ures.U1)
    rest = [x for x in spec.outputs if x not in fixed]
    order = choose_order(reduced, sorted(rest), order_method)
    sizes = {}
    for i, x in enumerate(order.order):
        budget.check()
        pair = build_candidates(reduced, order.order, i)
        psi, prov = select_candidate(pair)
        sizes[x] = (C.count_nodes(pair.delta_bar), C.count_nodes(pair.gamma_bar))
        entries[x] = SkolemEntry(psi, prov)
    full_order = tuple(sorted(fixed)) + order.order
    vector = reverse_substitute(SkolemVector(full_order, entries))
    eps = build_error_formula(spec, vector.stages(),
                              first_fresh=max([spec.max_var] + list(hat.xbar_map.values())) + 1)
    out = check_error_formula(eps, budget=budget, backend=backend)
    calls = (ures.oracle_calls if ures else 0) + 1
    return Phase1Result(
        done=not out.sat,
        skolem=vector,
        error=eps,
        unate=ures,
        hat=hat,
        order=order,
        counterexample=out.model,
        oracle_calls=calls,
        candidate_sizes=sizes,
        time_ms=int((time.perf_counter() - t0) * 1000),
    )
