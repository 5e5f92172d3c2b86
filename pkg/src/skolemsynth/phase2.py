"""Counterexample-guided repair of candidate Skolem functions.

Each round rebuilds the error formula over the current (input-only)
functions and samples a handful of its models with distinct input values.
A model gives an input valuation ``y*`` on which the candidates fail, a
witness output vector that works for ``y*``, and the vector the candidates
actually produced.  The outputs on which the two disagree are forced to the
witness values on a cube around ``y*``; the cube is grown greedily by
dropping literals while the oracle certifies that the forced vector is
still correct everywhere on it.  Since every patch repairs at least ``y*``
and never touches inputs outside its cube, the set of failing inputs
shrinks strictly and the loop ends after at most ``2**|Y|`` rounds.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

from . import circuit as C
from . import sat
from .circuit import Circuit, Spec
from .goodness import Goodness, goodness_ratio
from .phase1 import REFINED, ErrorFormula, SkolemVector, build_error_formula

log = logging.getLogger(__name__)

DEFAULT_ROUND_SIZE = 8


class MalformedModelError(RuntimeError):
    """A model handed to counterexample extraction does not fit the formula."""


@dataclass(frozen=True)
class Counterexample:
    y_star: Dict[int, int]
    x_witness: Dict[int, int]
    x_current: Dict[int, int]


@dataclass(frozen=True)
class RefinementPatch:
    target: int
    cube: Dict[int, int]
    value: int

    def cube_circuit(self) -> Circuit:
        return C.conj([C.lit(y, bool(b)) for y, b in sorted(self.cube.items())])


def extract_counterexample(eps: ErrorFormula, model: Mapping[int, int]) -> Counterexample:
    """Split an error-formula model into input, witness and current vectors."""
    spec = eps.spec
    y_star = {y: int(model.get(y, 0)) for y in spec.inputs}
    witness = {x: int(model.get(eps.xprime[x], 0)) for x in spec.outputs}
    current = {x: int(model.get(x, 0)) for x in spec.outputs}
    if not C.evaluate(spec.circuit, {**witness, **y_star}):
        raise MalformedModelError("witness block does not satisfy the relation")
    if C.evaluate(spec.circuit, {**current, **y_star}):
        raise MalformedModelError("candidate outputs satisfy the relation")
    return Counterexample(y_star, witness, current)


def _failing_vector(spec: Spec, functions: Mapping[int, Circuit], y_star: Mapping[int, int]):
    cur = {x: C.evaluate(functions[x], y_star) for x in spec.outputs}
    return cur, bool(C.evaluate(spec.circuit, {**cur, **y_star}))


def generalize_cube(spec: Spec, functions: Mapping[int, Circuit], cex: Counterexample,
                    budget: sat.Budget = sat.UNLIMITED, backend: str = sat.DEFAULT_BACKEND,
                    order: Optional[Sequence[int]] = None) -> List[RefinementPatch]:
    """One patch per disagreeing output, all sharing a certified cube.

    Inside any cube the patched vector is the constant witness on the
    disagreeing outputs and the old functions elsewhere, so a single
    incremental query with the cube as assumptions certifies each candidate
    drop.  If the budget runs out the full minterm of ``y*`` is used.
    """
    if order is None:
        order = spec.outputs
    disagree = [x for x in order if cex.x_current[x] != cex.x_witness[x]]
    cube = dict(cex.y_star)
    if not disagree:
        return []
    mixed = {x: (C.const(cex.x_witness[x]) if x in disagree else functions[x]) for x in spec.outputs}
    first = max([spec.max_var] + [max(f.support, default=0) for f in functions.values()]) + 1
    fresh = {x: first + k for k, x in enumerate(spec.outputs)}
    query = C.conj(C.rename(spec.circuit, fresh), C.negate(C.substitute(spec.circuit, mixed)))
    if query.kind != C.CONST:
        try:
            with sat.Oracle(sat.encode(query), budget, backend) as oracle:
                for y in spec.inputs:
                    trial = {v: b for v, b in cube.items() if v != y}
                    if not oracle.solve(trial):
                        cube = trial
        except sat.ResourceLimit:
            cube = dict(cex.y_star)
    elif not query.var:
        cube = {}
    return [RefinementPatch(x, cube, cex.x_witness[x]) for x in disagree]


def patched_function(psi: Circuit, patch: RefinementPatch) -> Circuit:
    cube = patch.cube_circuit()
    if patch.value:
        return C.disj(cube, psi)
    return C.conj(C.negate(cube), psi)


def apply_patch(vector: SkolemVector, patch: RefinementPatch) -> SkolemVector:
    """Force ``patch.target`` to ``patch.value`` on the cube, keep it elsewhere."""
    out = vector.copy()
    e = out.entries[patch.target]
    e.final = patched_function(e.final, patch)
    e.stage = e.final
    e.provenance = REFINED
    return out


@dataclass
class IterationLog:
    iteration: int
    samples: int
    patches: int
    cube_widths: List[int]
    goodness_num: Optional[int]
    # numerator after each applied patch, when tracking per patch
    patch_goodness: List[int] = field(default_factory=list)


@dataclass
class Phase2Result:
    done: bool
    skolem: SkolemVector
    iterations: int
    patches: int
    log: List[IterationLog] = field(default_factory=list)
    goodness: Optional[Goodness] = None

    @property
    def status(self) -> str:
        return "done" if self.done else "timeout"


def _error_instance(eps: ErrorFormula) -> sat.CnfInstance:
    inst = sat.encode(eps.circuit)
    for v in eps.spec.variables:
        inst.solver_var(v)
    for v in eps.xprime.values():
        inst.solver_var(v)
    return inst


def _error_count(spec: Spec, vector: SkolemVector, cap: Optional[int], budget: sat.Budget, backend: str) -> int:
    eps = build_error_formula(spec, vector.finals())
    return goodness_ratio(eps, spec.inputs, cap, budget, backend).numerator


def cegar_loop(spec: Spec, vector: SkolemVector, budget: sat.Budget = sat.UNLIMITED, seed: int = 0,
               k: int = DEFAULT_ROUND_SIZE, track_goodness=True, goodness_cap: Optional[int] = 4096,
               backend: str = sat.DEFAULT_BACKEND, max_iterations: Optional[int] = None) -> Phase2Result:
    """Repair ``vector`` (final functions over Y) until the error formula is UNSAT.

    ``track_goodness`` records the goodness numerator after every round
    (True) or after every applied counterexample as well (``"patch"``).
    """
    vector = vector.copy()
    for e in vector.entries.values():
        if e.final is None:
            raise ValueError("cegar_loop needs final (input-only) functions")
        e.stage = e.final
    rng = random.Random(seed)
    history: List[IterationLog] = []
    iterations = 0
    total_patches = 0
    try:
        while True:
            budget.check()
            finals = vector.finals()
            eps = build_error_formula(spec, finals)
            if eps.circuit.kind == C.CONST and not eps.circuit.var:
                return Phase2Result(True, vector, iterations, total_patches, history, Goodness(0, 1 << len(spec.inputs), True))
            samples = sat.sample_diverse(_error_instance(eps), k, rng.randrange(1 << 30),
                                         proj=list(spec.inputs), budget=budget, backend=backend)
            if not samples:
                return Phase2Result(True, vector, iterations, total_patches, history, Goodness(0, 1 << len(spec.inputs), True))
            if max_iterations is not None and iterations >= max_iterations:
                raise sat.ResourceLimit("iteration limit reached")
            iterations += 1
            widths = []
            applied = 0
            per_patch = []
            for i, model in enumerate(samples):
                if i == 0:
                    cex = extract_counterexample(eps, model)
                else:
                    y_star = {y: model[y] for y in spec.inputs}
                    cur, ok = _failing_vector(spec, vector.finals(), y_star)
                    if ok:
                        continue
                    witness = {x: model[eps.xprime[x]] for x in spec.outputs}
                    cex = Counterexample(y_star, witness, cur)
                patches = generalize_cube(spec, vector.finals(), cex, budget, backend, vector.order)
                for p in sorted(patches, key=lambda p: vector.order.index(p.target), reverse=True):
                    vector = apply_patch(vector, p)
                if patches:
                    applied += 1
                    widths.append(len(patches[0].cube))
                    if track_goodness == "patch":
                        per_patch.append(_error_count(spec, vector, goodness_cap, budget, backend))
            total_patches += applied
            num = None
            if track_goodness:
                num = per_patch[-1] if per_patch else _error_count(spec, vector, goodness_cap, budget, backend)
            history.append(IterationLog(iterations, len(samples), applied, widths, num, per_patch))
            log.debug("cegar iteration %d: %d samples, %d patches, widths %s, goodness %s",
                      iterations, len(samples), applied, widths, num)
    except sat.ResourceLimit:
        good = None
        try:
            good = goodness_ratio(build_error_formula(spec, vector.finals()), spec.inputs,
                                  goodness_cap, sat.Budget(timeout=5.0), backend)
        except sat.ResourceLimit:
            pass
        return Phase2Result(False, vector, iterations, total_patches, history, good)
