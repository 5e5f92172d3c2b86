"""CNF encoding of circuits and the SAT decision oracle.

The oracle is a thin layer over pysat.  Circuits are Tseitin-encoded; source
variables get the lowest solver ids (ordered by variable id) so dumps and
models are stable.  A small DPLL solver is kept for cross-checking the
backend in tests.
"""

from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from pysat.solvers import Solver

from . import circuit as C
from .circuit import Circuit

DEFAULT_BACKEND = "minisat22"


class ResourceLimit(Exception):
    """A time or conflict budget ran out before the oracle decided."""


@dataclass
class Budget:
    """Wall-clock and conflict limits shared by a whole run."""

    timeout: Optional[float] = None
    conflicts: Optional[int] = None
    deadline: Optional[float] = field(default=None, init=False)

    def __post_init__(self):
        if self.timeout is not None:
            self.deadline = time.monotonic() + self.timeout

    def remaining(self) -> Optional[float]:
        if self.deadline is None:
            return None
        return self.deadline - time.monotonic()

    def check(self):
        rem = self.remaining()
        if rem is not None and rem <= 0:
            raise ResourceLimit("time budget exhausted")


UNLIMITED = Budget()


@dataclass
class SatOutcome:
    sat: bool
    model: Optional[Dict[int, int]] = None

    def __bool__(self):
        return self.sat


class CnfInstance:
    """Clauses equisatisfiable with a circuit, plus the variable maps.

    ``var_map`` maps circuit variable ids to solver variables.  Variables
    outside the circuit support can be added with :meth:`solver_var` (they
    are then unconstrained).
    """

    def __init__(self):
        self.clauses: List[List[int]] = []
        self.var_map: Dict[int, int] = {}
        self.node_map: Dict[int, int] = {}
        self.nvars = 0
        self.source = None

    def _fresh(self) -> int:
        self.nvars += 1
        return self.nvars

    def solver_var(self, v: int) -> int:
        s = self.var_map.get(v)
        if s is None:
            s = self.var_map[v] = self._fresh()
        return s

    def lit(self, v: int, positive: bool = True) -> int:
        s = self.solver_var(v)
        return s if positive else -s

    def to_dimacs(self) -> str:
        lines = [f"c var {v} -> {self.var_map[v]}" for v in sorted(self.var_map)]
        lines.append(f"p cnf {self.nvars} {len(self.clauses)}")
        lines += [" ".join(map(str, cl + [0])) for cl in self.clauses]
        return "\n".join(lines) + "\n"

    def project(self, solver_model: Iterable[int]) -> Dict[int, int]:
        pos = {abs(l): int(l > 0) for l in solver_model}
        return {v: pos.get(s, 0) for v, s in self.var_map.items()}


def encode(c: Circuit, polarity: bool = False) -> CnfInstance:
    """Tseitin-encode ``c`` and assert its root.

    With ``polarity=True`` only the node-implies-children half of each gate
    definition is emitted (Plaisted-Greenbaum); sound here because in NNF
    every gate occurs positively.
    """
    inst = CnfInstance()
    inst.source = c
    for v in sorted(c.support):
        inst.solver_var(v)
    if c.kind == C.CONST:
        if not c.var:
            inst.clauses.append([])
        return inst
    for n in C.postorder(c):
        if n.kind == C.VAR:
            inst.node_map[n.uid] = inst.lit(n.var, n.positive)
            continue
        if n.kind == C.CONST:
            # constants only survive as the root, handled above
            raise AssertionError("unfolded constant inside circuit")
        g = inst._fresh()
        kids = [inst.node_map[ch.uid] for ch in n.children]
        if n.kind == C.AND:
            for k in kids:
                inst.clauses.append([-g, k])
            if not polarity:
                inst.clauses.append([g] + [-k for k in kids])
        else:
            inst.clauses.append([-g] + kids)
            if not polarity:
                for k in kids:
                    inst.clauses.append([g, -k])
        inst.node_map[n.uid] = g
    inst.clauses.append([inst.node_map[c.uid]])
    return inst


def _source_assumptions(inst: CnfInstance, assumptions) -> List[int]:
    out = []
    if isinstance(assumptions, dict):
        items = assumptions.items()
    else:
        items = ((abs(l), int(l > 0)) for l in assumptions)
    for v, b in items:
        out.append(inst.lit(v, bool(b)))
    return out


def _run(solver, assumptions: List[int], budget: Budget) -> Optional[bool]:
    budget.check()
    rem = budget.remaining()
    if rem is None and budget.conflicts is None:
        return solver.solve(assumptions=assumptions)
    if budget.conflicts is not None:
        solver.conf_budget(budget.conflicts)
    timer = None
    if rem is not None:
        timer = threading.Timer(rem, solver.interrupt)
        timer.start()
    try:
        res = solver.solve_limited(assumptions=assumptions, expect_interrupt=timer is not None)
    finally:
        if timer is not None:
            timer.cancel()
            solver.clear_interrupt()
    return res


def _new_solver(inst: CnfInstance, backend: str):
    return Solver(name=backend, bootstrap_with=[cl for cl in inst.clauses if cl])


def solve(inst: CnfInstance, assumptions=(), budget: Budget = UNLIMITED,
          backend: str = DEFAULT_BACKEND) -> SatOutcome:
    """Decide the instance under assumption literals.

    ``assumptions`` are signed circuit variable ids (``-v`` for ``v = 0``) or
    a ``{var: bit}`` dict.  Raises :class:`ResourceLimit` when the budget runs
    out; that is never reported as UNSAT.
    """
    assume = _source_assumptions(inst, assumptions)
    if any(not cl for cl in inst.clauses):
        return SatOutcome(False)
    if backend == "dpll":
        model = dpll(inst.clauses, inst.nvars, assume, budget)
        if model is None:
            return SatOutcome(False)
        return SatOutcome(True, inst.project(model))
    with _new_solver(inst, backend) as s:
        res = _run(s, assume, budget)
        if res is None:
            raise ResourceLimit("SAT call interrupted")
        if not res:
            return SatOutcome(False)
        return SatOutcome(True, inst.project(s.get_model()))


class Oracle:
    """Incremental solver over one instance, queried under assumptions.

    Keeps the backend solver alive between calls so learnt clauses carry
    over; counts its own calls in ``calls``.
    """

    def __init__(self, inst: CnfInstance, budget: Budget = UNLIMITED, backend: str = DEFAULT_BACKEND):
        self.inst = inst
        self.budget = budget
        self.calls = 0
        self._unsat = any(not cl for cl in inst.clauses)
        self._solver = None if self._unsat else _new_solver(inst, backend)

    def solve(self, assumptions=()) -> SatOutcome:
        self.calls += 1
        assume = _source_assumptions(self.inst, assumptions)
        if self._unsat:
            return SatOutcome(False)
        res = _run(self._solver, assume, self.budget)
        if res is None:
            raise ResourceLimit("SAT call interrupted")
        if not res:
            return SatOutcome(False)
        return SatOutcome(True, self.inst.project(self._solver.get_model()))

    def close(self):
        if self._solver is not None:
            self._solver.delete()
            self._solver = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def is_sat(c: Circuit, budget: Budget = UNLIMITED, backend: str = DEFAULT_BACKEND) -> SatOutcome:
    """Convenience: encode and solve ``c`` in one call."""
    if c.kind == C.CONST:
        return SatOutcome(bool(c.var), {} if c.var else None)
    return solve(encode(c), budget=budget, backend=backend)


def _projected_models(inst: CnfInstance, proj: Sequence[int], cap: Optional[int],
                      budget: Budget, backend: str, rng: Optional[random.Random] = None):
    """Yield distinct projections of models onto ``proj``, blocking each."""
    if any(not cl for cl in inst.clauses):
        return
    proj_lits = [inst.solver_var(v) for v in proj]
    with _new_solver(inst, backend) as s:
        found = 0
        while cap is None or found < cap:
            if rng is not None:
                s.set_phases([l if rng.random() < 0.5 else -l for l in range(1, inst.nvars + 1)])
            res = _run(s, [], budget)
            if res is None:
                raise ResourceLimit("SAT call interrupted")
            if not res:
                return
            model = s.get_model()
            full = inst.project(model)
            yield full
            found += 1
            truth = {abs(l): l > 0 for l in model}
            block = [-l if truth.get(l, False) else l for l in proj_lits]
            if not block:
                return
            s.add_clause(block)


def enumerate_projected(inst: CnfInstance, proj: Sequence[int], cap: Optional[int] = None,
                        budget: Budget = UNLIMITED,
                        backend: str = DEFAULT_BACKEND) -> Tuple[int, bool]:
    """Count distinct projections of models onto ``proj``.

    Returns ``(count, exhausted)``; ``exhausted`` is False when ``cap``
    stopped the enumeration before the solver reported UNSAT.
    """
    count = 0
    gen = _projected_models(inst, proj, None if cap is None else cap + 1, budget, backend)
    for _ in gen:
        count += 1
        if cap is not None and count > cap:
            return cap, False
    return count, True


def projected_models(inst: CnfInstance, proj: Sequence[int], cap: Optional[int] = None,
                     budget: Budget = UNLIMITED, backend: str = DEFAULT_BACKEND) -> List[Dict[int, int]]:
    return list(_projected_models(inst, proj, cap, budget, backend))


def sample_diverse(inst: CnfInstance, k: int, seed: int, proj: Optional[Sequence[int]] = None,
                   budget: Budget = UNLIMITED, backend: str = DEFAULT_BACKEND) -> List[Dict[int, int]]:
    """Up to ``k`` models, distinct on ``proj`` (default: all source vars).

    Decision polarities are re-randomised from ``seed`` before every call,
    which spreads the samples over the model space; the same seed gives the
    same sequence.
    """
    if proj is None:
        proj = sorted(inst.var_map)
    rng = random.Random(seed)
    return list(_projected_models(inst, proj, k, budget, backend, rng))


def dpll(clauses: Sequence[Sequence[int]], nvars: int, assumptions: Sequence[int] = (),
         budget: Budget = UNLIMITED) -> Optional[List[int]]:
    """Plain recursive-free DPLL with unit propagation; returns a model or None."""
    clauses = [list(cl) for cl in clauses]
    clauses += [[a] for a in assumptions]
    assign: Dict[int, bool] = {}
    trail: List[Tuple[int, bool]] = []  # (var, is_decision)

    def value(l):
        v = assign.get(abs(l))
        if v is None:
            return None
        return v if l > 0 else not v

    def propagate():
        changed = True
        while changed:
            changed = False
            for cl in clauses:
                unassigned = None
                n_un = 0
                sat = False
                for l in cl:
                    val = value(l)
                    if val is True:
                        sat = True
                        break
                    if val is None:
                        n_un += 1
                        unassigned = l
                if sat:
                    continue
                if n_un == 0:
                    return False
                if n_un == 1:
                    assign[abs(unassigned)] = unassigned > 0
                    trail.append((abs(unassigned), False))
                    changed = True
        return True

    while True:
        budget.check()
        if propagate():
            free = next((v for v in range(1, nvars + 1) if v not in assign), None)
            if free is None:
                return [v if assign[v] else -v for v in range(1, nvars + 1)]
            assign[free] = True
            trail.append((free, True))
            continue
        # backtrack to the most recent decision and flip it
        while trail:
            v, decision = trail.pop()
            val = assign.pop(v)
            if decision and val:
                assign[v] = False
                trail.append((v, False))
                break
        else:
            return None
