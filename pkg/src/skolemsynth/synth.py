"""End-to-end synthesis driver and the line-oriented run report."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import circuit as C
from . import sat
from .bdd import DEFAULT_NODE_CAP, BddSizeError, compile_spec
from .circuit import Circuit, Spec
from .goodness import Goodness
from .phase1 import Phase1Result, phase1_synthesize
from .phase2 import Phase2Result, cegar_loop

PIPELINES = ("nnf", "bdd", "both")


@dataclass
class SynthResult:
    status: str  # "done", "timeout" or "bdd-size"
    pipeline: str
    functions: Optional[Dict[int, Circuit]]
    phase1: Optional[Phase1Result] = None
    phase2: Optional[Phase2Result] = None
    goodness: Optional[Goodness] = None
    bdd_nodes: Optional[int] = None
    times: Dict[str, int] = field(default_factory=dict)

    @property
    def solved_in(self) -> Optional[str]:
        if self.status != "done":
            return None
        return "phase1" if self.phase2 is None else "phase2"

    def cost(self) -> Tuple:
        """Deterministic ranking key; smaller is better."""
        calls = self.phase1.oracle_calls if self.phase1 else 0
        iters = self.phase2.iterations if self.phase2 else 0
        return (self.status != "done", iters, calls, self.pipeline)


def _ms(t0: float) -> int:
    return int((time.perf_counter() - t0) * 1000)


def _run_pipeline(spec: Spec, pipeline: str, budget: sat.Budget, seed: int, order: str,
                  backend: str, bdd_cap: int, round_size: int) -> SynthResult:
    t0 = time.perf_counter()
    res = SynthResult("timeout", pipeline, None)
    work = spec
    try:
        if pipeline == "bdd":
            try:
                work, b = compile_spec(spec, cap=bdd_cap)
            except BddSizeError:
                res.status = "bdd-size"
                res.times["bdd.time_ms"] = _ms(t0)
                return res
            res.bdd_nodes = b.node_count()
            res.times["bdd.time_ms"] = _ms(t0)
        t1 = time.perf_counter()
        p1 = phase1_synthesize(work, budget=budget, order_method=order, backend=backend)
        res.phase1 = p1
        res.times["phase1.time_ms"] = _ms(t1)
    except sat.ResourceLimit:
        res.times["total.time_ms"] = _ms(t0)
        return res
    if p1.done:
        res.status = "done"
        res.functions = p1.skolem.finals()
        res.goodness = Goodness(0, 1 << len(spec.inputs), True)
    else:
        t2 = time.perf_counter()
        p2 = cegar_loop(spec, p1.skolem, budget=budget, seed=seed, k=round_size, backend=backend)
        res.phase2 = p2
        res.times["phase2.time_ms"] = _ms(t2)
        res.functions = p2.skolem.finals()
        res.goodness = p2.goodness
        res.status = "done" if p2.done else "timeout"
    res.times["total.time_ms"] = _ms(t0)
    return res


def synthesize(spec: Spec, pipeline: str = "nnf", timeout: Optional[float] = None, seed: int = 0,
               order: str = "fanin", backend: str = sat.DEFAULT_BACKEND, bdd_cap: int = DEFAULT_NODE_CAP,
               round_size: int = 8) -> SynthResult:
    """Run one pipeline, or both with a fresh budget each and keep the better.

    With ``pipeline="both"`` the winner is picked by a deterministic key
    (solved first, then fewer refinement rounds, then fewer oracle calls),
    so the same inputs always give the same functions and report.
    """
    if pipeline not in PIPELINES:
        raise ValueError(f"unknown pipeline {pipeline!r}")
    if pipeline != "both":
        return _run_pipeline(spec, pipeline, sat.Budget(timeout), seed, order, backend, bdd_cap, round_size)
    runs = [_run_pipeline(spec, p, sat.Budget(timeout), seed, order, backend, bdd_cap, round_size)
            for p in ("nnf", "bdd")]
    best = min(runs, key=SynthResult.cost)
    done_times = [r.times.get("total.time_ms", 0) for r in runs if r.status == "done"]
    if done_times:
        best.times["best.time_ms"] = min(done_times)
    return best


def run_report(spec: Spec, res: SynthResult, timing: bool = False) -> str:
    """``key=value`` lines; timings only when ``timing`` is set."""
    out: List[Tuple[str, object]] = [
        ("result", res.status),
        ("pipeline", res.pipeline),
        ("spec.outputs", len(spec.outputs)),
        ("spec.inputs", len(spec.inputs)),
        ("spec.nodes", C.count_nodes(spec.circuit)),
    ]
    if res.bdd_nodes is not None:
        out.append(("bdd.nodes", res.bdd_nodes))
    p1 = res.phase1
    if p1 is not None:
        if p1.unate is not None:
            out.append(("unate.pos", len(p1.unate.U1)))
            out.append(("unate.neg", len(p1.unate.U0)))
        out.append(("phase1.result", "done" if p1.done else "fail"))
        out.append(("phase1.oracle_calls", p1.oracle_calls))
    p2 = res.phase2
    out.append(("phase2.iterations", p2.iterations if p2 else 0))
    if p2 is not None:
        out.append(("phase2.patches", p2.patches))
        for entry in p2.log:
            widths = ",".join(map(str, entry.cube_widths)) or "-"
            num = "-" if entry.goodness_num is None else entry.goodness_num
            out.append((f"phase2.iter.{entry.iteration}",
                        f"patches:{entry.patches} widths:{widths} goodness_num:{num}"))
    if res.solved_in:
        out.append(("solved_in", res.solved_in))
    if res.goodness is not None:
        out.append(("goodness.num", res.goodness.numerator))
        out.append(("goodness.den", res.goodness.denominator))
        out.append(("goodness.exact", int(res.goodness.exact)))
    if res.functions is not None:
        out.append(("skolem.nodes", sum(C.count_nodes(f) for f in res.functions.values())))
    if timing:
        out += sorted(res.times.items())
    return "".join(f"{k}={v}\n" for k, v in out)
