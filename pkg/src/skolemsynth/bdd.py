"""Reduced ordered BDDs and their compilation to decision-DNNF circuits.

A small self-contained manager: a node table of ``(level, low, high)``
triples with a unique table for hash-consing, memoized ``apply`` and
negation, no complement edges.  Ids 0 and 1 are the terminals.  Children
are always created before their parents, so ascending id order is a
topological order, which the compiler relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence

from . import circuit as C
from .circuit import Circuit, Spec

DEFAULT_NODE_CAP = 1 << 22

_AND, _OR = 0, 1


class BddSizeError(MemoryError):
    """The node table grew past its cap."""


class BddManager:
    def __init__(self, order: Sequence[int], cap: int = DEFAULT_NODE_CAP):
        self.order = tuple(order)
        self.level = {v: k for k, v in enumerate(self.order)}
        if len(self.level) != len(self.order):
            raise ValueError("variable order lists a variable twice")
        self.cap = cap
        term = len(self.order)
        self.var: List[int] = [term, term]  # levels; terminals sit below every variable
        self.lo: List[int] = [0, 1]
        self.hi: List[int] = [0, 1]
        self._unique: Dict[tuple, int] = {}
        self._apply: Dict[tuple, int] = {}
        self._not: Dict[int, int] = {0: 1, 1: 0}

    def __len__(self):
        return len(self.var)

    def mk(self, level: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (level, lo, hi)
        u = self._unique.get(key)
        if u is None:
            if len(self.var) >= self.cap:
                raise BddSizeError(f"BDD node table exceeded {self.cap} nodes")
            u = len(self.var)
            self.var.append(level)
            self.lo.append(lo)
            self.hi.append(hi)
            self._unique[key] = u
        return u

    def literal(self, v: int, positive: bool = True) -> int:
        lv = self.level[v]
        return self.mk(lv, 0, 1) if positive else self.mk(lv, 1, 0)

    def neg(self, u: int) -> int:
        r = self._not.get(u)
        if r is None:
            r = self.mk(self.var[u], self.neg(self.lo[u]), self.neg(self.hi[u]))
            self._not[u] = r
            self._not[r] = u
        return r

    def apply(self, op: int, a: int, b: int) -> int:
        if op == _AND:
            if a == 0 or b == 0:
                return 0
            if a == 1:
                return b
            if b == 1 or a == b:
                return a
        else:
            if a == 1 or b == 1:
                return 1
            if a == 0:
                return b
            if b == 0 or a == b:
                return a
        if a > b:
            a, b = b, a
        key = (op, a, b)
        r = self._apply.get(key)
        if r is not None:
            return r
        la, lb = self.var[a], self.var[b]
        top = min(la, lb)
        a0, a1 = (self.lo[a], self.hi[a]) if la == top else (a, a)
        b0, b1 = (self.lo[b], self.hi[b]) if lb == top else (b, b)
        r = self.mk(top, self.apply(op, a0, b0), self.apply(op, a1, b1))
        self._apply[key] = r
        return r

    def conj(self, a: int, b: int) -> int:
        return self.apply(_AND, a, b)

    def disj(self, a: int, b: int) -> int:
        return self.apply(_OR, a, b)

    def evaluate(self, u: int, env: Mapping[int, int]) -> int:
        while u > 1:
            u = self.hi[u] if env[self.order[self.var[u]]] else self.lo[u]
        return u

    def reachable(self, u: int) -> List[int]:
        """Internal nodes under ``u`` in ascending id order."""
        seen = set()
        stack = [u]
        while stack:
            n = stack.pop()
            if n <= 1 or n in seen:
                continue
            seen.add(n)
            stack.append(self.lo[n])
            stack.append(self.hi[n])
        return sorted(seen)


@dataclass(frozen=True)
class Bdd:
    manager: BddManager
    root: int

    @property
    def order(self):
        return self.manager.order

    def node_count(self) -> int:
        """Number of internal (non-terminal) nodes."""
        return len(self.manager.reachable(self.root))

    def evaluate(self, env: Mapping[int, int]) -> int:
        return self.manager.evaluate(self.root, env)

    def nodes(self):
        """``(id, variable, low, high)`` for every internal node, children first."""
        m = self.manager
        return [(u, m.order[m.var[u]], m.lo[u], m.hi[u]) for u in m.reachable(self.root)]

    def to_dot(self, names: Optional[Mapping[int, str]] = None) -> str:
        names = names or {}
        lines = ["digraph bdd {", '  n0 [shape=box,label="0"];', '  n1 [shape=box,label="1"];']
        for u, v, lo, hi in self.nodes():
            lines.append(f'  n{u} [label="{names.get(v, "v%d" % v)}"];')
            lines.append(f"  n{u} -> n{lo} [style=dashed];")
            lines.append(f"  n{u} -> n{hi};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def static_order(s: Spec) -> List[int]:
    """Outputs and inputs each ranked by fan-in score, then interleaved.

    A variable's score is the number of circuit nodes whose support
    contains it; higher scores go first, ties by id.
    """
    score = {v: 0 for v in s.variables}
    for n in C.postorder(s.circuit):
        for v in n.support:
            if v in score:
                score[v] += 1
    rank = lambda vs: sorted(vs, key=lambda v: (-score[v], v))
    xs, ys = rank(s.outputs), rank(s.inputs)
    out = []
    for k in range(max(len(xs), len(ys))):
        if k < len(xs):
            out.append(xs[k])
        if k < len(ys):
            out.append(ys[k])
    return out


def build_bdd(s, order: Optional[Sequence[int]] = None, cap: int = DEFAULT_NODE_CAP,
              manager: Optional[BddManager] = None) -> Bdd:
    """ROBDD of a Spec (or bare Circuit) under ``order``.

    Passing an existing ``manager`` shares its node table, so equivalent
    functions come back with the same root id.
    """
    c = s.circuit if isinstance(s, Spec) else s
    if manager is None:
        if order is None:
            order = static_order(s) if isinstance(s, Spec) else sorted(c.support)
        manager = BddManager(order, cap)
    m = manager
    memo: Dict[int, int] = {}
    for n in C.postorder(c):
        if n.kind == C.CONST:
            r = n.var
        elif n.kind == C.VAR:
            r = m.literal(n.var, n.positive)
        else:
            kids = [memo[ch.uid] for ch in n.children]
            r = kids[0]
            for k in kids[1:]:
                r = m.conj(r, k) if n.kind == C.AND else m.disj(r, k)
        memo[n.uid] = r
    return Bdd(m, memo[c.uid])


def bdd_to_wdnnf(b: Bdd) -> Circuit:
    """Each node ``(v, lo, hi)`` becomes ``(~v & lo') | (v & hi')``.

    Sub-results are shared, so the circuit is linear in the BDD size.  The
    two conjunctions never share a variable, so the result is decomposable.
    """
    if b.root <= 1:
        return C.const(b.root)
    out: Dict[int, Circuit] = {0: C.FALSE, 1: C.TRUE}
    for u, v, lo, hi in b.nodes():
        out[u] = C.disj(C.conj(C.lit(v, False), out[lo]), C.conj(C.lit(v, True), out[hi]))
    return out[b.root]


def compile_spec(s: Spec, order: Optional[Sequence[int]] = None, cap: int = DEFAULT_NODE_CAP):
    """Same relation, circuit replaced by its BDD-derived DNNF.  Returns ``(spec, bdd)``."""
    b = build_bdd(s, order, cap)
    return s.with_circuit(bdd_to_wdnnf(b)), b
