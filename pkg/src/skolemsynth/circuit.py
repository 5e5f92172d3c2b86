"""Hash-consed NNF circuits.

A circuit is a DAG whose leaves are constants or polarity-tagged variables
and whose internal nodes are n-ary AND / OR gates.  Negation only ever
appears at the leaves; ``~c`` pushes a negation down with De Morgan and is
memoised on the node, so every node has at most one negated twin.

Nodes are interned: building the same gate twice returns the same object,
which makes ``is``/``==`` structural equality and lets every traversal
share work through plain dicts keyed by node.  Constants are folded on
construction (``x & 0 -> 0``, ``x | ~x -> 1``, single-child gates collapse).
"""

from __future__ import annotations

import itertools
import threading
import weakref
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence

CONST = 0
VAR = 1
AND = 2
OR = 3

_KIND_NAMES = {CONST: "const", VAR: "var", AND: "and", OR: "or"}


class MissingVariableError(KeyError):
    """Raised when an assignment does not cover a circuit's support."""


class Circuit:
    """One interned node; the circuit rooted here is everything it reaches.

    Do not instantiate directly: use :func:`const`, :func:`lit`, :func:`conj`,
    :func:`disj` or the ``&``, ``|``, ``~`` operators.
    """

    __slots__ = ("kind", "var", "positive", "children", "uid", "skey",
                 "_neg", "_support", "__weakref__")

    def __init__(self, kind, var, positive, children, uid, skey):
        self.kind = kind
        # var id for VAR leaves, the bit for CONST leaves, 0 otherwise
        self.var = var
        self.positive = positive
        self.children = children
        self.uid = uid
        self.skey = skey
        self._neg = None
        self._support = None

    def __repr__(self):
        return f"Circuit({to_str(self)})"

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return negate(self)

    def __lt__(self, other):
        return (self.skey, self.uid) < (other.skey, other.uid)

    @property
    def is_const(self):
        return self.kind == CONST

    @property
    def is_leaf(self):
        return self.kind in (CONST, VAR)

    @property
    def support(self) -> frozenset:
        if self._support is None:
            for n in postorder(self):
                if n._support is not None:
                    continue
                if n.kind == VAR:
                    n._support = frozenset((n.var,))
                elif n.kind == CONST:
                    n._support = frozenset()
                else:
                    s = set()
                    for ch in n.children:
                        s |= ch._support
                    n._support = frozenset(s)
        return self._support


_table: "weakref.WeakValueDictionary[tuple, Circuit]" = weakref.WeakValueDictionary()
_uids = itertools.count()
_lock = threading.Lock()
_MASK = (1 << 61) - 1


def _intern(kind, var, positive, children):
    key = (kind, var, positive, tuple(ch.uid for ch in children))
    with _lock:
        node = _table.get(key)
        if node is None:
            # content hash independent of creation order; used for child order
            skey = hash((kind, var, positive, tuple(ch.skey for ch in children))) & _MASK
            node = Circuit(kind, var, positive, children, next(_uids), skey)
            _table[key] = node
        return node


_ZERO = _intern(CONST, 0, True, ())
_ONE = _intern(CONST, 1, True, ())
FALSE = _ZERO
TRUE = _ONE


def const(bit) -> Circuit:
    return _ONE if bit else _ZERO


def lit(var: int, positive: bool = True) -> Circuit:
    if var <= 0:
        raise ValueError(f"variable ids are positive integers, got {var}")
    return _intern(VAR, var, bool(positive), ())


def var(v: int) -> Circuit:
    return lit(v, True)


def _gate(kind, args) -> Circuit:
    absorbing, neutral = (_ZERO, _ONE) if kind == AND else (_ONE, _ZERO)
    seen = {}
    leaves = set()
    for a in args:
        if a is absorbing:
            return absorbing
        if a is neutral or a.uid in seen:
            continue
        if a.kind == VAR:
            if (a.var, not a.positive) in leaves:
                return absorbing
            leaves.add((a.var, a.positive))
        seen[a.uid] = a
    if not seen:
        return neutral
    if len(seen) == 1:
        return next(iter(seen.values()))
    for a in seen.values():
        if a.kind != VAR and a._neg is not None and a._neg.uid in seen:
            return absorbing
    return _intern(kind, 0, True, tuple(sorted(seen.values())))


def conj(*args) -> Circuit:
    if len(args) == 1 and not isinstance(args[0], Circuit):
        args = tuple(args[0])
    return _gate(AND, args)


def disj(*args) -> Circuit:
    if len(args) == 1 and not isinstance(args[0], Circuit):
        args = tuple(args[0])
    return _gate(OR, args)


def negate(c: Circuit) -> Circuit:
    """NNF negation by De Morgan; the result has at most as many nodes."""
    if c._neg is not None:
        return c._neg
    for n in postorder(c):
        if n._neg is not None:
            continue
        if n.kind == CONST:
            neg = const(not n.var)
        elif n.kind == VAR:
            neg = lit(n.var, not n.positive)
        else:
            kids = [ch._neg for ch in n.children]
            neg = _gate(OR if n.kind == AND else AND, kids)
        n._neg = neg
        if neg._neg is None:
            neg._neg = n
    return c._neg


def implies(a: Circuit, b: Circuit) -> Circuit:
    return disj(negate(a), b)


def iff(a: Circuit, b: Circuit) -> Circuit:
    return disj(conj(a, b), conj(negate(a), negate(b)))


def xor(a: Circuit, b: Circuit) -> Circuit:
    return disj(conj(a, negate(b)), conj(negate(a), b))


def ite(c: Circuit, t: Circuit, e: Circuit) -> Circuit:
    return disj(conj(c, t), conj(negate(c), e))


def postorder(root: Circuit) -> List[Circuit]:
    """Nodes reachable from ``root``, children before parents, each once."""
    out = []
    seen = set()
    stack = [(root, False)]
    while stack:
        n, expanded = stack.pop()
        if expanded:
            out.append(n)
            continue
        if n.uid in seen:
            continue
        seen.add(n.uid)
        stack.append((n, True))
        for ch in reversed(n.children):
            if ch.uid not in seen:
                stack.append((ch, False))
    return out


def count_nodes(c: Circuit) -> int:
    return len(postorder(c))


def evaluate(c: Circuit, assignment: Mapping[int, int]) -> int:
    vals: Dict[int, int] = {}
    for n in postorder(c):
        if n.kind == CONST:
            v = n.var
        elif n.kind == VAR:
            try:
                b = assignment[n.var]
            except KeyError:
                raise MissingVariableError(n.var) from None
            v = int(bool(b)) if n.positive else int(not b)
        elif n.kind == AND:
            v = int(all(vals[ch.uid] for ch in n.children))
        else:
            v = int(any(vals[ch.uid] for ch in n.children))
        vals[n.uid] = v
    return vals[c.uid]


def truth_table(c: Circuit, variables: Sequence[int]) -> int:
    """Bit-parallel truth table over ``variables``.

    Row ``r`` (bit ``r`` of the result) assigns ``variables[k]`` the value
    ``(r >> k) & 1``.  Variables of ``c`` not listed raise
    :class:`MissingVariableError`.
    """
    k = len(variables)
    rows = 1 << k
    full = (1 << rows) - 1
    masks = {}
    for idx, v in enumerate(variables):
        m = 0
        block = 1 << idx
        pattern = ((1 << block) - 1) << block
        step = block << 1
        for start in range(0, rows, step):
            m |= pattern << start
        masks[v] = m
    vals: Dict[int, int] = {}
    for n in postorder(c):
        if n.kind == CONST:
            t = full if n.var else 0
        elif n.kind == VAR:
            if n.var not in masks:
                raise MissingVariableError(n.var)
            t = masks[n.var] if n.positive else full ^ masks[n.var]
        elif n.kind == AND:
            t = full
            for ch in n.children:
                t &= vals[ch.uid]
        else:
            t = 0
            for ch in n.children:
                t |= vals[ch.uid]
        vals[n.uid] = t
    return vals[c.uid]


def substitute(c: Circuit, bindings: Mapping[int, Circuit]) -> Circuit:
    """Simultaneously replace variables by circuits.

    A negative leaf of a bound variable becomes the NNF negation of the
    replacement, so the result stays in NNF.
    """
    if not bindings:
        return c
    touched = set(bindings)
    new: Dict[int, Circuit] = {}
    for n in postorder(c):
        if touched.isdisjoint(n.support):
            new[n.uid] = n
        elif n.kind == VAR:
            g = bindings[n.var]
            new[n.uid] = g if n.positive else negate(g)
        else:
            kids = [new[ch.uid] for ch in n.children]
            new[n.uid] = _gate(n.kind, kids)
    return new[c.uid]


def cofactor(c: Circuit, v: int, bit) -> Circuit:
    return substitute(c, {v: const(bit)})


def assign(c: Circuit, values: Mapping[int, int]) -> Circuit:
    """Cofactor on several variables at once."""
    return substitute(c, {v: const(b) for v, b in values.items()})


def rename(c: Circuit, mapping: Mapping[int, int]) -> Circuit:
    return substitute(c, {old: lit(new) for old, new in mapping.items()})


def transitive_fanin_counts(c: Circuit, variables: Iterable[int]) -> Dict[int, int]:
    """For each variable, how many nodes have it in their transitive fan-in."""
    counts = {v: 0 for v in variables}
    for n in postorder(c):
        for v in n.support:
            if v in counts:
                counts[v] += 1
    return counts


def is_nnf_literal(c: Circuit) -> bool:
    return c.kind == VAR


def literals(c: Circuit) -> frozenset:
    """Set of (var, positive) pairs labelling leaves reachable from ``c``."""
    return frozenset((n.var, n.positive) for n in postorder(c) if n.kind == VAR)


def to_str(c: Circuit, names: Optional[Mapping[int, str]] = None) -> str:
    """Infix rendering; shared subterms are printed in full."""
    memo: Dict[int, str] = {}
    for n in postorder(c):
        if n.kind == CONST:
            s = str(n.var)
        elif n.kind == VAR:
            name = names.get(n.var, f"v{n.var}") if names else f"v{n.var}"
            s = name if n.positive else "~" + name
        else:
            op = " & " if n.kind == AND else " | "
            s = "(" + op.join(memo[ch.uid] for ch in n.children) + ")"
        memo[n.uid] = s
    return memo[c.uid]


@dataclass(frozen=True)
class Spec:
    """A Boolean relation ``F(X, Y)``.

    ``outputs`` are the existentially quantified X variables (the ones we
    synthesise functions for) and ``inputs`` the universally quantified Y.
    """

    circuit: Circuit
    outputs: tuple
    inputs: tuple
    names: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        xs, ys = set(self.outputs), set(self.inputs)
        if xs & ys:
            raise ValueError(f"outputs and inputs overlap: {sorted(xs & ys)}")
        stray = self.circuit.support - xs - ys
        if stray:
            raise ValueError(f"circuit mentions undeclared variables {sorted(stray)}")

    def name(self, v: int) -> str:
        return self.names.get(v, f"v{v}")

    @property
    def variables(self) -> tuple:
        return self.outputs + self.inputs

    @property
    def max_var(self) -> int:
        vs = list(self.outputs) + list(self.inputs) + list(self.circuit.support)
        return max(vs, default=0)

    def fresh_vars(self, count: int, start: Optional[int] = None) -> List[int]:
        base = self.max_var if start is None else start - 1
        return list(range(base + 1, base + 1 + count))

    def with_circuit(self, circuit: Circuit) -> "Spec":
        return Spec(circuit, self.outputs, self.inputs, self.names)


def iter_assignments(variables: Sequence[int]) -> Iterator[Dict[int, int]]:
    """All total assignments in truth-table row order (first var is the LSB)."""
    k = len(variables)
    for r in range(1 << k):
        yield {v: (r >> i) & 1 for i, v in enumerate(variables)}


def kind_name(c: Circuit) -> str:
    return _KIND_NAMES[c.kind]
