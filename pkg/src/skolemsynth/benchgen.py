"""Benchmark relation generators.

``gen_clique_spec(n)`` builds the relation "the chosen vertex set X is a
clique of size k in the graph Y": one input per possible edge, binary
input bits for k, one output per vertex.  ``gen_equality_spec(n)`` builds
the identity relation ``X = Y`` written as a conjunction of
two-literal equivalences.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import circuit as C
from .circuit import Circuit, Spec

Edge = Tuple[int, int]


@dataclass(frozen=True)
class CliqueInstance:
    n: int
    x: Tuple[int, ...]
    y_edges: Dict[Edge, int]
    z: Tuple[int, ...]  # least significant bit first
    spec: Spec = field(repr=False)

    def encode(self, edges: Iterable[Edge], k: int) -> Dict[int, int]:
        """Input assignment for a graph and a target clique size."""
        if k >= 1 << len(self.z):
            raise ValueError(f"k={k} does not fit in {len(self.z)} bits")
        es = {tuple(sorted(e)) for e in edges}
        a = {v: int(e in es) for e, v in self.y_edges.items()}
        a.update({b: (k >> i) & 1 for i, b in enumerate(self.z)})
        return a

    def decode(self, assignment: Mapping[int, int]) -> Tuple[List[Edge], int]:
        edges = [e for e, v in self.y_edges.items() if assignment[v]]
        k = sum(assignment[b] << i for i, b in enumerate(self.z))
        return edges, k

    def chosen(self, assignment: Mapping[int, int]) -> List[int]:
        """Vertices (1-based) selected by an output assignment."""
        return [v + 1 for v, xv in enumerate(self.x) if assignment[xv]]


def has_clique(n: int, edges: Iterable[Edge], k: int) -> bool:
    """Whether the graph on vertices 1..n has a clique of exactly ``k`` vertices."""
    if k > n:
        return False
    es = {tuple(sorted(e)) for e in edges}
    return any(all(p in es for p in itertools.combinations(vs, 2))
               for vs in itertools.combinations(range(1, n + 1), k))


def half_adder(a: Circuit, b: Circuit):
    return C.xor(a, b), C.conj(a, b)


def full_adder(a: Circuit, b: Circuit, cin: Circuit):
    s1, c1 = half_adder(a, b)
    s, c2 = half_adder(s1, cin)
    return s, C.disj(c1, c2)


def ripple_add(a: Sequence[Circuit], b: Sequence[Circuit]) -> List[Circuit]:
    """Sum of two little-endian bit vectors, one bit wider than the longer."""
    w = max(len(a), len(b))
    a = list(a) + [C.FALSE] * (w - len(a))
    b = list(b) + [C.FALSE] * (w - len(b))
    out = []
    carry = C.FALSE
    for ai, bi in zip(a, b):
        s, carry = full_adder(ai, bi, carry)
        out.append(s)
    out.append(carry)
    return out


def popcount(bits: Sequence[Circuit]) -> List[Circuit]:
    """Balanced tree of ripple-carry adders over single-bit summands."""
    layer = [[b] for b in bits] or [[C.FALSE]]
    while len(layer) > 1:
        nxt = [ripple_add(layer[i], layer[i + 1]) for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return layer[0]


def equal_bits(a: Sequence[Circuit], b: Sequence[Circuit]) -> Circuit:
    """Bitwise equality with the shorter vector zero-extended."""
    w = max(len(a), len(b))
    a = list(a) + [C.FALSE] * (w - len(a))
    b = list(b) + [C.FALSE] * (w - len(b))
    return C.conj([C.iff(p, q) for p, q in zip(a, b)])


def gen_clique(n: int) -> CliqueInstance:
    """Clique relation on ``n`` vertices.

    Variable ids: vertices ``1..n``, then edges ``(i, j)`` with ``i < j`` in
    lexicographic order, then the ``n.bit_length()`` bits of k.
    """
    if n < 1:
        raise ValueError("need at least one vertex")
    x = tuple(range(1, n + 1))
    names = {v: f"x{v}" for v in x}
    nxt = n + 1
    y_edges: Dict[Edge, int] = {}
    for i, j in itertools.combinations(range(1, n + 1), 2):
        y_edges[(i, j)] = nxt
        names[nxt] = f"y{i}_{j}"
        nxt += 1
    width = n.bit_length()
    z = tuple(range(nxt, nxt + width))
    for i, b in enumerate(z):
        names[b] = f"z{i}"
    edges_ok = C.conj([C.disj(C.lit(x[i - 1], False), C.lit(x[j - 1], False), C.lit(v))
                       for (i, j), v in y_edges.items()])
    size = popcount([C.lit(v) for v in x])
    size_ok = equal_bits(size, [C.lit(b) for b in z])
    spec = Spec(C.conj(edges_ok, size_ok), x, tuple(y_edges.values()) + z, names)
    return CliqueInstance(n, x, y_edges, z, spec)


def gen_clique_spec(n: int) -> Spec:
    return gen_clique(n).spec


def ground_truth(inst: CliqueInstance, samples: Optional[Iterable[Mapping[int, int]]] = None) -> str:
    """Sidecar text: one line per input assignment with edges, k and the answer.

    Without ``samples`` every input assignment is listed (only sensible for
    small ``n``).
    """
    if samples is None:
        samples = C.iter_assignments(inst.spec.inputs)
    lines = [f"# clique ground truth n={inst.n} z_bits={len(inst.z)}"]
    for a in samples:
        edges, k = inst.decode(a)
        es = ",".join(f"{i}-{j}" for i, j in edges) or "-"
        lines.append(f"edges={es} k={k} clique={int(has_clique(inst.n, edges, k))}")
    return "\n".join(lines) + "\n"


def gen_equality_spec(n: int) -> Spec:
    """``AND_i ((x_i & y_i) | (~x_i & ~y_i))`` with ``x_i = i`` and ``y_i = n + i``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    xs = tuple(range(1, n + 1))
    ys = tuple(range(n + 1, 2 * n + 1))
    names = {x: f"x{x}" for x in xs}
    names.update({y: f"y{y - n}" for y in ys})
    f = C.conj([C.disj(C.conj(C.lit(x), C.lit(y)), C.conj(C.lit(x, False), C.lit(y, False)))
                for x, y in zip(xs, ys)])
    return Spec(f, xs, ys, names)
