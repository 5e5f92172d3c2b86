import itertools

import pytest

from skolemsynth import benchgen as G
from skolemsynth import circuit as C

from oracle import assignments, ev, exists


def _shared_size(roots):
    return len({n.uid for r in roots for n in C.postorder(r)})


def test_clique_instance_shape():
    inst = G.gen_clique(4)
    assert len(inst.y_edges) == 6
    assert len(inst.z) == 3
    assert inst.spec.outputs == inst.x
    assert set(inst.spec.inputs) == set(inst.y_edges.values()) | set(inst.z)


def test_triangle_k3():
    inst = G.gen_clique(3)
    y = inst.encode([(1, 2), (1, 3), (2, 3)], 3)
    sols = [x for x in assignments(inst.x) if ev(inst.spec.circuit, {**x, **y})]
    assert sols == [{1: 1, 2: 1, 3: 1}]


def test_path_k3():
    inst = G.gen_clique(3)
    y = inst.encode([(1, 2), (2, 3)], 3)
    assert not exists(inst.spec.circuit, inst.x, y)


def test_any_graph_k1():
    inst = G.gen_clique(3)
    pairs = list(inst.y_edges)
    for r in range(len(pairs) + 1):
        for edges in itertools.combinations(pairs, r):
            assert exists(inst.spec.circuit, inst.x, inst.encode(edges, 1))


def test_k_larger_than_n():
    inst = G.gen_clique(2)
    y = inst.encode([(1, 2)], 3)
    assert not exists(inst.spec.circuit, inst.x, y)
    with pytest.raises(ValueError):
        inst.encode([], 4)


def test_has_clique_reference():
    assert G.has_clique(4, [(1, 2), (2, 3), (1, 3)], 3)
    assert not G.has_clique(4, [(1, 2), (2, 3), (3, 4)], 3)
    assert G.has_clique(4, [], 0) and G.has_clique(4, [], 1)
    assert not G.has_clique(2, [(1, 2)], 3)


def test_clique_soundness_small():
    for n in (1, 2, 3):
        inst = G.gen_clique(n)
        for y in assignments(inst.spec.inputs):
            edges, k = inst.decode(y)
            assert exists(inst.spec.circuit, inst.x, y) == G.has_clique(n, edges, k)


def test_measured_size_bounds():
    for n in (2, 4, 8, 16, 32):
        bits = G.popcount([C.lit(i) for i in range(1, n + 1)])
        assert _shared_size(bits) <= 30 * n
        assert C.count_nodes(G.gen_clique_spec(n).circuit) <= 3 * n * n + 30 * n + 10


def test_popcount_values():
    lits = [C.lit(i) for i in range(1, 6)]
    bits = G.popcount(lits)
    for a in assignments(range(1, 6)):
        assert sum(ev(b, a) << i for i, b in enumerate(bits)) == sum(a.values())


def test_ground_truth_sidecar():
    inst = G.gen_clique(2)
    text = G.ground_truth(inst)
    lines = text.splitlines()
    assert lines[0].startswith("# clique ground truth n=2")
    assert len(lines) == 1 + 2 ** len(inst.spec.inputs)
    assert "edges=1-2 k=2 clique=1" in lines
    assert "edges=- k=2 clique=0" in lines


def test_equality_spec():
    s = G.gen_equality_spec(1)
    assert s.circuit is C.disj(C.conj(C.lit(1), C.lit(2)), C.conj(C.lit(1, False), C.lit(2, False)))
    assert [s.name(v) for v in s.variables] == ["x1", "y1"]
    s0 = G.gen_equality_spec(0)
    assert s0.circuit is C.TRUE and s0.outputs == ()
    s3 = G.gen_equality_spec(3)
    for a in assignments(s3.variables):
        assert ev(s3.circuit, a) == int(all(a[i] == a[i + 3] for i in (1, 2, 3)))
