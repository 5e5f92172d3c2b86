import random

import pytest
from hypothesis import given, settings, strategies as st

from skolemsynth import circuit as C
from skolemsynth.benchgen import gen_equality_spec
from skolemsynth.circuit import Spec

from oracle import assignments, ev, random_circuit, table

x1, x2, y1, y2 = (C.lit(v) for v in (1, 2, 3, 4))


def test_evaluate_and():
    assert C.evaluate(C.conj(x1, y1), {1: 1, 3: 1}) == 1
    assert C.evaluate(C.conj(x1, y1), {1: 1, 3: 0}) == 0


def test_evaluate_constant():
    assert C.evaluate(C.FALSE, {}) == 0
    assert C.evaluate(C.TRUE, {7: 1}) == 1


def test_evaluate_equality_n2():
    s = gen_equality_spec(2)
    # x1=1, x2=0, y1=1, y2=0
    assert C.evaluate(s.circuit, {1: 1, 2: 0, 3: 1, 4: 0}) == 1
    assert C.evaluate(s.circuit, {1: 1, 2: 1, 3: 1, 4: 0}) == 0


def test_evaluate_missing_variable():
    with pytest.raises(C.MissingVariableError):
        C.evaluate(C.conj(x1, y1), {1: 1})


def test_cofactor_examples():
    assert C.cofactor(C.conj(x1, y1), 1, 1) is y1
    assert C.cofactor(C.conj(x1, y1), 1, 0) is C.FALSE
    s = gen_equality_spec(1)
    assert C.cofactor(s.circuit, 1, 0) is C.lit(2, False)
    assert C.cofactor(y1, 1, 0) is y1


def test_substitute_examples():
    assert C.substitute(C.disj(x1, y1), {1: C.FALSE}) is y1
    assert C.substitute(C.xor(x1, y1), {1: y1}) is C.FALSE
    # y_{n-1} | (x_n <-> ~y_n) with x_n := y_n collapses to y_{n-1}
    psi = C.disj(y1, C.iff(x2, C.lit(4, False)))
    assert C.substitute(psi, {2: C.lit(4)}) is y1


def test_substitute_is_simultaneous():
    c = C.conj(x1, x2)
    out = C.substitute(c, {1: x2, 2: x1})
    assert out is C.conj(x2, x1)


def test_count_nodes():
    assert C.count_nodes(C.TRUE) == 1
    assert C.count_nodes(C.conj(x1, y1)) == 3


def _walk_count(c):
    seen = set()
    stack = [c]
    while stack:
        n = stack.pop()
        if n.uid in seen:
            continue
        seen.add(n.uid)
        stack.extend(n.children)
    return len(seen)


def test_count_nodes_shared_dag():
    s = gen_equality_spec(2)
    assert C.count_nodes(s.circuit) == _walk_count(s.circuit)


def test_transitive_fanin_counts():
    assert C.transitive_fanin_counts(C.conj(x1, y1), [1])[1] == 2
    assert C.transitive_fanin_counts(x1, [1])[1] == 1
    assert C.transitive_fanin_counts(C.disj(C.conj(x1, y1), C.conj(x1, y2)), [1])[1] == 4


def test_transitive_fanin_shared_leaf():
    # x1 occurs once as a leaf; OR(AND(x1, y1), x1) has three nodes above or at x1
    c = C.disj(C.conj(x1, y1), x1)
    # absorption is not applied, so the shape is kept
    assert C.count_nodes(c) == 4
    assert C.transitive_fanin_counts(c, [1])[1] == 3


def test_structural_hashing():
    assert C.conj(x1, y1) is C.conj(y1, x1)
    assert C.disj(C.conj(x1, y1), x2) is C.disj(x2, C.conj(y1, x1))
    assert C.conj(x1) is x1
    assert C.conj(x1, C.negate(x1)) is C.FALSE
    assert C.disj(x1, C.negate(x1)) is C.TRUE
    assert C.conj(x1, C.TRUE) is x1
    assert C.disj(x1, C.TRUE) is C.TRUE


def test_negation_is_nnf_and_involutive():
    c = C.disj(C.conj(x1, y1), C.conj(x2, C.lit(4, False)))
    n = C.negate(c)
    assert C.negate(n) is c
    assert all(node.kind in (C.VAR, C.AND, C.OR) for node in C.postorder(n))
    assert all(ev(n, a) == 1 - ev(c, a) for a in assignments([1, 2, 3, 4]))


def test_spec_validation():
    with pytest.raises(ValueError):
        Spec(C.conj(x1, y1), (1,), (1, 3))
    with pytest.raises(ValueError):
        Spec(C.conj(x1, y1), (1,), ())
    s = Spec(C.conj(x1, y1), (1,), (3,))
    assert s.variables == (1, 3)


def test_truth_table_matches_oracle():
    rng = random.Random(3)
    for _ in range(50):
        c = random_circuit(rng, [1, 2, 3, 4, 5])
        t = C.truth_table(c, [1, 2, 3, 4, 5])
        assert tuple((t >> r) & 1 for r in range(32)) == tuple(
            ev(c, {v: (r >> k) & 1 for k, v in enumerate([1, 2, 3, 4, 5])}) for r in range(32))


VARS = [1, 2, 3, 4, 5, 6]


@st.composite
def circuits(draw, depth=4):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_circuit(random.Random(seed), VARS, depth)


@settings(max_examples=150, deadline=None)
@given(circuits(), st.sampled_from(VARS), st.integers(0, 1))
def test_cofactor_semantics(c, v, b):
    cf = C.cofactor(c, v, b)
    for a in assignments(VARS):
        if a[v] == b:
            assert ev(cf, a) == ev(c, a)


@settings(max_examples=150, deadline=None)
@given(circuits(), st.sampled_from(VARS), circuits(depth=2))
def test_substitute_semantics(c, v, g):
    out = C.substitute(c, {v: g})
    for a in assignments(VARS):
        assert ev(out, a) == ev(c, {**a, v: ev(g, a)})


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_hashing_preserves_semantics(seed):
    # the same formula with children listed in different orders
    rng = random.Random(seed)
    leaves = [C.lit(rng.choice(VARS), rng.random() < 0.5) for _ in range(6)]
    left = C.conj(C.disj(leaves[0], leaves[1]), C.conj(leaves[2], C.disj(leaves[3], leaves[4], leaves[5])))
    right = C.conj(C.conj(C.disj(leaves[5], leaves[3], leaves[4]), leaves[2]), C.disj(leaves[1], leaves[0]))
    assert left is right
    assert table(left, VARS) == table(right, VARS)


@settings(max_examples=100, deadline=None)
@given(circuits())
def test_identity_substitution_keeps_size(c):
    assert C.substitute(c, {v: C.lit(v) for v in VARS}) is c
    assert C.count_nodes(C.substitute(c, {v: C.lit(v) for v in VARS})) == C.count_nodes(c)
