import random

import pytest
from hypothesis import given, settings, strategies as st

from skolemsynth import circuit as C
from skolemsynth import sat
from skolemsynth.benchgen import gen_equality_spec
from skolemsynth.phase1 import build_error_formula
from skolemsynth.unate import violation_formula

from oracle import assignments, ev, random_circuit

x1, y1, y2 = C.lit(1), C.lit(2), C.lit(3)


def test_encode_false_has_empty_clause():
    inst = sat.encode(C.FALSE)
    assert [] in inst.clauses
    assert not sat.solve(inst)


def test_encode_literal_unit():
    inst = sat.encode(x1)
    assert [inst.var_map[1]] in inst.clauses
    assert sat.solve(inst).model[1] == 1


def test_xor_model_count():
    inst = sat.encode(C.xor(x1, y1))
    assert sat.enumerate_projected(inst, [1, 2]) == (2, True)


def test_solve_contradiction():
    assert not sat.is_sat(C.conj(x1, C.lit(1, False)))


def test_solve_with_assumption():
    out = sat.solve(sat.encode(C.disj(x1, y1)), assumptions=[-1])
    assert out.sat and out.model[2] == 1 and out.model[1] == 0
    out = sat.solve(sat.encode(C.disj(x1, y1)), assumptions={1: 0, 2: 0})
    assert not out.sat


def test_binate_witness():
    eta = violation_formula(C.xor(x1, y1), 1, positive=True)
    assert eta is y1
    assert sat.is_sat(eta)


def test_projected_count_examples():
    assert sat.enumerate_projected(sat.encode(C.disj(x1, y1)), [2]) == (2, True)
    assert sat.enumerate_projected(sat.encode(C.FALSE), [1]) == (0, True)
    s = gen_equality_spec(3)
    eps = build_error_formula(s, {1: C.lit(4), 2: C.lit(5), 3: C.lit(6)})
    assert sat.enumerate_projected(sat.encode(eps.circuit), list(s.inputs)) == (0, True)
    eps = build_error_formula(s, {1: C.lit(4, False), 2: C.lit(5), 3: C.lit(6)})
    assert sat.enumerate_projected(sat.encode(eps.circuit), list(s.inputs)) == (8, True)


def test_projected_count_cap():
    c = C.disj(x1, y1, y2)
    assert sat.enumerate_projected(sat.encode(c), [1, 2, 3], cap=3) == (3, False)
    assert sat.enumerate_projected(sat.encode(c), [1, 2, 3], cap=7) == (7, True)


def test_sample_single_model():
    assert sat.sample_diverse(sat.encode(x1), 5, seed=1) == [{1: 1}]


def test_sample_three_models():
    ms = sat.sample_diverse(sat.encode(C.disj(y1, y2)), 3, seed=4)
    assert len({(m[2], m[3]) for m in ms}) == 3


def test_sample_deterministic():
    c = random_circuit(random.Random(5), [1, 2, 3, 4, 5, 6], 5)
    inst = sat.encode(c)
    assert sat.sample_diverse(inst, 6, seed=9) == sat.sample_diverse(sat.encode(c), 6, seed=9)


def test_resource_limit_is_not_unsat():
    # pigeonhole 9 into 8 is hard enough for a one-conflict budget
    n = 8
    var = lambda p, h: C.lit(p * n + h + 1)
    pig = [C.disj([var(p, h) for h in range(n)]) for p in range(n + 1)]
    hole = [C.disj(C.negate(var(p, h)), C.negate(var(q, h)))
            for h in range(n) for p in range(n + 1) for q in range(p + 1, n + 1)]
    inst = sat.encode(C.conj(pig + hole))
    with pytest.raises(sat.ResourceLimit):
        sat.solve(inst, budget=sat.Budget(conflicts=1))


def test_expired_budget():
    b = sat.Budget(timeout=0.0)
    with pytest.raises(sat.ResourceLimit):
        sat.solve(sat.encode(x1), budget=b)


def test_oracle_incremental():
    with sat.Oracle(sat.encode(C.disj(x1, y1))) as o:
        assert o.solve({1: 0})
        assert not o.solve({1: 0, 2: 0})
        assert o.solve([])
        assert o.calls == 3


def test_dimacs_dump():
    text = sat.encode(C.conj(x1, y1)).to_dimacs()
    assert "p cnf" in text
    header = [l for l in text.splitlines() if l.startswith("p")][0]
    nv, nc = map(int, header.split()[2:])
    assert nc == len([l for l in text.splitlines() if l and l[0] not in "cp"])


VARS = [1, 2, 3, 4, 5, 6, 7]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_solve_matches_brute_force(seed, polarity):
    c = random_circuit(random.Random(seed), VARS, 5)
    truth = any(ev(c, a) for a in assignments(VARS))
    out = sat.is_sat(c) if c.kind == C.CONST else sat.solve(sat.encode(c, polarity=polarity))
    assert out.sat == truth
    if out.sat and c.kind != C.CONST:
        assert ev(c, {v: out.model.get(v, 0) for v in VARS}) == 1


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dpll_agrees_with_backend(seed):
    c = random_circuit(random.Random(seed), VARS, 5)
    if c.kind == C.CONST:
        return
    inst = sat.encode(c)
    a = sat.solve(inst)
    b = sat.solve(inst, backend="dpll")
    assert a.sat == b.sat
    if b.sat:
        assert ev(c, {v: b.model.get(v, 0) for v in VARS}) == 1


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_projected_count_matches_brute_force(seed, k):
    c = random_circuit(random.Random(seed), VARS, 5)
    proj = VARS[:k]
    rest = VARS[k:]
    expected = sum(1 for a in assignments(proj) if any(ev(c, {**a, **b}) for b in assignments(rest)))
    inst = sat.encode(c)
    for v in VARS:
        inst.solver_var(v)
    assert sat.enumerate_projected(inst, proj) == (expected, True)
