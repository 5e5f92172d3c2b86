import random

from hypothesis import given, settings, strategies as st

from skolemsynth import circuit as C
from skolemsynth import unate as U
from skolemsynth.benchgen import gen_equality_spec
from skolemsynth.circuit import Spec
from skolemsynth.nnf import spec_hat

from oracle import assignments, exists, is_neg_unate, is_pos_unate, random_spec

x1, x2, y1 = C.lit(1), C.lit(2), C.lit(3)


def _hat(c, outputs, inputs):
    return spec_hat(Spec(c, outputs, inputs))


def test_semantic_check_examples():
    assert U.semantic_unate_check(_hat(C.disj(x1, y1), (1,), (3,)), 1) == U.POS
    assert U.semantic_unate_check(_hat(C.disj(C.lit(1, False), y1), (1,), (3,)), 1) == U.NEG
    assert U.semantic_unate_check(_hat(C.xor(x1, y1), (1,), (3,)), 1) == U.BINATE


def test_independent_output_counts_as_positive():
    assert U.semantic_unate_check(_hat(y1, (1,), (3,)), 1) == U.POS


def test_fixpoint_pure_cascade():
    r = U.unate_fixpoint(_hat(C.conj(x1, C.disj(x2, y1)), (1, 2), (3,)))
    assert r.U1 == {1, 2} and not r.U0
    assert r.reduced.circuit is C.TRUE
    assert r.oracle_calls == 0
    assert [how for _, _, how in r.trace] == ["pure", "pure"]


def test_fixpoint_equality_has_no_unate_outputs():
    s = gen_equality_spec(3)
    for x in s.outputs:
        assert not is_pos_unate(s.circuit, x, s.variables)
        assert not is_neg_unate(s.circuit, x, s.variables)
    r = U.unate_fixpoint(spec_hat(s))
    assert not r.U0 and not r.U1
    assert r.oracle_calls == 2 * 3


def test_fixpoint_semantic_detection():
    # (x1 & y1) | (x1 & x2): both outputs are pure after renaming
    r = U.unate_fixpoint(_hat(C.disj(C.conj(x1, y1), C.conj(x1, x2)), (1, 2), (3,)))
    assert r.U1 == {1, 2}
    assert r.reduced.circuit is C.TRUE


def test_fixpoint_needs_oracle_for_hidden_unateness():
    # positive unate in x1 although x1 also occurs negatively
    c = C.disj(C.conj(x1, y1), C.conj(C.lit(1, False), y1, C.lit(2, False)), C.conj(x1, x2))
    r = U.unate_fixpoint(_hat(c, (1, 2), (3,)))
    assert r.trace == [(1, U.POS, "sat"), (2, U.POS, "pure")]
    assert r.oracle_calls == 1
    assert r.U1 == {1, 2}


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_semantic_check_matches_definition(seed):
    s = random_spec(random.Random(seed), max_vars=8)
    hat = spec_hat(s)
    for x in s.outputs:
        v = U.semantic_unate_check(hat, x)
        pos, neg = is_pos_unate(s.circuit, x, s.variables), is_neg_unate(s.circuit, x, s.variables)
        if pos:
            assert v == U.POS
        elif neg:
            assert v == U.NEG
        else:
            assert v == U.BINATE


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fixpoint_preserves_realizability(seed):
    s = random_spec(random.Random(seed), max_vars=8)
    r = U.unate_fixpoint(spec_hat(s))
    n = len(s.outputs)
    assert not (r.U0 & r.U1)
    assert r.oracle_calls <= 2 * n * n + 2 * n
    assert r.rounds <= n + 1
    fixed = {**{x: 1 for x in r.U1}, **{x: 0 for x in r.U0}}
    reduced = C.assign(s.circuit, fixed)
    free = [x for x in s.outputs if x not in fixed]
    assert r.reduced.to_formula() is C.assign(r.reduced.to_formula(), fixed)
    for y in assignments(s.inputs):
        assert exists(s.circuit, s.outputs, y) == exists(reduced, free, y)
    # no remaining output is unate in the reduced function
    for x in free:
        assert not is_pos_unate(reduced, x, free + list(s.inputs))
        assert not is_neg_unate(reduced, x, free + list(s.inputs))
