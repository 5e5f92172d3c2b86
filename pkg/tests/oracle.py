"""Brute-force reference semantics used by the tests.

Everything here works by enumerating assignments and walks circuits through
their public node fields only, so it shares no algorithm with the engine.
"""

from __future__ import annotations

import itertools
import random
from typing import Dict, Iterator, List, Mapping, Sequence

from skolemsynth import circuit as C
from skolemsynth.circuit import Spec


def ev(c, env: Mapping[int, int]) -> int:
    memo: Dict[int, int] = {}

    def go(n):
        r = memo.get(n.uid)
        if r is not None:
            return r
        if n.kind == C.CONST:
            r = int(n.var)
        elif n.kind == C.VAR:
            r = int(env[n.var]) if n.positive else 1 - int(env[n.var])
        elif n.kind == C.AND:
            r = int(all(go(ch) for ch in n.children))
        else:
            r = int(any(go(ch) for ch in n.children))
        memo[n.uid] = r
        return r

    return go(c)


def assignments(variables: Sequence[int]) -> Iterator[Dict[int, int]]:
    variables = list(variables)
    for bits in itertools.product((0, 1), repeat=len(variables)):
        yield dict(zip(variables, bits))


def table(c, variables: Sequence[int]) -> tuple:
    return tuple(ev(c, a) for a in assignments(variables))


def equivalent(a, b, variables: Sequence[int]) -> bool:
    return all(ev(a, env) == ev(b, env) for env in assignments(variables))


def exists(c, qvars: Sequence[int], env: Mapping[int, int]) -> int:
    return int(any(ev(c, {**env, **q}) for q in assignments(qvars)))


def realizable(spec: Spec, y: Mapping[int, int]) -> bool:
    return bool(exists(spec.circuit, spec.outputs, y))


def failing_inputs(spec: Spec, funcs: Mapping[int, object]) -> List[Dict[int, int]]:
    """Input assignments where a solution exists but the functions miss it."""
    bad = []
    for y in assignments(spec.inputs):
        if not realizable(spec, y):
            continue
        x = {v: ev(funcs[v], y) for v in spec.outputs}
        if not ev(spec.circuit, {**x, **y}):
            bad.append(y)
    return bad


def is_correct(spec: Spec, funcs) -> bool:
    return not failing_inputs(spec, funcs)


def skolem_bounds(f, order: Sequence[int], i: int, value: int, env: Mapping[int, int]) -> int:
    """``~exists order[:i] . f[order[i] := value]`` at ``env`` (which fixes the rest)."""
    x = order[i]
    return 1 - exists(f, list(order[:i]), {**env, x: value})


def is_pos_unate(f, x: int, variables: Sequence[int]) -> bool:
    rest = [v for v in variables if v != x]
    return all(ev(f, {**a, x: 0}) <= ev(f, {**a, x: 1}) for a in assignments(rest))


def is_neg_unate(f, x: int, variables: Sequence[int]) -> bool:
    rest = [v for v in variables if v != x]
    return all(ev(f, {**a, x: 1}) <= ev(f, {**a, x: 0}) for a in assignments(rest))


def random_circuit(rng: random.Random, variables: Sequence[int], depth: int = 4, ops=("and", "or", "xor", "not")):
    variables = list(variables)

    def go(d):
        if d == 0 or rng.random() < 0.2:
            return C.lit(rng.choice(variables), rng.random() < 0.5)
        op = rng.choice(ops)
        if op == "not":
            return C.negate(go(d - 1))
        a, b = go(d - 1), go(d - 1)
        if op == "and":
            return C.conj(a, b)
        if op == "or":
            return C.disj(a, b)
        return C.xor(a, b)

    return go(depth)


def random_spec(rng: random.Random, max_vars: int = 8, depth: int = 4, min_x: int = 1, min_y: int = 1,
                ops=("and", "or", "xor", "not")) -> Spec:
    total = rng.randint(min_x + min_y, max_vars)
    nx = rng.randint(min_x, total - min_y)
    xs = tuple(range(1, nx + 1))
    ys = tuple(range(nx + 1, total + 1))
    c = random_circuit(rng, xs + ys, depth, ops)
    names = {v: f"x{v}" for v in xs}
    names.update({v: f"y{v - nx}" for v in ys})
    return Spec(c, xs, ys, names)


def specs(seed: int, count: int, **kw) -> List[Spec]:
    rng = random.Random(seed)
    return [random_spec(rng, **kw) for _ in range(count)]


def hat_point(hat, order: Sequence[int], i: int, prefix: int, prefix_bar: int, xi: int, xbi: int):
    """The renamed circuit with the first ``i`` outputs of ``order`` and their
    partners fixed (position ``i`` gets ``xi``/``xbi``, earlier ones
    ``prefix``/``prefix_bar``) and later partners read as negations.
    ``i`` is 0-based; pass ``xi=None`` to leave position ``i`` free.
    """
    xb = hat.xbar_map
    b = {}
    for x in order[:i]:
        b[x] = C.const(prefix)
        b[xb[x]] = C.const(prefix_bar)
    if xi is not None:
        b[order[i]] = C.const(xi)
        b[xb[order[i]]] = C.const(xbi)
        later = order[i + 1:]
    else:
        later = order[i:]
    for x in later:
        b[xb[x]] = C.lit(x, False)
    return C.substitute(hat.circuit, b)
