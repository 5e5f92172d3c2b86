"""AIGER ASCII and QDIMACS readers, Skolem function writers."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from . import circuit as C
from .circuit import Circuit, Spec


class FormatError(ValueError):
    """Malformed or unsupported input file."""


class MalformedHeaderError(FormatError):
    pass


class DanglingLiteralError(FormatError):
    pass


class LatchPresentError(FormatError):
    pass


class PartitionError(FormatError):
    """Symbol table does not allow splitting inputs into outputs and inputs."""


class QuantifierShapeError(FormatError):
    pass


class ArityError(FormatError):
    pass


class UnsupportedFormatError(ValueError):
    pass


@dataclass
class Aig:
    """Combinational and-inverter graph in AIGER literal convention.

    Literal ``2*v`` is variable ``v``, ``2*v + 1`` its complement, ``0``/``1``
    the constants.  ``ands`` holds ``(lhs, rhs0, rhs1)`` triples.
    """

    inputs: List[int] = field(default_factory=list)
    outputs: List[int] = field(default_factory=list)
    ands: List[Tuple[int, int, int]] = field(default_factory=list)
    input_names: Dict[int, str] = field(default_factory=dict)
    output_names: Dict[int, str] = field(default_factory=dict)
    comments: List[str] = field(default_factory=list)
    max_var: int = 0

    def new_input(self, name: Optional[str] = None) -> int:
        self.max_var += 1
        lit = 2 * self.max_var
        self.inputs.append(lit)
        if name is not None:
            self.input_names[len(self.inputs) - 1] = name
        return lit

    def AND(self, a: int, b: int) -> int:
        if a == 0 or b == 0 or a == b ^ 1:
            return 0
        if a == 1:
            return b
        if b == 1 or a == b:
            return a
        self.max_var += 1
        lhs = 2 * self.max_var
        self.ands.append((lhs, max(a, b), min(a, b)))
        return lhs

    def OR(self, a: int, b: int) -> int:
        return self.AND(a ^ 1, b ^ 1) ^ 1

    @staticmethod
    def NOT(a: int) -> int:
        return a ^ 1

    def to_text(self) -> str:
        lines = [f"aag {self.max_var} {len(self.inputs)} 0 {len(self.outputs)} {len(self.ands)}"]
        lines += [str(i) for i in self.inputs]
        lines += [str(o) for o in self.outputs]
        lines += [f"{l} {a} {b}" for l, a, b in self.ands]
        for idx in sorted(self.input_names):
            lines.append(f"i{idx} {self.input_names[idx]}")
        for idx in sorted(self.output_names):
            lines.append(f"o{idx} {self.output_names[idx]}")
        if self.comments:
            lines.append("c")
            lines += self.comments
        return "\n".join(lines) + "\n"


def _ints(line: str, lineno: int) -> List[int]:
    try:
        return [int(t) for t in line.split()]
    except ValueError:
        raise FormatError(f"line {lineno}: expected integers, got {line!r}") from None


def read_aiger(text: Union[str, bytes]) -> Aig:
    """Parse an ASCII AIGER ("aag") file without latches."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = text.splitlines()
    if not lines:
        raise MalformedHeaderError("empty file")
    head = lines[0].split()
    if len(head) < 6 or head[0] != "aag":
        if head and head[0] == "aig":
            raise UnsupportedFormatError("binary AIGER is not supported; convert with aigtoaig")
        raise MalformedHeaderError(f"bad header {lines[0]!r}")
    try:
        M, I, L, O, A = (int(t) for t in head[1:6])
    except ValueError:
        raise MalformedHeaderError(f"bad header {lines[0]!r}") from None
    if L != 0:
        raise LatchPresentError(f"{L} latches present; only combinational circuits are supported")
    need = 1 + I + O + A
    if len(lines) < need:
        raise MalformedHeaderError(f"header promises {need - 1} body lines, file has {len(lines) - 1}")
    aig = Aig(max_var=M)
    pos = 1
    defined = {0}
    for _ in range(I):
        (lit,) = _ints(lines[pos], pos + 1)
        if lit & 1 or lit == 0 or lit >> 1 > M:
            raise FormatError(f"line {pos + 1}: bad input literal {lit}")
        aig.inputs.append(lit)
        defined.add(lit >> 1)
        pos += 1
    for _ in range(O):
        (lit,) = _ints(lines[pos], pos + 1)
        aig.outputs.append(lit)
        pos += 1
    for _ in range(A):
        vals = _ints(lines[pos], pos + 1)
        if len(vals) != 3:
            raise FormatError(f"line {pos + 1}: AND gate needs three literals")
        lhs, a, b = vals
        if lhs & 1 or lhs >> 1 > M:
            raise FormatError(f"line {pos + 1}: bad gate literal {lhs}")
        aig.ands.append((lhs, a, b))
        defined.add(lhs >> 1)
        pos += 1
    for lit in aig.outputs + [x for _, a, b in aig.ands for x in (a, b)]:
        if lit >> 1 not in defined:
            raise DanglingLiteralError(f"literal {lit} refers to an undefined variable")
    for idx in range(pos, len(lines)):
        line = lines[idx]
        if line.startswith("c"):
            aig.comments = lines[idx + 1:]
            break
        m = re.match(r"([io])(\d+) (.*)$", line)
        if not m:
            if line.strip():
                raise FormatError(f"unexpected line {line!r}")
            continue
        table = aig.input_names if m.group(1) == "i" else aig.output_names
        table[int(m.group(2))] = m.group(3)
    return aig


def aig_literal_circuits(aig: Aig, var_of_input: Mapping[int, int]) -> Callable[[int], Circuit]:
    """Return a function mapping AIGER literals to NNF circuits.

    Each AND gate is built once in each polarity on demand, so the NNF is at
    most twice the AIG size.  ``var_of_input`` maps AIGER variable indices of
    primary inputs to circuit variable ids.
    """
    gates = {lhs >> 1: (a, b) for lhs, a, b in aig.ands}
    pos: Dict[int, Circuit] = {0: C.FALSE}
    for v, cv in var_of_input.items():
        pos[v] = C.lit(cv)

    def build(lit: int) -> Circuit:
        root = lit >> 1
        stack = [root]
        opened = set()
        while stack:
            v = stack[-1]
            if v in pos:
                stack.pop()
                continue
            if v not in gates:
                raise DanglingLiteralError(f"variable {v} is neither an input nor a gate")
            a, b = gates[v]
            missing = [x >> 1 for x in (a, b) if x >> 1 not in pos]
            if missing:
                if v in opened:
                    raise FormatError(f"combinational cycle through variable {v}")
                opened.add(v)
                stack.extend(missing)
                continue
            stack.pop()
            pos[v] = C.conj(_polar(pos[a >> 1], a & 1), _polar(pos[b >> 1], b & 1))
        return _polar(pos[root], lit & 1)

    return build


def _polar(c: Circuit, complemented: int) -> Circuit:
    return C.negate(c) if complemented else c


def _matcher(x_names) -> Callable[[str], bool]:
    if callable(x_names):
        return x_names
    if isinstance(x_names, str):
        pat = re.compile(x_names)
        return lambda name: pat.match(name) is not None
    names = set(x_names)
    return lambda name: name in names


def parse_aiger(text: Union[str, bytes], x_names="x") -> Spec:
    """Read a single-output AIGER relation.

    ``x_names`` selects the output variables X among the AIG inputs by symbol
    name: a regex (prefix match with ``re.match``), a collection of names, or
    a predicate.  Every other input becomes part of Y.  Circuit variable ids
    are the AIGER input positions, starting at 1.
    """
    aig = read_aiger(text)
    if len(aig.outputs) != 1:
        raise FormatError(f"expected exactly one output, found {len(aig.outputs)}")
    is_x = _matcher(x_names)
    outputs, inputs, names = [], [], {}
    var_of_input = {}
    for idx, lit in enumerate(aig.inputs):
        if idx not in aig.input_names:
            raise PartitionError(f"input {idx} has no symbol; cannot decide whether it is an output")
        v = idx + 1
        var_of_input[lit >> 1] = v
        names[v] = aig.input_names[idx]
        (outputs if is_x(names[v]) else inputs).append(v)
    build = aig_literal_circuits(aig, var_of_input)
    return Spec(build(aig.outputs[0]), outputs, inputs, names)


def parse_qdimacs(text: Union[str, bytes]) -> Spec:
    """Read a 2QBF ``forall Y exists X . CNF`` in QDIMACS.

    Universal variables become the inputs Y, existential ones the outputs X.
    Variable ids are kept; names are ``x1..xn`` / ``y1..ym`` in block order.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    header = None
    blocks: List[Tuple[str, List[int]]] = []
    clauses: List[List[int]] = []
    pending: List[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise MalformedHeaderError(f"line {lineno}: bad problem line {line!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise MalformedHeaderError("missing 'p cnf' line")
        if line[0] in "ae":
            if clauses or pending:
                raise QuantifierShapeError(f"line {lineno}: quantifier after clauses")
            nums = _ints(line[1:], lineno)
            if not nums or nums[-1] != 0:
                raise FormatError(f"line {lineno}: quantifier line must end with 0")
            q = line[0]
            if blocks and blocks[-1][0] == q:
                blocks[-1][1].extend(nums[:-1])
            else:
                blocks.append((q, nums[:-1]))
            continue
        for n in _ints(line, lineno):
            if n == 0:
                clauses.append(pending)
                pending = []
            else:
                pending.append(n)
    if header is None:
        raise MalformedHeaderError("missing 'p cnf' line")
    if pending:
        clauses.append(pending)
    nvars, nclauses = header
    if [q for q, _ in blocks] != ["a", "e"]:
        shape = "".join(q for q, _ in blocks) or "none"
        raise QuantifierShapeError(f"expected prefix 'a e' (2QBF), got {shape!r}")
    ys, xs = blocks[0][1], blocks[1][1]
    declared = set(xs) | set(ys)
    if len(declared) != len(xs) + len(ys):
        raise QuantifierShapeError("a variable is quantified twice")
    if any(v < 1 or v > nvars for v in declared):
        raise ArityError(f"quantified variable outside 1..{nvars}")
    if len(clauses) != nclauses:
        raise ArityError(f"header announces {nclauses} clauses, found {len(clauses)}")
    for cl in clauses:
        for l in cl:
            if abs(l) > nvars:
                raise ArityError(f"literal {l} exceeds declared variable count {nvars}")
            if abs(l) not in declared:
                raise ArityError(f"variable {abs(l)} is not quantified")
    matrix = C.conj([C.disj([C.lit(abs(l), l > 0) for l in cl]) for cl in clauses])
    names = {v: f"x{i}" for i, v in enumerate(xs, 1)}
    names.update({v: f"y{i}" for i, v in enumerate(ys, 1)})
    return Spec(matrix, xs, ys, names)


def _aig_from_circuits(roots: Sequence[Circuit], inputs: Sequence[int]) -> Tuple[Aig, List[int]]:
    aig = Aig()
    lit_of: Dict[int, int] = {}
    input_lit = {}
    for v in inputs:
        input_lit[v] = aig.new_input()
    for root in roots:
        for n in C.postorder(root):
            if n.uid in lit_of:
                continue
            if n.kind == C.CONST:
                l = int(n.var)
            elif n.kind == C.VAR:
                if n.var not in input_lit:
                    raise ValueError(f"variable {n.var} is not an input of the written circuit")
                l = input_lit[n.var] ^ (0 if n.positive else 1)
            else:
                kids = [lit_of[ch.uid] for ch in n.children]
                if n.kind == C.OR:
                    kids = [k ^ 1 for k in kids]
                l = kids[0]
                for k in kids[1:]:
                    l = aig.AND(l, k)
                if n.kind == C.OR:
                    l ^= 1
            lit_of[n.uid] = l
    return aig, [lit_of[r.uid] for r in roots]


def skolem_to_aig(spec: Spec, functions: Mapping[int, Circuit]) -> Aig:
    """One AIG output per output variable, over the relation inputs only."""
    roots = [functions[x] for x in spec.outputs]
    for x, f in zip(spec.outputs, roots):
        extra = f.support - set(spec.inputs)
        if extra:
            raise ValueError(f"function for {spec.name(x)} depends on non-inputs {sorted(extra)}")
    aig, outs = _aig_from_circuits(roots, spec.inputs)
    aig.outputs = outs
    aig.input_names = {i: spec.name(y) for i, y in enumerate(spec.inputs)}
    aig.output_names = {i: spec.name(x) for i, x in enumerate(spec.outputs)}
    return aig


def spec_to_aig(spec: Spec) -> Aig:
    """Single-output AIG of the relation; inputs are X then Y."""
    aig, outs = _aig_from_circuits([spec.circuit], spec.variables)
    aig.outputs = outs
    aig.input_names = {i: spec.name(v) for i, v in enumerate(spec.variables)}
    return aig


def _verilog_ident(name: str) -> str:
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_$]*", name):
        return name
    return "\\" + name + " "


def skolem_to_verilog(spec: Spec, functions: Mapping[int, Circuit], module: str = "skolem") -> str:
    ins = [_verilog_ident(spec.name(y)) for y in spec.inputs]
    outs = [_verilog_ident(spec.name(x)) for x in spec.outputs]
    wires: Dict[int, str] = {}
    body: List[str] = []
    decls: List[str] = []
    counter = 0
    for x in spec.outputs:
        for n in C.postorder(functions[x]):
            if n.uid in wires:
                continue
            if n.kind == C.CONST:
                wires[n.uid] = "1'b1" if n.var else "1'b0"
            elif n.kind == C.VAR:
                name = _verilog_ident(spec.name(n.var))
                wires[n.uid] = name if n.positive else "~" + name
            else:
                op = " & " if n.kind == C.AND else " | "
                w = f"n{counter}"
                counter += 1
                decls.append(f"  wire {w};")
                body.append(f"  assign {w} = " + op.join(wires[ch.uid] for ch in n.children) + ";")
                wires[n.uid] = w
    lines = [f"module {module} (" + ", ".join(ins + outs) + ");"]
    lines += [f"  input {i};" for i in ins]
    lines += [f"  output {o};" for o in outs]
    lines += decls + body
    for x, o in zip(spec.outputs, outs):
        lines.append(f"  assign {o} = {wires[functions[x].uid]};")
    lines.append("endmodule")
    return "\n".join(lines) + "\n"


def write_skolem(spec: Spec, functions: Mapping[int, Circuit], fmt: str = "aiger") -> str:
    """Serialise final Skolem functions (over Y only) as AIGER ASCII or Verilog."""
    if fmt == "aiger":
        return skolem_to_aig(spec, functions).to_text()
    if fmt == "verilog":
        return skolem_to_verilog(spec, functions)
    raise UnsupportedFormatError(f"unknown output format {fmt!r}")


def read_skolem(text: Union[str, bytes], spec: Spec) -> Dict[int, Circuit]:
    """Read a multi-output AIGER file of Skolem functions for ``spec``.

    Inputs and outputs are matched to spec variables by symbol name.
    Unnamed inputs/outputs fall back to positional matching.
    """
    aig = read_aiger(text)
    by_name = {spec.name(v): v for v in spec.variables}
    var_of_input = {}
    for idx, lit in enumerate(aig.inputs):
        name = aig.input_names.get(idx)
        if name is None:
            if idx >= len(spec.inputs):
                raise PartitionError(f"unnamed input {idx} has no positional counterpart")
            v = spec.inputs[idx]
        else:
            if name not in by_name or by_name[name] not in spec.inputs:
                raise PartitionError(f"input {name!r} is not a spec input")
            v = by_name[name]
        var_of_input[lit >> 1] = v
    build = aig_literal_circuits(aig, var_of_input)
    funcs = {}
    for idx, lit in enumerate(aig.outputs):
        name = aig.output_names.get(idx)
        if name is None:
            if idx >= len(spec.outputs):
                raise PartitionError(f"unnamed output {idx} has no positional counterpart")
            x = spec.outputs[idx]
        else:
            if name not in by_name or by_name[name] not in spec.outputs:
                raise PartitionError(f"output {name!r} is not a spec output")
            x = by_name[name]
        funcs[x] = build(lit)
    missing = [spec.name(x) for x in spec.outputs if x not in funcs]
    if missing:
        raise PartitionError(f"no function given for outputs {missing}")
    return funcs


def spec_to_qdimacs(spec: Spec) -> str:
    """Write a CNF-shaped spec (AND of ORs of literals) as QDIMACS."""
    c = spec.circuit
    if c is C.TRUE:
        clauses = []
    elif c is C.FALSE:
        clauses = [[]]
    else:
        tops = c.children if c.kind == C.AND else (c,)
        clauses = []
        for cl in tops:
            lits = cl.children if cl.kind == C.OR else (cl,)
            if any(l.kind != C.VAR for l in lits):
                raise ValueError("relation is not in CNF")
            clauses.append([l.var if l.positive else -l.var for l in lits])
    nvars = max(spec.variables, default=0)
    lines = [f"p cnf {nvars} {len(clauses)}"]
    lines.append(" ".join(["a"] + [str(v) for v in spec.inputs] + ["0"]))
    lines.append(" ".join(["e"] + [str(v) for v in spec.outputs] + ["0"]))
    lines += [" ".join(map(str, cl + [0])) for cl in clauses]
    return "\n".join(lines) + "\n"
