"""Command-line interface.

Exit codes: 0 success (or a correct/PASS verdict), 1 incorrect functions
or a failed wDNNF check, 2 timeout, 3 bad input.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import List, Optional

from . import circuit as C
from . import frontend, sat
from .benchgen import gen_clique, gen_equality_spec, ground_truth
from .goodness import goodness_ratio
from .nnf import check_wdnnf, spec_hat
from .phase1 import build_error_formula, check_error_formula
from .synth import PIPELINES, run_report, synthesize

TIMEOUT_ENV = "SKOLEMSYNTH_TIMEOUT"

EXIT_OK, EXIT_INCORRECT, EXIT_TIMEOUT, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def load_spec(path: str, x_pattern: str = "x") -> C.Spec:
    """Read AIGER ASCII or QDIMACS, chosen by extension or by the header."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise InputError(f"{path}: binary AIGER is not supported, convert to .aag first") from None
    head = text.lstrip()
    if path.endswith(".aag") or head.startswith("aag"):
        return frontend.parse_aiger(text, x_pattern)
    if head.startswith("aig"):
        raise frontend.UnsupportedFormatError(f"{path}: binary AIGER is not supported")
    return frontend.parse_qdimacs(text)


def _default_timeout() -> Optional[float]:
    raw = os.environ.get(TIMEOUT_ENV)
    if not raw:
        return None
    try:
        return float(raw)
    except ValueError:
        raise InputError(f"{TIMEOUT_ENV} must be a number of seconds, got {raw!r}") from None


def _write(text: str, out: Optional[str]):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _load_skolem(path: str, spec: C.Spec):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    return frontend.read_skolem(data, spec)


def cmd_synth(args) -> int:
    spec = load_spec(args.spec, args.x_pattern)
    timeout = args.timeout if args.timeout is not None else _default_timeout()
    res = synthesize(spec, pipeline=args.pipeline, timeout=timeout, seed=args.seed, order=args.order)
    sys.stdout.write(run_report(spec, res, timing=args.timing))
    if res.functions is not None and args.out:
        _write(frontend.write_skolem(spec, res.functions, args.format), args.out)
    if res.status == "done":
        return EXIT_OK
    return EXIT_TIMEOUT


def cmd_verify(args) -> int:
    spec = load_spec(args.spec, args.x_pattern)
    funcs = _load_skolem(args.skolem, spec)
    out = check_error_formula(build_error_formula(spec, funcs))
    if not out.sat:
        print("correct")
        return EXIT_OK
    ys = " ".join(f"{spec.name(y)}={out.model.get(y, 0)}" for y in spec.inputs)
    print(f"incorrect counterexample: {ys}")
    return EXIT_INCORRECT


def cmd_check_wdnnf(args) -> int:
    spec = load_spec(args.spec, args.x_pattern)
    res = check_wdnnf(spec_hat(spec))
    if res.ok:
        print("wdnnf PASS")
        return EXIT_OK
    v = res.violation
    lits = " ".join(("" if pos else "~") + spec.name(var) for var, pos in v.literals)
    print(f"wdnnf FAIL and-node={v.node.uid} literals: {lits}")
    return EXIT_INCORRECT


def cmd_goodness(args) -> int:
    spec = load_spec(args.spec, args.x_pattern)
    funcs = _load_skolem(args.skolem, spec)
    timeout = args.timeout if args.timeout is not None else _default_timeout()
    g = goodness_ratio(build_error_formula(spec, funcs), spec.inputs, args.cap, sat.Budget(timeout))
    print(f"goodness={g.numerator}/{g.denominator} exact={int(g.exact)} band={g.band()}")
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.n < 0 or (args.family == "clique" and args.n < 1):
        raise InputError(f"invalid vertex/size count {args.n}")
    if args.family == "clique":
        inst = gen_clique(args.n)
        spec = inst.spec
        if args.truth:
            with open(args.truth, "w") as fh:
                fh.write(ground_truth(inst))
    else:
        spec = gen_equality_spec(args.n)
    _write(frontend.spec_to_aig(spec).to_text(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skolemsynth", description="Synthesize Skolem functions from Boolean relations.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def spec_args(sp):
        sp.add_argument("spec", help="relation file (.aag or QDIMACS)")
        sp.add_argument("--x-pattern", default="x",
                        help="regex matching the names of AIGER inputs that are outputs (default: x)")

    sp = sub.add_parser("synth", help="synthesize Skolem functions")
    spec_args(sp)
    sp.add_argument("--pipeline", choices=PIPELINES, default="nnf")
    sp.add_argument("--timeout", type=float, default=None, help=f"seconds (default: ${TIMEOUT_ENV} or none)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--order", choices=("fanin", "index"), default="fanin")
    sp.add_argument("--out", help="write the functions here")
    sp.add_argument("--format", choices=("aiger", "verilog"), default="aiger")
    sp.add_argument("--timing", action="store_true", help="add wall-clock timings to the report")
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("verify", help="check functions against a relation")
    spec_args(sp)
    sp.add_argument("skolem", help="functions as multi-output .aag")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("check-wdnnf", help="test the weak decomposability condition")
    spec_args(sp)
    sp.set_defaults(func=cmd_check_wdnnf)

    sp = sub.add_parser("goodness", help="fraction of inputs on which the functions fail")
    spec_args(sp)
    sp.add_argument("skolem")
    sp.add_argument("--cap", type=int, default=None, help="stop counting after this many")
    sp.add_argument("--timeout", type=float, default=None)
    sp.set_defaults(func=cmd_goodness)

    sp = sub.add_parser("gen", help="generate a benchmark relation")
    sp.add_argument("family", choices=("clique", "equality"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out", help="output .aag (default: stdout)")
    sp.add_argument("--truth", help="clique only: write the ground-truth sidecar here")
    sp.set_defaults(func=cmd_gen)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, frontend.FormatError, frontend.UnsupportedFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except sat.ResourceLimit as e:
        print(f"timeout: {e}", file=sys.stderr)
        return EXIT_TIMEOUT


if __name__ == "__main__":
    sys.exit(main())
