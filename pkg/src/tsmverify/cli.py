"""``tsmverify`` command line: train, classify, encode and verify Tsetlin Machines.

Exit codes: 0 every check holds, 1 some check fails, 2 a timeout or an
inconclusive universal check, 64 bad usage, 3 any other error.
"""

from __future__ import annotations

import argparse
import os
import sys
from functools import partial

from . import report
from .data import load_binary_csv
from .encode import classify_via_sat, encode_tsm
from .errors import TsmError
from .logic.cnf import to_cnf, write_dimacs
from .logic.formula import And, Not, VarPool
from .solver import SOLVER_ENV, get_solver
from .tm import TrainConfig, accuracy, classify, load_model, save_model, train
from .verify import (
    Result,
    _run_all,
    check_equivalence,
    check_robust,
    check_similar,
    check_universal_robust,
    check_universal_similar,
)

EXIT_OK, EXIT_FAILS, EXIT_UNDECIDED, EXIT_ERROR, EXIT_USAGE = 0, 1, 2, 3, 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _exit_code(results) -> int:
    results = list(results)
    if any(r == Result.FAILS for r in results):
        return EXIT_FAILS
    if any(r in (Result.TIMEOUT, Result.INCONCLUSIVE) for r in results):
        return EXIT_UNDECIDED
    return EXIT_OK


def _emit(args, verdicts, universal=None) -> None:
    timing = not args.deterministic
    text, records = report.render(verdicts, universal, timing, args.timeout)
    sys.stdout.write(text)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(records)


def _inputs(args):
    return [r.bits for r in load_binary_csv(args.input_file, labelled=not args.unlabeled)]


# ---------------------------------------------------------------- commands


def cmd_train(args) -> int:
    data = load_binary_csv(args.data)
    cfg = TrainConfig(
        n_monomials=args.monomials,
        N=args.states,
        T=args.margin,
        s=args.specificity,
        epochs=args.epochs,
        seed=args.seed,
        gating=args.gating,
    )
    model = train(data, cfg)
    save_model(model, args.out)
    print(f"train accuracy {accuracy(model, data):.4f} ({len(data)} examples)")
    print(f"model written to {args.out}")
    return EXIT_OK


def cmd_classify(args) -> int:
    model = load_model(args.model)
    solver = get_solver(args.solver) if args.via_sat else None
    for bits in _inputs(args):
        y = classify_via_sat(model, bits, solver, timeout=args.timeout) if args.via_sat else classify(model, bits)
        print(y)
    return EXIT_OK


def cmd_encode(args) -> int:
    model = load_model(args.model)
    pool = VarPool()
    enc = encode_tsm(model, pool)
    f = enc.formula
    if args.assert_output == "true":
        f = And((f, enc.output))
    elif args.assert_output == "false":
        f = And((f, Not(enc.output)))
    cnf = to_cnf(f, pool)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(write_dimacs(cnf, [f"tsm encoding, output var {enc.output.id}"]))
    varmap = args.varmap or os.path.join(os.path.dirname(os.path.abspath(args.out)), "varmap.txt")
    with open(varmap, "w", encoding="utf-8") as fh:
        for tag, vid in pool.items():
            if not tag.startswith("ts#"):
                fh.write(f"{tag} {vid}\n")
    print(f"{cnf.var_count} vars, {cnf.num_clauses} clauses -> {args.out}; map -> {varmap}")
    return EXIT_OK


def cmd_verify_robust(args) -> int:
    model = load_model(args.model)
    fn = partial(check_robust, model, eps=args.eps, solver=get_solver(args.solver), timeout=args.timeout)
    verdicts = _run_all(fn, _inputs(args), args.jobs)
    _emit(args, verdicts)
    return _exit_code(v.result for v in verdicts)


def cmd_verify_unirob(args) -> int:
    model = load_model(args.model)
    u = check_universal_robust(
        model, _inputs(args), args.eps, args.eta, get_solver(args.solver), args.timeout, args.jobs
    )
    _emit(args, u.verdicts, u)
    return _exit_code([u.result])


def cmd_verify_equiv(args) -> int:
    m1, m2 = load_model(args.model_a), load_model(args.model_b)
    v = check_equivalence(m1, m2, get_solver(args.solver), args.timeout)
    _emit(args, [v])
    return _exit_code([v.result])


def cmd_verify_sim(args) -> int:
    m1, m2 = load_model(args.model_a), load_model(args.model_b)
    fn = partial(check_similar, m1, m2, eps=args.eps, solver=get_solver(args.solver), timeout=args.timeout)
    verdicts = _run_all(fn, _inputs(args), args.jobs)
    _emit(args, verdicts)
    return _exit_code(v.result for v in verdicts)


def cmd_verify_unisim(args) -> int:
    m1, m2 = load_model(args.model_a), load_model(args.model_b)
    u = check_universal_similar(
        m1, m2, _inputs(args), args.eps, args.eta, get_solver(args.solver), args.timeout, args.jobs
    )
    _emit(args, u.verdicts, u)
    return _exit_code([u.result])


# ---------------------------------------------------------------- parser


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tsmverify", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def verify_common(sp, two_models=False, inputs=True, eps=True, eta=False):
        if two_models:
            sp.add_argument("--model-a", required=True)
            sp.add_argument("--model-b", required=True)
        else:
            sp.add_argument("--model", required=True)
        if inputs:
            sp.add_argument("--input-file", required=True, help="CSV of 0/1 rows")
            sp.add_argument("--unlabeled", action="store_true", help="rows carry no trailing label column")
            sp.add_argument("--jobs", type=_positive_int, default=1)
        if eps:
            sp.add_argument("--eps", type=_nonneg_int, required=True)
        if eta:
            sp.add_argument("--eta", type=float, required=True)
        sp.add_argument("--timeout", type=float, default=300.0, help="seconds per solver call")
        sp.add_argument("--solver", default=None, help=f"embedded | exec:<command> (default ${SOLVER_ENV} or embedded)")
        sp.add_argument("--report", default=None, help="write JSON-lines records here")
        sp.add_argument("--deterministic", action="store_true", help="omit timings from all output")

    t = sub.add_parser("train", help="train a binary machine from a labelled CSV")
    t.add_argument("--data", required=True)
    t.add_argument("--monomials", type=_positive_int, default=100, help="total, split evenly between polarities")
    t.add_argument("--states", type=_positive_int, default=100, help="N; each automaton has 2N states")
    t.add_argument("--margin", type=_positive_int, default=15, help="T")
    t.add_argument("--specificity", type=float, default=3.9, help="s")
    t.add_argument("--epochs", type=_positive_int, default=10)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--gating", choices=["standard", "inverted"], default="standard")
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    c = sub.add_parser("classify", help="print the class of each input row")
    c.add_argument("--model", required=True)
    c.add_argument("--input-file", required=True)
    c.add_argument("--unlabeled", action="store_true")
    c.add_argument("--via-sat", action="store_true", help="decide through the propositional encoding")
    c.add_argument("--solver", default=None)
    c.add_argument("--timeout", type=float, default=300.0)
    c.set_defaults(func=cmd_classify)

    e = sub.add_parser("encode", help="write the model's encoding as DIMACS plus a variable map")
    e.add_argument("--model", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--varmap", default=None, help="default: varmap.txt next to --out")
    e.add_argument("--assert-output", choices=["none", "true", "false"], default="none")
    e.set_defaults(func=cmd_encode)

    for name, fn, kw in [
        ("verify-robust", cmd_verify_robust, {}),
        ("verify-unirob", cmd_verify_unirob, {"eta": True}),
        ("verify-equiv", cmd_verify_equiv, {"two_models": True, "inputs": False, "eps": False}),
        ("verify-sim", cmd_verify_sim, {"two_models": True}),
        ("verify-unisim", cmd_verify_unisim, {"two_models": True, "eta": True}),
    ]:
        sp = sub.add_parser(name)
        verify_common(sp, **kw)
        sp.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TsmError, ValueError, KeyError, OSError) as exc:
        print(f"tsmverify: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
