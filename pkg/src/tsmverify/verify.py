"""Robustness, equivalence and similarity checks decided by SAT.

Every check builds a formula that is satisfiable exactly when the property is
violated; a satisfying assignment is decoded into the offending input and
re-checked against :func:`tsmverify.tm.classify` before it is reported.
"""

from __future__ import annotations

import enum
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Sequence

from .encode import encode_tsm, input_vars
from .errors import EncodingError, InputError
from .logic.cnf import to_cnf
from .logic.counter import at_most
from .logic.formula import And, Const, Formula, Iff, Not, Or, Var, VarPool
from .solver import SAT, TIMEOUT, get_solver
from .tm import BitInput, TsmModel, _check_dim, as_bits, classify


class Result(str, enum.Enum):
    HOLDS = "HOLDS"
    FAILS = "FAILS"
    TIMEOUT = "TIMEOUT"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self) -> str:
        return self.value


@dataclass
class Verdict:
    property: str
    result: Result
    counterexample: BitInput | None = None
    solve_time: float = 0.0
    stats: dict = field(default_factory=dict)
    epsilon: int | None = None
    input: BitInput | None = None

    def __post_init__(self):
        if (self.counterexample is not None) != (self.result == Result.FAILS):
            raise ValueError("counterexample must be present exactly when the result is FAILS")

    def to_record(self, eta: float | None = None, timing: bool = True) -> dict:
        return {
            "property": self.property,
            "result": str(self.result),
            "epsilon": self.epsilon,
            "eta": eta,
            "time_s": round(self.solve_time, 6) if timing else None,
            "vars": self.stats.get("vars"),
            "clauses": self.stats.get("clauses"),
            "input_bits": "".join(map(str, self.input.bits)) if self.input else None,
            "counterexample_bits": (
                "".join(map(str, self.counterexample.bits)) if self.counterexample else None
            ),
        }


@dataclass
class UniversalVerdict:
    property: str
    verdicts: list[Verdict]
    robust_count: int
    threshold: int
    result: Result
    epsilon: int
    eta: float

    @property
    def timeouts(self) -> int:
        return sum(v.result == Result.TIMEOUT for v in self.verdicts)


def hamming(a, b) -> int:
    a, b = as_bits(a), as_bits(b)
    if len(a) != len(b):
        raise InputError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(x != y for x, y in zip(a, b))


# ---------------------------------------------------------------- formulas


def _check_eps(eps: int, n: int) -> None:
    if not 0 <= eps <= n:
        raise InputError(f"epsilon must lie in [0, {n}], got {eps}")


def flip_constraints(bits: Sequence[int], eps: int, pool: VarPool) -> tuple[Formula, list[Var], list[Var]]:
    """At most ``eps`` flip variables ``l_j`` are true and ``x_j = I[j] xor l_j``.

    ``I[j]`` enters as a literal constant, unsimplified:
    ``x_j <-> ((I[j] | l_j) & (~I[j] | ~l_j))``.
    """
    n = len(bits)
    xs = input_vars(pool, n)
    ls = [pool.var(f"flip:l{j}") for j in range(1, n + 1)]
    bound = at_most(ls, eps, pool, "flip:sc")
    xor = [
        Iff(x, And((Or((Const(bool(b)), l)), Or((Not(Const(bool(b))), Not(l))))))
        for x, l, b in zip(xs, ls, bits)
    ]
    return And((bound, *xor)), xs, ls


def build_notrob(model: TsmModel, x, eps: int, pool: VarPool) -> Formula:
    """Satisfiable iff some input within Hamming distance ``eps`` of ``x`` changes the class."""
    bits = as_bits(x)
    _check_dim(model, bits)
    _check_eps(eps, model.n_vars)
    flips, _, _ = flip_constraints(bits, eps, pool)
    enc = encode_tsm(model, pool)
    label = Const(bool(classify(model, bits)))
    return And((flips, enc.formula, Iff(label, Not(enc.output))))


def build_equiv(m1: TsmModel, m2: TsmModel, pool: VarPool) -> Formula:
    """Satisfiable iff some input is classified differently by the two machines."""
    _same_dim(m1, m2)
    input_vars(pool, m1.n_vars)
    e1 = encode_tsm(m1, pool, "a")
    e2 = encode_tsm(m2, pool, "b")
    return And((e1.formula, e2.formula, Iff(e1.output, Not(e2.output))))


def build_notsim(m1: TsmModel, m2: TsmModel, x, eps: int, pool: VarPool) -> Formula:
    """Satisfiable iff the machines disagree somewhere within distance ``eps`` of ``x``."""
    _same_dim(m1, m2)
    bits = as_bits(x)
    _check_dim(m1, bits)
    _check_eps(eps, m1.n_vars)
    flips, _, _ = flip_constraints(bits, eps, pool)
    e1 = encode_tsm(m1, pool, "a")
    e2 = encode_tsm(m2, pool, "b")
    return And((flips, e1.formula, e2.formula, Iff(e1.output, Not(e2.output))))


def _same_dim(m1: TsmModel, m2: TsmModel) -> None:
    if m1.n_vars != m2.n_vars:
        raise InputError(f"models have different input dimensions: {m1.n_vars} vs {m2.n_vars}")


# ---------------------------------------------------------------- decision procedures


def _decide(formula: Formula, pool: VarPool, n: int, solver, timeout):
    """Solve ``formula``; returns (outcome, decoded input or None, stats, seconds)."""
    solver = solver or get_solver()
    t0 = time.monotonic()
    cnf = to_cnf(formula, pool)
    res = solver.solve(cnf, timeout)
    elapsed = time.monotonic() - t0
    stats = {"vars": cnf.var_count, "clauses": cnf.num_clauses}
    witness = None
    if res.outcome == SAT:
        xs = input_vars(pool, n)
        witness = BitInput(tuple(res.assignment[v.id] for v in xs))
    return res.outcome, witness, stats, elapsed


def _to_result(outcome: str) -> Result:
    if outcome == TIMEOUT:
        return Result.TIMEOUT
    return Result.FAILS if outcome == SAT else Result.HOLDS


def check_robust(model: TsmModel, x, eps: int, solver=None, timeout: float | None = None) -> Verdict:
    """``HOLDS`` iff no input within distance ``eps`` of ``x`` changes the classification."""
    bits = as_bits(x)
    pool = VarPool()
    f = build_notrob(model, bits, eps, pool)
    outcome, J, stats, elapsed = _decide(f, pool, model.n_vars, solver, timeout)
    if J is not None and (hamming(bits, J) > eps or classify(model, J) == classify(model, bits)):
        raise EncodingError(f"robustness counterexample {J.bits} failed re-validation")
    return Verdict("robustness", _to_result(outcome), J, elapsed, stats, eps, BitInput(bits))


def same_votes(m1: TsmModel, m2: TsmModel) -> bool:
    """True when both machines have the same signed multiset of monomial votes.

    A monomial on both sides of one machine cancels in its margin, so equal
    signed multisets give equal margins on every input and hence the same
    classifier. Monomials holding both a variable and its negation never fire
    and are ignored. The converse does not hold; ``False`` decides nothing.
    """
    if m1.n_vars != m2.n_vars:
        return False

    def live(ms):
        return Counter(m for m in ms if len({l.var_index for l in m.literals}) == len(m.literals))

    def signed(m: TsmModel) -> dict:
        c = live(m.positive)
        c.subtract(live(m.negative))
        return {k: v for k, v in c.items() if v}

    return signed(m1) == signed(m2)


def _shortcut(prop: str, eps=None, bits=None) -> Verdict:
    return Verdict(prop, Result.HOLDS, None, 0.0, {"vars": 0, "clauses": 0, "shortcut": "same votes"}, eps,
                   BitInput(bits) if bits is not None else None)


def check_equivalence(m1: TsmModel, m2: TsmModel, solver=None, timeout: float | None = None) -> Verdict:
    if same_votes(m1, m2):
        return _shortcut("equivalence")
    pool = VarPool()
    f = build_equiv(m1, m2, pool)
    outcome, J, stats, elapsed = _decide(f, pool, m1.n_vars, solver, timeout)
    if J is not None and classify(m1, J) == classify(m2, J):
        raise EncodingError(f"equivalence witness {J.bits} failed re-validation")
    return Verdict("equivalence", _to_result(outcome), J, elapsed, stats)


def check_similar(m1: TsmModel, m2: TsmModel, x, eps: int, solver=None, timeout: float | None = None) -> Verdict:
    """``HOLDS`` iff the machines agree on ``x`` and on every input within distance ``eps``."""
    bits = as_bits(x)
    if same_votes(m1, m2):
        _check_dim(m1, bits)
        _check_eps(eps, m1.n_vars)
        return _shortcut("similarity", eps, bits)
    pool = VarPool()
    f = build_notsim(m1, m2, bits, eps, pool)
    outcome, J, stats, elapsed = _decide(f, pool, m1.n_vars, solver, timeout)
    if J is not None and (hamming(bits, J) > eps or classify(m1, J) == classify(m2, J)):
        raise EncodingError(f"similarity counterexample {J.bits} failed re-validation")
    return Verdict("similarity", _to_result(outcome), J, elapsed, stats, eps, BitInput(bits))


def eta_threshold(eta: float, size: int) -> int:
    """``floor(eta * size)`` computed on the decimal value of ``eta`` (0.29 * 100 -> 29)."""
    if not 0 < eta <= 1:
        raise InputError(f"eta must lie in (0, 1], got {eta}")
    return math.floor(Fraction(str(eta)) * size)


def summarize(prop: str, verdicts: list[Verdict], eps: int, eta: float) -> UniversalVerdict:
    """Count per-instance ``HOLDS`` against ``floor(eta |S|)``.

    ``INCONCLUSIVE`` when the count falls short but the timed-out instances
    could still close the gap.
    """
    threshold = eta_threshold(eta, len(verdicts))
    holds = sum(v.result == Result.HOLDS for v in verdicts)
    timeouts = sum(v.result == Result.TIMEOUT for v in verdicts)
    if holds >= threshold:
        result = Result.HOLDS
    elif holds + timeouts >= threshold:
        result = Result.INCONCLUSIVE
    else:
        result = Result.FAILS
    return UniversalVerdict(prop, verdicts, holds, threshold, result, eps, eta)


def _run_all(fn, items, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def check_universal_robust(
    model: TsmModel, S, eps: int, eta: float, solver=None, timeout: float | None = None, jobs: int = 1
) -> UniversalVerdict:
    """(eps, eta)-robustness over ``S``: one robustness call per member, then a count."""
    items = [as_bits(x) for x in S]
    if not items:
        raise InputError("the input set is empty")
    eta_threshold(eta, len(items))
    fn = partial(check_robust, model, eps=eps, solver=solver, timeout=timeout)
    return summarize("universal_robustness", _run_all(fn, items, jobs), eps, eta)


def check_universal_similar(
    m1: TsmModel, m2: TsmModel, S, eps: int, eta: float, solver=None, timeout: float | None = None, jobs: int = 1
) -> UniversalVerdict:
    items = [as_bits(x) for x in S]
    if not items:
        raise InputError("the input set is empty")
    eta_threshold(eta, len(items))
    fn = partial(check_similar, m1, m2, eps=eps, solver=solver, timeout=timeout)
    return summarize("universal_similarity", _run_all(fn, items, jobs), eps, eta)
