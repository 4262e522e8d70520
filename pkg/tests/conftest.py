import os
import shlex
import sys

import numpy as np
import pytest

from tsmverify.logic.formula import And, Const, Formula, Iff, Implies, Not, Or, Var
from tsmverify.tm import Literal, Monomial, TsmModel, xor_model

HERE = os.path.dirname(os.path.abspath(__file__))
FAKE_SOLVER = os.path.join(HERE, "fake_solver.py")


def fake_solver_spec(*flags: str) -> str:
    return "exec:" + " ".join(shlex.quote(p) for p in (sys.executable, FAKE_SOLVER, *flags))


def random_monomial(rng, n: int, p_include: float = 0.3, p_both: float = 0.0) -> Monomial:
    """Each variable enters with probability ``p_include``; with ``p_both`` it enters with both signs."""
    lits = []
    for i in range(1, n + 1):
        if rng.random() < p_both:
            lits += [Literal(i, False), Literal(i, True)]
        elif rng.random() < p_include:
            lits.append(Literal(i, bool(rng.random() < 0.5)))
    return Monomial(frozenset(lits))


def random_model(rng, n: int, width: int, p_include: float = 0.3, p_both: float = 0.0) -> TsmModel:
    pos = tuple(random_monomial(rng, n, p_include, p_both) for _ in range(width))
    neg = tuple(random_monomial(rng, n, p_include, p_both) for _ in range(width))
    return TsmModel(n, pos, neg)


def has_contradiction(m: TsmModel) -> bool:
    return any(len({l.var_index for l in mono.literals}) < len(mono.literals) for mono in m.positive + m.negative)


def empty_model(n: int, width: int) -> TsmModel:
    return TsmModel(n, (Monomial(),) * width, (Monomial(),) * width)


def swapped(m: TsmModel) -> TsmModel:
    return TsmModel(m.n_vars, m.negative, m.positive)


def _flat(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        out = []
        for a in f.args:
            out += _flat(a)
        return out
    return [f]


def isomorphic(f: Formula, g: Formula, mapping=None) -> bool:
    """Same shape with a consistent one-to-one variable renaming; nested conjunctions are flattened."""
    mapping = {} if mapping is None else mapping
    inverse = {v: k for k, v in mapping.items()}

    def go(a, b) -> bool:
        if type(a) is not type(b):
            return False
        if isinstance(a, Var):
            if mapping.get(a.id, b.id) != b.id or inverse.get(b.id, a.id) != a.id:
                return False
            mapping[a.id] = b.id
            inverse[b.id] = a.id
            return True
        if isinstance(a, Const):
            return a.value == b.value
        if isinstance(a, Not):
            return go(a.arg, b.arg)
        if isinstance(a, (Implies, Iff)):
            return go(a.lhs, b.lhs) and go(a.rhs, b.rhs)
        if isinstance(a, And):
            xs, ys = _flat(a), _flat(b)
            return len(xs) == len(ys) and all(go(x, y) for x, y in zip(xs, ys))
        if isinstance(a, Or):
            return len(a.args) == len(b.args) and all(go(x, y) for x, y in zip(a.args, b.args))
        raise TypeError(type(a))

    return go(f, g)


@pytest.fixture
def xor():
    return xor_model()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
