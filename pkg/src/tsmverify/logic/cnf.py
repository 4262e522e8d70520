"""Clause form, Tseitin conversion and DIMACS text I/O."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..errors import ProtocolError
from .formula import And, Const, Formula, Iff, Implies, Not, Or, Var, VarPool, simplify


@dataclass
class Cnf:
    clauses: list[list[int]] = field(default_factory=list)
    var_count: int = 0

    def add(self, clause: Iterable[int]) -> None:
        c = list(clause)
        for lit in c:
            if abs(lit) > self.var_count:
                self.var_count = abs(lit)
        self.clauses.append(c)

    def extend(self, clauses: Iterable[Iterable[int]]) -> None:
        for c in clauses:
            self.add(c)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, assignment) -> bool:
        """True iff every clause has a literal true under ``assignment`` (id -> 0/1)."""
        for c in self.clauses:
            for lit in c:
                if assignment.get(abs(lit), 0) == (lit > 0):
                    break
            else:
                return False
        return True


class _Tseitin:
    """Shared gate builder for ``tseitin`` and ``to_cnf``."""

    def __init__(self, pool: VarPool, cnf: Cnf, prefix: str = "ts"):
        self.pool = pool
        self.cnf = cnf
        self.prefix = prefix
        self.memo: dict[int, tuple[Formula, int]] = {}

    def fresh(self) -> int:
        return self.pool.fresh(self.prefix).id

    def lit(self, f: Formula) -> int:
        if isinstance(f, Var):
            return f.id
        if isinstance(f, Not):
            return -self.lit(f.arg)
        hit = self.memo.get(id(f))
        if hit is not None:
            return hit[1]
        g = self.define(f, None)
        self.memo[id(f)] = (f, g)
        return g

    def define(self, f: Formula, out: int | None) -> int:
        """Emit clauses making ``out`` (fresh if None) equivalent to ``f``."""
        if isinstance(f, Const):
            g = out if out is not None else self.fresh()
            self.cnf.add([g] if f.value else [-g])
            return g
        if isinstance(f, Implies):
            return self.define(Or((Not(f.lhs), f.rhs)), out)
        if isinstance(f, (Var, Not)):
            a = self.lit(f)
            if out is None:
                return a
            self.cnf.extend([[-out, a], [out, -a]])
            return out
        if isinstance(f, (And, Or)):
            args = [self.lit(h) for h in f.args]
            g = out if out is not None else self.fresh()
            if isinstance(f, And):
                self.cnf.extend([-g, a] for a in args)
                self.cnf.add([g] + [-a for a in args])
            else:
                self.cnf.extend([g, -a] for a in args)
                self.cnf.add([-g] + args)
            return g
        if isinstance(f, Iff):
            a, b = self.lit(f.lhs), self.lit(f.rhs)
            g = out if out is not None else self.fresh()
            self.cnf.extend([[-g, -a, b], [-g, a, -b], [g, a, b], [g, -a, -b]])
            return g
        raise TypeError(f"not a formula: {f!r}")

    def assert_(self, f: Formula) -> None:
        """Add clauses satisfiable exactly when ``f`` is (models project onto vars(f))."""
        stack = [f]
        while stack:
            g = stack.pop()
            if isinstance(g, Const):
                if not g.value:
                    self.cnf.add([])
            elif isinstance(g, And):
                stack.extend(reversed(g.args))
            elif isinstance(g, (Var, Not)) and _is_literal(g):
                self.cnf.add([self.lit(g)])
            elif isinstance(g, Not) and isinstance(g.arg, Or):
                stack.extend(Not(h) for h in reversed(g.arg.args))
            elif isinstance(g, Or) and all(_is_literal(h) for h in g.args):
                self.cnf.add([self.lit(h) for h in g.args])
            elif isinstance(g, Iff) and _is_literal(g.lhs) and _is_literal(g.rhs):
                a, b = self.lit(g.lhs), self.lit(g.rhs)
                self.cnf.extend([[-a, b], [a, -b]])
            elif isinstance(g, Implies) and _is_literal(g.lhs) and _is_literal(g.rhs):
                self.cnf.add([-self.lit(g.lhs), self.lit(g.rhs)])
            elif isinstance(g, Iff) and isinstance(g.lhs, Var) and not _is_literal(g.rhs):
                self.define(g.rhs, g.lhs.id)
            elif isinstance(g, Iff) and isinstance(g.rhs, Var) and not _is_literal(g.lhs):
                self.define(g.lhs, g.rhs.id)
            else:
                self.cnf.add([self.lit(g)])


def _is_literal(f: Formula) -> bool:
    return isinstance(f, Var) or (isinstance(f, Not) and isinstance(f.arg, Var))


def tseitin(f: Formula, pool: VarPool, prefix: str = "ts") -> tuple[Cnf, int]:
    """Equisatisfiable definitional CNF of ``f`` plus its root literal.

    ``Cnf + [root]`` is satisfiable iff ``f`` is, and every model of it
    restricts to a model of ``f``. Gate variables are drawn from ``pool``
    under ``prefix``.
    """
    cnf = Cnf(var_count=pool.top)
    ts = _Tseitin(pool, cnf, prefix)
    g = simplify(f)
    if isinstance(g, Const):
        root = ts.fresh()
        cnf.add([root] if g.value else [-root])
    else:
        root = ts.lit(g)
    cnf.var_count = max(cnf.var_count, pool.top)
    return cnf, root


def to_cnf(f: Formula, pool: VarPool, prefix: str = "ts") -> Cnf:
    """CNF asserting ``f``: top-level conjunctions are split and
    ``var <-> gate`` conjuncts reuse ``var`` as the gate output."""
    cnf = Cnf(var_count=pool.top)
    _Tseitin(pool, cnf, prefix).assert_(simplify(f))
    cnf.var_count = max(cnf.var_count, pool.top)
    return cnf


def write_dimacs(cnf: Cnf, comments: Iterable[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {cnf.var_count} {len(cnf.clauses)}")
    lines.extend(" ".join(map(str, c + [0])) for c in cnf.clauses)
    return "\n".join(lines) + "\n"


def read_dimacs(text: str) -> Cnf:
    var_count = None
    declared = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ProtocolError(f"line {lineno}: bad problem line {line!r}")
            var_count, declared = int(parts[2]), int(parts[3])
            continue
        if var_count is None:
            raise ProtocolError(f"line {lineno}: clause before problem line")
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                if abs(lit) > var_count:
                    raise ProtocolError(f"line {lineno}: literal {lit} exceeds {var_count} vars")
                current.append(lit)
    if var_count is None:
        raise ProtocolError("missing problem line")
    if current:
        clauses.append(current)
    if declared is not None and declared != len(clauses):
        raise ProtocolError(f"problem line declares {declared} clauses, found {len(clauses)}")
    return Cnf(clauses, var_count)


def parse_solver_output(text: str) -> tuple[str, dict[int, int] | None]:
    """Parse SAT-competition output into ``("SAT", model)``, ``("UNSAT", None)``
    or ``("UNKNOWN", None)``. Variables absent from the ``v`` lines are omitted."""
    status = None
    model: dict[int, int] = {}
    terminated = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("s "):
            word = line[2:].strip()
            if status is not None:
                raise ProtocolError("more than one status line")
            if word == "SATISFIABLE":
                status = "SAT"
            elif word == "UNSATISFIABLE":
                status = "UNSAT"
            elif word in ("UNKNOWN", "INDETERMINATE"):
                status = "UNKNOWN"
            else:
                raise ProtocolError(f"unknown status {word!r}")
        elif line.startswith("v"):
            for tok in line[1:].split():
                try:
                    lit = int(tok)
                except ValueError:
                    raise ProtocolError(f"bad value token {tok!r}") from None
                if lit == 0:
                    terminated = True
                    continue
                model[abs(lit)] = int(lit > 0)
        else:
            raise ProtocolError(f"unexpected output line {line!r}")
    if status is None:
        raise ProtocolError("no status line")
    if status == "SAT":
        if not model and not terminated:
            raise ProtocolError("SATISFIABLE without a value line")
        return status, model
    return status, None
