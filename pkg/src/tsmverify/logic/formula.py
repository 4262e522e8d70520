"""Propositional formulas over integer-numbered variables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from ..errors import EvaluationError


class Formula:
    __slots__ = ()

    def __and__(self, other: "Formula") -> "And":
        return And((self, other))

    def __or__(self, other: "Formula") -> "Or":
        return Or((self, other))

    def __invert__(self) -> "Not":
        return Not(self)


@dataclass(frozen=True, slots=True)
class Var(Formula):
    id: int

    def __repr__(self) -> str:
        return f"v{self.id}"


@dataclass(frozen=True, slots=True)
class Const(Formula):
    value: bool

    def __repr__(self) -> str:
        return "1" if self.value else "0"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula

    def __repr__(self) -> str:
        return f"~{self.arg!r}"


@dataclass(frozen=True, slots=True)
class And(Formula):
    args: tuple[Formula, ...]

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    def __repr__(self) -> str:
        return "(" + " & ".join(map(repr, self.args)) + ")" if self.args else "1"


@dataclass(frozen=True, slots=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    def __repr__(self) -> str:
        return "(" + " | ".join(map(repr, self.args)) + ")" if self.args else "0"


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula

    def __repr__(self) -> str:
        return f"({self.lhs!r} -> {self.rhs!r})"


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    lhs: Formula
    rhs: Formula

    def __repr__(self) -> str:
        return f"({self.lhs!r} <-> {self.rhs!r})"


def conj(*parts: Formula) -> Formula:
    """n-ary conjunction that flattens nested ``And`` nodes; no constant folding."""
    out: list[Formula] = []
    for p in parts:
        if isinstance(p, And):
            out.extend(p.args)
        else:
            out.append(p)
    return And(tuple(out))


def _key(v) -> int:
    return v.id if isinstance(v, Var) else int(v)


def evaluate(f: Formula, assignment: Mapping) -> int:
    """Evaluate ``f`` under ``assignment`` (keys: ``Var`` or int ids; values 0/1)."""
    a = {_key(k): int(bool(v)) for k, v in assignment.items()}
    return _eval(f, a)


def _eval(f: Formula, a: dict[int, int]) -> int:
    if isinstance(f, Var):
        try:
            return a[f.id]
        except KeyError:
            raise EvaluationError(f"variable {f.id} is unassigned") from None
    if isinstance(f, Const):
        return int(f.value)
    if isinstance(f, Not):
        return 1 - _eval(f.arg, a)
    if isinstance(f, And):
        return int(all(_eval(g, a) for g in f.args))
    if isinstance(f, Or):
        return int(any(_eval(g, a) for g in f.args))
    if isinstance(f, Implies):
        return int(not _eval(f.lhs, a) or bool(_eval(f.rhs, a)))
    if isinstance(f, Iff):
        return int(_eval(f.lhs, a) == _eval(f.rhs, a))
    raise TypeError(f"not a formula: {f!r}")


def variables(f: Formula) -> set[int]:
    out: set[int] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Var):
            out.add(g.id)
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, (And, Or)):
            stack.extend(g.args)
        elif isinstance(g, (Implies, Iff)):
            stack.append(g.lhs)
            stack.append(g.rhs)
    return out


def iter_nodes(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, (And, Or)):
            stack.extend(reversed(g.args))
        elif isinstance(g, (Implies, Iff)):
            stack.append(g.rhs)
            stack.append(g.lhs)


def _not(g: Formula) -> Formula:
    if isinstance(g, Const):
        return Const(not g.value)
    return Not(g)


def simplify(f: Formula) -> Formula:
    """Fold constants through every connective.

    Only rewrites nodes that have a constant child (or an And/Or left with
    fewer than two arguments), so a constant-free formula comes back
    structurally equal.
    """
    memo: dict[int, Formula] = {}

    def go(g: Formula) -> Formula:
        hit = memo.get(id(g))
        if hit is not None:
            return hit
        if isinstance(g, (Var, Const)):
            r = g
        elif isinstance(g, Not):
            a = go(g.arg)
            r = _not(a) if isinstance(a, Const) else (g if a is g.arg else Not(a))
        elif isinstance(g, (And, Or)):
            absorbing = isinstance(g, Or)
            kept: list[Formula] = []
            r = None
            for h in g.args:
                h2 = go(h)
                if isinstance(h2, Const):
                    if h2.value == absorbing:
                        r = Const(absorbing)
                        break
                    continue
                kept.append(h2)
            if r is None:
                if len(kept) == len(g.args) and all(x is y for x, y in zip(kept, g.args)):
                    r = g
                elif not kept:
                    r = Const(not absorbing)
                elif len(kept) == 1:
                    r = kept[0]
                else:
                    r = type(g)(tuple(kept))
        elif isinstance(g, Implies):
            a, b = go(g.lhs), go(g.rhs)
            if isinstance(a, Const):
                r = b if a.value else TRUE
            elif isinstance(b, Const):
                r = TRUE if b.value else _not(a)
            else:
                r = g if (a is g.lhs and b is g.rhs) else Implies(a, b)
        elif isinstance(g, Iff):
            a, b = go(g.lhs), go(g.rhs)
            if isinstance(a, Const):
                r = b if a.value else _not(b)
            elif isinstance(b, Const):
                r = a if b.value else _not(a)
            else:
                r = g if (a is g.lhs and b is g.rhs) else Iff(a, b)
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[id(g)] = r
        return r

    return go(f)


def substitute(f: Formula, partial: Mapping) -> Formula:
    """Replace assigned variables by constants, then fold constants."""
    if not partial:
        return f
    consts = {_key(k): Const(bool(v)) for k, v in partial.items()}
    memo: dict[int, Formula] = {}

    def go(g: Formula) -> Formula:
        hit = memo.get(id(g))
        if hit is not None:
            return hit
        if isinstance(g, Var):
            r = consts.get(g.id, g)
        elif isinstance(g, Const):
            r = g
        elif isinstance(g, Not):
            r = Not(go(g.arg))
        elif isinstance(g, (And, Or)):
            r = type(g)(tuple(go(h) for h in g.args))
        elif isinstance(g, (Implies, Iff)):
            r = type(g)(go(g.lhs), go(g.rhs))
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[id(g)] = r
        return r

    return simplify(go(f))


class VarPool:
    """Deterministic allocator: the same tag always maps to the same variable.

    Ids are handed out densely from 1 in first-request order, so two pools fed
    the same tag sequence produce identical numberings.
    """

    def __init__(self):
        self._ids: dict[str, int] = {}
        self._tags: list[str] = [""]
        self._fresh: dict[str, int] = {}

    def var(self, tag: str) -> Var:
        vid = self._ids.get(tag)
        if vid is None:
            vid = len(self._tags)
            self._ids[tag] = vid
            self._tags.append(tag)
        return Var(vid)

    def fresh(self, prefix: str) -> Var:
        k = self._fresh.get(prefix, 0) + 1
        self._fresh[prefix] = k
        return self.var(f"{prefix}#{k}")

    def __contains__(self, tag: str) -> bool:
        return tag in self._ids

    def __len__(self) -> int:
        return len(self._tags) - 1

    @property
    def top(self) -> int:
        return len(self._tags) - 1

    def tag_of(self, vid: int) -> str:
        return self._tags[vid]

    def items(self) -> list[tuple[str, int]]:
        return [(t, i) for i, t in enumerate(self._tags) if i]
