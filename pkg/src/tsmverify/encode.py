"""Propositional encoding of a binary Tsetlin Machine's classification."""

from __future__ import annotations

from dataclasses import dataclass

from .logic.cnf import Cnf, to_cnf
from .logic.counter import seq_counter
from .logic.formula import TRUE, And, Formula, Iff, Implies, Not, Var, VarPool, substitute
from .tm import Monomial, TsmModel, _check_dim, as_bits


def input_vars(pool: VarPool, n: int) -> list[Var]:
    """Shared input variables ``input:x1..xn``; allocated first so they get the lowest ids."""
    return [pool.var(f"input:x{i}") for i in range(1, n + 1)]


def monomial_formula(m: Monomial, xs: list[Var]) -> Formula:
    """Conjunction of the monomial's literals; the empty monomial is ``TRUE``."""
    if not m.literals:
        return TRUE
    return And(tuple(Not(xs[l.var_index - 1]) if l.negated else xs[l.var_index - 1] for l in m.sorted()))


@dataclass(frozen=True)
class TsmEncoding:
    formula: Formula
    inputs: list[Var]
    output: Var
    v_pos: list[Var]
    v_neg: list[Var]
    r_pos: list[list[Var]]
    r_neg: list[list[Var]]
    out_parts: list[Var]
    tie: Var | None


def encode_tsm(model: TsmModel, pool: VarPool, tag: str = "m", break_ties: bool = True) -> TsmEncoding:
    """Encode ``model`` so that ``output`` is true exactly when it classifies 1.

    Conjuncts, in order: ``v[-,j] <-> C-(j)`` then ``v[+,j] <-> C+(j)``; the
    sequential counters over the ``v[-,*]`` and ``v[+,*]`` vars with threshold
    equal to their width; ``(r-[w,j] -> r+[w,j]) <-> out_j`` for each j; finally
    the output definition.

    The ``out_j`` conjunction alone means "positive votes >= negative votes",
    which is also true on a tie, where the machine answers 0. With
    ``break_ties`` (the default) a ``tie`` variable is defined as
    ``AND_j (r+[w,j] <-> r-[w,j])`` and the output is
    ``(out_1 & ... & out_w & ~tie) <-> out``. With ``break_ties=False`` the last
    conjunct is ``(out_1 & ... & out_w) <-> out`` and ties encode as 1.
    """
    n = model.n_vars
    w = len(model.positive)
    xs = input_vars(pool, n)
    v_neg = [pool.var(f"{tag}:v:-:{j}") for j in range(1, w + 1)]
    v_pos = [pool.var(f"{tag}:v:+:{j}") for j in range(1, w + 1)]
    parts: list[Formula] = []
    parts += [Iff(v, monomial_formula(m, xs)) for v, m in zip(v_neg, model.negative)]
    parts += [Iff(v, monomial_formula(m, xs)) for v, m in zip(v_pos, model.positive)]
    sc_neg, r_neg = seq_counter(v_neg, w, pool, f"{tag}:sc:-")
    sc_pos, r_pos = seq_counter(v_pos, w, pool, f"{tag}:sc:+")
    parts += [sc_neg, sc_pos]
    outs = [pool.var(f"{tag}:out:{j}") for j in range(1, w + 1)]
    parts += [Iff(Implies(r_neg[-1][j], r_pos[-1][j]), outs[j]) for j in range(w)]
    o = pool.var(f"{tag}:out")
    tie = None
    if break_ties:
        tie = pool.var(f"{tag}:tie")
        eq = [Iff(r_pos[-1][j], r_neg[-1][j]) for j in range(w)]
        parts.append(Iff(tie, And(tuple(eq)) if w > 1 else eq[0]))
        parts.append(Iff(And(tuple(outs) + (Not(tie),)), o))
    else:
        parts.append(Iff(And(tuple(outs)) if w > 1 else outs[0], o))
    return TsmEncoding(And(tuple(parts)), xs, o, v_pos, v_neg, r_pos, r_neg, outs, tie)


def classification_cnf(model: TsmModel, x, output: int = 1, break_ties: bool = True) -> tuple[Cnf, VarPool]:
    """CNF of the encoding with inputs fixed to ``x`` and the output fixed to ``output``."""
    bits = as_bits(x)
    _check_dim(model, bits)
    pool = VarPool()
    enc = encode_tsm(model, pool, break_ties=break_ties)
    fixed = substitute(enc.formula, {v.id: b for v, b in zip(enc.inputs, bits)})
    goal = enc.output if output else Not(enc.output)
    return to_cnf(And((fixed, goal)), pool), pool


def classify_via_sat(model: TsmModel, x, solver=None, break_ties: bool = True, timeout: float | None = None) -> int:
    """1 iff the encoding with inputs fixed to ``x`` is satisfiable together with the output."""
    from .solver import TIMEOUT, get_solver

    solver = solver or get_solver("embedded")
    cnf, _ = classification_cnf(model, x, 1, break_ties)
    res = solver.solve(cnf, timeout)
    if res.outcome == TIMEOUT:
        raise TimeoutError("solver timed out while classifying")
    return int(res.is_sat)
