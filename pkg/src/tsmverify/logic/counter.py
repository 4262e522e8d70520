"""Sequential-counter encoding of ``sum(lits) >= K``."""

from __future__ import annotations

from typing import Sequence

from ..errors import EncodingError
from .formula import And, Formula, Iff, Not, Or, Var, VarPool


def seq_counter(
    lits: Sequence[Formula], K: int, pool: VarPool, tag: str
) -> tuple[Formula, list[list[Var]]]:
    """Define the cumulative-sum grid ``r[i][j]`` over ``lits``.

    Returns the defining conjunction and the grid, where ``r[i-1][j-1]`` is
    true iff at least ``j`` of the first ``i`` literals are true. Only the
    definitions are emitted; asserting ``r[-1][K-1]`` (or its negation) is up
    to the caller.

    Conjunct order: ``l1 <-> r11``, ``~r1j`` for j in 2..K, then per row i >= 2
    ``ri1 <-> (li | r(i-1)1)`` followed by
    ``rij <-> ((li & r(i-1)(j-1)) | r(i-1)j)`` for j in 2..K.
    """
    if K < 1:
        raise EncodingError(f"counter threshold must be >= 1, got {K}")
    if not lits:
        raise EncodingError("counter needs at least one literal")
    ell = len(lits)
    r = [[pool.var(f"{tag}:r:{i}:{j}") for j in range(1, K + 1)] for i in range(1, ell + 1)]
    parts: list[Formula] = [Iff(lits[0], r[0][0])]
    parts.extend(Not(r[0][j]) for j in range(1, K))
    for i in range(1, ell):
        li = lits[i]
        parts.append(Iff(r[i][0], Or((li, r[i - 1][0]))))
        for j in range(1, K):
            parts.append(Iff(r[i][j], Or((And((li, r[i - 1][j - 1])), r[i - 1][j]))))
    return And(tuple(parts)), r


def at_most(lits: Sequence[Formula], k: int, pool: VarPool, tag: str) -> Formula:
    """Counter definitions plus ``~r[l][k+1]``: at most ``k`` of ``lits`` hold.

    When ``k >= len(lits)`` the bound is vacuous and ``TRUE`` is returned.
    """
    from .formula import TRUE

    if k < 0:
        raise EncodingError(f"bound must be >= 0, got {k}")
    if k + 1 > len(lits):
        return TRUE
    defs, r = seq_counter(lits, k + 1, pool, tag)
    return And((defs, Not(r[-1][k])))
