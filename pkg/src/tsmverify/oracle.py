"""Exhaustive ground-truth checks that only call the classifier, never the encoder."""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

from .errors import BudgetExceeded, InputError
from .tm import BitInput, TsmModel, as_bits

BALL_BUDGET = 10**6
CUBE_BUDGET_BITS = 20


def ball(bits, eps: int) -> np.ndarray:
    """All vectors within Hamming distance ``eps`` of ``bits``, nearest first."""
    n = len(bits)
    size = sum(comb(n, k) for k in range(eps + 1))
    if size > BALL_BUDGET:
        raise BudgetExceeded(f"{size} candidates exceed the budget of {BALL_BUDGET}")
    base = np.asarray(bits, dtype=np.int8)
    rows = [base.copy()]
    for k in range(1, eps + 1):
        for pos in itertools.combinations(range(n), k):
            r = base.copy()
            r[list(pos)] ^= 1
            rows.append(r)
    return np.asarray(rows, dtype=np.int8)


def _first_mismatch(mask: np.ndarray, rows: np.ndarray):
    hits = np.flatnonzero(mask)
    return BitInput(tuple(int(b) for b in rows[hits[0]])) if hits.size else None


def brute_oracle_robust(model: TsmModel, x, eps: int) -> tuple[bool, BitInput | None]:
    bits = as_bits(x)
    if len(bits) != model.n_vars:
        raise InputError("dimension mismatch")
    rows = ball(bits, eps)
    cls = model.classify_many(rows)
    witness = _first_mismatch(cls != cls[0], rows)
    return witness is None, witness


def brute_oracle_similar(m1: TsmModel, m2: TsmModel, x, eps: int) -> tuple[bool, BitInput | None]:
    bits = as_bits(x)
    if not (len(bits) == m1.n_vars == m2.n_vars):
        raise InputError("dimension mismatch")
    rows = ball(bits, eps)
    witness = _first_mismatch(m1.classify_many(rows) != m2.classify_many(rows), rows)
    return witness is None, witness


def all_inputs(n: int) -> np.ndarray:
    if n > CUBE_BUDGET_BITS:
        raise BudgetExceeded(f"2^{n} inputs exceed the budget of 2^{CUBE_BUDGET_BITS}")
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.int8)


def brute_oracle_equiv(m1: TsmModel, m2: TsmModel) -> tuple[bool, BitInput | None]:
    if m1.n_vars != m2.n_vars:
        raise InputError("dimension mismatch")
    rows = all_inputs(m1.n_vars)
    witness = _first_mismatch(m1.classify_many(rows) != m2.classify_many(rows), rows)
    return witness is None, witness
