"""Tsetlin automata, the binary Tsetlin Machine trainer and classifier.

A TA team for one monomial over ``n`` inputs is a row of ``2n`` integer states:
column ``i`` controls literal ``x_{i+1}`` and column ``n + i`` controls its
negation. States ``1..N`` mean exclude, ``N+1..2N`` include.
"""

from __future__ import annotations

import dataclasses
import functools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, ModelFormatError
from .rng import SplitMix64

REWARD, INACTION, PENALTY = 1, 0, -1


# ---------------------------------------------------------------- basic types


@dataclass(frozen=True)
class BitInput:
    bits: tuple[int, ...]
    label: int | None = None

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise InputError(f"bits must be 0/1, got {bits}")
        object.__setattr__(self, "bits", bits)
        if self.label is not None and self.label not in (0, 1):
            raise InputError(f"label must be 0/1, got {self.label}")

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __getitem__(self, i):
        return self.bits[i]


def as_bits(x) -> tuple[int, ...]:
    if isinstance(x, BitInput):
        return x.bits
    return BitInput(tuple(x)).bits


@dataclass
class TsetlinAutomaton:
    """A single 2N-state automaton; kept for clarity, training uses array teams."""

    N: int
    state: int = 0

    def __post_init__(self):
        if self.N < 1:
            raise InputError("N must be >= 1")
        if self.state == 0:
            self.state = self.N
        if not 1 <= self.state <= 2 * self.N:
            raise InputError(f"state {self.state} outside [1, {2 * self.N}]")

    @property
    def include(self) -> bool:
        return self.state > self.N

    def reward(self) -> None:
        if self.include:
            self.state = min(self.state + 1, 2 * self.N)
        else:
            self.state = max(self.state - 1, 1)

    def penalize(self) -> None:
        self.state += -1 if self.include else 1


@dataclass(frozen=True, order=True)
class Literal:
    var_index: int
    negated: bool = False

    def value(self, bits: Sequence[int]) -> int:
        b = bits[self.var_index - 1]
        return 1 - b if self.negated else b

    def __str__(self) -> str:
        return f"~{self.var_index}" if self.negated else str(self.var_index)


@dataclass(frozen=True)
class Monomial:
    """Conjunction of literals; the empty monomial evaluates to 1."""

    literals: frozenset[Literal] = frozenset()

    def __post_init__(self):
        if not isinstance(self.literals, frozenset):
            object.__setattr__(self, "literals", frozenset(self.literals))

    @classmethod
    def of(cls, *lits: int) -> "Monomial":
        """Build from signed ints: ``Monomial.of(1, -2)`` is x1 * not x2."""
        return cls(frozenset(Literal(abs(k), k < 0) for k in lits))

    def sorted(self) -> list[Literal]:
        return sorted(self.literals)

    def evaluate(self, bits: Sequence[int]) -> int:
        return int(all(lit.value(bits) for lit in self.literals))

    def __str__(self) -> str:
        return ",".join(map(str, self.sorted())) if self.literals else "{}"


@dataclass(frozen=True)
class TsmModel:
    n_vars: int
    positive: tuple[Monomial, ...]
    negative: tuple[Monomial, ...]
    N: int = 100
    T: int = 10
    s: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "positive", tuple(self.positive))
        object.__setattr__(self, "negative", tuple(self.negative))
        if self.n_vars < 1:
            raise InputError("n_vars must be >= 1")
        if not self.positive or not self.negative:
            raise InputError("a model needs at least one monomial of each polarity")
        if len(self.positive) != len(self.negative):
            raise InputError(
                f"{len(self.positive)} positive vs {len(self.negative)} negative monomials"
            )
        for m in self.positive + self.negative:
            for lit in m.literals:
                if not 1 <= lit.var_index <= self.n_vars:
                    raise InputError(f"literal {lit} outside 1..{self.n_vars}")

    @property
    def n_monomials(self) -> int:
        return 2 * len(self.positive)

    @functools.cached_property
    def _masks(self) -> tuple[np.ndarray, np.ndarray]:
        return _include_matrix(self.positive, self.n_vars), _include_matrix(self.negative, self.n_vars)

    def counts(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Per-row counts of satisfied positive and negative monomials for a 0/1 matrix."""
        X = np.asarray(X, dtype=bool)
        if X.ndim != 2 or X.shape[1] != self.n_vars:
            raise InputError(f"expected rows of length {self.n_vars}, got shape {X.shape}")
        lits = np.concatenate([X, ~X], axis=1)
        pos, neg = self._masks
        # a monomial is false iff it includes some literal that is 0
        zeros = (~lits).astype(np.int32)
        pos_sat = (zeros @ pos.T.astype(np.int32)) == 0
        neg_sat = (zeros @ neg.T.astype(np.int32)) == 0
        return pos_sat.sum(axis=1), neg_sat.sum(axis=1)

    def classify_many(self, X) -> np.ndarray:
        pos, neg = self.counts(X)
        return np.where(neg >= pos, 0, 1)


def _include_matrix(monomials: Sequence[Monomial], n: int) -> np.ndarray:
    m = np.zeros((len(monomials), 2 * n), dtype=bool)
    for j, mono in enumerate(monomials):
        for lit in mono.literals:
            m[j, lit.var_index - 1 + (n if lit.negated else 0)] = True
    return m


@dataclass(frozen=True)
class MulticlassModel:
    classes: tuple[tuple[int, TsmModel], ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple((int(c), m) for c, m in self.classes))
        if self.classes and len({m.n_vars for _, m in self.classes}) != 1:
            raise InputError("all class models must share one input dimension")


# ---------------------------------------------------------------- classification


def _check_dim(model: TsmModel, bits: tuple[int, ...]) -> None:
    if len(bits) != model.n_vars:
        raise InputError(f"input has {len(bits)} bits, model expects {model.n_vars}")


def vote_margin(model: TsmModel, x) -> int:
    """Negative votes minus positive votes (unclipped)."""
    bits = as_bits(x)
    _check_dim(model, bits)
    neg = sum(m.evaluate(bits) for m in model.negative)
    pos = sum(m.evaluate(bits) for m in model.positive)
    return neg - pos


def classify(model: TsmModel, x) -> int:
    """0 when the negative votes reach the positive votes, 1 otherwise."""
    return 0 if vote_margin(model, x) >= 0 else 1


def clip(v: int, lo: int, hi: int) -> int:
    if lo > hi:
        raise InputError(f"empty clip interval [{lo}, {hi}]")
    return max(lo, min(v, hi))


def classify_multiclass(mm: MulticlassModel, x) -> int:
    """Class whose machine has the largest positive-minus-negative vote; ties go to the lowest id."""
    if not mm.classes:
        raise InputError("multiclass model has no classes")
    best_id, best = None, None
    for cid, model in sorted(mm.classes, key=lambda t: t[0]):
        score = -vote_margin(model, x)
        if best is None or score > best:
            best_id, best = cid, score
    return best_id


# ---------------------------------------------------------------- TA teams and feedback


@dataclass
class TaTeam:
    """States of ``n_monomials`` x ``2 n_vars`` automata, all with ``N`` states per action."""

    n_monomials: int
    n_vars: int
    N: int
    states: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.states is None:
            self.states = np.full((self.n_monomials, 2 * self.n_vars), self.N, dtype=np.int32)

    def include(self, j: int | None = None) -> np.ndarray:
        return self.states > self.N if j is None else self.states[j] > self.N

    def monomial_values(self, literal_values: np.ndarray) -> np.ndarray:
        """Monomial outputs for a boolean literal vector of length ``2 n_vars``."""
        return ~np.any(self.include() & ~literal_values, axis=1)

    def extract_monomials(self) -> tuple[Monomial, ...]:
        n = self.n_vars
        out = []
        for row in self.include():
            idx = np.flatnonzero(row)
            out.append(Monomial(frozenset(Literal(int(k % n) + 1, bool(k >= n)) for k in idx)))
        return tuple(out)


def literal_values(x) -> np.ndarray:
    b = np.asarray(as_bits(x), dtype=bool)
    return np.concatenate([b, ~b])


def type1_events(include: np.ndarray, lits: np.ndarray, monomial: bool, s: float, u: np.ndarray) -> np.ndarray:
    """Reward/inaction/penalty codes for Type I feedback given uniforms ``u``.

    monomial=1, literal=1: include -> reward w.p. (s-1)/s; exclude -> penalty w.p. (s-1)/s.
    monomial=1, literal=0: exclude -> reward w.p. 1/s (include is unreachable).
    monomial=0: include -> penalty w.p. 1/s; exclude -> reward w.p. 1/s.
    """
    hi = u < (s - 1.0) / s
    lo = u < 1.0 / s
    ev = np.zeros(include.shape, dtype=np.int8)
    if monomial:
        if np.any(include & ~lits):
            raise AssertionError("included literal is 0 inside a true monomial")
        ev[lits & include & hi] = REWARD
        ev[lits & ~include & hi] = PENALTY
        ev[~lits & lo] = REWARD
    else:
        ev[include & lo] = PENALTY
        ev[~include & lo] = REWARD
    return ev


def type2_events(include: np.ndarray, lits: np.ndarray, monomial: bool) -> np.ndarray:
    """Type II: only an excluded literal that is 0 inside a true monomial is penalised."""
    ev = np.zeros(include.shape, dtype=np.int8)
    if monomial:
        ev[~include & ~lits] = PENALTY
    return ev


def _apply(team: TaTeam, j: int, include: np.ndarray, events: np.ndarray) -> None:
    # reward deepens the current action, penalty moves toward the other one
    direction = np.where(include, 1, -1).astype(np.int32)
    step = events.astype(np.int32) * direction
    np.clip(team.states[j] + step, 1, 2 * team.N, out=team.states[j])


def type1_feedback(team: TaTeam, j: int, x, s: float, rng: SplitMix64) -> TaTeam:
    if s <= 1:
        raise InputError(f"specificity must exceed 1, got {s}")
    lits = literal_values(x)
    include = team.include(j)
    monomial = not np.any(include & ~lits)
    u = rng.random(include.size)
    _apply(team, j, include, type1_events(include, lits, monomial, s, u))
    return team


def type2_feedback(team: TaTeam, j: int, x) -> TaTeam:
    lits = literal_values(x)
    include = team.include(j)
    monomial = not np.any(include & ~lits)
    _apply(team, j, include, type2_events(include, lits, monomial))
    return team


# ---------------------------------------------------------------- training


@dataclass(frozen=True)
class TrainConfig:
    n_monomials: int = 10
    N: int = 100
    T: int = 10
    s: float = 3.9
    epochs: int = 10
    seed: int = 0
    # "standard": feedback probability shrinks as the vote margin moves toward the label.
    # "inverted": the literal reading, y=1 gated by (T - v)/2T with v = neg - pos.
    gating: str = "standard"


def _labelled(dataset: Iterable) -> tuple[np.ndarray, np.ndarray]:
    rows, labels = [], []
    for ex in dataset:
        if isinstance(ex, BitInput):
            bits, y = ex.bits, ex.label
        else:
            bits, y = ex
            bits = as_bits(bits)
        if y is None:
            raise InputError("training example without a label")
        rows.append(bits)
        labels.append(int(y))
    if not rows:
        raise InputError("empty dataset")
    if len({len(r) for r in rows}) != 1:
        raise InputError("training examples have differing dimensions")
    return np.asarray(rows, dtype=bool), np.asarray(labels, dtype=np.int64)


def train_teams(dataset, config: TrainConfig) -> tuple[TaTeam, TaTeam]:
    """Run the training loop and return the final positive and negative TA teams.

    Per epoch the examples are visited in a seeded Fisher-Yates order. For each
    example the clipped margin v = clip(neg - pos, -T, T) is computed once; then
    for every monomial pair j one uniform u_j gates feedback:
    y=1: u_j <= (T + v) / 2T -> Type I to positive j, Type II to negative j;
    y=0: u_j <= (T - v) / 2T -> Type II to positive j, Type I to negative j.
    With ``gating="inverted"`` the two thresholds are swapped.
    """
    c = config
    if c.n_monomials < 2 or c.n_monomials % 2:
        raise InputError(f"n_monomials must be even and >= 2, got {c.n_monomials}")
    if c.s <= 1:
        raise InputError(f"specificity must exceed 1, got {c.s}")
    if c.epochs < 1:
        raise InputError(f"epochs must be >= 1, got {c.epochs}")
    if c.N < 1 or c.T < 1:
        raise InputError("N and T must be >= 1")
    if c.gating not in ("standard", "inverted"):
        raise InputError(f"unknown gating {c.gating!r}")
    sign = 1 if c.gating == "standard" else -1
    X, y = _labelled(dataset)
    n = X.shape[1]
    half = c.n_monomials // 2
    pos = TaTeam(half, n, c.N)
    neg = TaTeam(half, n, c.N)
    rng = SplitMix64(c.seed)
    L = np.concatenate([X, ~X], axis=1)
    hi_p, lo_p = (c.s - 1.0) / c.s, 1.0 / c.s
    top = 2 * c.N

    for _ in range(c.epochs):
        for idx in rng.permutation(len(y)):
            lits = L[idx]
            pos_inc = pos.states > c.N
            neg_inc = neg.states > c.N
            pos_val = ~np.any(pos_inc & ~lits, axis=1)
            neg_val = ~np.any(neg_inc & ~lits, axis=1)
            v = clip(int(neg_val.sum()) - int(pos_val.sum()), -c.T, c.T)
            gate = rng.random(half)
            if y[idx] == 1:
                chosen = gate <= (c.T + sign * v) / (2 * c.T)
                t1, t1_inc, t1_val = pos, pos_inc, pos_val
                t2, t2_inc, t2_val = neg, neg_inc, neg_val
            else:
                chosen = gate <= (c.T - sign * v) / (2 * c.T)
                t1, t1_inc, t1_val = neg, neg_inc, neg_val
                t2, t2_inc, t2_val = pos, pos_inc, pos_val
            rows = np.flatnonzero(chosen)
            if rows.size == 0:
                continue
            # Type I, vectorised over the chosen rows; same rules as type1_events
            val = t1_val[rows][:, None]
            u = rng.random(rows.size * 2 * n).reshape(rows.size, 2 * n)
            hi = u < hi_p
            lo = u < lo_p
            up = val & lits & hi
            down = (~val & lo) | (val & ~lits & lo)
            step = up.astype(np.int32) - down.astype(np.int32)
            t1.states[rows] = np.clip(t1.states[rows] + step, 1, top)
            # Type II: penalise excluded zero literals of true monomials
            inc2 = t2_inc[rows]
            val2 = t2_val[rows][:, None]
            bump = val2 & ~inc2 & ~lits
            t2.states[rows] = np.minimum(t2.states[rows] + bump.astype(np.int32), top)
    return pos, neg


def train(dataset, config: TrainConfig) -> TsmModel:
    pos, neg = train_teams(dataset, config)
    return TsmModel(
        pos.n_vars,
        pos.extract_monomials(),
        neg.extract_monomials(),
        N=config.N,
        T=config.T,
        s=config.s,
    )


def train_multiclass(dataset, classes: Sequence[int], config: TrainConfig) -> MulticlassModel:
    """One-vs-rest: machine for class c sees label 1 on class-c examples, 0 otherwise.

    ``dataset`` holds ``(bits, class_id)`` pairs.
    """
    data = [(as_bits(b), int(c)) for b, c in dataset]
    members = []
    for k, cid in enumerate(classes):
        cfg = dataclasses.replace(config, seed=config.seed + k)
        members.append((cid, train([(b, int(c == cid)) for b, c in data], cfg)))
    return MulticlassModel(tuple(members))


def accuracy(model: TsmModel, dataset: Sequence) -> float:
    X, y = _labelled(dataset)
    return float(np.mean(model.classify_many(X) == y))


# ---------------------------------------------------------------- model files


def _fmt_num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def dumps_model(model: TsmModel) -> str:
    lines = [f"tsm v1 n={model.n_vars} N={model.N} T={model.T} s={_fmt_num(model.s)}"]
    lines += [f"+ {m}" for m in model.positive]
    lines += [f"- {m}" for m in model.negative]
    return "\n".join(lines) + "\n"


def loads_model(text: str) -> TsmModel:
    lines = text.splitlines()
    if not lines:
        raise ModelFormatError("empty model file", 1)
    head = lines[0].split()
    if head[:2] != ["tsm", "v1"]:
        raise ModelFormatError("expected header 'tsm v1 ...'", 1)
    fields = {}
    for tok in head[2:]:
        key, sep, val = tok.partition("=")
        if not sep:
            raise ModelFormatError(f"bad header field {tok!r}", 1)
        fields[key] = val
    try:
        n = int(fields["n"])
        N, T, s = int(fields["N"]), int(fields["T"]), float(fields["s"])
    except (KeyError, ValueError) as exc:
        raise ModelFormatError(f"bad or missing header field: {exc}", 1) from None
    pos, neg = [], []
    for lineno, raw in enumerate(lines[1:], 2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tag, _, body = line.partition(" ")
        if tag not in ("+", "-", "−"):
            raise ModelFormatError(f"polarity must be '+' or '-', got {tag!r}", lineno)
        body = body.strip()
        lits = set()
        if body != "{}":
            for tok in body.split(","):
                tok = tok.strip()
                negated = tok.startswith("~")
                try:
                    idx = int(tok[1:] if negated else tok)
                except ValueError:
                    raise ModelFormatError(f"bad literal {tok!r}", lineno) from None
                if not 1 <= idx <= n:
                    raise ModelFormatError(f"literal index {idx} outside 1..{n}", lineno)
                lits.add(Literal(idx, negated))
        (pos if tag == "+" else neg).append(Monomial(frozenset(lits)))
    try:
        return TsmModel(n, tuple(pos), tuple(neg), N=N, T=T, s=s)
    except InputError as exc:
        raise ModelFormatError(str(exc), len(lines)) from None


def save_model(model: TsmModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model))


def load_model(path) -> TsmModel:
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())


def xor_model() -> TsmModel:
    """The two-variable XOR machine used throughout the docs and tests."""
    return TsmModel(
        2,
        positive=(Monomial.of(1, 2), Monomial.of(-1, -2)),
        negative=(Monomial.of(1, -2), Monomial.of(-1, 2)),
    )
