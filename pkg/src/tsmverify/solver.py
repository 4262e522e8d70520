"""SAT solving: an embedded CDCL solver and an external DIMACS process adapter.

Both return a :class:`SolveResult`; a SAT answer is always re-checked against
every clause of the input before it is handed back.
"""

from __future__ import annotations

import heapq
import logging
import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field

from .errors import InputError, ProtocolError, SolverLaunchError
from .logic.cnf import Cnf, parse_solver_output, write_dimacs

log = logging.getLogger(__name__)

SAT = "SAT"
UNSAT = "UNSAT"
TIMEOUT = "TIMEOUT"

SOLVER_ENV = "TSM_SOLVER"
TEMP_PREFIX = "tsm-"
TEMP_SUFFIX = ".cnf"


@dataclass
class SolveResult:
    outcome: str
    assignment: dict[int, int] | None = None
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    wall_time: float = 0.0
    stats: dict = field(default_factory=dict)

    @property
    def is_sat(self) -> bool:
        return self.outcome == SAT


def _luby(i: int) -> int:
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while (1 << k) - 1 != i:
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1
    return 1 << (k - 1)


class _Cdcl:
    """Two-watched-literal CDCL with 1UIP learning and non-chronological backjumping.

    Literal codes: variable v positive -> 2v, negative -> 2v+1.
    ``lv[code]`` is 1 (true), -1 (false) or 0 (unassigned).
    """

    def __init__(self, cnf: Cnf, heuristic: str = "lowest"):
        n = cnf.var_count
        self.n = n
        self.heuristic = heuristic
        self.lv = [0] * (2 * n + 2)
        self.level = [0] * (n + 1)
        self.reason: list[int] = [-1] * (n + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.clauses: list[list[int]] = []
        self.watches: list[list[int]] = [[] for _ in range(2 * n + 2)]
        self.seen = bytearray(n + 1)
        self.hint = 1
        self.decisions = 0
        self.conflicts = 0
        self.propagations = 0
        self.empty = False
        self.activity = [0.0] * (n + 1)
        self.var_inc = 1.0
        self.phase = bytearray(n + 1)
        self.heap: list[tuple[float, int]] = []
        if heuristic == "vsids":
            self.heap = [(0.0, v) for v in range(1, n + 1)]
            heapq.heapify(self.heap)
        pending_units: list[int] = []
        for raw in cnf.clauses:
            lits = set()
            taut = False
            for x in raw:
                code = 2 * x if x > 0 else -2 * x + 1
                if code ^ 1 in lits:
                    taut = True
                    break
                lits.add(code)
            if taut:
                continue
            if not lits:
                self.empty = True
                continue
            c = sorted(lits)
            if len(c) == 1:
                pending_units.append(c[0])
            else:
                self._attach(c)
        self.pending_units = pending_units

    def _attach(self, c: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(c)
        self.watches[c[0]].append(ci)
        self.watches[c[1]].append(ci)
        return ci

    def _assign(self, p: int, reason: int) -> None:
        lv = self.lv
        lv[p] = 1
        lv[p ^ 1] = -1
        v = p >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(p)

    def _propagate(self) -> int:
        """Unit propagation; returns a conflicting clause index or -1."""
        lv = self.lv
        clauses = self.clauses
        watches = self.watches
        trail = self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            n_ws = len(ws)
            while i < n_ws:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if lv[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if lv[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if lv[first] == -1:
                        while i < n_ws:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return ci
                    self._assign(first, ci)
            del ws[j:]
        return -1

    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for u in range(1, self.n + 1):
                act[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[u], u) for u in range(1, self.n + 1) if self.lv[2 * u] == 0]
            heapq.heapify(self.heap)
        elif self.lv[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen = self.seen
        level = self.level
        reason = self.reason
        trail = self.trail
        clauses = self.clauses
        cur = len(self.trail_lim)
        vsids = self.heuristic == "vsids"
        learnt = [0]
        path = 0
        p = -1
        idx = len(trail) - 1
        while True:
            c = clauses[confl]
            for q in (c if p == -1 else c[1:]):
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    if vsids:
                        self._bump(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = 0
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # local minimisation: drop literals implied by other learnt literals
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r == -1:
                keep.append(q)
                continue
            for x in clauses[r][1:]:
                if not seen[x >> 1] and level[x >> 1] > 0:
                    keep.append(q)
                    break
        for q in learnt:
            seen[q >> 1] = 0
        learnt = keep
        if len(learnt) == 1:
            return learnt, 0
        best = 1
        for k in range(2, len(learnt)):
            if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                best = k
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _backtrack(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        lv = self.lv
        stop = self.trail_lim[lvl]
        vsids = self.heuristic == "vsids"
        hint = self.hint
        for k in range(len(self.trail) - 1, stop - 1, -1):
            p = self.trail[k]
            v = p >> 1
            lv[p] = 0
            lv[p ^ 1] = 0
            self.reason[v] = -1
            if vsids:
                self.phase[v] = p & 1
                heapq.heappush(self.heap, (-self.activity[v], v))
            elif v < hint:
                hint = v
        self.hint = hint
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = stop

    def _pick(self) -> int:
        lv = self.lv
        if self.heuristic == "vsids":
            heap = self.heap
            while heap:
                _, v = heapq.heappop(heap)
                if lv[2 * v] == 0:
                    return 2 * v + self.phase[v]
            return -1
        v = self.hint
        n = self.n
        while v <= n and lv[2 * v] != 0:
            v += 1
        self.hint = v
        return 2 * v if v <= n else -1

    def solve(self, deadline: float | None, conflict_limit: int | None) -> str:
        if self.empty:
            return UNSAT
        for p in self.pending_units:
            if self.lv[p] == -1:
                return UNSAT
            if self.lv[p] == 0:
                self._assign(p, -1)
        vsids = self.heuristic == "vsids"
        restart_idx = 1
        restart_budget = 100 * _luby(restart_idx) if vsids else -1
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl != -1:
                self.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    return UNSAT
                learnt, back = self._analyze(confl)
                self._backtrack(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], -1)
                else:
                    ci = self._attach(learnt)
                    self._assign(learnt[0], ci)
                if vsids:
                    self.var_inc *= 1.0 / 0.95
                if conflict_limit is not None and self.conflicts >= conflict_limit:
                    return TIMEOUT
                if deadline is not None and time.monotonic() > deadline:
                    return TIMEOUT
                continue
            if vsids and since_restart >= restart_budget:
                self._backtrack(0)
                since_restart = 0
                restart_idx += 1
                restart_budget = 100 * _luby(restart_idx)
            p = self._pick()
            if p == -1:
                return SAT
            self.decisions += 1
            if deadline is not None and (self.decisions & 255) == 0 and time.monotonic() > deadline:
                return TIMEOUT
            self.trail_lim.append(len(self.trail))
            self._assign(p, -1)

    def model(self) -> dict[int, int]:
        lv = self.lv
        return {v: int(lv[2 * v] == 1) for v in range(1, self.n + 1)}


def _checked(cnf: Cnf, res: SolveResult) -> SolveResult:
    if res.outcome == SAT and not cnf.satisfied_by(res.assignment):
        raise ProtocolError("solver returned an assignment that falsifies a clause")
    return res


def solve_embedded(
    cnf: Cnf,
    timeout_s: float | None = None,
    conflict_limit: int | None = None,
    heuristic: str = "lowest",
) -> SolveResult:
    """Decide ``cnf`` with the built-in CDCL solver.

    ``heuristic="lowest"`` (default) branches on the lowest unassigned variable,
    positive phase first, without restarts: fully deterministic.
    ``"vsids"`` enables activity-based branching, phase saving and Luby restarts.
    """
    if heuristic not in ("lowest", "vsids"):
        raise InputError(f"unknown branching heuristic {heuristic!r}")
    t0 = time.monotonic()
    deadline = None if timeout_s is None else t0 + timeout_s
    core = _Cdcl(cnf, heuristic)
    outcome = core.solve(deadline, conflict_limit)
    res = SolveResult(
        outcome,
        core.model() if outcome == SAT else None,
        decisions=core.decisions,
        conflicts=core.conflicts,
        propagations=core.propagations,
        wall_time=time.monotonic() - t0,
    )
    return _checked(cnf, res)


def solve_external(cnf: Cnf, solver_cmd: str, timeout_s: float | None = None) -> SolveResult:
    """Run an external competition-format solver on ``cnf``.

    The DIMACS text goes to a temporary file named ``tsm-XXXXXXXX.cnf``. If
    ``solver_cmd`` contains ``{cnf}`` it is replaced by that path, otherwise the
    path is appended as the last argument. The process is killed at timeout.
    """
    argv_template = shlex.split(solver_cmd)
    if not argv_template:
        raise SolverLaunchError("empty solver command")
    t0 = time.monotonic()
    fd, path = tempfile.mkstemp(prefix=TEMP_PREFIX, suffix=TEMP_SUFFIX)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(write_dimacs(cnf))
        if any("{cnf}" in a for a in argv_template):
            argv = [a.replace("{cnf}", path) for a in argv_template]
        else:
            argv = argv_template + [path]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout_s)
        except FileNotFoundError as exc:
            raise SolverLaunchError(f"cannot launch {argv[0]!r}: {exc}") from exc
        except PermissionError as exc:
            raise SolverLaunchError(f"cannot launch {argv[0]!r}: {exc}") from exc
        except subprocess.TimeoutExpired:
            return SolveResult(TIMEOUT, wall_time=time.monotonic() - t0)
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass
    if proc.returncode not in (0, 10, 20):
        raise ProtocolError(
            f"solver exited with status {proc.returncode}: {proc.stderr.strip()[:200]}"
        )
    status, model = parse_solver_output(proc.stdout)
    wall = time.monotonic() - t0
    if status == "UNKNOWN":
        return SolveResult(TIMEOUT, wall_time=wall)
    if status == UNSAT:
        if proc.returncode == 10:
            raise ProtocolError("exit code 10 contradicts UNSATISFIABLE")
        return SolveResult(UNSAT, wall_time=wall)
    if proc.returncode == 20:
        raise ProtocolError("exit code 20 contradicts SATISFIABLE")
    full = {v: model.get(v, 0) for v in range(1, cnf.var_count + 1)}
    if not cnf.satisfied_by(full):
        raise ProtocolError("external solver's model falsifies a clause")
    return SolveResult(SAT, full, wall_time=wall)


@dataclass(frozen=True)
class EmbeddedSolver:
    heuristic: str = "lowest"
    conflict_limit: int | None = None
    name: str = "embedded"

    def solve(self, cnf: Cnf, timeout: float | None = None) -> SolveResult:
        return solve_embedded(cnf, timeout, self.conflict_limit, self.heuristic)


@dataclass(frozen=True)
class ExternalSolver:
    command: str

    @property
    def name(self) -> str:
        return f"exec:{self.command}"

    def solve(self, cnf: Cnf, timeout: float | None = None) -> SolveResult:
        return solve_external(cnf, self.command, timeout)


def get_solver(spec: str | None = None):
    """Resolve ``embedded``, ``embedded:vsids`` or ``exec:<command>``.

    ``None`` falls back to ``$TSM_SOLVER`` and then to the embedded solver.
    """
    if spec is None:
        spec = os.environ.get(SOLVER_ENV) or "embedded"
    if spec == "embedded":
        return EmbeddedSolver()
    if spec == "embedded:vsids":
        return EmbeddedSolver(heuristic="vsids")
    if spec.startswith("exec:") and spec[5:].strip():
        return ExternalSolver(spec[5:].strip())
    raise InputError(f"unknown solver {spec!r} (expected 'embedded' or 'exec:<command>')")
