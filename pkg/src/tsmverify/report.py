"""Verdict reports: per-instance text lines, JSON-lines records, and a summary table.

Record schema (one JSON object per line, keys in this order):

    property             "robustness" | "similarity" | "equivalence"
    result               "HOLDS" | "FAILS" | "TIMEOUT"
    epsilon              int or null
    eta                  float or null
    time_s               float seconds, or null under --deterministic
    vars, clauses        size of the CNF handed to the solver
    input_bits           the instance as a 0/1 string, or null
    counterexample_bits  the offending input as a 0/1 string, only on FAILS

A universal check adds one trailing record with property "universal_robustness"
or "universal_similarity", its overall result, and the fields holds, threshold
and instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .verify import Result, UniversalVerdict, Verdict

_HOLDS_COLUMN = {"robustness": "eps-robust", "similarity": "eps-similar", "equivalence": "equivalent"}


@dataclass
class SummaryRow:
    epsilon: int | None
    solved: int
    holding: int
    avg_time: float | None


def summary_row(verdicts: list[Verdict]) -> SummaryRow:
    """Solved means the solver settled the instance either way; time averages over solved ones."""
    solved = [v for v in verdicts if v.result in (Result.HOLDS, Result.FAILS)]
    holding = sum(v.result == Result.HOLDS for v in verdicts)
    avg = sum(v.solve_time for v in solved) / len(solved) if solved else None
    eps = verdicts[0].epsilon if verdicts else None
    return SummaryRow(eps, len(solved), holding, avg)


def format_table(prop: str, rows: Iterable[SummaryRow], total: int, timing: bool = True, timeout: float | None = None) -> str:
    """Table with the columns eps | solved | eps-robust | time (sec)."""
    head = ["eps", "solved", _HOLDS_COLUMN.get(prop, "holds"), "time (sec)"]
    body = []
    for r in rows:
        if not timing:
            t = "-"
        elif r.avg_time is None:
            t = f">= {timeout:g}" if timeout else "-"
        else:
            t = f"{r.avg_time:.2f}"
        body.append(["-" if r.epsilon is None else str(r.epsilon), str(r.solved), str(r.holding), t])
    widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h) for i, h in enumerate(head)]
    line = lambda cells: " | ".join(c.rjust(w) for c, w in zip(cells, widths))
    out = [f"{total} test instances", line(head), "-+-".join("-" * w for w in widths)]
    out += [line(b) for b in body]
    return "\n".join(out)


def text_line(index: int, v: Verdict, timing: bool = True) -> str:
    parts = [f"[{index}]", v.property, str(v.result)]
    if v.epsilon is not None:
        parts.append(f"eps={v.epsilon}")
    if timing:
        parts.append(f"time={v.solve_time:.3f}s")
    if v.counterexample is not None:
        parts.append("counterexample=" + "".join(map(str, v.counterexample.bits)))
    return " ".join(parts)


def json_line(v: Verdict, eta: float | None = None, timing: bool = True) -> str:
    return json.dumps(v.to_record(eta, timing))


def universal_record(u: UniversalVerdict) -> dict:
    return {
        "property": u.property,
        "result": str(u.result),
        "epsilon": u.epsilon,
        "eta": u.eta,
        "holds": u.robust_count,
        "threshold": u.threshold,
        "instances": len(u.verdicts),
    }


def render(
    verdicts: list[Verdict],
    universal: UniversalVerdict | None = None,
    timing: bool = True,
    timeout: float | None = None,
) -> tuple[str, str]:
    """Return (human-readable text, JSON lines) for a batch of verdicts."""
    eta = universal.eta if universal else None
    text = [text_line(i, v, timing) for i, v in enumerate(verdicts, 1)]
    records = [json_line(v, eta, timing) for v in verdicts]
    if verdicts and verdicts[0].property != "equivalence":
        text += ["", format_table(verdicts[0].property, [summary_row(verdicts)], len(verdicts), timing, timeout)]
    if universal is not None:
        text.append(
            f"{universal.property} eps={universal.epsilon} eta={universal.eta}: "
            f"{universal.robust_count}/{len(universal.verdicts)} hold, threshold {universal.threshold} -> {universal.result}"
        )
        records.append(json.dumps(universal_record(universal)))
    return "\n".join(text) + "\n", "\n".join(records) + "\n"
