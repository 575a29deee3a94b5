"""Proof traces: value objects, JSON-lines serialization and an independent replayer.

A trace file has a header line, one line per step and a verdict line::

    {"kind": "start", "n": 2, "p": 3, "expr": "br(gen(z0),gen(e))"}
    {"kind": "step", "rule": "antisym", "path": [], "expr": "..."}
    {"kind": "verdict", "verdict": "Vanishes", "expr": "zero(2,3)"}

``replay_jsonl`` re-parses every expression from text and re-applies each
rule, so it shares nothing with the search strategy.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from confstab.browder.expr import Calculus, Expr, Zero, parse
from confstab.browder.rules import RuleError, apply_rule

VERDICTS = ("Vanishes", "NormalForm", "Unknown")


@dataclass(frozen=True)
class Step:
    rule: str
    path: tuple[int, ...]
    result: Expr


@dataclass
class ProofTrace:
    n: int
    p: int
    initial: Expr
    steps: list[Step] = field(default_factory=list)
    verdict: str = "Unknown"
    result: Expr | None = None
    note: str = ""

    @property
    def final(self) -> Expr:
        return self.steps[-1].result if self.steps else self.initial

    def to_jsonl(self) -> str:
        lines = [json.dumps({"kind": "start", "n": self.n, "p": self.p, "expr": str(self.initial)})]
        for s in self.steps:
            lines.append(json.dumps({"kind": "step", "rule": s.rule, "path": list(s.path), "expr": str(s.result)}))
        v = {"kind": "verdict", "verdict": self.verdict, "expr": str(self.result if self.result is not None else self.final)}
        if self.note:
            v["note"] = self.note
        lines.append(json.dumps(v))
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "initial": str(self.initial),
            "verdict": self.verdict,
            "result": str(self.result if self.result is not None else self.final),
            "steps": [{"rule": s.rule, "path": list(s.path), "expr": str(s.result)} for s in self.steps],
            "note": self.note,
        }


@dataclass
class ReplayResult:
    ok: bool
    steps: int
    error: str = ""


def replay_jsonl(text: str) -> ReplayResult:
    """Check a serialized trace step by step."""
    rows = [json.loads(line) for line in text.splitlines() if line.strip()]
    if len(rows) < 2 or rows[0].get("kind") != "start" or rows[-1].get("kind") != "verdict":
        return ReplayResult(False, 0, "trace must start with a header and end with a verdict")
    calc = Calculus(rows[0]["n"], rows[0]["p"])
    cur = parse(rows[0]["expr"])
    start_bideg = calc.bidegree(cur)
    for idx, row in enumerate(rows[1:-1], 1):
        if row.get("kind") != "step":
            return ReplayResult(False, idx - 1, f"line {idx}: expected a step")
        try:
            cur = apply_rule(calc, cur, row["rule"], tuple(row["path"]))
        except RuleError as exc:
            return ReplayResult(False, idx - 1, f"line {idx}: {exc}")
        if str(cur) != row["expr"]:
            return ReplayResult(False, idx - 1, f"line {idx}: got {cur}, trace says {row['expr']}")
        if calc.bidegree(cur) != start_bideg:
            return ReplayResult(False, idx - 1, f"line {idx}: bidegree drift")
    verdict = rows[-1]
    nsteps = len(rows) - 2
    if verdict["verdict"] not in VERDICTS:
        return ReplayResult(False, nsteps, f"unknown verdict {verdict['verdict']!r}")
    if verdict["verdict"] == "Vanishes" and not isinstance(cur, Zero):
        return ReplayResult(False, nsteps, f"Vanishes claimed but replay ends at {cur}")
    if verdict["verdict"] != "Unknown" and str(cur) != verdict["expr"]:
        return ReplayResult(False, nsteps, f"verdict expression {verdict['expr']} differs from replay {cur}")
    return ReplayResult(True, nsteps)


def replay(trace: ProofTrace) -> ReplayResult:
    return replay_jsonl(trace.to_jsonl())
