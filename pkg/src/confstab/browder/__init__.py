"""Symbolic calculus of products, Browder brackets and power operations."""
from confstab.browder.expr import Calculus, parse
from confstab.browder.rules import RULES, RuleError, apply_rule, collect
from confstab.browder.strategy import check_point_bracket
from confstab.browder.trace import ProofTrace, replay, replay_jsonl

__all__ = [
    "Calculus",
    "ProofTrace",
    "RULES",
    "RuleError",
    "apply_rule",
    "check_point_bracket",
    "collect",
    "parse",
    "replay",
    "replay_jsonl",
]
