"""Knowledge-based drug sample comparison engine."""

from .terms import Graph, Term, Triple, triple
from .schema import Schema, load_schema, serialize_schema, validate_schema
from .ruledsl import RuleAst, RuleSet, parse_rule, parse_ruleset, print_rule, validate_rule
from .planner import compile, execute, evaluate_ruleset, reldiff_eval
from .reasoner import check_consistency, derive_rules, materialize

__all__ = [
    "Graph",
    "Term",
    "Triple",
    "triple",
    "Schema",
    "load_schema",
    "serialize_schema",
    "validate_schema",
    "RuleAst",
    "RuleSet",
    "parse_rule",
    "parse_ruleset",
    "print_rule",
    "validate_rule",
    "compile",
    "execute",
    "evaluate_ruleset",
    "reldiff_eval",
    "check_consistency",
    "derive_rules",
    "materialize",
]
