"""Compile rules into conjunctive-query plans and evaluate them into verdicts.

Class atoms become scans on ``(?v, rdf:type, Class)``; property atoms become
scans on ``(?s, property, ?o)``. Join order is greedy by ascending exact scan
cardinality; semantics are independent of the order chosen.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Union

from .ruledsl import (
    ClassAtom,
    Compare,
    NumberLit,
    PropertyAtom,
    RelDiff,
    RuleAst,
    RuleSet,
    StringLit,
    Var,
    validate_rule,
)
from .schema import Schema
from .terms import RDF_TYPE, Graph, Term, Triple

MATCH = "MATCH"
NO_MATCH = "NO_MATCH"
INAPPLICABLE = "INAPPLICABLE"


@lru_cache(maxsize=None)
def _entity(name: str) -> Term:
    """Entity-term construction cache; validation is per distinct name."""
    return Term.entity(name)


def reldiff_eval(a: float, b: float, t: float) -> bool:
    """True iff |a-b| / max(a,b) <= t. Requires a > 0, b > 0, 0 < t < 1."""
    if a <= 0 or b <= 0:
        raise ValueError("reldiff operands must be positive")
    if not (0.0 < t < 1.0):
        raise ValueError("reldiff tolerance must be in (0,1)")
    return abs(a - b) / max(a, b) <= t


@dataclass(frozen=True)
class ScanStep:
    """One triple pattern: each slot is a Term (concrete) or a variable name."""

    subject: Union[str, Term]
    predicate: Term
    object: Union[str, Term]
    estimate: Optional[int] = None

    def variables(self) -> set[str]:
        out = set()
        if isinstance(self.subject, str):
            out.add(self.subject)
        if isinstance(self.object, str):
            out.add(self.object)
        return out


@dataclass(frozen=True)
class QueryPlan:
    rule: RuleAst
    scans: tuple[ScanStep, ...]
    filters: tuple[Union[Compare, RelDiff], ...]
    head_vars: tuple[str, ...]


@dataclass
class BindingTable:
    head_vars: tuple[str, ...]
    rows: list[dict[str, Term]]

    def head_tuples(self) -> list[tuple[str, ...]]:
        return [tuple(row[v].id for v in self.head_vars) for row in self.rows]


def _atom_to_scan(atom: Union[ClassAtom, PropertyAtom]) -> tuple:
    if isinstance(atom, ClassAtom):
        return (atom.var, RDF_TYPE, Term.entity(atom.class_name))
    return (atom.subject, Term.entity(atom.property), atom.object)


def _scan_estimate(graph: Graph, s, p, o) -> int:
    return graph.count(
        s if isinstance(s, Term) else None,
        p,
        o if isinstance(o, Term) else None,
    )


def compile(ast: RuleAst, schema: Schema, graph: Optional[Graph] = None) -> QueryPlan:
    """Compile a validated rule; with a graph, scans carry exact counts and
    are greedily ordered by ascending cardinality (ties keep source order)."""
    diags = validate_rule(ast, schema)
    if diags:
        raise ValueError(f"rule {ast.name!r} does not validate: " + "; ".join(map(str, diags)))

    raw_scans = [
        _atom_to_scan(a) for a in ast.body if isinstance(a, (ClassAtom, PropertyAtom))
    ]
    filters = tuple(a for a in ast.body if isinstance(a, (Compare, RelDiff)))

    indexed = list(enumerate(raw_scans))
    if graph is not None:
        indexed.sort(key=lambda item: (_scan_estimate(graph, *item[1]), item[0]))
    scans = tuple(
        ScanStep(s, p, o, _scan_estimate(graph, s, p, o) if graph is not None else None)
        for _, (s, p, o) in indexed
    )
    return QueryPlan(rule=ast, scans=scans, filters=filters, head_vars=ast.head_vars)


def _operand_value(op, row: dict[str, Term]):
    if isinstance(op, Var):
        return row[op.name]
    if isinstance(op, StringLit):
        return Term.literal(op.value, "string")
    return op.value  # NumberLit: compared numerically


def _term_key(t: Term):
    """Comparable value: numeric literals by number, others by lexical."""
    if t.is_literal and t.datatype in ("float", "integer"):
        return ("num", float(t.id))
    if t.is_literal:
        return (t.datatype, t.id)
    return ("entity", t.id)


def _eval_compare(cmp: Compare, row: dict[str, Term]) -> bool:
    left = _operand_value(cmp.left, row)
    right = _operand_value(cmp.right, row)

    def key(v):
        if isinstance(v, Term):
            return _term_key(v)
        return ("num", float(v))

    lk, rk = key(left), key(right)
    if cmp.op == "==":
        return lk == rk
    if cmp.op == "!=":
        return lk != rk
    if lk[0] != rk[0]:
        return False  # ordering across kinds never holds
    if cmp.op == "<":
        return lk[1] < rk[1]
    if cmp.op == "<=":
        return lk[1] <= rk[1]
    if cmp.op == ">":
        return lk[1] > rk[1]
    return lk[1] >= rk[1]


def _eval_reldiff(rd: RelDiff, row: dict[str, Term]) -> Optional[bool]:
    """None when an operand is not a positive float (inapplicable)."""
    values = []
    for name in (rd.left, rd.right):
        term = row[name]
        if not term.is_literal or term.datatype not in ("float", "integer"):
            return None
        value = float(term.id)
        if value <= 0:
            return None
        values.append(value)
    return reldiff_eval(values[0], values[1], rd.tolerance)


def _eval_filter(f, row: dict[str, Term]) -> Optional[bool]:
    if isinstance(f, RelDiff):
        return _eval_reldiff(f, row)
    return _eval_compare(f, row)


def _filter_vars(f) -> set[str]:
    if isinstance(f, RelDiff):
        return {f.left, f.right}
    out = set()
    for side in (f.left, f.right):
        if isinstance(side, Var):
            out.add(side.name)
    return out


def _extend(
    rows: list[dict[str, Term]], scan: ScanStep, graph: Graph
) -> list[dict[str, Term]]:
    out: list[dict[str, Term]] = []
    for row in rows:
        s = row.get(scan.subject) if isinstance(scan.subject, str) else scan.subject
        o = row.get(scan.object) if isinstance(scan.object, str) else scan.object
        for t in graph.match(s, scan.predicate, o):
            new = dict(row)
            if isinstance(scan.subject, str):
                new[scan.subject] = t.subject
            if isinstance(scan.object, str):
                if scan.subject == scan.object and t.subject != t.object:
                    continue
                new[scan.object] = t.object
            out.append(new)
    return out


def execute(plan: QueryPlan, graph: Graph) -> BindingTable:
    """All bindings satisfying every scan and filter; set semantics, rows
    sorted by head-variable ids."""
    rows: list[dict[str, Term]] = [{}]
    pending = list(plan.filters)
    bound: set[str] = set()
    for scan in plan.scans:
        rows = _extend(rows, scan, graph)
        bound |= scan.variables()
        still_pending = []
        for f in pending:
            if _filter_vars(f) <= bound:
                rows = [r for r in rows if _eval_filter(f, r) is True]
            else:
                still_pending.append(f)
        pending = still_pending
    for f in pending:  # filters over head-only rules with no scans
        rows = [r for r in rows if _eval_filter(f, r) is True]

    seen = set()
    unique: list[dict[str, Term]] = []
    for row in rows:
        key = tuple(sorted((k, v) for k, v in row.items()))
        if key not in seen:
            seen.add(key)
            unique.append(row)
    unique.sort(key=lambda r: tuple(r[v].id for v in plan.head_vars if v in r))
    return BindingTable(head_vars=plan.head_vars, rows=unique)


# ------------------------------------------------------------- rule sets


@dataclass
class Verdict:
    value: str  # MATCH | NO_MATCH | INAPPLICABLE
    rule: str
    bindings: dict[str, str] = field(default_factory=dict)
    support: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {"value": self.value, "bindings": self.bindings, "support": list(self.support)}


@dataclass
class MatchReport:
    dataset: str
    pairs: list[tuple[str, str]]
    verdicts: dict[tuple[str, str], dict[str, Verdict]]
    rule_errors: dict[str, str] = field(default_factory=dict)

    def summary(self) -> dict:
        counts: dict[str, dict[str, int]] = {}
        for per_rule in self.verdicts.values():
            for rule, verdict in per_rule.items():
                bucket = counts.setdefault(rule, {MATCH: 0, NO_MATCH: 0, INAPPLICABLE: 0})
                bucket[verdict.value] += 1
        return {"pairs": len(self.pairs), "byRule": counts}

    def as_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "pairs": [
                {
                    "s1": s1,
                    "s2": s2,
                    "verdicts": {r: v.as_dict() for r, v in sorted(self.verdicts[(s1, s2)].items())},
                }
                for s1, s2 in self.pairs
            ],
            "summary": self.summary(),
            **({"ruleErrors": self.rule_errors} if self.rule_errors else {}),
        }

    def as_tsv(self) -> str:
        lines = ["s1\ts2\trule\tverdict"]
        for s1, s2 in self.pairs:
            for rule, verdict in sorted(self.verdicts[(s1, s2)].items()):
                lines.append(f"{s1}\t{s2}\t{rule}\t{verdict.value}")
        return "\n".join(lines)


class _RuleEvaluator:
    """Per-rule machinery reused across candidate pairs."""

    def __init__(self, rule: RuleAst, schema: Schema, graph: Graph):
        self.rule = rule
        self.graph = graph
        head = set(rule.head_vars)
        self.head_class_atoms = [
            a for a in rule.body if isinstance(a, ClassAtom) and a.var in head
        ]
        self.other_atoms = [
            a
            for a in rule.body
            if isinstance(a, (ClassAtom, PropertyAtom)) and a not in self.head_class_atoms
        ]
        self.filters = [a for a in rule.body if isinstance(a, (Compare, RelDiff))]
        self.scans = [ScanStep(*_atom_to_scan(a)) for a in self.other_atoms]
        # Head classes constrain the candidate universe.
        self.head_classes: dict[str, list[str]] = {}
        for a in self.head_class_atoms:
            self.head_classes.setdefault(a.var, []).append(a.class_name)
        # Membership sets let the per-pair guard skip Triple construction.
        self.class_members: list[tuple[str, frozenset[Term]]] = [
            (
                a.var,
                frozenset(
                    t.subject for t in graph.match(None, RDF_TYPE, _entity(a.class_name))
                ),
            )
            for a in self.head_class_atoms
        ]

    def _structural_rows(self, binding: dict[str, Term]) -> list[dict[str, Term]]:
        for var, members in self.class_members:
            if binding[var] not in members:
                return []
        rows = [dict(binding)]
        for scan in self.scans:
            rows = _extend(rows, scan, self.graph)
            if not rows:
                return []
        return rows

    def _support(self, row: dict[str, Term]) -> tuple[str, ...]:
        lines = []
        for atom in self.head_class_atoms + self.other_atoms:
            if isinstance(atom, ClassAtom):
                lines.append(f"{row[atom.var].render()} rdf:type {atom.class_name}")
            else:
                lines.append(
                    f"{row[atom.subject].render()} {atom.property} {row[atom.object].render()}"
                )
        return tuple(lines)

    def _oriented(self, binding: dict[str, Term]) -> Verdict:
        rows = self._structural_rows(binding)
        if not rows:
            return Verdict(INAPPLICABLE, self.rule.name)
        no_match_row: Optional[dict[str, Term]] = None
        for row in rows:
            results = [_eval_filter(f, row) for f in self.filters]
            if all(r is True for r in results):
                return Verdict(
                    MATCH,
                    self.rule.name,
                    bindings={k: v.render() for k, v in sorted(row.items())},
                    support=self._support(row),
                )
            if no_match_row is None and all(r is not None for r in results):
                no_match_row = row
        if no_match_row is not None:
            return Verdict(
                NO_MATCH,
                self.rule.name,
                bindings={k: v.render() for k, v in sorted(no_match_row.items())},
                support=self._support(no_match_row),
            )
        return Verdict(INAPPLICABLE, self.rule.name)

    def verdict(self, a: str, b: str) -> Verdict:
        """Three-valued outcome for the unordered pair (a, b).

        Both orientations are tried; MATCH beats NO_MATCH beats INAPPLICABLE.
        """
        v1, v2 = self.rule.head_vars
        ta, tb = _entity(a), _entity(b)
        first = self._oriented({v1: ta, v2: tb})
        if first.value == MATCH:
            return first
        second = self._oriented({v1: tb, v2: ta})
        if second.value == MATCH:
            return second
        if NO_MATCH in (first.value, second.value):
            return first if first.value == NO_MATCH else second
        return first


def _candidate_instances(classes: Iterable[str], graph: Graph) -> set[str]:
    result: Optional[set[str]] = None
    for cls in classes:
        members = {t.subject.id for t in graph.match(None, RDF_TYPE, Term.entity(cls))}
        result = members if result is None else (result & members)
    return result or set()


def evaluate_ruleset(
    rules: RuleSet,
    graph: Graph,
    schema: Schema,
    dataset: str = "dataset",
    block_by: Optional[list[str]] = None,
) -> MatchReport:
    """Per-pair, per-rule verdicts over all unordered candidate pairs.

    ``block_by`` restricts pairs to samples sharing equal values on the named
    data properties (the blocking key); with it off the candidate space is
    the full unordered cross product. Evaluation never mutates the graph.
    """
    rule_errors: dict[str, str] = {}
    evaluators: list[_RuleEvaluator] = []
    universe: set[str] = set()
    for rule in rules:
        diags = validate_rule(rule, schema)
        if diags:
            rule_errors[rule.name] = "; ".join(str(d) for d in diags)
            continue
        if len(rule.head_vars) != 2:
            rule_errors[rule.name] = f"head arity {len(rule.head_vars)}, expected 2"
            continue
        ev = _RuleEvaluator(rule, schema, graph)
        if not ev.head_classes:
            rule_errors[rule.name] = "head variables carry no class atoms"
            continue
        evaluators.append(ev)
        for classes in ev.head_classes.values():
            universe |= _candidate_instances(classes, graph)

    candidates = sorted(universe)
    pairs: list[tuple[str, str]] = []
    if block_by:
        keys: dict[str, tuple] = {}
        for inst in candidates:
            key = []
            subject = _entity(inst)
            for prop in block_by:
                values = sorted(t.object.id for t in graph.match(subject, _entity(prop), None))
                key.append(tuple(values))
            keys[inst] = tuple(key)
        by_key: dict[tuple, list[str]] = {}
        for inst in candidates:
            if all(k for k in keys[inst]):  # samples missing a key value are not blocked together
                by_key.setdefault(keys[inst], []).append(inst)
        for group in by_key.values():
            for i, a in enumerate(group):
                for b in group[i + 1 :]:
                    pairs.append((a, b))
        pairs.sort()
    else:
        for i, a in enumerate(candidates):
            for b in candidates[i + 1 :]:
                pairs.append((a, b))

    verdicts: dict[tuple[str, str], dict[str, Verdict]] = {}
    for a, b in pairs:
        verdicts[(a, b)] = {ev.rule.name: ev.verdict(a, b) for ev in evaluators}
    return MatchReport(dataset=dataset, pairs=pairs, verdicts=verdicts, rule_errors=rule_errors)
