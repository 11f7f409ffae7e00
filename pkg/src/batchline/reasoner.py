"""Forward-chaining materialization of schema axioms to a fixpoint.

The implemented fragment: inverse, symmetric, transitive, sub-property,
subclass, and domain/range typing rules. Evaluation is semi-naive: each
iteration joins only against the triples derived in the previous one.
Materialization is monotone; nothing is ever retracted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .schema import Schema
from .terms import RDF_TYPE, Graph, Term, Triple

# Defense against implementation bugs; unreachable for terminating rule sets.
MAX_ITERATIONS = 10_000


@dataclass(frozen=True)
class EntailmentRule:
    kind: str  # inverse | symmetric | transitive | subproperty | subclass | domain-typing | range-typing
    params: tuple[str, ...]


@dataclass
class MaterializationStats:
    before: int
    after: int = 0
    added: int = 0
    iterations: int = 0
    by_rule: dict[str, int] = field(default_factory=dict)
    ignored_predicates: int = 0

    def as_dict(self) -> dict:
        return {
            "before": self.before,
            "after": self.after,
            "added": self.added,
            "iterations": self.iterations,
            "byRule": dict(self.by_rule),
        }


@dataclass(frozen=True)
class ConsistencyViolation:
    kind: str  # enum-out-of-range | functional-conflict
    subject: str
    property: str
    values: tuple[str, ...]


def derive_rules(schema: Schema) -> list[EntailmentRule]:
    """Entailment rules read off the schema's axioms."""
    rules: list[EntailmentRule] = []
    seen_inverse: set[frozenset[str]] = set()
    for op in schema.object_properties.values():
        if op.inverse:
            pair = frozenset((op.name, op.inverse))
            if pair not in seen_inverse:
                seen_inverse.add(pair)
                a, b = sorted(pair)
                rules.append(EntailmentRule("inverse", (a, b)))
        if op.symmetric:
            rules.append(EntailmentRule("symmetric", (op.name,)))
        if op.transitive:
            rules.append(EntailmentRule("transitive", (op.name,)))
        if op.parent:
            rules.append(EntailmentRule("subproperty", (op.name, op.parent)))
        rules.append(EntailmentRule("domain-typing", (op.name, op.domain)))
        rules.append(EntailmentRule("range-typing", (op.name, op.range)))
    for cls in schema.classes.values():
        if cls.parent:
            rules.append(EntailmentRule("subclass", (cls.name, cls.parent)))
    return rules


_EMPTY: tuple[Triple, ...] = ()


def _apply(
    rule: EntailmentRule, delta_by_pred: dict[Term, list[Triple]], graph: Graph
) -> list[Triple]:
    """Consequences of one rule joined against the latest delta.

    The delta is pre-grouped by predicate so each rule touches only the
    triples it can possibly fire on.
    """
    out: list[Triple] = []
    kind = rule.kind
    if kind == "inverse":
        p, q = Term.entity(rule.params[0]), Term.entity(rule.params[1])
        for t in delta_by_pred.get(p, _EMPTY):
            if t.object.is_entity:
                out.append(Triple(t.object, q, t.subject))
        for t in delta_by_pred.get(q, _EMPTY):
            if t.object.is_entity:
                out.append(Triple(t.object, p, t.subject))
    elif kind == "symmetric":
        p = Term.entity(rule.params[0])
        for t in delta_by_pred.get(p, _EMPTY):
            if t.object.is_entity:
                out.append(Triple(t.object, p, t.subject))
    elif kind == "transitive":
        p = Term.entity(rule.params[0])
        for t in delta_by_pred.get(p, _EMPTY):
            if not t.object.is_entity:
                continue
            # delta ⋈ graph in both directions covers all new joins
            for u in graph.match(t.object, p, None):
                if u.object.is_entity:
                    out.append(Triple(t.subject, p, u.object))
            for u in graph.match(None, p, t.subject):
                out.append(Triple(u.subject, p, t.object))
    elif kind == "subproperty":
        child, parent = Term.entity(rule.params[0]), Term.entity(rule.params[1])
        for t in delta_by_pred.get(child, _EMPTY):
            out.append(Triple(t.subject, parent, t.object))
    elif kind == "subclass":
        child, parent = Term.entity(rule.params[0]), Term.entity(rule.params[1])
        for t in delta_by_pred.get(RDF_TYPE, _EMPTY):
            if t.object == child:
                out.append(Triple(t.subject, RDF_TYPE, parent))
    elif kind == "domain-typing":
        p, cls = Term.entity(rule.params[0]), Term.entity(rule.params[1])
        for t in delta_by_pred.get(p, _EMPTY):
            out.append(Triple(t.subject, RDF_TYPE, cls))
    elif kind == "range-typing":
        p, cls = Term.entity(rule.params[0]), Term.entity(rule.params[1])
        for t in delta_by_pred.get(p, _EMPTY):
            if t.object.is_entity:
                out.append(Triple(t.object, RDF_TYPE, cls))
    return out


def materialize(graph: Graph, schema: Schema) -> MaterializationStats:
    """Run all entailment rules to the least fixpoint, in place.

    Triples whose predicate is unknown to the schema are left alone and
    counted in ``ignored_predicates``. New triples are flagged as inferred.
    """
    rules = derive_rules(schema)
    stats = MaterializationStats(before=graph.size())

    known = {Term.entity(n) for n in schema.object_properties} | {
        Term.entity(n) for n in schema.data_properties
    } | {RDF_TYPE}
    stats.ignored_predicates = sum(1 for t in graph if t.predicate not in known)

    delta: list[Triple] = list(graph)
    while delta:
        stats.iterations += 1
        if stats.iterations > MAX_ITERATIONS:
            raise RuntimeError("materialization exceeded the iteration cap")
        delta_by_pred: dict[Term, list[Triple]] = {}
        for t in delta:
            delta_by_pred.setdefault(t.predicate, []).append(t)
        next_delta: list[Triple] = []
        for rule in rules:
            for t in _apply(rule, delta_by_pred, graph):
                if graph.insert(t, inferred=True):
                    next_delta.append(t)
                    stats.by_rule[rule.kind] = stats.by_rule.get(rule.kind, 0) + 1
        delta = next_delta

    stats.after = graph.size()
    stats.added = stats.after - stats.before
    return stats


def check_consistency(graph: Graph, schema: Schema) -> list[ConsistencyViolation]:
    """Report enum range violations and functional-property conflicts. Read-only."""
    violations: list[ConsistencyViolation] = []
    for dp in schema.data_properties.values():
        prop = Term.entity(dp.name)
        if not dp.is_enum and not dp.functional:
            continue
        values_by_subject: dict[Term, set[Term]] = {}
        for t in graph.match(None, prop, None):
            values_by_subject.setdefault(t.subject, set()).add(t.object)
        for subject, values in sorted(
            values_by_subject.items(), key=lambda kv: kv[0].id
        ):
            if dp.is_enum:
                for v in sorted(values, key=lambda t: t.id):
                    if v.id not in dp.range:
                        violations.append(
                            ConsistencyViolation(
                                "enum-out-of-range", subject.id, dp.name, (v.id,)
                            )
                        )
            if dp.functional and len(values) > 1:
                violations.append(
                    ConsistencyViolation(
                        "functional-conflict",
                        subject.id,
                        dp.name,
                        tuple(sorted(v.id for v in values)),
                    )
                )
    return violations
