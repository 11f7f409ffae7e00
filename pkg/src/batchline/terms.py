"""In-memory triple store: terms, triples, and a three-way indexed graph."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import date as _date
from typing import Iterator, Optional

DATATYPES = ("string", "float", "integer", "date", "boolean")

RDF_TYPE_ID = "rdf:type"


class TermError(ValueError):
    """Raised for malformed terms or triples."""


def _canonical_float(lexical: str) -> str:
    value = float(lexical.replace(",", "."))
    if value != value or value in (float("inf"), float("-inf")):
        raise TermError(f"non-finite float literal: {lexical!r}")
    return repr(value)


def _canonical_lexical(lexical: str, datatype: str) -> str:
    if datatype == "float":
        return _canonical_float(lexical)
    if datatype == "integer":
        return str(int(lexical))
    if datatype == "boolean":
        low = lexical.strip().lower()
        if low in ("true", "1"):
            return "true"
        if low in ("false", "0"):
            return "false"
        raise TermError(f"invalid boolean literal: {lexical!r}")
    if datatype == "date":
        return _date.fromisoformat(lexical).isoformat()
    return lexical


@dataclass(frozen=True, slots=True, eq=False)
class Term:
    """An entity identifier or a typed literal.

    Entities carry ``id`` and have ``datatype is None``; literals carry a
    canonical ``lexical`` form in ``id`` plus their ``datatype``. Hashes are
    precomputed: terms are index keys, so hashing dominates graph operations.
    """

    id: str
    datatype: Optional[str] = None
    _hash: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.id, self.datatype)))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, Term)
            and self.id == other.id
            and self.datatype == other.datatype
        )

    @staticmethod
    def entity(identifier: str) -> "Term":
        # "".join(split()) strips every Unicode whitespace character in one pass
        if not identifier or "".join(identifier.split()) != identifier:
            raise TermError(f"invalid entity id: {identifier!r}")
        return Term(identifier)

    @staticmethod
    def literal(lexical: str, datatype: str) -> "Term":
        if datatype not in DATATYPES:
            raise TermError(f"unknown datatype: {datatype!r}")
        try:
            canonical = _canonical_lexical(lexical, datatype)
        except TermError:
            raise
        except ValueError as exc:
            raise TermError(f"invalid {datatype} literal {lexical!r}: {exc}") from exc
        return Term(canonical, datatype)

    @property
    def is_entity(self) -> bool:
        return self.datatype is None

    @property
    def is_literal(self) -> bool:
        return self.datatype is not None

    def value(self):
        """Python value of a literal (entities return their id)."""
        if self.datatype == "float":
            return float(self.id)
        if self.datatype == "integer":
            return int(self.id)
        if self.datatype == "boolean":
            return self.id == "true"
        return self.id

    def render(self) -> str:
        if self.is_entity:
            return self.id
        return f'"{self.id}"^^{self.datatype}'

    def __repr__(self) -> str:
        return f"Term({self.render()})"


RDF_TYPE = Term.entity(RDF_TYPE_ID)


@dataclass(frozen=True, slots=True, eq=False)
class Triple:
    subject: Term
    predicate: Term
    object: Term
    _hash: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.subject.is_entity:
            raise TermError(f"triple subject must be an entity: {self.subject!r}")
        if not self.predicate.is_entity:
            raise TermError(f"triple predicate must be an entity: {self.predicate!r}")
        object.__setattr__(
            self, "_hash", hash((self.subject, self.predicate, self.object))
        )

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, Triple)
            and self.subject == other.subject
            and self.predicate == other.predicate
            and self.object == other.object
        )

    def render(self) -> str:
        return f"{self.subject.render()} {self.predicate.render()} {self.object.render()}"

    def __repr__(self) -> str:
        return f"Triple({self.render()})"


def triple(s: str, p: str, o) -> Triple:
    """Shorthand constructor: entity ids for s/p, entity id or Term for o."""
    obj = o if isinstance(o, Term) else Term.entity(o)
    return Triple(Term.entity(s), Term.entity(p), obj)


# Sentinel digest for the empty graph (sha256 of the empty string).
EMPTY_GRAPH_HASH = hashlib.sha256(b"").hexdigest()


class Graph:
    """Triple set with subject, predicate, and object access paths.

    Single-writer / multi-reader: concurrent reads are safe, mutations
    require exclusive access. ``generation`` bumps on every mutation so
    cached derived results can detect staleness.
    """

    def __init__(self) -> None:
        self._triples: set[Triple] = set()
        self._by_subject: dict[Term, set[Triple]] = {}
        self._by_predicate: dict[Term, set[Triple]] = {}
        self._by_object: dict[Term, set[Triple]] = {}
        self._inferred: set[Triple] = set()
        self.generation = 0

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, t: Triple) -> bool:
        return t in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def size(self) -> int:
        return len(self._triples)

    def insert(self, t: Triple, inferred: bool = False) -> bool:
        """Add a triple; returns True iff it was not already present."""
        if not isinstance(t, Triple):
            raise TermError(f"not a triple: {t!r}")
        if t in self._triples:
            return False
        self._triples.add(t)
        self._by_subject.setdefault(t.subject, set()).add(t)
        self._by_predicate.setdefault(t.predicate, set()).add(t)
        self._by_object.setdefault(t.object, set()).add(t)
        if inferred:
            self._inferred.add(t)
        self.generation += 1
        return True

    def retract(self, t: Triple) -> bool:
        """Remove a triple; returns True iff it was present."""
        if t not in self._triples:
            return False
        self._triples.discard(t)
        self._inferred.discard(t)
        for index, key in (
            (self._by_subject, t.subject),
            (self._by_predicate, t.predicate),
            (self._by_object, t.object),
        ):
            bucket = index[key]
            bucket.discard(t)
            if not bucket:
                del index[key]
        self.generation += 1
        return True

    def is_inferred(self, t: Triple) -> bool:
        return t in self._inferred

    def retract_inferred(self) -> int:
        """Drop every inferred triple, keeping the asserted core."""
        dropped = list(self._inferred)
        for t in dropped:
            self.retract(t)
        return len(dropped)

    def match(
        self,
        subject: Optional[Term] = None,
        predicate: Optional[Term] = None,
        object: Optional[Term] = None,
    ) -> Iterator[Triple]:
        """Yield triples matching the concrete pattern components.

        ``None`` is a wildcard. The narrowest available index is consulted.
        """
        candidates: set[Triple] | None = None
        if subject is not None:
            candidates = self._by_subject.get(subject, set())
        if object is not None:
            bucket = self._by_object.get(object, set())
            candidates = bucket if candidates is None else (candidates & bucket)
        if predicate is not None:
            bucket = self._by_predicate.get(predicate, set())
            candidates = bucket if candidates is None else (candidates & bucket)
        if candidates is None:
            candidates = self._triples
        for t in candidates:
            if subject is not None and t.subject != subject:
                continue
            if predicate is not None and t.predicate != predicate:
                continue
            if object is not None and t.object != object:
                continue
            yield t

    def count(
        self,
        subject: Optional[Term] = None,
        predicate: Optional[Term] = None,
        object: Optional[Term] = None,
    ) -> int:
        if subject is None and predicate is None and object is None:
            return len(self._triples)
        return sum(1 for _ in self.match(subject, predicate, object))

    def serialize(self) -> str:
        """Canonical text form: one triple per line, lines sorted."""
        return "\n".join(sorted(t.render() for t in self._triples))

    def content_hash(self) -> str:
        """Order-independent digest of the triple set."""
        return hashlib.sha256(self.serialize().encode("utf-8")).hexdigest()

    def copy(self) -> "Graph":
        g = Graph()
        for t in self._triples:
            g.insert(t, inferred=t in self._inferred)
        return g


def parse_term(text: str) -> Term:
    """Inverse of Term.render for canonical serialization lines."""
    if text.startswith('"'):
        closing = text.rindex('"')
        lexical = text[1:closing]
        tail = text[closing + 1 :]
        if not tail.startswith("^^"):
            raise TermError(f"malformed literal: {text!r}")
        return Term.literal(lexical, tail[2:])
    return Term.entity(text)


def parse_triple_line(line: str) -> Triple:
    parts = line.split(" ", 2)
    if len(parts) != 3:
        raise TermError(f"malformed triple line: {line!r}")
    s, p, o = parts
    return Triple(Term.entity(s), Term.entity(p), parse_term(o))


def load_serialized(text: str) -> Graph:
    g = Graph()
    for line in text.splitlines():
        line = line.strip()
        if line:
            g.insert(parse_triple_line(line))
    return g
