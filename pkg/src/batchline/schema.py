"""TBox model: classes, data properties, object-property axioms, and the loader."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from .terms import DATATYPES


@dataclass(frozen=True)
class Diagnostic:
    code: str
    name: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.name}: {self.message}"


class SchemaError(ValueError):
    """Raised when a schema document cannot be loaded."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


@dataclass(frozen=True)
class ClassDef:
    name: str
    comment: str
    parent: Optional[str] = None


@dataclass(frozen=True)
class DataPropertyDef:
    name: str
    domain: str
    # Either a datatype name or a tuple of allowed string values.
    range: Union[str, tuple[str, ...]]
    functional: bool = False

    @property
    def is_enum(self) -> bool:
        return isinstance(self.range, tuple)

    @property
    def datatype(self) -> str:
        return "string" if self.is_enum else self.range


@dataclass(frozen=True)
class ObjectPropertyDef:
    name: str
    domain: str
    range: str
    inverse: Optional[str] = None
    traits: frozenset[str] = frozenset()
    parent: Optional[str] = None

    @property
    def transitive(self) -> bool:
        return "transitive" in self.traits

    @property
    def symmetric(self) -> bool:
        return "symmetric" in self.traits


@dataclass
class Schema:
    classes: dict[str, ClassDef] = field(default_factory=dict)
    data_properties: dict[str, DataPropertyDef] = field(default_factory=dict)
    object_properties: dict[str, ObjectPropertyDef] = field(default_factory=dict)

    def lookup(self, name: str):
        """Resolve a name to ('class'|'data-property'|'object-property'|'unknown', def)."""
        if name in self.classes:
            return "class", self.classes[name]
        if name in self.data_properties:
            return "data-property", self.data_properties[name]
        if name in self.object_properties:
            return "object-property", self.object_properties[name]
        return "unknown", None

    def superclasses(self, name: str) -> list[str]:
        """Ancestor chain of a class, nearest parent first."""
        out = []
        seen = {name}
        cur = self.classes.get(name)
        while cur is not None and cur.parent and cur.parent not in seen:
            out.append(cur.parent)
            seen.add(cur.parent)
            cur = self.classes.get(cur.parent)
        return out


def _has_cycle(nodes: dict[str, Optional[str]]) -> list[str]:
    """Names participating in a parent-edge cycle."""
    bad: list[str] = []
    for start in nodes:
        seen = set()
        cur: Optional[str] = start
        while cur is not None and cur in nodes:
            if cur in seen:
                if start == cur:
                    bad.append(start)
                break
            seen.add(cur)
            cur = nodes[cur]
    return bad


def validate_schema(s: Schema) -> list[Diagnostic]:
    """All invariant violations, empty iff the schema is well-formed."""
    diags: list[Diagnostic] = []

    names_seen: dict[str, str] = {}
    for kind, names in (
        ("class", s.classes),
        ("data-property", s.data_properties),
        ("object-property", s.object_properties),
    ):
        for name in names:
            if name in names_seen:
                diags.append(
                    Diagnostic(
                        "namespace-clash",
                        name,
                        f"declared both as {names_seen[name]} and {kind}",
                    )
                )
            else:
                names_seen[name] = kind

    for cls in s.classes.values():
        if not cls.comment.strip():
            diags.append(Diagnostic("missing-comment", cls.name, "class has no documentation comment"))
        if cls.parent is not None and cls.parent not in s.classes:
            diags.append(
                Diagnostic("dangling-reference", cls.name, f"parent names undeclared class {cls.parent}")
            )
    for name in _has_cycle({c.name: c.parent for c in s.classes.values()}):
        diags.append(Diagnostic("subclass-cycle", name, "class participates in a subclass cycle"))

    for dp in s.data_properties.values():
        if dp.domain not in s.classes:
            diags.append(
                Diagnostic("dangling-reference", dp.name, f"domain names undeclared class {dp.domain}")
            )
        if dp.is_enum:
            if len(set(dp.range)) < 2:
                diags.append(
                    Diagnostic("degenerate-enum", dp.name, "enumeration range needs >= 2 distinct values")
                )
        elif dp.range not in DATATYPES:
            diags.append(Diagnostic("unknown-datatype", dp.name, f"unknown datatype {dp.range}"))

    for op in s.object_properties.values():
        for role, ref in (("domain", op.domain), ("range", op.range)):
            if ref not in s.classes:
                diags.append(
                    Diagnostic("dangling-reference", op.name, f"{role} names undeclared class {ref}")
                )
        if op.parent is not None and op.parent not in s.object_properties:
            diags.append(
                Diagnostic("dangling-reference", op.name, f"parent names undeclared property {op.parent}")
            )
        if op.inverse is not None:
            other = s.object_properties.get(op.inverse)
            if other is None:
                diags.append(
                    Diagnostic("dangling-reference", op.name, f"inverse names undeclared property {op.inverse}")
                )
            elif other.inverse != op.name:
                diags.append(
                    Diagnostic(
                        "asymmetric-inverse",
                        op.name,
                        f"declares inverse {op.inverse} but {op.inverse} does not declare {op.name}",
                    )
                )
            elif other.domain != op.range or other.range != op.domain:
                diags.append(
                    Diagnostic(
                        "inverse-signature-mismatch",
                        op.name,
                        f"inverse {op.inverse} must swap domain and range",
                    )
                )
        for trait in op.traits:
            if trait not in ("transitive", "symmetric"):
                diags.append(Diagnostic("unknown-trait", op.name, f"unknown trait {trait}"))
    for name in _has_cycle({p.name: p.parent for p in s.object_properties.values()}):
        diags.append(Diagnostic("subproperty-cycle", name, "property participates in a sub-property cycle"))

    return diags


def _require(obj: dict, key: str, where: str) -> object:
    if key not in obj:
        raise SchemaError([Diagnostic("syntax-error", where, f"missing required key {key!r}")])
    return obj[key]


def load_schema(document: Union[str, bytes]) -> Schema:
    """Parse and validate a schema JSON document.

    Raises SchemaError with the full diagnostic list on any defect.
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaError(
            [Diagnostic("syntax-error", "<document>", f"line {exc.lineno} column {exc.colno}: {exc.msg}")]
        ) from exc
    if not isinstance(doc, dict):
        raise SchemaError([Diagnostic("syntax-error", "<document>", "top level must be an object")])

    schema = Schema()
    for entry in doc.get("classes", []):
        name = str(_require(entry, "name", "classes"))
        schema.classes[name] = ClassDef(
            name=name,
            comment=str(_require(entry, "comment", name)),
            parent=entry.get("parent"),
        )
    for entry in doc.get("dataProperties", []):
        name = str(_require(entry, "name", "dataProperties"))
        rng = _require(entry, "range", name)
        if isinstance(rng, dict):
            values = rng.get("oneOf")
            if not isinstance(values, list):
                raise SchemaError([Diagnostic("syntax-error", name, "enum range must be {'oneOf': [...]}")])
            parsed_range: Union[str, tuple[str, ...]] = tuple(str(v) for v in values)
        else:
            parsed_range = str(rng)
        schema.data_properties[name] = DataPropertyDef(
            name=name,
            domain=str(_require(entry, "domain", name)),
            range=parsed_range,
            functional=bool(entry.get("functional", False)),
        )
    for entry in doc.get("objectProperties", []):
        name = str(_require(entry, "name", "objectProperties"))
        schema.object_properties[name] = ObjectPropertyDef(
            name=name,
            domain=str(_require(entry, "domain", name)),
            range=str(_require(entry, "range", name)),
            inverse=entry.get("inverse"),
            traits=frozenset(entry.get("traits", [])),
            parent=entry.get("parent"),
        )

    diags = validate_schema(schema)
    if diags:
        raise SchemaError(diags)
    return schema


def serialize_schema(s: Schema) -> str:
    """JSON form accepted by load_schema (round-trips the Schema value)."""
    doc = {
        "classes": [
            {"name": c.name, "comment": c.comment, **({"parent": c.parent} if c.parent else {})}
            for c in s.classes.values()
        ],
        "dataProperties": [
            {
                "name": d.name,
                "domain": d.domain,
                "range": {"oneOf": list(d.range)} if d.is_enum else d.range,
                **({"functional": True} if d.functional else {}),
            }
            for d in s.data_properties.values()
        ],
        "objectProperties": [
            {
                "name": o.name,
                "domain": o.domain,
                "range": o.range,
                **({"inverse": o.inverse} if o.inverse else {}),
                **({"traits": sorted(o.traits)} if o.traits else {}),
                **({"parent": o.parent} if o.parent else {}),
            }
            for o in s.object_properties.values()
        ],
    }
    return json.dumps(doc, indent=2)
