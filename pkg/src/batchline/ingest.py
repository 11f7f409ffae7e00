"""Populate the ABox from tabular records: normalize, convert, instantiate."""

from __future__ import annotations

import csv
import io
import json
import re
import unicodedata
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Optional, Union

from .schema import Schema
from .terms import RDF_TYPE, Graph, Term, TermError, Triple

DEFAULT_PREFIX = "stups:"


class MappingError(ValueError):
    """Mapping does not agree with the schema; nothing is ingested."""


def normalize_string(raw: str) -> str:
    """Trim, strip accents, and lower-case. Deterministic and idempotent."""
    decomposed = unicodedata.normalize("NFD", raw.strip())
    folded = "".join(c for c in decomposed if not unicodedata.combining(c))
    return unicodedata.normalize("NFC", folded).lower()


def convert_value(raw: str, datatype: str) -> Term:
    """Canonical literal for a raw cell value, or TermError on bad input.

    Floats accept comma or dot decimal separators; dates accept ISO
    YYYY-MM-DD and DD/MM/YYYY, canonicalized to ISO.
    """
    text = raw.strip()
    if datatype == "date":
        m = re.fullmatch(r"(\d{2})/(\d{2})/(\d{4})", text)
        if m:
            text = date(int(m.group(3)), int(m.group(2)), int(m.group(1))).isoformat()
    return Term.literal(text, datatype)


def instance_id(class_name: str, raw_id: str, prefix: str = DEFAULT_PREFIX) -> str:
    """Deterministic entity id: <prefix><class>/<normalized key>."""
    key = re.sub(r"\s+", "_", normalize_string(raw_id))
    return f"{prefix}{class_name.lower()}/{key}"


@dataclass(frozen=True)
class ColumnBinding:
    """One column mapped to either a data property or an object link."""

    property: str
    datatype: Optional[str] = None  # data property
    target_class: Optional[str] = None  # object link

    @property
    def is_link(self) -> bool:
        return self.target_class is not None


@dataclass
class IngestMapping:
    target_class: str
    id_column: str
    columns: dict[str, ColumnBinding]
    prefix: str = DEFAULT_PREFIX

    @staticmethod
    def from_json(document: Union[str, bytes]) -> "IngestMapping":
        doc = json.loads(document)
        columns: dict[str, ColumnBinding] = {}
        for col, spec in doc.get("columns", {}).items():
            if "link" in spec:
                columns[col] = ColumnBinding(
                    property=spec["property"], target_class=spec["targetClass"]
                )
            else:
                columns[col] = ColumnBinding(
                    property=spec["property"], datatype=spec.get("datatype")
                )
        return IngestMapping(
            target_class=doc["class"],
            id_column=doc["idColumn"],
            columns=columns,
            prefix=doc.get("prefix", DEFAULT_PREFIX),
        )


@dataclass
class Skip:
    row: int
    column: str
    reason: str

    def as_dict(self) -> dict:
        return {"row": self.row, "column": self.column, "reason": self.reason}


@dataclass
class IngestStats:
    rows_read: int = 0
    instances_created: int = 0
    triples_added: int = 0
    skips: list[Skip] = field(default_factory=list)

    @property
    def values_skipped(self) -> int:
        return len(self.skips)


def validate_mapping(mapping: IngestMapping, schema: Schema) -> None:
    """Raise MappingError unless every binding matches the schema."""
    kind, _ = schema.lookup(mapping.target_class)
    if kind != "class":
        raise MappingError(f"target class {mapping.target_class!r} is not a schema class")
    for col, binding in mapping.columns.items():
        kind, defn = schema.lookup(binding.property)
        if binding.is_link:
            if kind != "object-property":
                raise MappingError(
                    f"column {col!r}: {binding.property!r} is not an object property"
                )
            if defn.domain != mapping.target_class and defn.domain not in (
                [mapping.target_class] + schema.superclasses(mapping.target_class)
            ):
                raise MappingError(
                    f"column {col!r}: property {binding.property!r} has domain "
                    f"{defn.domain!r}, not {mapping.target_class!r}"
                )
            target_kind, _ = schema.lookup(binding.target_class)
            if target_kind != "class":
                raise MappingError(
                    f"column {col!r}: link target {binding.target_class!r} is not a class"
                )
        else:
            if kind != "data-property":
                raise MappingError(
                    f"column {col!r}: {binding.property!r} is not a data property"
                )
            domains = [mapping.target_class] + schema.superclasses(mapping.target_class)
            if defn.domain not in domains:
                raise MappingError(
                    f"column {col!r}: property {binding.property!r} has domain "
                    f"{defn.domain!r}, not {mapping.target_class!r}"
                )
            if binding.datatype is not None and binding.datatype != defn.datatype:
                raise MappingError(
                    f"column {col!r}: datatype {binding.datatype!r} conflicts with "
                    f"schema range {defn.datatype!r}"
                )


def populate(
    graph: Graph,
    schema: Schema,
    mapping: IngestMapping,
    rows: Iterable[dict[str, str]],
) -> IngestStats:
    """Instantiate one entity per row plus one triple per convertible cell.

    Missing cells produce no triple. Enum values outside the declared
    enumeration and unconvertible values are skipped with a reason; the
    graph is never silently defaulted. An invalid mapping mutates nothing.
    """
    validate_mapping(mapping, schema)

    stats = IngestStats()
    class_term = Term.entity(mapping.target_class)
    for row_no, row in enumerate(rows, start=1):
        stats.rows_read += 1
        raw_id = (row.get(mapping.id_column) or "").strip()
        if not raw_id:
            stats.skips.append(Skip(row_no, mapping.id_column, "missing id value"))
            continue
        subject = Term.entity(instance_id(mapping.target_class, raw_id, mapping.prefix))
        if graph.insert(Triple(subject, RDF_TYPE, class_term)):
            stats.instances_created += 1
            stats.triples_added += 1

        for col, binding in mapping.columns.items():
            raw = (row.get(col) or "").strip()
            if not raw:
                continue
            prop = Term.entity(binding.property)
            if binding.is_link:
                obj = Term.entity(instance_id(binding.target_class, raw, mapping.prefix))
                if graph.insert(Triple(subject, prop, obj)):
                    stats.triples_added += 1
                continue

            defn = schema.data_properties[binding.property]
            if defn.is_enum:
                value = normalize_string(raw)
                if value not in defn.range:
                    stats.skips.append(
                        Skip(row_no, col, f"value {value!r} outside enumeration")
                    )
                    continue
                obj = Term.literal(value, "string")
            else:
                text = normalize_string(raw) if defn.datatype == "string" else raw
                try:
                    obj = convert_value(text, defn.datatype)
                except (TermError, ValueError) as exc:
                    stats.skips.append(Skip(row_no, col, f"conversion failed: {exc}"))
                    continue

            # Functional properties keep one value per instance; a repeated
            # key with a different value wins (last write) and logs a skip.
            if defn.functional:
                existing = [
                    t for t in graph.match(subject, prop, None) if t.object != obj
                ]
                for t in existing:
                    graph.retract(t)
                    stats.triples_added -= 1
                    stats.skips.append(
                        Skip(row_no, col, f"conflicting value replaced: {t.object.render()}")
                    )
            if graph.insert(Triple(subject, prop, obj)):
                stats.triples_added += 1
    return stats


def read_csv_rows(text: str) -> list[dict[str, str]]:
    reader = csv.DictReader(io.StringIO(text))
    return [dict(r) for r in reader]


def read_jsonl_rows(text: str) -> list[dict[str, str]]:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if line:
            rows.append({k: str(v) for k, v in json.loads(line).items()})
    return rows


def write_skip_log(stats: IngestStats) -> str:
    return "\n".join(json.dumps(s.as_dict()) for s in stats.skips)
