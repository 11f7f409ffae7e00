import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from batchline.ingest import (
    ColumnBinding,
    IngestMapping,
    MappingError,
    convert_value,
    normalize_string,
    populate,
    read_csv_rows,
)
from batchline.terms import Graph, Term, TermError


def test_normalize_accents_and_case():
    assert normalize_string("  Résine ") == "resine"
    assert normalize_string("CANNABIS") == "cannabis"


@given(st.text(max_size=60))
@settings(max_examples=200)
def test_normalize_idempotent(s):
    once = normalize_string(s)
    assert normalize_string(once) == once


def test_convert_float_millimetres():
    assert convert_value("200", "float") == Term.literal("200.0", "float")
    assert convert_value("1,5", "float") == Term.literal("1.5", "float")


def test_convert_date_formats():
    assert convert_value("01/02/2023", "date").id == "2023-02-01"
    assert convert_value("2023-02-01", "date").id == "2023-02-01"


def test_convert_failure():
    with pytest.raises(TermError):
        convert_value("abc", "float")


@pytest.fixture()
def sample_mapping():
    return IngestMapping(
        target_class="Sample",
        id_column="sampleNumber",
        columns={
            "sampleNumber": ColumnBinding("sampleNumber", datatype="string"),
            "drugType": ColumnBinding("drugType"),
            "chemicalForm": ColumnBinding("chemicalForm", datatype="string"),
            "width": ColumnBinding("width", datatype="float"),
            "height": ColumnBinding("height", datatype="float"),
        },
    )


def test_populate_worked_example(drug_schema, sample_mapping):
    rows = read_csv_rows(
        "sampleNumber,drugType,chemicalForm,width,height\n"
        "1,Cannabis,Resin,200,100\n"
        "2,Cannabis,Resin,150,100\n"
    )
    graph = Graph()
    stats = populate(graph, drug_schema, sample_mapping, rows)
    assert stats.instances_created == 2
    s1 = Term.entity("stups:sample/1")
    assert next(graph.match(s1, Term.entity("drugType"), None)).object.id == "cannabis"
    assert next(graph.match(s1, Term.entity("chemicalForm"), None)).object.id == "resin"
    assert next(graph.match(s1, Term.entity("width"), None)).object.id == "200.0"
    assert next(graph.match(s1, Term.entity("height"), None)).object.id == "100.0"


def test_populate_empty_stream(drug_schema, sample_mapping):
    graph = Graph()
    stats = populate(graph, drug_schema, sample_mapping, [])
    assert stats.rows_read == 0
    assert stats.instances_created == 0
    assert stats.triples_added == 0
    assert graph.size() == 0


def test_enum_out_of_range_skipped(drug_schema, sample_mapping):
    graph = Graph()
    stats = populate(
        graph,
        drug_schema,
        sample_mapping,
        [{"sampleNumber": "9", "drugType": "tobacco"}],
    )
    assert stats.instances_created == 1
    assert any("enumeration" in s.reason for s in stats.skips)
    assert not list(graph.match(None, Term.entity("drugType"), None))


def test_invalid_mapping_mutates_nothing(drug_schema):
    graph = Graph()
    bad = IngestMapping(
        target_class="Sample",
        id_column="id",
        columns={"col": ColumnBinding("noSuchProperty", datatype="string")},
    )
    with pytest.raises(MappingError):
        populate(graph, drug_schema, bad, [{"id": "1", "col": "x"}])
    assert graph.size() == 0


def test_domain_mismatch_rejected(drug_schema):
    bad = IngestMapping(
        target_class="Sample",
        id_column="id",
        columns={"col": ColumnBinding("labName", datatype="string")},  # domain Laboratory
    )
    with pytest.raises(MappingError):
        populate(Graph(), drug_schema, bad, [])


def test_link_column_creates_object_triple(drug_schema):
    mapping = IngestMapping(
        target_class="Sample",
        id_column="num",
        columns={"sealed": ColumnBinding("comesFrom", target_class="Sealed")},
    )
    graph = Graph()
    populate(graph, drug_schema, mapping, [{"num": "1", "sealed": "S77"}])
    t = next(graph.match(Term.entity("stups:sample/1"), Term.entity("comesFrom"), None))
    assert t.object == Term.entity("stups:sealed/s77")


def test_recount_oracle_synthetic_rows(drug_schema, sample_mapping):
    # 1,000 rows; triples added must equal the independently counted sum of
    # non-empty convertible cells plus one typing triple per instance.
    rng = random.Random(7)
    rows = []
    expected_cells = 0
    for i in range(1000):
        row = {"sampleNumber": str(i)}
        expected_cells += 1  # sampleNumber itself is a bound data property
        if rng.random() < 0.8:
            row["drugType"] = rng.choice(["cannabis", "cocaine", "bogus"])
            if row["drugType"] != "bogus":
                expected_cells += 1
        if rng.random() < 0.7:
            row["width"] = f"{rng.uniform(1, 300):.1f}"
            expected_cells += 1
        if rng.random() < 0.1:
            row["height"] = "not-a-number"  # conversion failure, no triple
        rows.append(row)
    graph = Graph()
    stats = populate(graph, drug_schema, sample_mapping, rows)
    assert stats.rows_read == 1000
    assert stats.instances_created == 1000
    assert stats.triples_added == expected_cells + 1000
    assert graph.size() == stats.triples_added


def test_determinism_same_hash(drug_schema, sample_mapping):
    rows = read_csv_rows(
        "sampleNumber,drugType,width\n1,Cannabis,200\n2,Cocaine,55\n"
    )
    g1, g2 = Graph(), Graph()
    populate(g1, drug_schema, sample_mapping, rows)
    populate(g2, drug_schema, sample_mapping, rows)
    assert g1.content_hash() == g2.content_hash()


def test_repeated_key_merges_with_conflict_skip(drug_schema, sample_mapping):
    rows = [
        {"sampleNumber": "1", "width": "100"},
        {"sampleNumber": "1", "height": "40"},
    ]
    graph = Graph()
    stats = populate(graph, drug_schema, sample_mapping, rows)
    assert stats.instances_created == 1
    subject = Term.entity("stups:sample/1")
    assert graph.count(subject, Term.entity("width"), None) == 1
    assert graph.count(subject, Term.entity("height"), None) == 1


def test_functional_conflict_last_write_wins(drug_schema):
    mapping = IngestMapping(
        target_class="Sample",
        id_column="key",
        columns={
            "key": ColumnBinding("sampleNumber", datatype="string"),
            "num": ColumnBinding("sampleNumber", datatype="string"),
        },
    )
    graph = Graph()
    stats = populate(
        graph, drug_schema, mapping, [{"key": "1", "num": "other"}]
    )
    subject = Term.entity("stups:sample/1")
    values = [t.object.id for t in graph.match(subject, Term.entity("sampleNumber"), None)]
    assert values == ["other"]
    assert any("conflicting value" in s.reason for s in stats.skips)
