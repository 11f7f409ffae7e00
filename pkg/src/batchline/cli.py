"""Command-line entry points for the comparison pipeline."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path
from typing import Optional

import click

from . import ingest as ingest_mod
from . import synth
from .planner import evaluate_ruleset
from .reasoner import check_consistency, materialize
from .ruledsl import RuleSyntaxError, parse_ruleset, validate_ruleset
from .schema import SchemaError, load_schema
from .service import SessionState, replay as replay_log, serve as serve_http
from .terms import Graph, load_serialized


def _load_schema(path: str):
    try:
        return load_schema(Path(path).read_bytes())
    except SchemaError as exc:
        for d in exc.diagnostics:
            click.echo(f"schema error: {d}", err=True)
        sys.exit(1)


def _load_rules(path: str, schema):
    try:
        rules = parse_ruleset(Path(path).read_text(encoding="utf-8"))
    except RuleSyntaxError as exc:
        click.echo(f"rule error: {exc}", err=True)
        sys.exit(1)
    problems = validate_ruleset(rules, schema)
    if problems:
        for rule, diags in problems.items():
            for d in diags:
                click.echo(f"rule {rule!r}: {d}", err=True)
        sys.exit(1)
    return rules


def _load_graph(
    data: str, schema, mapping: Optional[str], data_format: str
) -> Graph:
    text = Path(data).read_text(encoding="utf-8")
    if mapping is None:
        return load_serialized(text)
    graph = Graph()
    m = ingest_mod.IngestMapping.from_json(Path(mapping).read_bytes())
    rows = (
        ingest_mod.read_jsonl_rows(text)
        if data_format == "jsonl"
        else ingest_mod.read_csv_rows(text)
    )
    ingest_mod.populate(graph, schema, m, rows)
    return graph


@click.group()
def main() -> None:
    """Knowledge-based drug sample comparison pipeline."""


@main.command()
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True))
@click.option("--mapping", "mapping_path", required=True, type=click.Path(exists=True))
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--format", "data_format", type=click.Choice(["csv", "jsonl"]), default="csv")
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write the graph serialization here.")
@click.option("--skip-log", "skip_log", type=click.Path(), default=None)
def load(schema_path, mapping_path, data_path, data_format, out_path, skip_log):
    """Populate a graph from tabular records and print ingest statistics."""
    schema = _load_schema(schema_path)
    graph = Graph()
    mapping = ingest_mod.IngestMapping.from_json(Path(mapping_path).read_bytes())
    text = Path(data_path).read_text(encoding="utf-8")
    rows = (
        ingest_mod.read_jsonl_rows(text) if data_format == "jsonl" else ingest_mod.read_csv_rows(text)
    )
    try:
        stats = ingest_mod.populate(graph, schema, mapping, rows)
    except ingest_mod.MappingError as exc:
        click.echo(f"mapping error: {exc}", err=True)
        sys.exit(1)
    if out_path:
        Path(out_path).write_text(graph.serialize() + "\n", encoding="utf-8")
    if skip_log:
        Path(skip_log).write_text(ingest_mod.write_skip_log(stats) + "\n", encoding="utf-8")
    click.echo(
        json.dumps(
            {
                "rowsRead": stats.rows_read,
                "instancesCreated": stats.instances_created,
                "triplesAdded": stats.triples_added,
                "valuesSkipped": stats.values_skipped,
                "contentHash": graph.content_hash(),
            }
        )
    )


@main.command()
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True))
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--check", is_flag=True, help="Also report consistency violations.")
def enrich(schema_path, graph_path, out_path, check):
    """Materialize schema-axiom inferences to a fixpoint."""
    schema = _load_schema(schema_path)
    graph = load_serialized(Path(graph_path).read_text(encoding="utf-8"))
    stats = materialize(graph, schema)
    if out_path:
        Path(out_path).write_text(graph.serialize() + "\n", encoding="utf-8")
    payload = stats.as_dict()
    if check:
        payload["violations"] = [
            {"kind": v.kind, "subject": v.subject, "property": v.property, "values": list(v.values)}
            for v in check_consistency(graph, schema)
        ]
    click.echo(json.dumps(payload))


def _evaluate(schema_path, rules_path, data_path, mapping_path, data_format, block_by):
    schema = _load_schema(schema_path)
    rules = _load_rules(rules_path, schema)
    graph = _load_graph(data_path, schema, mapping_path, data_format)
    return evaluate_ruleset(rules, graph, schema, dataset=Path(data_path).name, block_by=block_by)


@main.command()
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True))
@click.option("--rules", "rules_path", required=True, type=click.Path(exists=True))
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--mapping", "mapping_path", type=click.Path(exists=True), default=None,
              help="Treat --data as tabular records instead of a graph serialization.")
@click.option("--format", "data_format", type=click.Choice(["csv", "jsonl"]), default="csv")
@click.option("--block-by-drugtype", is_flag=True, help="Only pair samples sharing a drug type.")
@click.option("--block-by", "block_props", default=None,
              help="Comma-separated data properties used as a composite blocking key.")
@click.option("--output", "out_format", type=click.Choice(["json", "tsv"]), default="json")
def evaluate(schema_path, rules_path, data_path, mapping_path, data_format,
             block_by_drugtype, block_props, out_format):
    """Evaluate the rule set and print per-pair verdicts."""
    block_by = None
    if block_props:
        block_by = [p.strip() for p in block_props.split(",") if p.strip()]
    elif block_by_drugtype:
        block_by = ["drugType"]
    report = _evaluate(schema_path, rules_path, data_path, mapping_path, data_format, block_by)
    if out_format == "tsv":
        click.echo(report.as_tsv())
    else:
        click.echo(json.dumps(report.as_dict()))


@main.command()
@click.option("--report", "report_path", required=True, type=click.Path(exists=True))
def report(report_path):
    """Print the summary block of a saved evaluation report."""
    doc = json.loads(Path(report_path).read_text(encoding="utf-8"))
    click.echo(json.dumps(doc.get("summary", {})))


@main.command()
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True))
@click.option("--rules", "rules_path", required=True, type=click.Path(exists=True))
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--mapping", "mapping_path", type=click.Path(exists=True), default=None)
@click.option("--format", "data_format", type=click.Choice(["csv", "jsonl"]), default="csv")
@click.option("--log", "log_path", required=True, type=click.Path())
@click.option("--addr", default=None, help="host:port; defaults to $BATCHLINE_ADDR or 127.0.0.1:8000")
def serve(schema_path, rules_path, data_path, mapping_path, data_format, log_path, addr):
    """Run the review HTTP service."""
    schema = _load_schema(schema_path)
    rules = _load_rules(rules_path, schema)
    graph = _load_graph(data_path, schema, mapping_path, data_format)
    materialize(graph, schema)
    state = SessionState(graph=graph, schema=schema, ruleset=rules, log_path=Path(log_path))
    state.evaluate()
    if Path(log_path).exists():
        replay_log(Path(log_path).read_text(encoding="utf-8"), state)
    addr = addr or os.environ.get("BATCHLINE_ADDR", "127.0.0.1:8000")
    host, _, port = addr.partition(":")
    serve_http(state, host=host or "127.0.0.1", port=int(port or 8000))


@main.command()
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True))
@click.option("--rules", "rules_path", required=True, type=click.Path(exists=True))
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--mapping", "mapping_path", type=click.Path(exists=True), default=None)
@click.option("--format", "data_format", type=click.Choice(["csv", "jsonl"]), default="csv")
@click.option("--log", "log_path", required=True, type=click.Path(exists=True))
def replay(schema_path, rules_path, data_path, mapping_path, data_format, log_path):
    """Re-apply a decision log and print the resulting content hash."""
    schema = _load_schema(schema_path)
    rules = _load_rules(rules_path, schema)
    graph = _load_graph(data_path, schema, mapping_path, data_format)
    materialize(graph, schema)
    state = SessionState(graph=graph, schema=schema, ruleset=rules, log_path=None)
    state.evaluate()
    count = replay_log(Path(log_path).read_text(encoding="utf-8"), state)
    click.echo(json.dumps({"decisionsReplayed": count, "contentHash": state.graph.content_hash()}))


@main.command("generate-synthetic")
@click.option("--seed", default=42, type=int)
@click.option("--samples", default=20_000, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
def generate_synthetic(seed, samples, out_path):
    """Emit a synthetic graph serialization at production-like scale."""
    scale = samples / 20_000
    config = synth.SynthConfig(
        seed=seed,
        samples=samples,
        sealed=max(1, int(15_000 * scale)),
        seizures=max(1, int(5_000 * scale)),
        aspects=max(1, int(10_000 * scale)),
        active_principles=max(1, int(8_000 * scale)),
        cutting_products=max(1, int(6_000 * scale)),
        profiles=max(1, int(6_000 * scale)),
        close_pairs=max(1, int(500 * scale)),
    )
    graph = synth.generate(config)
    Path(out_path).write_text(graph.serialize() + "\n", encoding="utf-8")
    click.echo(
        json.dumps(
            {
                "instances": config.total_instances,
                "triples": graph.size(),
                "contentHash": graph.content_hash(),
            }
        )
    )


if __name__ == "__main__":
    main()
