"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion lines
as they complete; without -s they appear in the captured-output section of
any failure and in the summary produced by `pytest -rA`.
"""

import contextlib
import random
import time
from pathlib import Path

from click.testing import CliRunner

import test_planner
import test_reasoner
import test_service
from batchline.cli import main as cli_main
from batchline.ingest import IngestMapping, populate, read_csv_rows
from batchline.planner import compile, evaluate_ruleset, execute
from batchline.reasoner import materialize
from batchline.ruledsl import parse_ruleset
from batchline.schema import load_schema
from batchline.service import DecisionRecord, record_decision, replay
from batchline.synth import SynthConfig, generate
from batchline.terms import Graph, Term, Triple, load_serialized, triple


@contextlib.contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"FAIL {name}", flush=True)
        raise
    print(f"PASS {name}", flush=True)


def _vd_state(repo_root, drug_schema):
    graph = Graph()
    mapping = IngestMapping.from_json((repo_root / "fixtures/vd-mapping.json").read_text())
    populate(
        graph,
        drug_schema,
        mapping,
        read_csv_rows((repo_root / "fixtures/vd-samples.csv").read_text()),
    )
    materialize(graph, drug_schema)
    return graph


def test_golden_worked_example(repo_root, drug_schema, shipped_rules):
    with criterion("golden worked example (two-sample fixture, exact verdicts, < 1 s)"):
        start = time.perf_counter()
        graph = _vd_state(repo_root, drug_schema)
        report = evaluate_ruleset(shipped_rules, graph, drug_schema, dataset="vd")
        elapsed = time.perf_counter() - start
        [pair] = report.pairs
        verdicts = {rule: v.value for rule, v in report.verdicts[pair].items()}
        assert verdicts == {
            "drugType": "MATCH",
            "chemicalForm": "MATCH",
            "width": "NO_MATCH",
            "height": "MATCH",
            "diameter": "INAPPLICABLE",
            "thickness": "INAPPLICABLE",
            "length": "INAPPLICABLE",
        }, verdicts
        assert elapsed < 1.0, f"took {elapsed:.2f}s"


def test_sibling_oracle():
    with criterion("sibling rule oracle (exactly the unordered pair {a, b})"):
        g = Graph()
        for node in ("f", "g", "a", "b", "c"):
            g.insert(triple(node, "rdf:type", "Person"))
        g.insert(triple("f", "isFatherOf", "a"))
        g.insert(triple("f", "isFatherOf", "b"))
        g.insert(triple("g", "isFatherOf", "c"))
        table = execute(compile(test_planner.SIBLING, test_planner.PERSON_SCHEMA, g), g)
        unordered = {frozenset(t) for t in table.head_tuples()}
        assert unordered == {frozenset({"a", "b"})}


def test_transitive_chain(repo_root):
    with criterion("transitive chain materializes exactly 1 new triple; re-run adds 0"):
        schema = load_schema((repo_root / "fixtures/transitive-schema.json").read_text())
        graph = load_serialized((repo_root / "fixtures/transitive-chain.triples").read_text())
        stats = materialize(graph, schema)
        assert stats.added == 1, stats.added
        assert materialize(graph, schema).added == 0


def test_fixpoint_oracle_equivalence():
    with criterion("fixpoint oracle: semi-naive equals naive on 100 seeds, < 30 s"):
        start = time.perf_counter()
        for seed in range(100):
            rng = random.Random(seed)
            schema = test_reasoner._random_axiom_schema(rng)
            g = test_reasoner._random_abox(rng, schema)
            expected = test_reasoner._naive_fixpoint(g, schema)
            materialize(g, schema)
            assert set(g) == expected, f"seed {seed}"
        elapsed = time.perf_counter() - start
        assert elapsed < 30.0, f"took {elapsed:.1f}s"


def test_compiler_oracle_equivalence():
    with criterion("compiler oracle: execute(compile(rule)) equals brute force on 100 seeds, < 30 s"):
        start = time.perf_counter()
        for seed in range(100):
            rng = random.Random(seed)
            schema, g, rule = test_planner._random_case(rng)
            expected = test_planner._brute_force(rule, g)
            got = set(execute(compile(rule, schema, g), g).head_tuples())
            assert got == expected, f"seed {seed}"
        elapsed = time.perf_counter() - start
        assert elapsed < 30.0, f"took {elapsed:.1f}s"


def test_scale_smoke(drug_schema, shipped_rules):
    with criterion("scale smoke: 20k samples enriched and evaluated in < 60 s"):
        start = time.perf_counter()
        config = SynthConfig()
        assert config.samples == 20_000
        assert config.total_instances >= 68_972
        graph = generate(config)
        stats = materialize(graph, drug_schema)
        assert stats.by_rule.get("inverse", 0) > 0
        assert stats.by_rule.get("symmetric", 0) > 0
        report = evaluate_ruleset(
            shipped_rules,
            graph,
            drug_schema,
            dataset="synthetic",
            block_by=["drugType", "chemicalForm"],
        )
        elapsed = time.perf_counter() - start
        assert len(report.pairs) > 0
        assert elapsed < 60.0, f"took {elapsed:.1f}s"


def test_rule_validation_gate(repo_root, tmp_path):
    with criterion("rule validation gate: undeclared property rejected, CLI exits nonzero"):
        bad = tmp_path / "bad.dsl"
        bad.write_text(
            "r(s1,s2) := Sample(s1) AND Sample(s2) AND flavour(s1,a) AND flavour(s2,b) AND a == b;\n"
        )
        result = CliRunner().invoke(
            cli_main,
            [
                "evaluate",
                "--schema", str(repo_root / "schema/drug-domain.json"),
                "--rules", str(bad),
                "--data", str(repo_root / "fixtures/vd-samples.csv"),
                "--mapping", str(repo_root / "fixtures/vd-mapping.json"),
            ],
        )
        assert result.exit_code != 0
        assert "unknown-predicate" in result.output or "revise the TBox" in result.output


def test_read_only_evaluation(repo_root, drug_schema, shipped_rules):
    with criterion("read-only evaluation: content hash unchanged by evaluate"):
        graph = _vd_state(repo_root, drug_schema)
        before = graph.content_hash()
        evaluate_ruleset(shipped_rules, graph, drug_schema, dataset="vd")
        assert graph.content_hash() == before


def test_replay_determinism(drug_schema, tmp_path):
    with criterion("replay determinism: 50 randomized sequences, live hash equals replay hash"):
        close = Term.entity("isCloseTo")
        for seed in range(50):
            rng = random.Random(seed)
            live = test_service._random_multi_state(
                drug_schema, tmp_path, seed=seed, log_name=f"live-{seed}.jsonl"
            )
            for _ in range(rng.randint(1, 8)):
                a, b = rng.choice(live.report.pairs)
                record_decision(
                    live,
                    DecisionRecord.make(a, b, rng.choice(["accept", "reject"]), "alice"),
                )
            # accepted pairs yield symmetric isCloseTo and connected batch membership
            for a, b in live.accepted_pairs():
                assert Triple(Term.entity(a), close, Term.entity(b)) in live.graph
                assert Triple(Term.entity(b), close, Term.entity(a)) in live.graph
            members_in_batches = {m for batch in live.batches() for m in batch["members"]}
            for a, b in live.accepted_pairs():
                assert {a, b} <= members_in_batches

            fresh = test_service._random_multi_state(
                drug_schema, tmp_path, seed=seed, log_name=f"replay-{seed}.jsonl"
            )
            replay(live.log_path.read_text(), fresh)
            assert fresh.graph.content_hash() == live.graph.content_hash(), f"seed {seed}"
