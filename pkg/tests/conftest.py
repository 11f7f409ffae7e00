import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from batchline.ingest import IngestMapping, populate, read_csv_rows  # noqa: E402
from batchline.ruledsl import parse_ruleset  # noqa: E402
from batchline.schema import load_schema  # noqa: E402
from batchline.terms import Graph  # noqa: E402


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return REPO


@pytest.fixture(scope="session")
def drug_schema():
    return load_schema((REPO / "schema" / "drug-domain.json").read_bytes())


@pytest.fixture(scope="session")
def shipped_rules():
    return parse_ruleset((REPO / "rules" / "matching.dsl").read_text(encoding="utf-8"))


@pytest.fixture()
def vd_graph(drug_schema):
    """The two-sample worked-example graph (widths 200/150, heights 100/100)."""
    graph = Graph()
    mapping = IngestMapping.from_json((REPO / "fixtures" / "vd-mapping.json").read_bytes())
    rows = read_csv_rows((REPO / "fixtures" / "vd-samples.csv").read_text(encoding="utf-8"))
    populate(graph, drug_schema, mapping, rows)
    return graph
