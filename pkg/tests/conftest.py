from pathlib import Path

import pytest

from apisynth import load_embeddings, load_kg
from apisynth.fixtures import DEMO_GRAPH, DEMO_VECTORS, fixture_path
from apisynth.kg import save_kg
from apisynth.service import ServiceConfig

TESTS_DIR = Path(__file__).parent
TOY_VEC = TESTS_DIR / "fixtures" / "toy.vec"


def make_demo_config(tmp_path: Path, clear_location_values: bool = False) -> ServiceConfig:
    """Service config over a throwaway copy of the bundled fixtures."""
    graph_bytes = fixture_path(DEMO_GRAPH).read_bytes()
    if clear_location_values:
        graph = load_kg(graph_bytes)
        graph.declaration("yelp.search").parameter("location").values.clear()
        graph_bytes = save_kg(graph)
    graph_path = tmp_path / "graph.json"
    graph_path.write_bytes(graph_bytes)
    return ServiceConfig(
        graph_path=str(graph_path),
        embeddings_path=str(fixture_path(DEMO_VECTORS)),
    )


@pytest.fixture(scope="session")
def toy_model():
    return load_embeddings(TOY_VEC)


@pytest.fixture(scope="session")
def demo_model():
    return load_embeddings(fixture_path(DEMO_VECTORS))


@pytest.fixture()
def demo_graph():
    # fresh per test: synthesis and enrichment mutate the graph
    return load_kg(fixture_path(DEMO_GRAPH))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    outcomes = {}
    for status, verdict in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if verdict == "FAIL" or name not in outcomes:
                outcomes[name] = verdict
    if outcomes:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name in sorted(outcomes):
            terminalreporter.write_line(f"[ACCEPTANCE] {name}: {outcomes[name]}")
