import random

import pytest
from hypothesis import settings, strategies as st

from semirandom.graph_core import Graph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def pytest_addoption(parser):
    parser.addoption("--large", action="store_true", default=False, help="run n >= 2**16 experiments")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--large"):
        return
    skip = pytest.mark.skip(reason="needs --large")
    for item in items:
        if "large" in item.keywords:
            item.add_marker(skip)


def random_graph(n, max_deg, seed, p=0.5):
    """Random simple graph with every degree <= max_deg (edges tried in shuffled order)."""
    rnd = random.Random(seed)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    rnd.shuffle(pairs)
    g = Graph(n)
    for u, v in pairs:
        if rnd.random() < p and g.degree(u) < max_deg and g.degree(v) < max_deg:
            g.add_edge(u, v)
    return g


@st.composite
def graphs(draw, max_n=12, max_deg=None):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    g = Graph(n)
    for u, v in chosen:
        if max_deg is None or (g.degree(u) < max_deg and g.degree(v) < max_deg):
            g.add_edge(u, v)
    return g


_REPORT: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the acceptance summary."""

    def emit(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
        print(line)
        _REPORT.append(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance")
        for line in _REPORT:
            terminalreporter.write_line(line)
