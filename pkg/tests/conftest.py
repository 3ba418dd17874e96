import pytest

from hyperfibre import Hypergraph, parse_hypergraph
from hyperfibre.partition import Partition

TEN_NODE = "1 2 0\n7 8 9\n0 6\n3 4\n3 5\n4 5\n6 3\n8 9\n6 7\n"

# Four-author system: one triple, two pairs through 4508.
COAUTHORS = "4509 7980 7979\n4508 4509\n4508 7980\n"

SPARSIFY_CASE = "A B C\nA C\nC B\nD A\nD B\n"
INJECT_CASE = "A B C\nD A\nD B\n"
RETARGET_CASE = "A B C\nC A\nA B\nD A\nD B\n"


def by_label(h: Hypergraph, p: Partition) -> set[frozenset[str]]:
    """Partition as a set of label sets, independent of class numbering."""
    return {frozenset(h.label(v) for v in members) for members in p.classes}


def label_sets(*groups) -> set[frozenset[str]]:
    return {frozenset(str(x) for x in g) for g in groups}


@pytest.fixture
def ten_node() -> Hypergraph:
    return parse_hypergraph(TEN_NODE)


@pytest.fixture(scope="session")
def sync_graph() -> Hypergraph:
    """Seeded 188-node random hypergraph used for the frequency-tuning checks."""
    from hyperfibre import random_hypergraph

    return random_hypergraph(189, 250, 150, seed=7)


# Acceptance results, filled by tests/test_acceptance.py and printed once at the end.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
