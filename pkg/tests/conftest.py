import pytest

from crowdpath.graph import VotesGraph


def build_graph(votes, records=None):
    """Graph from {(a, b): (p, n)} tallies."""
    g = VotesGraph()
    if records:
        g.add_records(records)
    for (a, b), (p, n) in votes.items():
        g.add_record(a)
        g.add_record(b)
        for _ in range(p):
            g.add_vote(a, b, True)
        for _ in range(n):
            g.add_vote(a, b, False)
    return g


@pytest.fixture
def graph_a():
    # four records, one contradicted pair
    return build_graph({
        ("r1", "r2"): (3, 0),
        ("r1", "r3"): (1, 0),
        ("r3", "r4"): (3, 0),
        ("r2", "r4"): (1, 4),
    })


@pytest.fixture
def graph_b():
    # a tied pair plus an isolated-by-tie record
    return build_graph({
        ("r1", "r3"): (0, 3),
        ("r3", "r4"): (3, 0),
        ("r2", "r4"): (3, 3),
    })
