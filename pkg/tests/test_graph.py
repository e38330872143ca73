import pytest

from crowdpath.errors import SelfPairError, UnknownRecordError
from crowdpath.graph import ANY, NEGATIVE, NONE, POSITIVE, VotesGraph, pair_key

from conftest import build_graph


def test_pair_key_orders_and_rejects_self():
    assert pair_key("r2", "r1") == ("r1", "r2")
    assert pair_key(7, 3) == (3, 7)
    assert pair_key(3, "a") == (3, "a")  # ints sort before strings
    with pytest.raises(SelfPairError):
        pair_key("r1", "r1")


def test_votes_accumulate_on_one_edge_per_pair():
    g = VotesGraph()
    g.add_records(["a", "b"])
    g.add_vote("a", "b", True)
    g.add_vote("b", "a", True)
    g.add_vote("a", "b", False)
    edge = g.edge("b", "a")
    assert (edge.p, edge.n) == (2, 1)
    assert len(list(g.edges())) == 1


def test_unknown_record_and_self_vote_rejected():
    g = VotesGraph()
    g.add_record("a")
    with pytest.raises(UnknownRecordError):
        g.add_vote("a", "zz", True)
    with pytest.raises(SelfPairError):
        g.add_vote("a", "a", True)


def test_vote_weights_are_reserved():
    g = VotesGraph()
    g.add_records(["a", "b"])
    with pytest.raises(NotImplementedError):
        g.add_vote("a", "b", True, weight=2)


def test_usable_direction(graph_a, graph_b):
    assert graph_a.usable_direction("r2", "r4") == NEGATIVE
    assert graph_a.usable_direction("r1", "r2") == POSITIVE
    assert graph_b.usable_direction("r2", "r4") == NONE  # 3/3 tie
    assert graph_a.usable_direction("r1", "r4") == NONE  # no votes at all


def test_neighbors_by_direction(graph_a):
    assert graph_a.neighbors("r1", POSITIVE) == {"r2", "r3"}
    assert graph_a.neighbors("r2", NEGATIVE) == {"r4"}
    assert graph_a.neighbors("r2", ANY) == {"r1", "r4"}
    with pytest.raises(UnknownRecordError):
        graph_a.neighbors("nope")


def test_tied_edges_have_no_neighbors(graph_b):
    assert graph_b.neighbors("r2") == set()
    assert graph_b.touching("r2") == {"r4"}


def test_records_sorted_and_payloads():
    g = build_graph({(2, 10): (1, 0)})
    g.add_record(1, payload="one")
    assert g.records == [1, 2, 10]
    assert g.payload(1) == "one"
    assert g.vote_count(10, 2) == 1
