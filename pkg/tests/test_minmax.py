import random

import pytest

from crowdpath.errors import OracleSizeError
from crowdpath.graph import NEGATIVE, POSITIVE, VotesGraph, pair_key
from crowdpath.minmax import (
    NO,
    UNKNOWN,
    YES,
    PathScoreMatrix,
    Quorums,
    brute_force_scores,
    consensus,
    decide,
    evaluate_path,
    path_weak_links,
    phi,
    update,
    weakest_links,
)

from conftest import build_graph

# expected score tables, verified against the worked four-record examples
# before freezing; the brute-force oracle reproduces them below
GA_TABLE = {
    ("r1", "r2"): (3, 1),
    ("r1", "r3"): (1, 3),
    ("r1", "r4"): (1, 3),
    ("r2", "r3"): (1, 3),
    ("r2", "r4"): (1, 4),
    ("r3", "r4"): (3, 1),
}
GB_TABLE = {
    ("r1", "r3"): (0, 3),
    ("r1", "r4"): (0, 3),
    ("r3", "r4"): (3, 0),
}


def incremental_from_votes(votes, records=None):
    g = VotesGraph()
    if records:
        g.add_records(records)
    m = PathScoreMatrix()
    for a, b, answer in votes:
        g.add_record(a)
        g.add_record(b)
        g.add_vote(a, b, answer)
        update(g, m, (a, b))
    return g, m


def vote_list(tallies):
    out = []
    for (a, b), (p, n) in tallies.items():
        out.extend((a, b, True) for _ in range(p))
        out.extend((a, b, False) for _ in range(n))
    return out


def random_votes(rng, record_count, vote_count):
    records = [f"x{i}" for i in range(record_count)]
    votes = []
    for _ in range(vote_count):
        a, b = rng.sample(records, 2)
        votes.append((a, b, rng.random() < 0.55))
    return records, votes


# -- oracle on the frozen fixtures ------------------------------------------


def test_brute_force_matches_fixture_a(graph_a):
    assert brute_force_scores(graph_a).score_table() == GA_TABLE


def test_brute_force_matches_fixture_b(graph_b):
    assert brute_force_scores(graph_b).score_table() == GB_TABLE


def test_brute_force_stored_paths_evaluate(graph_a):
    m = brute_force_scores(graph_a)
    assert m.audit_paths(graph_a) == []
    assert m.best_path("r2", "r3", POSITIVE) == ("r2", "r1", "r3")
    assert m.best_path("r2", "r3", NEGATIVE) == ("r2", "r4", "r3")


def test_brute_force_size_guard():
    g = VotesGraph()
    g.add_records(range(13))
    with pytest.raises(OracleSizeError):
        brute_force_scores(g)


# -- incremental updates ------------------------------------------------------


def test_incremental_matches_oracle_on_fixture(graph_a):
    votes = vote_list({
        ("r1", "r2"): (3, 0),
        ("r1", "r3"): (1, 0),
        ("r3", "r4"): (3, 0),
        ("r2", "r4"): (1, 4),
    })
    _, m = incremental_from_votes(votes)
    assert m.score_table() == GA_TABLE


def test_first_vote_changes_only_that_pair():
    g = VotesGraph()
    g.add_records(["a", "b", "c"])
    m = PathScoreMatrix()
    g.add_vote("a", "b", True)
    changed = update(g, m, ("a", "b"))
    assert changed == {("a", "b")}
    assert m.scores("a", "b") == (1, 0)


def test_dominated_side_increment_is_a_no_op(graph_a):
    m = PathScoreMatrix.from_graph(graph_a)
    graph_a.add_vote("r2", "r4", True)  # p 1->2, still dominated by n=4
    assert update(graph_a, m, ("r2", "r4")) == set()
    assert m.score_table() == GA_TABLE


def test_tie_degradation_drops_negative_paths(graph_a):
    m = PathScoreMatrix.from_graph(graph_a)
    for _ in range(3):
        graph_a.add_vote("r2", "r4", True)
        update(graph_a, m, ("r2", "r4"))
    # (r2, r4) is now 4/4: no usable direction anywhere near it
    assert m.score_table() == brute_force_scores(graph_a).score_table()
    assert m.n_star("r1", "r3") == 0
    assert m.p_star("r2", "r4") == 1  # via r2-r1-r3-r4
    assert m.audit_paths(graph_a) == []


def test_edge_insertion_changed_set_matches_oracle_diff(graph_a):
    # start from the fixture minus the (r3, r4) edge, then insert it
    pre_votes = vote_list({
        ("r1", "r2"): (3, 0),
        ("r1", "r3"): (1, 0),
        ("r2", "r4"): (1, 4),
    })
    g, m = incremental_from_votes(pre_votes, records=["r1", "r2", "r3", "r4"])
    before = brute_force_scores(g).score_table()
    assert m.n_star("r2", "r3") == 0 and m.n_star("r1", "r3") == 0

    changed = set()
    for _ in range(3):
        g.add_vote("r3", "r4", True)
        changed |= update(g, m, ("r3", "r4"))
    after = brute_force_scores(g).score_table()

    diff = {
        pair
        for pair in set(before) | set(after)
        if before.get(pair, (0, 0)) != after.get(pair, (0, 0))
    }
    assert changed == diff
    # the headline deltas
    assert m.n_star("r2", "r3") == 3
    assert m.n_star("r1", "r3") == 3
    assert m.p_star("r2", "r3") == 1  # unchanged by the insertion
    assert m.score_table() == GA_TABLE


def test_incremental_equals_oracle_after_every_vote():
    for seed in range(60):
        rng = random.Random(seed)
        records, votes = random_votes(rng, rng.randint(3, 8), 12)
        g = VotesGraph()
        g.add_records(records)
        m = PathScoreMatrix()
        before = {}
        for a, b, answer in votes:
            g.add_vote(a, b, answer)
            changed = update(g, m, (a, b))
            after = brute_force_scores(g).score_table()
            assert m.score_table() == after, f"seed {seed}: diverged after vote on {(a, b)}"
            diff = {
                pair
                for pair in set(before) | set(after)
                if before.get(pair, (0, 0)) != after.get(pair, (0, 0))
            }
            assert changed == diff, f"seed {seed}: changed-set mismatch on {(a, b)}"
            assert m.audit_paths(g) == []
            before = after


# -- decisions ------------------------------------------------------------------


def test_decide_examples(graph_a):
    m = brute_force_scores(graph_a)
    assert decide(m, "r2", "r4", Quorums.symmetric(2)) == NO
    assert decide(m, "r1", "r2", Quorums.symmetric(4)) == UNKNOWN
    assert decide(m, "r1", "r2", Quorums.symmetric(2)) == YES
    assert decide(m, "r1", "r1", Quorums.symmetric(3)) == YES  # reflexive


def test_decide_is_symmetric(graph_a):
    m = brute_force_scores(graph_a)
    q = Quorums.symmetric(2)
    for a in graph_a.records:
        for b in graph_a.records:
            if a != b:
                assert decide(m, a, b, q) == decide(m, b, a, q)


def test_decide_matches_direct_majority_when_paths_are_absent():
    # with only the direct edge, a quorum-meeting majority is never overruled
    for seed in range(200):
        rng = random.Random(seed)
        q = rng.randint(1, 4)
        p, n = rng.randint(0, 8), rng.randint(0, 8)
        if abs(p - n) < q:
            continue
        g = build_graph({("a", "b"): (p, n)})
        m = brute_force_scores(g)
        want = YES if p > n else NO
        assert decide(m, "a", "b", Quorums.symmetric(q)) == want


def test_yes_requires_positive_evidence():
    for seed in range(80):
        rng = random.Random(1000 + seed)
        records, votes = random_votes(rng, rng.randint(3, 7), 10)
        g = VotesGraph()
        g.add_records(records)
        for a, b, answer in votes:
            g.add_vote(a, b, answer)
        m = brute_force_scores(g)
        q = Quorums.symmetric(rng.randint(1, 3))
        for i, a in enumerate(records):
            for b in records[i + 1:]:
                if decide(m, a, b, q) == YES:
                    assert m.p_star(a, b) > 0


def test_weak_transitivity_properties():
    # yes/yes never forces no; yes/no never forces yes
    for seed in range(300):
        rng = random.Random(seed)
        records, votes = random_votes(rng, rng.randint(3, 7), 12)
        g = VotesGraph()
        g.add_records(records)
        for a, b, answer in votes:
            g.add_vote(a, b, answer)
        m = brute_force_scores(g)
        q = Quorums.symmetric(rng.randint(1, 3))
        verdict = {}
        for i, a in enumerate(records):
            for b in records[i + 1:]:
                verdict[pair_key(a, b)] = decide(m, a, b, q)
        for a in records:
            for b in records:
                for c in records:
                    if len({a, b, c}) != 3:
                        continue
                    ab = verdict[pair_key(a, b)]
                    bc = verdict[pair_key(b, c)]
                    ac = verdict[pair_key(a, c)]
                    if ab == YES and bc == YES:
                        assert ac != NO, f"seed {seed}: transitivity broken on {(a, b, c)}"
                    if ab == YES and bc == NO:
                        assert ac != YES, f"seed {seed}: anti-transitivity broken on {(a, b, c)}"


# -- consensus -------------------------------------------------------------------


def test_consensus_values(graph_a):
    m = brute_force_scores(graph_a)
    assert consensus(m, "r1", "r2", 3) == pytest.approx(2 / 3)
    assert consensus(m, "r2", "r4", 3) == -1.0  # clamped from -3/3
    g = build_graph({("a", "b"): (5, 0)}, records=["a", "b", "c"])
    m2 = brute_force_scores(g)
    assert consensus(m2, "a", "b", 3) == 1.0  # clamped
    assert consensus(m2, "a", "c", 3) == 0.0  # never connected
    with pytest.raises(ValueError):
        consensus(m2, "a", "b", 0)


def test_phi_uses_sign_matching_quorum(graph_a):
    m = brute_force_scores(graph_a)
    quorums = Quorums(positive=2, negative=6)
    assert phi(m, "r1", "r2", quorums) == 1.0  # +2 margin over q_p=2
    assert phi(m, "r2", "r4", quorums) == pytest.approx(-0.5)  # -3 over q_n=6


# -- weakest links ----------------------------------------------------------------


def test_weakest_links_on_stored_paths(graph_a):
    m = brute_force_scores(graph_a)
    assert weakest_links(m, graph_a, "r2", "r3", POSITIVE) == [("r1", "r3")]
    assert weakest_links(m, graph_a, "r2", "r3", NEGATIVE) == [("r3", "r4")]
    # no stored path at all -> nothing to reinforce
    g = build_graph({("a", "b"): (1, 0)}, records=["a", "b", "c"])
    m2 = brute_force_scores(g)
    assert weakest_links(m2, g, "a", "c", POSITIVE) == []


def test_dominated_minimal_hop_is_excluded(graph_a):
    # hypothetical positive route through r4: its weakest hop is the
    # (r2, r4) edge whose no votes dominate, so it is not worth asking
    assert path_weak_links(graph_a, ("r2", "r4", "r3"), POSITIVE) == []


def test_evaluate_path(graph_a):
    assert evaluate_path(graph_a, ("r1", "r2", "r4"), NEGATIVE) == 3
    assert evaluate_path(graph_a, ("r2", "r1", "r3"), POSITIVE) == 1
    with pytest.raises(ValueError):
        evaluate_path(graph_a, ("r1", "r2", "r4"), POSITIVE)
    with pytest.raises(ValueError):
        evaluate_path(graph_a, ("r1",), POSITIVE)
