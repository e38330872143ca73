"""Worked four-record example: how path scores move decisions.

Builds the small contradicted graph used throughout the test suite, prints
its score matrix, then shows an incremental update rippling through the
affected pairs after a new edge arrives.
"""

from crowdpath import (
    PathScoreMatrix,
    Quorums,
    VotesGraph,
    brute_force_scores,
    decide,
    phi,
    update,
)

TALLIES = {
    ("r1", "r2"): (3, 0),
    ("r1", "r3"): (1, 0),
    ("r2", "r4"): (1, 4),
}
PAIRS = [
    ("r1", "r2"), ("r1", "r3"), ("r1", "r4"),
    ("r2", "r3"), ("r2", "r4"), ("r3", "r4"),
]


def show(matrix, quorums):
    print(f"{'pair':<10} {'p*':>3} {'n*':>3} {'decision':>9} {'phi':>6}")
    for a, b in PAIRS:
        p, n = matrix.scores(a, b)
        print(f"({a},{b})   {p:>3} {n:>3} {decide(matrix, a, b, quorums):>9} {phi(matrix, a, b, quorums):>6.2f}")
    print()


def main():
    graph = VotesGraph()
    graph.add_records(["r1", "r2", "r3", "r4"])
    matrix = PathScoreMatrix()
    for (a, b), (p, n) in TALLIES.items():
        for _ in range(p):
            graph.add_vote(a, b, True)
            update(graph, matrix, (a, b))
        for _ in range(n):
            graph.add_vote(a, b, False)
            update(graph, matrix, (a, b))

    quorums = Quorums.symmetric(3)
    print("Before the (r3, r4) edge:")
    show(matrix, quorums)

    print("Three yes votes arrive on (r3, r4). Changed pairs per vote:")
    for _ in range(3):
        graph.add_vote("r3", "r4", True)
        changed = update(graph, matrix, ("r3", "r4"))
        print(f"  -> {sorted(changed)}")
    print()

    print("After:")
    show(matrix, quorums)
    print("The strong no-evidence between r2 and r4 now reaches (r1,r3) through")
    print("the new edge, swinging it from yes-leaning to no-leaning, and (r1,r2)")
    print("loses its yes decision: later contradiction can revoke earlier calls.")

    oracle = brute_force_scores(graph)
    assert oracle.score_table() == matrix.score_table()
    print("Exhaustive path enumeration agrees with the incremental matrix.")


if __name__ == "__main__":
    main()
