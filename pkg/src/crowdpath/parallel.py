"""Batch construction for parallel task release.

Intra-task parallelism: each pair carries the number of repeats that could
settle it under unanimous answers, capped by its remaining budget. Inter-task
parallelism: pairs join a batch only if their outcome is not already implied
by current decisions plus the optimistic outcomes of pairs batched before
them, which yields spanning trees across and within entities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .clustering import Clustering
from .graph import VoteEdge, VotesGraph, _ord, pair_key
from .minmax import UNKNOWN, PathScoreMatrix, Quorums, YES, decide
from .strategies import ConsensusState, DisciplineConfig, TaskQueue


@dataclass(frozen=True)
class BatchItem:
    pair: tuple
    repeats: int
    independent: bool = True


def required_votes(edge: VoteEdge, quorum: int, edge_budget: int) -> int:
    """Votes needed to reach the quorum under unanimous answers.

    Zero means the pair is already certain or out of budget.
    """
    if quorum < 1:
        raise ValueError("quorum must be >= 1")
    to_certainty = max(0, quorum - abs(edge.p - edge.n))
    remaining = max(0, edge_budget - edge.total)
    return min(to_certainty, remaining)


def build_batch(
    queue: TaskQueue,
    matrix: PathScoreMatrix,
    graph: VotesGraph,
    discipline: DisciplineConfig,
    quorums: Optional[Quorums] = None,
    max_size: Optional[int] = None,
    clustering: Optional[Clustering] = None,
) -> list[BatchItem]:
    """Select a maximal set of mutually independent pairs in strategy order.

    The implication state starts from all currently decided pairs and absorbs
    a hypothetical yes for every admitted pair, so no batch member could be
    inferred from the others. Skipped pairs stay queued for later rounds.
    The clustering argument is reserved for cluster-level batch policies and
    does not influence the default implication rule.
    """
    qs = quorums if quorums is not None else discipline.quorums
    state = ConsensusState(graph.records)
    decided = []
    for pair in matrix.pairs():
        verdict = decide(matrix, *pair, qs)
        if verdict != UNKNOWN:
            decided.append((pair, verdict))
    decided.sort(key=lambda item: (_ord(item[0][0]), _ord(item[0][1])))
    for pair, verdict in decided:
        try:
            state.integrate(pair, verdict)
        except ValueError:
            # decisions are only weakly transitive; long chains can disagree
            # and the disagreeing pair simply contributes no implications
            continue

    batch: list[BatchItem] = []
    for pair in queue.pairs():
        if max_size is not None and len(batch) >= max_size:
            break
        if decide(matrix, *pair, qs) != UNKNOWN:
            continue
        if state.implied(pair) is not None:
            continue
        repeats = required_votes(graph.edge(*pair), qs.positive, discipline.edge_budget)
        if repeats == 0:
            continue
        state.integrate(pair, YES)
        batch.append(BatchItem(pair_key(*pair), repeats))
    return batch
