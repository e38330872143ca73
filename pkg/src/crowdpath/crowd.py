"""Answer providers: synthetic noisy workers, recorded-vote replay, prefilters.

Every randomized component takes an explicit seed and draws exactly one
random number per answer, so answer streams are reproducible and independent
of branch structure.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional

from .errors import DataError, ReplayExhaustedError, UnknownRecordError
from .graph import VotesGraph, _ord, pair_key

_TOKENS = re.compile(r"[a-z0-9]+")


class GroundTruth:
    """Record to entity assignment used for simulation and scoring."""

    def __init__(self, assignment: Mapping):
        self._entity = dict(assignment)

    def entity_of(self, record):
        try:
            return self._entity[record]
        except KeyError:
            raise UnknownRecordError(record) from None

    def same(self, a, b) -> bool:
        return self.entity_of(a) == self.entity_of(b)

    @property
    def records(self) -> list:
        return sorted(self._entity, key=_ord)

    def entities(self) -> dict:
        groups: dict = {}
        for record, entity in self._entity.items():
            groups.setdefault(entity, set()).add(record)
        return groups

    def items(self):
        return self._entity.items()

    def __contains__(self, record) -> bool:
        return record in self._entity

    def __len__(self) -> int:
        return len(self._entity)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroundTruth):
            return NotImplemented
        return self._entity == other._entity


@dataclass
class NoiseModel:
    """Uniform worker noise: flip probabilities per true pair class."""

    false_positive: float = 0.0
    false_negative: float = 0.0
    seed: int = 0
    _rng: Optional[random.Random] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for rate in (self.false_positive, self.false_negative):
            if not 0 <= rate <= 1:
                raise ValueError("noise rates must lie in [0, 1]")

    @property
    def rng(self) -> random.Random:
        if self._rng is None:
            self._rng = random.Random(self.seed)
        return self._rng


def synthetic_answer(pair, truth: GroundTruth, noise: NoiseModel) -> bool:
    """One noisy worker vote; noise is redrawn independently per vote."""
    a, b = pair
    same = truth.same(a, b)
    draw = noise.rng.random()
    if same:
        return draw >= noise.false_negative
    return draw < noise.false_positive


class SyntheticCrowd:
    """Answer provider backed by a ground truth and a noise model."""

    def __init__(self, truth: GroundTruth, noise: Optional[NoiseModel] = None):
        self.truth = truth
        self.noise = noise if noise is not None else NoiseModel()

    def answer(self, pair) -> bool:
        return synthetic_answer(pair, self.truth, self.noise)


class VoteReplay:
    """Replays recorded votes per pair in seq order.

    Exhaustion is a normal outcome: a recording with ten votes per pair
    realizes a hard edge budget of ten against real data.
    """

    def __init__(self, rows: Iterable[tuple]):
        # rows: (record_i, record_j, worker_id, answer, seq)
        self._queues: dict = {}
        ordered = sorted(rows, key=lambda row: row[4])
        for a, b, worker, answer, _seq in ordered:
            self._queues.setdefault(pair_key(a, b), []).append((bool(answer), worker))
        self._cursor = {pair: 0 for pair in self._queues}

    def pairs(self) -> list:
        return sorted(self._queues, key=lambda p: (_ord(p[0]), _ord(p[1])))

    def remaining(self, pair) -> int:
        canonical = pair_key(*pair)
        if canonical not in self._queues:
            raise DataError(f"pair {canonical!r} absent from recording")
        return len(self._queues[canonical]) - self._cursor[canonical]

    def answer(self, pair) -> bool:
        canonical = pair_key(*pair)
        if canonical not in self._queues:
            raise DataError(f"pair {canonical!r} absent from recording")
        cursor = self._cursor[canonical]
        votes = self._queues[canonical]
        if cursor >= len(votes):
            raise ReplayExhaustedError(f"no recorded votes left for {canonical!r}")
        self._cursor[canonical] += 1
        return votes[cursor][0]


def replay_answer(pair, replay: VoteReplay) -> bool:
    return replay.answer(pair)


def jaccard(a: str, b: str) -> float:
    """Token-set Jaccard similarity; two empty strings count as identical."""
    ta = set(_TOKENS.findall(str(a).lower()))
    tb = set(_TOKENS.findall(str(b).lower()))
    if not ta and not tb:
        return 1.0
    return len(ta & tb) / len(ta | tb)


@dataclass(frozen=True)
class SimilarityPrefilter:
    """Thresholds on a per-pair similarity in [0, 1]."""

    lower: float
    upper: float
    similarity: Callable[[object, object], float]

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper <= 1:
            raise ValueError("thresholds must satisfy 0 <= lower <= upper <= 1")


def apply_prefilter(records, prefilter: SimilarityPrefilter, edge_budget: int):
    """Seed a votes graph from similarity alone.

    Pairs above the upper threshold get the full budget of yes votes, pairs
    below the lower threshold the full budget of no votes; neither kind is
    ever queued. Every other pair gets an initial queue priority 2s-1 so the
    queues start ordered by similarity belief.
    """
    graph = VotesGraph()
    graph.add_records(records)
    priorities: dict = {}
    ordered = graph.records
    for i, a in enumerate(ordered):
        for b in ordered[i + 1:]:
            s = prefilter.similarity(a, b)
            if not 0 <= s <= 1:
                raise ValueError(f"similarity of {(a, b)!r} out of range: {s}")
            if s > prefilter.upper:
                for _ in range(edge_budget):
                    graph.add_vote(a, b, True)
            elif s < prefilter.lower:
                for _ in range(edge_budget):
                    graph.add_vote(a, b, False)
            else:
                # clamp inside the open interval: priority 1.0 would mean
                # "already resolved" to the queues
                belief = max(-0.999999, min(0.999999, 2 * s - 1))
                priorities[pair_key(a, b)] = belief
    return graph, priorities


def uniform_truth(record_count: int, entity_count: int) -> GroundTruth:
    """Ground truth that spreads records over entities round-robin."""
    if record_count < 0:
        raise ValueError("record_count must be non-negative")
    if entity_count < 1:
        raise ValueError("entity_count must be >= 1")
    width = max(1, len(str(max(record_count - 1, 0))))
    return GroundTruth(
        {
            f"r{i:0{width}d}": f"e{i % entity_count}"
            for i in range(record_count)
        }
    )


def zipf_truth(
    record_count: int,
    *,
    alpha: float = 1.5,
    max_entity: int = 50,
    rng: random.Random,
) -> GroundTruth:
    """Ground truth with entity sizes drawn from a truncated Zipf law."""
    if record_count < 0:
        raise ValueError("record_count must be non-negative")
    sizes = range(1, max_entity + 1)
    weights = [size**-alpha for size in sizes]
    width = max(1, len(str(max(record_count - 1, 0))))
    assignment = {}
    record = 0
    entity = 0
    while record < record_count:
        take = min(rng.choices(sizes, weights)[0], record_count - record)
        for _ in range(take):
            assignment[f"r{record:0{width}d}"] = f"e{entity}"
            record += 1
        entity += 1
    return GroundTruth(assignment)
