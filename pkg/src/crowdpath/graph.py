"""Vote tallies between record pairs, kept as an undirected multigraph.

Every crowd answer about an unordered record pair lands in a single
:class:`VoteEdge` holding the yes tally ``p`` and the no tally ``n``.  An
edge is only *usable* in the direction that strictly dominates the other:
ties (including the empty 0/0 edge) carry no information and are ignored by
all path reasoning downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable, Iterator

from .errors import SelfPairError, UnknownRecordError

RecordId = Hashable
Pair = tuple  # canonical unordered pair, see pair_key()

POSITIVE = "positive"
NEGATIVE = "negative"
NONE = "none"
ANY = "any"


def _ord(record: RecordId):
    # ints sort before strings; everything else falls back to its repr
    if isinstance(record, bool):
        return (2, repr(record))
    if isinstance(record, int):
        return (0, record)
    if isinstance(record, str):
        return (1, record)
    return (2, repr(record))


def pair_key(a: RecordId, b: RecordId) -> Pair:
    """Canonical unordered pair; rejects self-pairs."""
    if a == b:
        raise SelfPairError(a)
    if _ord(a) <= _ord(b):
        return (a, b)
    return (b, a)


@dataclass
class VoteEdge:
    """Aggregated votes for one record pair: ``p`` yes votes, ``n`` no votes."""

    p: int = 0
    n: int = 0

    @property
    def direction(self) -> str:
        if self.p > self.n:
            return POSITIVE
        if self.n > self.p:
            return NEGATIVE
        return NONE

    @property
    def weight(self) -> int:
        """Weight of the usable direction; 0 when tied."""
        if self.p > self.n:
            return self.p
        if self.n > self.p:
            return self.n
        return 0

    @property
    def total(self) -> int:
        return self.p + self.n


_EMPTY = VoteEdge()


class VotesGraph:
    """Records plus at most one VoteEdge per unordered record pair."""

    def __init__(self) -> None:
        self._payloads: dict[RecordId, Any] = {}
        self._edges: dict[Pair, VoteEdge] = {}
        self._adjacent: dict[RecordId, set[RecordId]] = {}

    # -- records -----------------------------------------------------------

    def add_record(self, record: RecordId, payload: Any = None) -> None:
        if record not in self._payloads:
            self._payloads[record] = payload
            self._adjacent[record] = set()
        elif payload is not None:
            self._payloads[record] = payload

    def add_records(self, records) -> None:
        for record in records:
            self.add_record(record)

    def has_record(self, record: RecordId) -> bool:
        return record in self._payloads

    def payload(self, record: RecordId) -> Any:
        self._require(record)
        return self._payloads[record]

    @property
    def records(self) -> list[RecordId]:
        return sorted(self._payloads, key=_ord)

    def __len__(self) -> int:
        return len(self._payloads)

    def _require(self, record: RecordId) -> None:
        if record not in self._payloads:
            raise UnknownRecordError(record)

    # -- votes -------------------------------------------------------------

    def add_vote(self, a: RecordId, b: RecordId, answer: bool, weight: int = 1) -> VoteEdge:
        """Fold one yes/no answer about (a, b) into the pair's edge.

        ``weight`` is reserved for per-vote worker weighting; only the
        uniform value 1 is supported.
        """
        self._require(a)
        self._require(b)
        key = pair_key(a, b)
        if weight != 1:
            raise NotImplementedError("per-vote weights are reserved; only weight=1 is supported")
        edge = self._edges.get(key)
        if edge is None:
            edge = VoteEdge()
            self._edges[key] = edge
            self._adjacent[key[0]].add(key[1])
            self._adjacent[key[1]].add(key[0])
        if answer:
            edge.p += weight
        else:
            edge.n += weight
        return edge

    def edge(self, a: RecordId, b: RecordId) -> VoteEdge:
        """The pair's edge; absent pairs read as the empty 0/0 edge."""
        return self._edges.get(pair_key(a, b), _EMPTY)

    def usable_direction(self, a: RecordId, b: RecordId) -> str:
        return self.edge(a, b).direction

    def edges(self) -> Iterator[tuple[Pair, VoteEdge]]:
        return iter(self._edges.items())

    def vote_count(self, a: RecordId, b: RecordId) -> int:
        return self.edge(a, b).total

    def neighbors(self, record: RecordId, direction: str = ANY) -> set[RecordId]:
        """Records joined to ``record`` by an edge usable in ``direction``.

        ``direction=ANY`` means usable at all, i.e. not tied.
        """
        self._require(record)
        out = set()
        for other in self._adjacent[record]:
            d = self._edges[pair_key(record, other)].direction
            if d == NONE:
                continue
            if direction == ANY or d == direction:
                out.add(other)
        return out

    def touching(self, record: RecordId) -> set[RecordId]:
        """Records sharing any edge with ``record``, usable or not."""
        self._require(record)
        return set(self._adjacent[record])
