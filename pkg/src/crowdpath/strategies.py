"""Task ordering strategies and queue disciplines.

A TaskQueue holds unresolved pairs keyed by the consensus value phi. Three
orderings are supported: chase the most settled pair first (ErS), the least
settled first (UrS), or a hybrid that drains likely matches before likely
non-matches (HS, realized as a double queue). The adjust() pass keeps queues
consistent with the score matrix after every integrated answer and encodes
the monotonic (Fer) versus non-monotonic (Feer) eviction discipline. The
consensus baseline (Cer) lives here too: fixed votes per pair, majority
decisions, and a union-find closure that prunes inferable pairs.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass
from typing import Iterable, Optional

from .clustering import Clustering
from .graph import VotesGraph, _ord, pair_key
from .minmax import NO, UNKNOWN, YES, PathScoreMatrix, Quorums, decide, phi

ERS = "ers"
URS = "urs"
HS = "hs"
STRATEGIES = (ERS, URS, HS)

FER = "fer"
FEER = "feer"
CER = "cer"
DISCIPLINES = (FER, FEER, CER)


@dataclass(frozen=True)
class DisciplineConfig:
    """Knobs shared by the querying disciplines.

    kappa steers synthetic candidate generation: 0 keeps all within-entity
    pairs plus one random cross pair per entity pair, larger values sample
    proportionally more cross pairs, and None disables the restriction and
    asks over the full candidate set.
    """

    mode: str = FER
    quorum: int = 3
    edge_budget: int = 10
    votes_per_pair: int = 5
    kappa: Optional[float] = 0.0

    def __post_init__(self):
        if self.mode not in DISCIPLINES:
            raise ValueError(f"unknown discipline {self.mode!r}")
        if self.quorum < 1:
            raise ValueError("quorum must be >= 1")
        if self.edge_budget < self.quorum:
            raise ValueError("edge budget must cover the quorum")
        if self.votes_per_pair < 1:
            raise ValueError("votes_per_pair must be >= 1")
        if self.kappa is not None and not 0 <= self.kappa <= 1:
            raise ValueError("kappa must lie in [0, 1]")

    @property
    def quorums(self) -> Quorums:
        return Quorums.symmetric(self.quorum)


def _priority(strategy: str, value: float, pair) -> tuple:
    # lower tuples pop first; ties break on ascending record ids
    a, b = pair
    if strategy == ERS:
        primary = -abs(value)
    elif strategy == URS:
        primary = abs(value)
    else:
        primary = -value
    return (primary, _ord(a), _ord(b))


def compare(pair_a, pair_b, phi_a: float, phi_b: float, strategy: str) -> int:
    """Negative when pair_a should be served first, positive for pair_b."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    for value, pair in ((phi_a, pair_a), (phi_b, pair_b)):
        if abs(value) >= 1:
            raise ValueError(f"pair {pair!r} is resolved and must not be compared")
    if strategy == HS and (phi_a > 0) != (phi_b > 0):
        # double queue rule: the positive queue is always served first
        return -1 if phi_a > 0 else 1
    ka = _priority(strategy, phi_a, pair_key(*pair_a))
    kb = _priority(strategy, phi_b, pair_key(*pair_b))
    return -1 if ka < kb else (1 if ka > kb else 0)


class TaskQueue:
    """Strategy-ordered queue of unresolved pairs.

    Entries are upserted with their current phi; priority updates are cheap
    (lazy heap entries are invalidated by a per-pair stamp). Retired pairs
    can never be re-added, which is how permanent evictions are enforced.
    """

    def __init__(self, strategy: str = ERS):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        self.strategy = strategy
        self._phi: dict = {}
        self._stamp: dict = {}
        self._counter = 0
        self._heaps: list = [[], []] if strategy == HS else [[]]
        self._popped: set = set()
        self._retired: set = set()

    def _bucket(self, value: float) -> int:
        if self.strategy == HS:
            return 0 if value > 0 else 1
        return 0

    def add(self, pair, value: float) -> None:
        canonical = pair_key(*pair)
        if abs(value) >= 1:
            raise ValueError(f"pair {canonical!r} is resolved and must not be queued")
        if canonical in self._retired:
            raise ValueError(f"pair {canonical!r} is retired")
        self._counter += 1
        self._phi[canonical] = value
        self._stamp[canonical] = self._counter
        entry = (*_priority(self.strategy, value, canonical), self._counter, canonical)
        heapq.heappush(self._heaps[self._bucket(value)], entry)

    refresh = add

    def discard(self, pair) -> None:
        canonical = pair_key(*pair)
        self._phi.pop(canonical, None)
        self._stamp.pop(canonical, None)

    def retire(self, pair) -> None:
        canonical = pair_key(*pair)
        self.discard(canonical)
        self._retired.add(canonical)

    def _drain(self, heap, *, remove: bool):
        while heap:
            entry = heap[0]
            stamp, canonical = entry[-2], entry[-1]
            if self._stamp.get(canonical) != stamp:
                heapq.heappop(heap)  # stale priority
                continue
            if remove:
                heapq.heappop(heap)
            return canonical
        return None

    def pop(self):
        """Remove and return the top pair, or None when exhausted."""
        for heap in self._heaps:
            canonical = self._drain(heap, remove=True)
            if canonical is not None:
                self.discard(canonical)
                self._popped.add(canonical)
                return canonical
        return None

    def peek(self):
        for heap in self._heaps:
            canonical = self._drain(heap, remove=False)
            if canonical is not None:
                return canonical
        return None

    def take(self, pair) -> None:
        """Claim a specific queued pair, as pop() would have eventually."""
        canonical = pair_key(*pair)
        if canonical not in self._phi:
            raise KeyError(f"pair {canonical!r} is not queued")
        self.discard(canonical)
        self._popped.add(canonical)

    def phi_of(self, pair) -> float:
        return self._phi[pair_key(*pair)]

    def was_popped(self, pair) -> bool:
        return pair_key(*pair) in self._popped

    def retired(self, pair) -> bool:
        return pair_key(*pair) in self._retired

    def pairs(self) -> list:
        """All queued pairs in pop order."""
        order = []
        for bucket, _ in enumerate(self._heaps):
            members = [p for p in self._phi if self._bucket(self._phi[p]) == bucket]
            members.sort(key=lambda p: _priority(self.strategy, self._phi[p], p))
            order.extend(members)
        return order

    def __contains__(self, pair) -> bool:
        return pair_key(*pair) in self._phi

    def __len__(self) -> int:
        return len(self._phi)

    def dump_tsv(self) -> str:
        lines = ["i\tj\tphi\tqueue"]
        for pair in self.pairs():
            if self.strategy == HS:
                label = "pos" if self._bucket(self._phi[pair]) == 0 else "neg"
            else:
                label = "mono"
            lines.append(f"{pair[0]}\t{pair[1]}\t{self._phi[pair]:.6g}\t{label}")
        return "\n".join(lines) + "\n"


def adjust(
    queue: TaskQueue,
    changed_pairs: Iterable[tuple],
    matrix: PathScoreMatrix,
    graph: VotesGraph,
    discipline: DisciplineConfig,
    quorums: Optional[Quorums] = None,
    universe: Optional[set] = None,
    open_pairs: Optional[set] = None,
) -> None:
    """Reconcile the queue with the matrix after a score change.

    Queued pairs get fresh priorities; pairs that became decided or ran out
    of budget leave the queue (budget exhaustion retires them permanently,
    and under Fer any eviction is permanent). Under Feer a pair whose
    decision reverted to unknown re-enters the queue, restricted to
    `universe` when the candidate set is limited. Pairs in `open_pairs` are
    currently being asked and must not be re-queued behind the asker's back.
    """
    qs = quorums if quorums is not None else discipline.quorums
    leased = open_pairs if open_pairs is not None else ()
    for pair in changed_pairs:
        canonical = pair_key(*pair)
        a, b = canonical
        settled = decide(matrix, a, b, qs) != UNKNOWN
        exhausted = graph.edge(a, b).total >= discipline.edge_budget
        if exhausted:
            queue.retire(canonical)
        elif canonical in queue:
            if settled:
                if discipline.mode == FER:
                    queue.retire(canonical)
                else:
                    queue.discard(canonical)
            else:
                queue.refresh(canonical, phi(matrix, a, b, qs))
        elif (
            discipline.mode == FEER
            and not settled
            and canonical not in leased
            and not queue.retired(canonical)
            and (universe is None or canonical in universe)
        ):
            queue.add(canonical, phi(matrix, a, b, qs))


# -- consensus baseline --------------------------------------------------------


def cer_step(pair, votes: Iterable[bool], votes_per_pair: int):
    """Majority decision over a fixed number of votes; even splits lean no."""
    tally = list(votes)
    if len(tally) != votes_per_pair:
        raise ValueError(
            f"pair {pair!r} needs exactly {votes_per_pair} votes, got {len(tally)}"
        )
    yes = sum(1 for v in tally if v)
    return YES if yes > len(tally) - yes else NO


class ConsensusState:
    """Union-find over majority decisions with anti-transitive exclusion.

    Yes decisions merge components and are final; no decisions mark two
    components as enemies. implied() answers whether a pair is already
    inferable, which is exactly the set of pairs never worth asking.
    """

    def __init__(self, records: Iterable = ()):
        self._parent: dict = {}
        self._size: dict = {}
        self._enemies: dict = {}
        for record in records:
            self.add_record(record)

    def add_record(self, record) -> None:
        if record not in self._parent:
            self._parent[record] = record
            self._size[record] = 1
            self._enemies[record] = set()

    def find(self, record):
        root = record
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[record] != root:
            self._parent[record], record = root, self._parent[record]
        return root

    def integrate(self, pair, decision) -> None:
        a, b = pair_key(*pair)
        ra, rb = self.find(a), self.find(b)
        if decision == YES:
            if ra == rb:
                return
            if rb in self._enemies[ra]:
                raise ValueError(f"merge of {pair!r} contradicts a prior no")
            if self._size[ra] < self._size[rb]:
                ra, rb = rb, ra
            self._parent[rb] = ra
            self._size[ra] += self._size[rb]
            for enemy in self._enemies.pop(rb):
                self._enemies[enemy].discard(rb)
                self._enemies[enemy].add(ra)
                self._enemies[ra].add(enemy)
        elif decision == NO:
            if ra == rb:
                raise ValueError(f"split of {pair!r} contradicts a prior merge")
            self._enemies[ra].add(rb)
            self._enemies[rb].add(ra)
        else:
            raise ValueError("only yes/no decisions can be integrated")

    def implied(self, pair):
        """YES/NO when the pair is inferable from prior decisions, else None."""
        a, b = pair_key(*pair)
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return YES
        if rb in self._enemies[ra]:
            return NO
        return None

    def clustering(self) -> Clustering:
        groups: dict = {}
        for record in self._parent:
            groups.setdefault(self.find(record), set()).add(record)
        return Clustering(groups.values())


def transitive_closure(decisions) -> Clustering:
    """Clustering induced by a batch of yes/no decisions."""
    items = decisions.items() if hasattr(decisions, "items") else list(decisions)
    state = ConsensusState()
    for pair, _ in items:
        for record in pair:
            state.add_record(record)
    for pair, decision in items:
        state.integrate(pair, decision)
    return state.clustering()


def expand_connectivity(entity_a, entity_b, kappa: float, rng: random.Random) -> set:
    """Sample cross pairs between two entities at connectivity kappa."""
    if not 0 <= kappa <= 1:
        raise ValueError("kappa must lie in [0, 1]")
    crosses = [pair_key(a, b) for a in entity_a for b in entity_b]
    if not crosses:
        raise ValueError("both entities must be non-empty")
    # epsilon guards the floor against float fuzz on exact multiples
    want = max(1, math.floor(kappa * len(crosses) + 1e-9))
    want = min(want, len(crosses))
    return set(rng.sample(sorted(crosses, key=lambda p: (_ord(p[0]), _ord(p[1]))), want))
