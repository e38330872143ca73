"""Cautious correlation clustering over path scores.

Records land in the same cluster when their positive path score beats the
negative one. Clustering is greedy and order-dependent, so the record visit
order is always explicit: callers pass a seeded rng (or a fixed order) and
identical seeds reproduce identical clusterings.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional

from .graph import _ord
from .minmax import PathScoreMatrix

Record = object


class Clustering:
    """A partition of records into disjoint clusters with a membership index."""

    def __init__(self, clusters: Iterable[Iterable[Record]] = ()):
        self._clusters: list[frozenset] = []
        self._index: dict = {}
        for members in clusters:
            self.add_cluster(members)

    def add_cluster(self, members: Iterable[Record]) -> frozenset:
        club = frozenset(members)
        if not club:
            raise ValueError("clusters must be non-empty")
        for record in club:
            if record in self._index:
                raise ValueError(f"record {record!r} is already clustered")
        self._clusters.append(club)
        for record in club:
            self._index[record] = club
        return club

    @classmethod
    def singletons(cls, records: Iterable[Record]) -> "Clustering":
        return cls([record] for record in records)

    @property
    def clusters(self) -> list[frozenset]:
        """Clusters in a canonical order (by their smallest member)."""
        return sorted(self._clusters, key=lambda c: min(_ord(r) for r in c))

    @property
    def records(self) -> set:
        return set(self._index)

    def cluster_of(self, record: Record) -> Optional[frozenset]:
        return self._index.get(record)

    def same_cluster(self, a: Record, b: Record) -> bool:
        club = self._index.get(a)
        return club is not None and b in club

    def as_sets(self) -> set:
        return set(self._clusters)

    def __len__(self) -> int:
        return len(self._clusters)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Clustering):
            return NotImplemented
        return self.as_sets() == other.as_sets()

    def __repr__(self) -> str:
        body = ", ".join(
            "{" + ", ".join(repr(r) for r in sorted(c, key=_ord)) + "}"
            for c in self.clusters
        )
        return f"Clustering([{body}])"

    def export_rows(self) -> list[tuple]:
        """(record, cluster_id) rows; ids are stable within one export."""
        rows = []
        for number, club in enumerate(self.clusters):
            rows.extend((record, number) for record in sorted(club, key=_ord))
        return rows


@dataclass(frozen=True)
class UpdateComponent:
    """Records touched by a score update, expanded to whole clusters."""

    records: frozenset
    expanded: frozenset


def is_good(record: Record, cluster: Iterable[Record], matrix: PathScoreMatrix) -> bool:
    """Benefit-vs-penalty test for keeping `record` inside `cluster`."""
    score = 0
    penalty = 0
    for other in cluster:
        if other == record:
            continue
        p, n = matrix.scores(record, other)
        if p > n:
            score += p - n
        else:
            penalty += n - p
    return score > penalty


def resolve(
    records: Iterable[Record],
    matrix: PathScoreMatrix,
    *,
    rng: Optional[random.Random] = None,
    order: Optional[Iterable[Record]] = None,
) -> Clustering:
    """Greedy clustering pass over all records.

    Visit order is the sorted record list, shuffled when an rng is supplied;
    an explicit `order` overrides both (useful for exhaustive permutation
    tests). Each unassigned record seeds a cluster, pulls in every unassigned
    positively-connected record, then the cluster is trimmed (records whose
    penalties outweigh their benefits leave, scan restarting on each removal)
    and regrown (unassigned positively-connected records that test good join,
    scan restarting on each addition). A cluster emptied by trimming falls
    back to the seed singleton.
    """
    if order is not None:
        visit = list(order)
        if sorted(visit, key=_ord) != sorted(records, key=_ord):
            raise ValueError("order must be a permutation of records")
    else:
        visit = sorted(records, key=_ord)
        if rng is not None:
            rng.shuffle(visit)
    everyone = sorted(visit, key=_ord)

    clustering = Clustering()
    assigned: set = set()
    for seed in visit:
        if seed in assigned:
            continue
        cluster = {seed}
        for other in everyone:
            if other in assigned or other in cluster:
                continue
            p, n = matrix.scores(seed, other)
            if p > n:
                cluster.add(other)

        # removal phase: restart from the first member after each removal
        members = sorted(cluster, key=_ord)
        i = 0
        while i < len(members):
            record = members[i]
            if is_good(record, cluster, matrix):
                i += 1
            else:
                cluster.discard(record)
                members = sorted(cluster, key=_ord)
                i = 0

        # addition phase: unassigned candidates with a positive tie to a member
        grew = True
        while grew:
            grew = False
            for candidate in everyone:
                if candidate in assigned or candidate in cluster:
                    continue
                connected = any(
                    matrix.p_star(candidate, member) > matrix.n_star(candidate, member)
                    for member in cluster
                )
                if connected and is_good(candidate, cluster, matrix):
                    cluster.add(candidate)
                    grew = True
                    break

        if not cluster:
            cluster = {seed}
        assigned |= cluster
        clustering.add_cluster(cluster)
    return clustering


def transitive_update_component(
    changed_pairs: Iterable[tuple], clustering: Clustering
) -> UpdateComponent:
    """Expand the records of changed pairs to the union of their clusters."""
    touched = {record for pair in changed_pairs for record in pair}
    expanded = set(touched)
    for record in touched:
        club = clustering.cluster_of(record)
        if club is not None:
            expanded |= club
    return UpdateComponent(frozenset(touched), frozenset(expanded))


def partial_resolve(
    clustering: Clustering,
    component: UpdateComponent,
    matrix: PathScoreMatrix,
    *,
    rng: Optional[random.Random] = None,
) -> Clustering:
    """Re-cluster only the expanded component; everything else is kept as is."""
    inside = component.expanded
    if not inside:
        return clustering
    kept = []
    for club in clustering.as_sets():
        overlap = club & inside
        if not overlap:
            kept.append(club)
        elif overlap != club:
            # the expansion step guarantees whole clusters; a partial overlap
            # means the component was not built from this clustering
            raise ValueError("update component splits a cluster")
    redone = resolve(inside, matrix, rng=rng)
    return Clustering(kept + list(redone.as_sets()))
