"""Path-based score inference over the votes graph.

A pair's evidence is not just its own tally: support and contradiction also
travel along paths.  A *positive* path uses only yes-dominant edges; a
*negative* path uses exactly one no-dominant edge and yes-dominant edges
elsewhere.  Paths are acyclic, each path scores the minimum tally along it,
and a pair's positive score ``p*`` (negative score ``n*``) is the maximum
such score over all positive (negative) paths.  Tied edges carry no usable
direction and never appear on a path.

:class:`PathScoreMatrix` maintains ``p*``/``n*`` plus one best path per pair
and sign, updated incrementally after every vote.  ``brute_force_scores``
recomputes the same numbers by exhaustive path enumeration and is the
reference the incremental updater is tested against.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterator

from .errors import OracleSizeError
from .graph import NEGATIVE, NONE, POSITIVE, Pair, RecordId, VotesGraph, _ord, pair_key

YES = "yes"
NO = "no"
UNKNOWN = "unknown"

_INF = 10**9

# entry slots
_PV, _PP, _NV, _NP = 0, 1, 2, 3


@dataclass(frozen=True)
class Quorums:
    """Decision thresholds for the yes and no sides."""

    positive: int = 3
    negative: int = 3

    def __post_init__(self):
        if self.positive < 1 or self.negative < 1:
            raise ValueError("quorums must be >= 1")

    @classmethod
    def symmetric(cls, q: int) -> "Quorums":
        return cls(q, q)


def _path_rank(path: tuple) -> tuple:
    return tuple(_ord(r) for r in path)


def evaluate_path(graph: VotesGraph, path: tuple, sign: str) -> int:
    """Score of a concrete node sequence under ``sign``, or ValueError.

    Invalid means: fewer than two nodes, a repeated node, a hop whose
    required direction is not usable, or a negative-hop count other than
    what the sign demands (0 for positive paths, exactly 1 for negative).
    """
    value = _evaluate_or_none(graph, path, sign)
    if value is None:
        raise ValueError(f"not a valid {sign} path: {path!r}")
    return value


def _evaluate_or_none(graph: VotesGraph, path: tuple, sign: str) -> int | None:
    if len(path) < 2 or len(set(path)) != len(path):
        return None
    minw = _INF
    negatives = 0
    for x, y in zip(path, path[1:]):
        edge = graph.edge(x, y)
        d = edge.direction
        if d == POSITIVE:
            w = edge.p
        elif d == NEGATIVE:
            w = edge.n
            negatives += 1
        else:
            return None
        if w < minw:
            minw = w
    wanted = 0 if sign == POSITIVE else 1
    if negatives != wanted:
        return None
    return minw


class PathScoreMatrix:
    """p*/n* for every pair, plus the best path backing each stored score."""

    def __init__(self) -> None:
        self._entries: dict[Pair, list] = {}
        # edge -> {(pair, sign)} whose stored best path crosses that edge
        self._edge_users: dict[Pair, set[tuple[Pair, str]]] = {}
        # edge state (direction, weight) as of the last update() sync
        self._edge_seen: dict[Pair, tuple[str, int]] = {}

    @classmethod
    def from_graph(cls, graph: VotesGraph) -> "PathScoreMatrix":
        """Build scores for an already-populated graph."""
        matrix = cls()
        for key, _ in graph.edges():
            update(graph, matrix, key)
        return matrix

    # -- reads ---------------------------------------------------------------

    def p_star(self, a: RecordId, b: RecordId) -> int:
        entry = self._entries.get(pair_key(a, b))
        return entry[_PV] if entry else 0

    def n_star(self, a: RecordId, b: RecordId) -> int:
        entry = self._entries.get(pair_key(a, b))
        return entry[_NV] if entry else 0

    def scores(self, a: RecordId, b: RecordId) -> tuple[int, int]:
        entry = self._entries.get(pair_key(a, b))
        return (entry[_PV], entry[_NV]) if entry else (0, 0)

    def best_path(self, a: RecordId, b: RecordId, sign: str) -> tuple | None:
        entry = self._entries.get(pair_key(a, b))
        if not entry:
            return None
        return entry[_PP] if sign == POSITIVE else entry[_NP]

    def pairs(self) -> Iterator[Pair]:
        return iter(self._entries)

    def score_table(self) -> dict[Pair, tuple[int, int]]:
        """Nonzero scores only; the comparable content of the matrix."""
        return {
            pair: (entry[_PV], entry[_NV])
            for pair, entry in self._entries.items()
            if entry[_PV] or entry[_NV]
        }

    def same_scores(self, other: "PathScoreMatrix") -> bool:
        return self.score_table() == other.score_table()

    def audit_paths(self, graph: VotesGraph) -> list[str]:
        """Stored-path validity violations; empty when the matrix is sound."""
        problems = []
        for pair, entry in self._entries.items():
            for sign, value, path in (
                (POSITIVE, entry[_PV], entry[_PP]),
                (NEGATIVE, entry[_NV], entry[_NP]),
            ):
                if value == 0:
                    if path is not None:
                        problems.append(f"{pair} {sign}: zero score with stored path")
                    continue
                if path is None:
                    problems.append(f"{pair} {sign}: score {value} without a path")
                elif (path[0], path[-1]) != pair:
                    problems.append(f"{pair} {sign}: path endpoints {path}")
                elif _evaluate_or_none(graph, path, sign) != value:
                    problems.append(f"{pair} {sign}: path {path} does not evaluate to {value}")
        return problems

    def dump_tsv(self) -> str:
        lines = ["i\tj\tp_star\tn_star\tbest_path_p\tbest_path_n"]
        for pair in sorted(self._entries, key=_path_rank):
            entry = self._entries[pair]
            if not (entry[_PV] or entry[_NV]):
                continue
            fmt = lambda p: ">".join(str(r) for r in p) if p else "-"
            lines.append(
                f"{pair[0]}\t{pair[1]}\t{entry[_PV]}\t{entry[_NV]}"
                f"\t{fmt(entry[_PP])}\t{fmt(entry[_NP])}"
            )
        return "\n".join(lines) + "\n"

    # -- writes ---------------------------------------------------------------

    def _entry(self, pair: Pair) -> list:
        entry = self._entries.get(pair)
        if entry is None:
            entry = [0, None, 0, None]
            self._entries[pair] = entry
        return entry

    def _set(self, pair: Pair, sign: str, value: int, path: tuple | None) -> bool:
        """Store a score+path; returns True when the value changed."""
        entry = self._entry(pair)
        vslot, pslot = (_PV, _PP) if sign == POSITIVE else (_NV, _NP)
        if value == 0:
            path = None
        elif path is not None and path[0] != pair[0]:
            path = path[::-1]
        old_path = entry[pslot]
        if old_path is not None:
            for hop in zip(old_path, old_path[1:]):
                users = self._edge_users.get(pair_key(*hop))
                if users:
                    users.discard((pair, sign))
        changed = entry[vslot] != value
        entry[vslot] = value
        entry[pslot] = path
        if path is not None:
            for hop in zip(path, path[1:]):
                self._edge_users.setdefault(pair_key(*hop), set()).add((pair, sign))
        return changed

    # -- incremental update ----------------------------------------------------

    def _degrade(self, graph: VotesGraph, edge: Pair, changed: set) -> None:
        # Every stored path crossing the weakened edge may be stale; pairs whose
        # best path survives keep their score (removal of paths cannot raise it).
        users = list(self._edge_users.get(edge, ()))
        if not users:
            return
        forest = None
        ctx = None
        for pair, sign in users:
            entry = self._entries.get(pair)
            if entry is None:
                continue
            vslot, pslot = (_PV, _PP) if sign == POSITIVE else (_NV, _NP)
            if _evaluate_or_none(graph, entry[pslot], sign) == entry[vslot]:
                continue
            if sign == POSITIVE:
                if forest is None:
                    forest = _PositiveForest(graph)
                value, path = forest.bottleneck(pair[0], pair[1])
            else:
                if ctx is None:
                    ctx = _SearchContext(graph)
                value, path = _best_negative(graph, pair[0], pair[1], ctx=ctx)
            if self._set(pair, sign, value, path):
                changed.add(pair)

    def _improve(self, graph: VotesGraph, edge: Pair, direction: str, w: int, changed: set) -> None:
        # New score mass can only arrive on paths crossing the strengthened
        # edge; enumerate them as left side + edge + right side.
        i, j = edge
        left_pos = _WidestSearch(graph, i, banned=j, one_negative=False)
        right_pos = _WidestSearch(graph, j, banned=i, one_negative=False)
        sides = [(left_pos, right_pos, POSITIVE if direction == POSITIVE else NEGATIVE)]
        if direction == POSITIVE:
            left_neg = _WidestSearch(graph, i, banned=j, one_negative=True)
            right_neg = _WidestSearch(graph, j, banned=i, one_negative=True)
            sides.append((left_neg, right_pos, NEGATIVE))
            sides.append((left_pos, right_neg, NEGATIVE))

        best: dict[tuple[Pair, str], tuple] = {}
        for left, right, sign in sides:
            for a, wl in left.widths.items():
                bound_left = min(wl, w)
                for b, wr in right.widths.items():
                    if a == b:
                        continue
                    bound = min(bound_left, wr)
                    pair = pair_key(a, b)
                    entry = self._entries.get(pair)
                    stored = (entry[_PV if sign == POSITIVE else _NV]) if entry else 0
                    if bound <= stored:
                        continue
                    key = (pair, sign)
                    cur = best.get(key)
                    if cur is not None and cur[0] > bound:
                        continue
                    full = left.path_to(a)[::-1] + right.path_to(b)
                    ok = len(set(full)) == len(full)
                    rank = (bound, ok, -len(full))
                    if cur is None or rank > cur[3]:
                        best[key] = (bound, ok, full, rank)

        ctx = None
        for (pair, sign), (bound, ok, full, _) in best.items():
            entry = self._entries.get(pair)
            stored = (entry[_PV if sign == POSITIVE else _NV]) if entry else 0
            if bound <= stored:
                continue
            if ok:
                if self._set(pair, sign, bound, full):
                    changed.add(pair)
                continue
            # the optimistic composition reuses a node; fall back to an exact
            # search over simple paths through the edge
            if ctx is None:
                ctx = _SearchContext(graph)
            value, path = _best_through_edge(
                graph, pair[0], pair[1], edge, sign, floor=stored, ctx=ctx
            )
            if value > stored and self._set(pair, sign, value, path):
                changed.add(pair)


def update(graph: VotesGraph, matrix: PathScoreMatrix, pair: Pair) -> set[Pair]:
    """Refresh scores after the pair's tally changed; returns changed pairs.

    The vote must already be applied to ``graph``.  Propagation touches only
    paths through the modified edge (improvements) or pairs whose stored best
    path crossed it (degradations).
    """
    key = pair_key(*pair)
    edge = graph.edge(*key)
    old_dir, old_w = matrix._edge_seen.get(key, (NONE, 0))
    new_dir, new_w = edge.direction, edge.weight
    matrix._edge_seen[key] = (new_dir, new_w)
    changed: set[Pair] = set()
    if (old_dir, old_w) == (new_dir, new_w):
        return changed
    if old_dir != NONE and (new_dir != old_dir or new_w < old_w):
        matrix._degrade(graph, key, changed)
    if new_dir != NONE and (new_dir != old_dir or new_w > old_w):
        matrix._improve(graph, key, new_dir, new_w, changed)
    return changed


# -- decisions ----------------------------------------------------------------


def decide(matrix: PathScoreMatrix, a: RecordId, b: RecordId, quorums: Quorums) -> str:
    """yes / no / unknown for the pair; a record always matches itself."""
    if a == b:
        return YES
    p, n = matrix.scores(a, b)
    if p - n >= quorums.positive:
        return YES
    if n - p >= quorums.negative:
        return NO
    return UNKNOWN


def consensus(matrix: PathScoreMatrix, a: RecordId, b: RecordId, quorum: int) -> float:
    """Signed certainty in [-1, 1]: score margin over the quorum, clamped."""
    if quorum < 1:
        raise ValueError("quorum must be >= 1")
    p, n = matrix.scores(a, b)
    return max(-1.0, min(1.0, (p - n) / quorum))


def phi(matrix: PathScoreMatrix, a: RecordId, b: RecordId, quorums: Quorums) -> float:
    """Consensus using the quorum that matches the margin's sign."""
    p, n = matrix.scores(a, b)
    margin = p - n
    quorum = quorums.positive if margin >= 0 else quorums.negative
    return max(-1.0, min(1.0, margin / quorum))


def path_weak_links(graph: VotesGraph, path: tuple, sign: str) -> list[Pair]:
    """Minimum-weight hops of a path that are worth reinforcing.

    A hop only qualifies while its own tally does not dominate the asked
    direction: a minimal hop on a positive path needs p >= n, the negative
    hop of a negative path needs n >= p.  Dominated minimal hops are dropped.
    """
    if len(path) < 2:
        return []
    hops = []
    for x, y in zip(path, path[1:]):
        edge = graph.edge(x, y)
        if sign == NEGATIVE and edge.direction == NEGATIVE:
            hops.append((pair_key(x, y), edge.n, NEGATIVE, edge))
        else:
            hops.append((pair_key(x, y), edge.p, POSITIVE, edge))
    minw = min(w for _, w, _, _ in hops)
    links = []
    for key, w, role, edge in hops:
        if w != minw:
            continue
        fine = edge.p >= edge.n if role == POSITIVE else edge.n >= edge.p
        if fine and key not in links:
            links.append(key)
    return sorted(links, key=_path_rank)


def weakest_links(matrix: PathScoreMatrix, graph: VotesGraph, a: RecordId, b: RecordId, sign: str) -> list[Pair]:
    """Reinforcement candidates on the stored best path; [] without a path."""
    path = matrix.best_path(a, b, sign)
    if path is None:
        return []
    return path_weak_links(graph, path, sign)


# -- exhaustive oracle ----------------------------------------------------------


def brute_force_scores(graph: VotesGraph, max_records: int = 12) -> PathScoreMatrix:
    """Reference scores by enumerating every acyclic path (test-sized graphs)."""
    if len(graph) > max_records:
        raise OracleSizeError(f"oracle limited to {max_records} records, graph has {len(graph)}")
    matrix = PathScoreMatrix()
    for key, edge in graph.edges():
        matrix._edge_seen[key] = (edge.direction, edge.weight)

    best: dict[tuple[Pair, str], tuple] = {}

    def offer(src: RecordId, node: RecordId, sign: str, value: int, path: list) -> None:
        pair = pair_key(src, node)
        stored = tuple(path) if path[0] == pair[0] else tuple(path[::-1])
        rank = (-value, len(stored), _path_rank(stored))
        key = (pair, sign)
        cur = best.get(key)
        if cur is None or rank < cur[0]:
            best[key] = (rank, value, stored)

    for src in graph.records:
        # iterative DFS over simple paths rooted at src
        path = [src]
        on_path = {src}
        stack = [(src, iter(sorted(graph.neighbors(src), key=_ord)), _INF, 0)]
        while stack:
            node, nbrs, minw, negs = stack[-1]
            advanced = False
            for nxt in nbrs:
                if nxt in on_path:
                    continue
                edge = graph.edge(node, nxt)
                d = edge.direction
                if d == POSITIVE:
                    w, negs2 = edge.p, negs
                else:
                    w, negs2 = edge.n, negs + 1
                    if negs2 > 1:
                        continue
                minw2 = min(minw, w)
                path.append(nxt)
                on_path.add(nxt)
                offer(src, nxt, POSITIVE if negs2 == 0 else NEGATIVE, minw2, path)
                stack.append((nxt, iter(sorted(graph.neighbors(nxt), key=_ord)), minw2, negs2))
                advanced = True
                break
            if not advanced:
                stack.pop()
                on_path.discard(path.pop())

    for (pair, sign), (_, value, stored) in best.items():
        matrix._set(pair, sign, value, stored)
    return matrix


# -- search helpers --------------------------------------------------------------


class _WidestSearch:
    """Widest-path search from one endpoint of the modified edge.

    Maximizes the minimum hop weight over walks; with ``one_negative`` the
    walk must cross exactly one no-dominant edge.  Walk optima bound the
    simple-path optima; callers validate reconstructed paths for node reuse
    and fall back to the exact through-edge search when needed.
    """

    def __init__(self, graph: VotesGraph, src: RecordId, banned: RecordId, one_negative: bool) -> None:
        self.src = src
        self._parents: dict[tuple[RecordId, int], tuple[RecordId, int] | None] = {}
        dist: dict[tuple[RecordId, int], int] = {}
        goal_layer = 1 if one_negative else 0
        start = (src, 0)
        dist[start] = _INF
        self._parents[start] = None
        heap = [(-_INF, 0, start)]
        tick = 0
        while heap:
            width, _, state = heapq.heappop(heap)
            width = -width
            if width < dist.get(state, 0):
                continue
            node, layer = state
            for nxt in graph.touching(node):
                if nxt == banned or nxt == src:
                    # a side path re-entering its anchor can never stay acyclic
                    continue
                edge = graph.edge(node, nxt)
                d = edge.direction
                moves = []
                if d == POSITIVE:
                    moves.append(((nxt, layer), edge.p))
                elif d == NEGATIVE and one_negative and layer == 0:
                    moves.append(((nxt, 1), edge.n))
                for nstate, w in moves:
                    nwidth = min(width, w)
                    if nwidth > dist.get(nstate, 0):
                        dist[nstate] = nwidth
                        self._parents[nstate] = state
                        tick += 1
                        heapq.heappush(heap, (-nwidth, tick, nstate))
        self.widths: dict[RecordId, int] = {
            node: w for (node, layer), w in dist.items() if layer == goal_layer
        }
        if not one_negative:
            self.widths[src] = _INF
        self._goal_layer = goal_layer
        self._paths: dict[RecordId, tuple] = {}

    def path_to(self, node: RecordId) -> tuple:
        cached = self._paths.get(node)
        if cached is None:
            out = []
            state = (node, self._goal_layer)
            while state is not None:
                out.append(state[0])
                state = self._parents[state]
            cached = tuple(reversed(out))
            self._paths[node] = cached
        return cached


class _PositiveForest:
    """Maximum spanning forest over yes-dominant edges.

    The forest path between two records realizes the widest positive simple
    path, so bottleneck queries are exact.
    """

    def __init__(self, graph: VotesGraph) -> None:
        self._parent: dict[RecordId, RecordId] = {}
        self._tree: dict[RecordId, list[tuple[RecordId, int]]] = {}
        edges = [
            (edge.p, key)
            for key, edge in graph.edges()
            if edge.direction == POSITIVE
        ]
        edges.sort(key=lambda item: -item[0])
        for w, (a, b) in edges:
            if self._find(a) != self._find(b):
                self._union(a, b)
                self._tree.setdefault(a, []).append((b, w))
                self._tree.setdefault(b, []).append((a, w))

    def _find(self, x: RecordId) -> RecordId:
        parent = self._parent
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != x:
            parent[x], x = root, parent[x]
        return root

    def _union(self, a: RecordId, b: RecordId) -> None:
        self._parent[self._find(a)] = self._find(b)

    def bottleneck(self, a: RecordId, b: RecordId) -> tuple[int, tuple | None]:
        if a not in self._tree or b not in self._tree or self._find(a) != self._find(b):
            return 0, None
        # DFS along the unique tree path
        stack = [(a, None, _INF)]
        trail: dict[RecordId, tuple[RecordId | None, int]] = {}
        while stack:
            node, prev, minw = stack.pop()
            trail[node] = (prev, minw)
            if node == b:
                break
            for nxt, w in self._tree.get(node, ()):
                if nxt != prev and nxt not in trail:
                    stack.append((nxt, node, min(minw, w)))
        value = trail[b][1]
        path = [b]
        while path[-1] != a:
            path.append(trail[path[-1]][0])
        return value, tuple(reversed(path))


class _SearchContext:
    """Shared state for the simple-path searches of one update pass.

    Holds a weight-sorted usable-edge snapshot and, per search target, a
    table of widest-walk widths used as admissible pruning bounds: a walk
    relaxation can only overestimate what a simple path achieves.
    """

    def __init__(self, graph: VotesGraph):
        self.adjacency: dict[RecordId, list] = {}
        for key, edge in graph.edges():
            d = edge.direction
            if d == NONE:
                continue
            a, b = key
            w, neg = (edge.p, 0) if d == POSITIVE else (edge.n, 1)
            self.adjacency.setdefault(a, []).append((w, b, neg))
            self.adjacency.setdefault(b, []).append((w, a, neg))
        for moves in self.adjacency.values():
            moves.sort(key=lambda m: (-m[0], m[2], _ord(m[1])))
        self._bounds: dict[tuple[RecordId, int], dict] = {}

    def bounds(self, target: RecordId, allow_negs: int) -> dict:
        """Widest walk widths to ``target`` keyed by (node, exact neg hops)."""
        cached = self._bounds.get((target, allow_negs))
        if cached is not None:
            return cached
        table: dict[tuple[RecordId, int], int] = {(target, 0): _INF}
        heap = [(-_INF, 0, _path_rank((target,)), target)]
        while heap:
            value, negs, _, node = heapq.heappop(heap)
            value = -value
            if table.get((node, negs), 0) != value:
                continue
            for w, nxt, neg in self.adjacency.get(node, ()):
                negs2 = negs + neg
                if negs2 > allow_negs:
                    continue
                width = min(value, w)
                if width > table.get((nxt, negs2), 0):
                    table[(nxt, negs2)] = width
                    heapq.heappush(heap, (-width, negs2, _path_rank((nxt,)), nxt))
        self._bounds[(target, allow_negs)] = table
        return table


def _best_negative(
    graph: VotesGraph, a: RecordId, b: RecordId, floor: int = 0,
    ctx: _SearchContext | None = None,
) -> tuple[int, tuple | None]:
    """Exact widest simple path a..b with exactly one no-dominant hop."""
    return _best_path_dfs(graph, a, b, sign=NEGATIVE, floor=floor, through=None, ctx=ctx)


def _best_through_edge(
    graph: VotesGraph, a: RecordId, b: RecordId, edge: Pair, sign: str, floor: int = 0,
    ctx: _SearchContext | None = None,
) -> tuple[int, tuple | None]:
    """Exact widest simple path a..b of ``sign`` that crosses ``edge``."""
    return _best_path_dfs(graph, a, b, sign=sign, floor=floor, through=edge, ctx=ctx)


def _best_path_dfs(
    graph: VotesGraph, a: RecordId, b: RecordId, sign: str, floor: int,
    through: Pair | None, ctx: _SearchContext | None = None,
) -> tuple[int, tuple | None]:
    if ctx is None:
        ctx = _SearchContext(graph)
    best = floor
    best_path = None
    allow_negs = 0 if sign == POSITIVE else 1
    caps = ctx.bounds(b, allow_negs)
    adjacency = ctx.adjacency
    path = [a]
    on_path = {a}

    stack = [(a, iter(adjacency.get(a, ())), _INF, 0, False)]
    while stack:
        node, moves, minw, negs, crossed = stack[-1]
        advanced = False
        for w, nxt, neg in moves:
            minw2 = min(minw, w)
            if minw2 <= best:
                # moves are sorted by weight, nothing later can do better
                break
            if nxt in on_path:
                continue
            negs2 = negs + neg
            if negs2 > allow_negs:
                continue
            crossed2 = crossed or through is None or pair_key(node, nxt) == through
            if nxt == b:
                if crossed2 and negs2 == allow_negs and minw2 > best:
                    best = minw2
                    best_path = tuple(path) + (b,)
                continue
            # a continuation must spend the remaining negative hops exactly
            cap = caps.get((nxt, allow_negs - negs2), 0)
            if min(minw2, cap) <= best:
                continue
            path.append(nxt)
            on_path.add(nxt)
            stack.append((nxt, iter(adjacency.get(nxt, ())), minw2, negs2, crossed2))
            advanced = True
            break
        if not advanced:
            stack.pop()
            on_path.discard(path.pop())
    # best == floor means nothing above the floor was found (best_path is None)
    return best, best_path
