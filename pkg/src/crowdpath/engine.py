"""Experiment engine: ask, integrate, re-cluster, adjust, measure.

One Engine owns one votes graph plus its derived state (score matrix,
clustering, task queue) and funnels every answer through the same
integration path regardless of where it came from: the sequential chase
loop, a parallel batch, or a live HTTP worker. Costs count crowd accesses,
one per vote, in every mode.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, fields
from typing import Callable, Iterable, Optional

from .clustering import Clustering, partial_resolve, resolve, transitive_update_component
from .crowd import GroundTruth, NoiseModel, SyntheticCrowd, uniform_truth, zipf_truth
from .errors import ConfigError, ReplayExhaustedError
from .graph import VotesGraph, _ord, pair_key
from .minmax import UNKNOWN, PathScoreMatrix, Quorums, decide, phi, update
from .parallel import build_batch
from .strategies import (
    CER,
    DISCIPLINES,
    FER,
    HS,
    STRATEGIES,
    ConsensusState,
    DisciplineConfig,
    TaskQueue,
    adjust,
    cer_step,
    expand_connectivity,
)

SEQUENTIAL = "seq"
PARALLEL = "par"
MODES = (SEQUENTIAL, PARALLEL)

SYNTHETIC = "synthetic"
REPLAY = "replay"
LIVE = "live"
SOURCES = (SYNTHETIC, REPLAY, LIVE)


@dataclass(frozen=True)
class MetricsPoint:
    cost: int
    precision: float
    recall: float
    f_measure: float


@dataclass
class Trace:
    points: list = field(default_factory=list)
    final_clustering: Optional[Clustering] = None
    update_times: list = field(default_factory=list)

    @property
    def total_cost(self) -> int:
        return self.points[-1].cost if self.points else 0

    @property
    def final_f(self) -> float:
        return self.points[-1].f_measure if self.points else 0.0

    @property
    def mean_update_time(self) -> float:
        if not self.update_times:
            return 0.0
        return sum(self.update_times) / len(self.update_times)


def metrics(clustering: Clustering, truth: GroundTruth, cost: int = 0) -> MetricsPoint:
    """Pairwise precision/recall/F against the ground truth."""
    # cell counting: every (cluster, entity) intersection of size c
    # contributes C(c,2) correctly-linked pairs
    predicted = 0
    hits = 0
    for club in clustering.as_sets():
        predicted += len(club) * (len(club) - 1) // 2
        cells: dict = {}
        for record in club:
            entity = truth.entity_of(record)
            cells[entity] = cells.get(entity, 0) + 1
        hits += sum(c * (c - 1) // 2 for c in cells.values())
    actual = sum(
        len(members) * (len(members) - 1) // 2
        for members in truth.entities().values()
    )
    precision = hits / predicted if predicted else 1.0
    recall = hits / actual if actual else 1.0
    f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricsPoint(cost, precision, recall, f)


def full_pairs(records: Iterable) -> set:
    ordered = sorted(records, key=_ord)
    return {
        pair_key(a, b)
        for i, a in enumerate(ordered)
        for b in ordered[i + 1:]
    }


def candidate_pairs(truth: GroundTruth, kappa: float, rng: random.Random) -> set:
    """Connectivity-limited candidates: all within-entity pairs plus a
    kappa-sized sample of cross pairs per entity pair."""
    entities = truth.entities()
    names = sorted(entities, key=_ord)
    universe: set = set()
    for i, left in enumerate(names):
        members = sorted(entities[left], key=_ord)
        universe |= full_pairs(members)
        for right in names[i + 1:]:
            universe |= expand_connectivity(
                members, sorted(entities[right], key=_ord), kappa, rng
            )
    return universe


class Engine:
    """Single-writer integration core shared by all execution modes."""

    def __init__(
        self,
        records: Optional[Iterable] = None,
        *,
        crowd=None,
        truth: Optional[GroundTruth] = None,
        discipline: Optional[DisciplineConfig] = None,
        strategy: str = HS,
        quorums: Optional[Quorums] = None,
        mode: str = SEQUENTIAL,
        seed: int = 0,
        graph: Optional[VotesGraph] = None,
        universe: Optional[set] = None,
        initial_priorities: Optional[dict] = None,
        max_batch: Optional[int] = None,
    ):
        if strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {strategy!r}")
        if mode not in MODES:
            raise ConfigError(f"unknown mode {mode!r}")
        self.discipline = discipline if discipline is not None else DisciplineConfig()
        self.quorums = quorums if quorums is not None else self.discipline.quorums
        self.strategy = strategy
        self.mode = mode
        self.max_batch = max_batch
        self.crowd = crowd
        self.truth = truth
        self.rng = random.Random(seed)

        if graph is not None:
            self.graph = graph
        else:
            self.graph = VotesGraph()
            self.graph.add_records(records if records is not None else [])
        if records is not None:
            self.graph.add_records(records)
        self.matrix = PathScoreMatrix.from_graph(self.graph)
        self.clustering = resolve(self.graph.records, self.matrix, rng=self.rng)

        self.universe = (
            set(universe) if universe is not None else full_pairs(self.graph.records)
        )
        priorities = initial_priorities or {}
        self.queue = TaskQueue(strategy)
        for pair in sorted(self.universe, key=lambda p: (_ord(p[0]), _ord(p[1]))):
            if decide(self.matrix, *pair, self.quorums) != UNKNOWN:
                continue
            if self.graph.edge(*pair).total >= self.discipline.edge_budget:
                continue
            belief = phi(self.matrix, *pair, self.quorums)
            if belief == 0:
                belief = priorities.get(pair, 0.0)
            self.queue.add(pair, belief)

        self.cost = 0
        self.trace = Trace()
        self._leased: set = set()
        self._consensus: Optional[ConsensusState] = None
        self._last_scored: Optional[Clustering] = None
        self._last_metrics: Optional[MetricsPoint] = None

    # -- shared integration path ------------------------------------------------

    def _record_point(self) -> None:
        if self.truth is None:
            return
        if self.clustering is not self._last_scored:
            point = metrics(self.clustering, self.truth, self.cost)
            self._last_scored = self.clustering
        else:
            point = MetricsPoint(
                self.cost,
                self._last_metrics.precision,
                self._last_metrics.recall,
                self._last_metrics.f_measure,
            )
        self._last_metrics = point
        self.trace.points.append(point)

    def integrate_answer(self, pair, answer: bool) -> set:
        """One vote: graph, scores, clustering, queue, metrics, in that order."""
        canonical = pair_key(*pair)
        self.graph.add_vote(*canonical, answer)
        started = time.perf_counter()
        changed = update(self.graph, self.matrix, canonical)
        self.trace.update_times.append(time.perf_counter() - started)
        if changed:
            component = transitive_update_component(changed, self.clustering)
            self.clustering = partial_resolve(
                self.clustering, component, self.matrix, rng=self.rng
            )
        adjust(
            self.queue,
            changed | {canonical},
            self.matrix,
            self.graph,
            self.discipline,
            self.quorums,
            universe=self.universe,
            open_pairs=self._leased,
        )
        self.cost += 1
        self._record_point()
        return changed

    # -- leasing (chase loops and the live service share these) -------------------

    def lease_next(self):
        pair = self.queue.pop()
        if pair is not None:
            self._leased.add(pair)
        return pair

    def return_lease(self, pair) -> None:
        """Give back an unanswered lease (timeout path)."""
        canonical = pair_key(*pair)
        self._leased.discard(canonical)
        if (
            decide(self.matrix, *canonical, self.quorums) == UNKNOWN
            and self.graph.edge(*canonical).total < self.discipline.edge_budget
            and not self.queue.retired(canonical)
        ):
            self.queue.add(canonical, phi(self.matrix, *canonical, self.quorums))

    def _settle(self, pair) -> None:
        """Post-ask bookkeeping: retire, release, or reopen the pair."""
        canonical = pair_key(*pair)
        self._leased.discard(canonical)
        settled = decide(self.matrix, *canonical, self.quorums) != UNKNOWN
        exhausted = (
            self.graph.edge(*canonical).total >= self.discipline.edge_budget
        )
        if exhausted:
            self.queue.retire(canonical)
        elif settled:
            if self.discipline.mode == FER:
                self.queue.retire(canonical)
        elif not self.queue.retired(canonical) and canonical not in self.queue:
            # ask again later: the task is not finished, whatever the discipline
            self.queue.add(canonical, phi(self.matrix, *canonical, self.quorums))

    def integrate_leased(self, pair, answer: bool) -> set:
        canonical = pair_key(*pair)
        if canonical not in self._leased:
            raise ValueError(f"pair {canonical!r} was not issued")
        changed = self.integrate_answer(canonical, answer)
        self._settle(canonical)
        return changed

    # -- execution modes ----------------------------------------------------------

    def _ask(self, pair) -> Optional[bool]:
        """One crowd access; a drained replay reads as None (budget hit)."""
        try:
            return self.crowd.answer(pair)
        except ReplayExhaustedError:
            return None

    def _chase(self, pair) -> None:
        """Ask one pair until it is decided or out of budget."""
        canonical = pair_key(*pair)
        self._leased.add(canonical)
        while (
            decide(self.matrix, *canonical, self.quorums) == UNKNOWN
            and self.graph.edge(*canonical).total < self.discipline.edge_budget
        ):
            answer = self._ask(canonical)
            if answer is None:
                self.queue.retire(canonical)
                break
            self.integrate_answer(canonical, answer)
        self._settle(canonical)

    def _run_sequential(self) -> None:
        # monotonic: a popped pair is one task, repeated until it resolves.
        # non-monotonic: one vote per pop, then the strategy picks again; a
        # still-open pair re-enters with its fresh priority.
        chase = self.discipline.mode == FER
        while True:
            pair = self.queue.pop()
            if pair is None:
                return
            if chase:
                self._chase(pair)
            else:
                self._leased.add(pair)
                answer = self._ask(pair)
                if answer is None:
                    self.queue.retire(pair)
                else:
                    self.integrate_answer(pair, answer)
                self._settle(pair)

    def _run_parallel(self) -> None:
        while len(self.queue):
            batch = build_batch(
                self.queue,
                self.matrix,
                self.graph,
                self.discipline,
                self.quorums,
                max_size=self.max_batch,
                clustering=self.clustering,
            )
            if not batch:
                # every remaining pair is inferable from current decisions
                for pair in self.queue.pairs():
                    self.queue.retire(pair)
                return
            for item in batch:
                self.queue.take(item.pair)
                self._leased.add(item.pair)
            # acquisition happens up front, as if released in one platform batch
            answers = []
            for item in batch:
                for _ in range(item.repeats):
                    answer = self._ask(item.pair)
                    if answer is None:
                        self.queue.retire(item.pair)
                        break
                    answers.append((item.pair, answer))
            for pair, answer in answers:
                self.integrate_answer(pair, answer)
            for item in batch:
                self._settle(item.pair)

    def _run_consensus(self) -> None:
        v = self.discipline.votes_per_pair
        state = ConsensusState(self.graph.records)
        self._consensus = state
        for pair in sorted(self.universe, key=lambda p: (_ord(p[0]), _ord(p[1]))):
            if state.implied(pair) is not None:
                continue  # inferable pairs are free
            votes = []
            for _ in range(v):
                answer = self._ask(pair)
                if answer is None:
                    break
                votes.append(answer)
            for answer in votes:
                self.graph.add_vote(*pair, answer)
                self.cost += 1
            if len(votes) < v:
                continue  # recording ran dry mid-pair; leave it unresolved
            state.integrate(pair, cer_step(pair, votes, v))
            self.clustering = state.clustering()
            self._record_point()

    def run(self) -> Trace:
        if self.crowd is None:
            raise ConfigError("running an experiment requires an answer provider")
        if self.discipline.mode == CER:
            self._run_consensus()
        elif self.mode == PARALLEL:
            self._run_parallel()
        else:
            self._run_sequential()
        self.trace.final_clustering = self.clustering
        return self.trace

    # -- snapshots ------------------------------------------------------------------

    def status(self) -> dict:
        snapshot = {
            "cost": self.cost,
            "clusters": len(self.clustering),
            "open_tasks": len(self._leased),
        }
        if self.truth is not None:
            point = metrics(self.clustering, self.truth, self.cost)
            snapshot.update(
                precision=point.precision,
                recall=point.recall,
                f=point.f_measure,
            )
        return snapshot


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce a run family."""

    source: str = SYNTHETIC
    records: int = 40
    entities: Optional[int] = None
    zipf_alpha: float = 1.5
    max_entity: int = 50
    false_positive: float = 0.0
    false_negative: float = 0.0
    discipline: DisciplineConfig = field(default_factory=DisciplineConfig)
    strategy: str = HS
    mode: str = SEQUENTIAL
    seed: int = 0
    repetitions: int = 1
    max_batch: Optional[int] = None
    manifest: Optional[str] = None
    trace_out: Optional[str] = None

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ConfigError(f"unknown crowd source {self.source!r}")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.records < 0:
            raise ConfigError("records must be >= 0")
        if self.entities is not None and self.entities < 1:
            raise ConfigError("entities must be >= 1")
        if self.source in (REPLAY, LIVE) and self.manifest is None:
            raise ConfigError(f"source {self.source!r} requires a dataset manifest")


@dataclass
class RunResult:
    mean_trace: Trace
    run_traces: list


def _derived_seeds(seed: int, rep: int) -> tuple[int, int, int]:
    base = 1_000_003 * (seed + rep)
    return base + 7, base + 11, base + 13


def synthetic_engine(config: ExperimentConfig, rep: int = 0) -> Engine:
    """Materialize one synthetic run: dataset, noisy crowd, engine."""
    truth_seed, noise_seed, engine_seed = _derived_seeds(config.seed, rep)
    if config.entities is not None:
        truth = uniform_truth(config.records, config.entities)
    else:
        truth = zipf_truth(
            config.records,
            alpha=config.zipf_alpha,
            max_entity=config.max_entity,
            rng=random.Random(truth_seed),
        )
    noise = NoiseModel(config.false_positive, config.false_negative, seed=noise_seed)
    kappa = config.discipline.kappa
    universe = None
    if kappa is not None:
        universe = candidate_pairs(truth, kappa, random.Random(truth_seed + 1))
    return Engine(
        truth.records,
        crowd=SyntheticCrowd(truth, noise),
        truth=truth,
        discipline=config.discipline,
        strategy=config.strategy,
        mode=config.mode,
        seed=engine_seed,
        universe=universe,
        max_batch=config.max_batch,
    )


def mean_trace(traces: Iterable[Trace]) -> Trace:
    """Average quality per cost bucket, interpolating between trace points.

    Runs that already terminated hold their final value; the mean is defined
    on every integer cost up to the longest run.
    """
    runs = [t for t in traces if t.points]
    if not runs:
        return Trace()
    top = max(t.points[-1].cost for t in runs)
    averaged = []
    cursors = [0] * len(runs)
    for cost in range(1, top + 1):
        p_sum = r_sum = f_sum = 0.0
        for k, t in enumerate(runs):
            points = t.points
            i = cursors[k]
            while i + 1 < len(points) and points[i + 1].cost <= cost:
                i += 1
            cursors[k] = i
            at = points[i]
            if at.cost >= cost or i + 1 >= len(points):
                chosen = (at.precision, at.recall, at.f_measure)
            else:
                nxt = points[i + 1]
                span = nxt.cost - at.cost
                frac = (cost - at.cost) / span
                chosen = (
                    at.precision + frac * (nxt.precision - at.precision),
                    at.recall + frac * (nxt.recall - at.recall),
                    at.f_measure + frac * (nxt.f_measure - at.f_measure),
                )
            p_sum += chosen[0]
            r_sum += chosen[1]
            f_sum += chosen[2]
        averaged.append(
            MetricsPoint(cost, p_sum / len(runs), r_sum / len(runs), f_sum / len(runs))
        )
    combined = Trace(points=averaged)
    combined.update_times = [t.mean_update_time for t in runs]
    return combined


def replay_engine(config: ExperimentConfig, rep: int = 0) -> Engine:
    """Materialize a run against a recorded dataset named by a manifest."""
    from .files import load_dataset

    dataset = load_dataset(config.manifest)
    replay = dataset.replay()
    _, _, engine_seed = _derived_seeds(config.seed, rep)
    return Engine(
        dataset.truth.records,
        crowd=replay,
        truth=dataset.truth,
        discipline=config.discipline,
        strategy=config.strategy,
        mode=config.mode,
        seed=engine_seed,
        universe=set(replay.pairs()),
        max_batch=config.max_batch,
    )


def live_engine(config: ExperimentConfig) -> Engine:
    """Engine for a live crowd: recorded truth, no answer provider."""
    from .files import load_dataset

    dataset = load_dataset(config.manifest)
    _, _, engine_seed = _derived_seeds(config.seed, 0)
    kappa = config.discipline.kappa
    universe = None
    if kappa is not None:
        universe = candidate_pairs(
            dataset.truth, kappa, random.Random(engine_seed + 1)
        )
    return Engine(
        dataset.truth.records,
        truth=dataset.truth,
        discipline=config.discipline,
        strategy=config.strategy,
        mode=config.mode,
        seed=engine_seed,
        universe=universe,
        max_batch=config.max_batch,
    )


def run_experiment(
    config: ExperimentConfig,
    engine_factory: Optional[Callable[[ExperimentConfig, int], Engine]] = None,
) -> RunResult:
    if engine_factory is not None:
        factory = engine_factory
    elif config.source == REPLAY:
        factory = replay_engine
    elif config.source == LIVE:
        raise ConfigError("a live crowd runs through the task service, not run_experiment")
    else:
        factory = synthetic_engine
    runs = []
    for rep in range(config.repetitions):
        engine = factory(config, rep)
        runs.append(engine.run())
    return RunResult(mean_trace(runs), runs)


def load_config(path) -> ExperimentConfig:
    """Reads an experiment config from JSON, mapping keys to fields."""
    import json

    try:
        with open(path) as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    kwargs = dict(raw)
    if "discipline" in kwargs:
        if not isinstance(kwargs["discipline"], dict):
            raise ConfigError(f"{path}: 'discipline' must be an object")
        try:
            kwargs["discipline"] = DisciplineConfig(**kwargs["discipline"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    try:
        return ExperimentConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
