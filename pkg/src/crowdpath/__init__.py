"""Crowdsourced entity resolution over noisy pairwise votes.

Evidence lives in a votes graph; per-pair positive/negative path scores are
maintained incrementally and turned into yes/no/unknown decisions, a
cautious clustering, and a priority queue of the next most useful
questions. Crowds can be synthetic, replayed from files, or live over HTTP.
"""

from .clustering import Clustering, resolve
from .crowd import (
    GroundTruth,
    NoiseModel,
    SimilarityPrefilter,
    SyntheticCrowd,
    VoteReplay,
    jaccard,
    uniform_truth,
    zipf_truth,
)
from .engine import (
    Engine,
    ExperimentConfig,
    MetricsPoint,
    RunResult,
    Trace,
    candidate_pairs,
    full_pairs,
    load_config,
    mean_trace,
    metrics,
    run_experiment,
)
from .errors import ConfigError, CrowdPathError, DataError
from .files import (
    DatasetManifest,
    load_dataset,
    read_clustering,
    read_manifest,
    read_trace,
    read_truth,
    read_votes,
    write_clustering,
    write_manifest,
    write_trace,
    write_truth,
    write_votes,
)
from .graph import VoteEdge, VotesGraph, pair_key
from .minmax import (
    NO,
    UNKNOWN,
    YES,
    PathScoreMatrix,
    Quorums,
    brute_force_scores,
    decide,
    phi,
    update,
)
from .strategies import (
    CER,
    ERS,
    FEER,
    FER,
    HS,
    URS,
    DisciplineConfig,
    TaskQueue,
)

__version__ = "0.1.0"

__all__ = [
    "CER",
    "Clustering",
    "ConfigError",
    "CrowdPathError",
    "DataError",
    "DatasetManifest",
    "DisciplineConfig",
    "ERS",
    "Engine",
    "ExperimentConfig",
    "FEER",
    "FER",
    "GroundTruth",
    "HS",
    "MetricsPoint",
    "NO",
    "NoiseModel",
    "PathScoreMatrix",
    "Quorums",
    "RunResult",
    "SimilarityPrefilter",
    "SyntheticCrowd",
    "TaskQueue",
    "Trace",
    "UNKNOWN",
    "URS",
    "VoteEdge",
    "VoteReplay",
    "VotesGraph",
    "YES",
    "brute_force_scores",
    "candidate_pairs",
    "decide",
    "full_pairs",
    "jaccard",
    "load_config",
    "load_dataset",
    "mean_trace",
    "metrics",
    "pair_key",
    "phi",
    "read_clustering",
    "read_manifest",
    "read_trace",
    "read_truth",
    "read_votes",
    "resolve",
    "run_experiment",
    "uniform_truth",
    "update",
    "write_clustering",
    "write_manifest",
    "write_trace",
    "write_truth",
    "write_votes",
    "zipf_truth",
]
