"""File format round trips and manifest validation."""

import json
import random

import pytest

from crowdpath.clustering import Clustering
from crowdpath.crowd import GroundTruth, zipf_truth
from crowdpath.engine import MetricsPoint
from crowdpath.errors import DataError
from crowdpath.files import (
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

VOTES = [
    ("r1", "r2", "w1", 1, 1),
    ("r2", "r3", "w2", 0, 2),
    ("r1", "r2", "w3", 1, 3),
]


class TestVotesFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "votes.csv"
        write_votes(path, VOTES)
        assert read_votes(path) == VOTES

    def test_plain_csv_rows(self, tmp_path):
        path = tmp_path / "votes.csv"
        write_votes(path, VOTES)
        lines = path.read_text().splitlines()
        assert lines[0] == "r1,r2,w1,1,1"
        assert len(lines) == 3

    def test_bad_answer_rejected(self, tmp_path):
        path = tmp_path / "votes.csv"
        path.write_text("r1,r2,w1,2,1\n")
        with pytest.raises(DataError):
            read_votes(path)

    def test_wrong_field_count_rejected(self, tmp_path):
        path = tmp_path / "votes.csv"
        path.write_text("r1,r2,1\n")
        with pytest.raises(DataError):
            read_votes(path)

    def test_non_monotonic_seq_rejected(self, tmp_path):
        path = tmp_path / "votes.csv"
        path.write_text("r1,r2,w1,1,5\nr2,r3,w1,0,4\n")
        with pytest.raises(DataError):
            read_votes(path)

    def test_self_pair_rejected(self, tmp_path):
        path = tmp_path / "votes.csv"
        path.write_text("r1,r1,w1,1,1\n")
        with pytest.raises(DataError):
            read_votes(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            read_votes(tmp_path / "absent.csv")


class TestTruthFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "truth.csv"
        truth = GroundTruth({"r1": "e1", "r2": "e1", "r3": "e2"})
        write_truth(path, truth)
        assert read_truth(path) == truth

    def test_random_round_trips(self, tmp_path):
        for seed in range(10):
            truth = zipf_truth(30, rng=random.Random(seed))
            path = tmp_path / f"truth{seed}.csv"
            write_truth(path, truth)
            assert read_truth(path) == truth

    def test_duplicate_record_rejected(self, tmp_path):
        path = tmp_path / "truth.csv"
        path.write_text("r1,e1\nr1,e2\n")
        with pytest.raises(DataError):
            read_truth(path)


class TestClusteringFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "clusters.csv"
        clustering = Clustering([{"r1", "r2"}, {"r3"}])
        write_clustering(path, clustering)
        loaded = read_clustering(path)
        assert loaded.as_sets() == clustering.as_sets()

    def test_labels_group_rows(self, tmp_path):
        path = tmp_path / "clusters.csv"
        path.write_text("a,x\nb,x\nc,y\n")
        assert read_clustering(path).as_sets() == {
            frozenset({"a", "b"}),
            frozenset({"c"}),
        }


class TestManifest:
    def _dataset(self, tmp_path, statistics):
        write_truth(tmp_path / "truth.csv", {"r1": "e1", "r2": "e1", "r3": "e2"})
        write_votes(tmp_path / "votes.csv", VOTES)
        manifest = DatasetManifest(
            truth_file="truth.csv",
            votes_file="votes.csv",
            payload_base_url="https://records.example/items/",
            statistics=statistics,
        )
        write_manifest(tmp_path / "manifest.json", manifest)
        return tmp_path / "manifest.json"

    def test_load_with_matching_statistics(self, tmp_path):
        path = self._dataset(
            tmp_path, {"records": 3, "entities": 2, "pairs": 2, "votes": 3}
        )
        dataset = load_dataset(path)
        assert dataset.truth.records == ["r1", "r2", "r3"]
        assert len(dataset.votes) == 3
        assert dataset.manifest.payload_base_url == "https://records.example/items/"

    def test_statistic_mismatch_rejected(self, tmp_path):
        path = self._dataset(tmp_path, {"votes": 99})
        with pytest.raises(DataError, match="votes"):
            load_dataset(path)

    def test_unknown_statistic_rejected(self, tmp_path):
        path = self._dataset(tmp_path, {"weight": 1})
        with pytest.raises(DataError, match="weight"):
            load_dataset(path)

    def test_votes_must_reference_truth_records(self, tmp_path):
        write_truth(tmp_path / "truth.csv", {"r1": "e1"})
        write_votes(tmp_path / "votes.csv", [("r1", "zz", "w1", 1, 1)])
        write_manifest(
            tmp_path / "manifest.json",
            DatasetManifest(truth_file="truth.csv", votes_file="votes.csv"),
        )
        with pytest.raises(DataError, match="zz"):
            load_dataset(tmp_path / "manifest.json")

    def test_votes_file_optional(self, tmp_path):
        write_truth(tmp_path / "truth.csv", {"r1": "e1"})
        write_manifest(
            tmp_path / "manifest.json", DatasetManifest(truth_file="truth.csv")
        )
        dataset = load_dataset(tmp_path / "manifest.json")
        assert dataset.votes == []

    def test_relative_paths_resolve_against_manifest(self, tmp_path):
        sub = tmp_path / "data"
        sub.mkdir()
        write_truth(sub / "truth.csv", {"r1": "e1"})
        write_manifest(sub / "manifest.json", DatasetManifest(truth_file="truth.csv"))
        assert load_dataset(sub / "manifest.json").truth.records == ["r1"]

    def test_missing_truth_key_rejected(self, tmp_path):
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps({"votes_file": "votes.csv"}))
        with pytest.raises(DataError, match="truth_file"):
            read_manifest(path)

    def test_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "manifest.json"
        path.write_text("{not json")
        with pytest.raises(DataError):
            read_manifest(path)

    def test_replay_consumes_in_seq_order(self, tmp_path):
        path = self._dataset(tmp_path, {})
        replay = load_dataset(path).replay()
        assert replay.answer(("r1", "r2")) is True
        assert replay.answer(("r1", "r2")) is True
        assert replay.answer(("r2", "r3")) is False


class TestTraceFile:
    def test_round_trip(self, tmp_path):
        points = [
            MetricsPoint(cost=1, precision=1.0, recall=0.25, f_measure=0.4),
            MetricsPoint(cost=2, precision=0.5, recall=0.5, f_measure=0.5),
        ]
        path = tmp_path / "trace.tsv"
        write_trace(path, points)
        assert read_trace(path) == [(1, 1.0, 0.25, 0.4), (2, 0.5, 0.5, 0.5)]

    def test_header_line(self, tmp_path):
        path = tmp_path / "trace.tsv"
        write_trace(path, [])
        assert path.read_text().splitlines()[0] == "cost\tprecision\trecall\tf"

    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "trace.tsv"
        path.write_text("cost\tp\tr\tf\n")
        with pytest.raises(DataError):
            read_trace(path)
