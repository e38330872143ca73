"""Reading and writing the on-disk dataset and result formats.

Votes and ground truth are plain headerless CSV; a dataset manifest is a
JSON file tying the two together with optional statistics that are checked
against the actual contents on load. Traces are TSV with a fixed header.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .clustering import Clustering
from .crowd import GroundTruth, VoteReplay
from .errors import DataError
from .graph import pair_key

TRACE_HEADER = ("cost", "precision", "recall", "f")


def _open_rows(path) -> list:
    try:
        with open(path, newline="") as handle:
            return [row for row in csv.reader(handle) if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def read_votes(path) -> list:
    """Loads vote rows `record_i,record_j,worker_id,answer,seq`.

    Rows come back as (record_i, record_j, worker_id, answer, seq) tuples
    with answer an int in {0, 1} and seq an int; order is as recorded.
    """
    votes = []
    for lineno, row in enumerate(_open_rows(path), start=1):
        if len(row) != 5:
            raise DataError(f"{path}:{lineno}: expected 5 fields, got {len(row)}")
        a, b, worker, answer, seq = (part.strip() for part in row)
        if answer not in ("0", "1"):
            raise DataError(f"{path}:{lineno}: answer must be 0 or 1, got {answer!r}")
        try:
            seq_no = int(seq)
        except ValueError:
            raise DataError(f"{path}:{lineno}: seq must be an integer, got {seq!r}")
        if a == b:
            raise DataError(f"{path}:{lineno}: vote pairs a record with itself")
        votes.append((a, b, worker, int(answer), seq_no))
    seqs = [v[4] for v in votes]
    if any(later <= earlier for earlier, later in zip(seqs, seqs[1:])):
        raise DataError(f"{path}: seq values must increase monotonically")
    return votes


def write_votes(path, votes: Iterable[tuple]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        for a, b, worker, answer, seq in votes:
            writer.writerow([a, b, worker, int(bool(answer)), seq])


def read_truth(path) -> GroundTruth:
    """Loads a `record_id,entity_id` file as a ground truth assignment."""
    assignment = {}
    for lineno, row in enumerate(_open_rows(path), start=1):
        if len(row) != 2:
            raise DataError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        record, entity = (part.strip() for part in row)
        if record in assignment:
            raise DataError(f"{path}:{lineno}: record {record!r} listed twice")
        assignment[record] = entity
    return GroundTruth(assignment)


def write_truth(path, truth) -> None:
    assignment = dict(truth.items()) if isinstance(truth, GroundTruth) else dict(truth)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        for record in sorted(assignment, key=str):
            writer.writerow([record, assignment[record]])


def read_clustering(path) -> Clustering:
    """Loads a `record_id,cluster_id` file; cluster ids only group rows."""
    groups: dict = {}
    seen = set()
    for lineno, row in enumerate(_open_rows(path), start=1):
        if len(row) != 2:
            raise DataError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        record, cluster = (part.strip() for part in row)
        if record in seen:
            raise DataError(f"{path}:{lineno}: record {record!r} listed twice")
        seen.add(record)
        groups.setdefault(cluster, []).append(record)
    return Clustering(groups.values())


def write_clustering(path, clustering: Clustering) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        for label, cluster in enumerate(clustering.clusters):
            for record in sorted(cluster, key=str):
                writer.writerow([record, f"c{label}"])


@dataclass(frozen=True)
class DatasetManifest:
    """Names the files of one dataset plus validation statistics.

    Statistics are optional; any of records/entities/pairs/votes that are
    present must match the loaded data exactly.
    """

    truth_file: str
    votes_file: Optional[str] = None
    payload_base_url: Optional[str] = None
    statistics: Mapping = field(default_factory=dict)
    root: Optional[Path] = None

    def resolve(self, name: Optional[str]) -> Optional[Path]:
        if name is None:
            return None
        path = Path(name)
        if not path.is_absolute() and self.root is not None:
            path = self.root / path
        return path


def read_manifest(path) -> DatasetManifest:
    try:
        with open(path) as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise DataError(f"{path}: manifest must be a JSON object")
    if "truth_file" not in raw:
        raise DataError(f"{path}: manifest is missing 'truth_file'")
    stats = raw.get("statistics", {})
    if not isinstance(stats, dict):
        raise DataError(f"{path}: 'statistics' must be an object")
    return DatasetManifest(
        truth_file=raw["truth_file"],
        votes_file=raw.get("votes_file"),
        payload_base_url=raw.get("payload_base_url"),
        statistics=stats,
        root=Path(path).resolve().parent,
    )


def write_manifest(path, manifest: DatasetManifest) -> None:
    payload = {"truth_file": manifest.truth_file}
    if manifest.votes_file is not None:
        payload["votes_file"] = manifest.votes_file
    if manifest.payload_base_url is not None:
        payload["payload_base_url"] = manifest.payload_base_url
    if manifest.statistics:
        payload["statistics"] = dict(manifest.statistics)
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


@dataclass(frozen=True)
class Dataset:
    truth: GroundTruth
    votes: list
    manifest: DatasetManifest

    def replay(self) -> VoteReplay:
        return VoteReplay(self.votes)


def load_dataset(manifest_path) -> Dataset:
    """Loads truth and votes named by a manifest, checking its statistics."""
    manifest = read_manifest(manifest_path)
    truth = read_truth(manifest.resolve(manifest.truth_file))
    votes_path = manifest.resolve(manifest.votes_file)
    votes = read_votes(votes_path) if votes_path is not None else []
    unknown = {v[0] for v in votes} | {v[1] for v in votes}
    unknown -= set(truth.records)
    if unknown:
        sample = sorted(unknown, key=str)[:3]
        raise DataError(f"votes reference records absent from truth: {sample}")
    actual = {
        "records": len(truth.records),
        "entities": len(truth.entities()),
        "pairs": len({pair_key(v[0], v[1]) for v in votes}),
        "votes": len(votes),
    }
    for key, expected in manifest.statistics.items():
        if key not in actual:
            raise DataError(f"unknown statistic {key!r} in manifest")
        if actual[key] != expected:
            raise DataError(
                f"statistic {key!r} mismatch: manifest says {expected}, data has {actual[key]}"
            )
    return Dataset(truth=truth, votes=votes, manifest=manifest)


def write_trace(path, points: Iterable) -> None:
    """Writes metric points as TSV under the `cost precision recall f` header."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, delimiter="\t")
        writer.writerow(TRACE_HEADER)
        for point in points:
            writer.writerow(
                [point.cost, point.precision, point.recall, point.f_measure]
            )


def read_trace(path) -> list:
    rows = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle, delimiter="\t")
        header = next(reader, None)
        if header is None or tuple(header) != TRACE_HEADER:
            raise DataError(f"{path}: expected trace header {' '.join(TRACE_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 fields")
            try:
                rows.append((int(row[0]), float(row[1]), float(row[2]), float(row[3])))
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
    return rows
