"""Command line behavior: subcommands, formats, exit codes."""

import json

from crowdpath.cli import main
from crowdpath.files import read_trace, write_clustering, write_truth
from crowdpath.clustering import Clustering


class TestSimulate:
    def test_perfect_run_writes_trace(self, tmp_path, capsys):
        out = tmp_path / "trace.tsv"
        code = main(
            [
                "simulate", "--records", "10", "--seed", "4",
                "--discipline", "fer", "--strategy", "hs", "--out", str(out),
            ]
        )
        assert code == 0
        rows = read_trace(out)
        assert rows[-1][3] == 1.0
        shown = capsys.readouterr().out
        assert "f: 1.0000" in shown
        assert f"cost: {rows[-1][0]}" in shown

    def test_uniform_entities_flag(self, tmp_path, capsys):
        code = main(
            ["simulate", "--records", "8", "--entities", "2", "--seed", "1"]
        )
        assert code == 0
        assert "f: 1.0000" in capsys.readouterr().out

    def test_zipf_and_entities_conflict(self, capsys):
        try:
            main(["simulate", "--zipf", "--entities", "3"])
        except SystemExit as exc:
            assert exc.code == 2
        else:
            raise AssertionError("argparse should reject the combination")

    def test_reps_average(self, tmp_path):
        out = tmp_path / "trace.tsv"
        assert main(
            [
                "simulate", "--records", "8", "--reps", "3",
                "--seed", "2", "--out", str(out),
            ]
        ) == 0
        assert read_trace(out)


class TestRun:
    def test_config_file_run(self, tmp_path, capsys):
        out = tmp_path / "trace.tsv"
        config = {
            "records": 10,
            "seed": 5,
            "repetitions": 2,
            "discipline": {"mode": "feer", "quorum": 2, "edge_budget": 6},
            "strategy": "ers",
            "trace_out": str(out),
        }
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config))
        assert main(["run", "--config", str(path)]) == 0
        assert read_trace(out)[-1][3] == 1.0

    def test_unknown_key_is_config_error(self, tmp_path, capsys):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"recordz": 10}))
        assert main(["run", "--config", str(path)]) == 1
        assert "config error" in capsys.readouterr().err

    def test_bad_discipline_is_config_error(self, tmp_path, capsys):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"discipline": {"mode": "nope"}}))
        assert main(["run", "--config", str(path)]) == 1

    def test_missing_votes_file_is_data_error(self, tmp_path, capsys):
        manifest = tmp_path / "manifest.json"
        manifest.write_text(
            json.dumps({"truth_file": "truth.csv", "votes_file": "votes.csv"})
        )
        path = tmp_path / "config.json"
        path.write_text(
            json.dumps({"source": "replay", "manifest": str(manifest)})
        )
        assert main(["run", "--config", str(path)]) == 2
        assert "data error" in capsys.readouterr().err

    def test_replay_source_runs_from_files(self, tmp_path, capsys):
        write_truth(tmp_path / "truth.csv", {"a": "e1", "b": "e1", "c": "e2"})
        votes = []
        seq = 0
        for pair, answer in (
            (("a", "b"), 1), (("a", "c"), 0), (("b", "c"), 0),
        ):
            for _ in range(3):
                seq += 1
                votes.append(f"{pair[0]},{pair[1]},w{seq},{answer},{seq}")
        (tmp_path / "votes.csv").write_text("\n".join(votes) + "\n")
        (tmp_path / "manifest.json").write_text(
            json.dumps({"truth_file": "truth.csv", "votes_file": "votes.csv"})
        )
        config = tmp_path / "config.json"
        config.write_text(
            json.dumps(
                {"source": "replay", "manifest": str(tmp_path / "manifest.json")}
            )
        )
        assert main(["run", "--config", str(config)]) == 0
        assert "f: 1.0000" in capsys.readouterr().out


class TestEvaluate:
    def test_scores_clustering_against_truth(self, tmp_path, capsys):
        write_truth(tmp_path / "truth.csv", {"a": "e1", "b": "e1", "c": "e2"})
        write_clustering(
            tmp_path / "clusters.csv", Clustering([{"a", "b", "c"}])
        )
        code = main(
            [
                "evaluate",
                "--clustering", str(tmp_path / "clusters.csv"),
                "--truth", str(tmp_path / "truth.csv"),
            ]
        )
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "precision\trecall\tf"
        p, r, f = (float(x) for x in lines[1].split("\t"))
        assert abs(p - 1 / 3) < 1e-6
        assert r == 1.0
        assert abs(f - 0.5) < 1e-6

    def test_unknown_record_is_data_error(self, tmp_path, capsys):
        write_truth(tmp_path / "truth.csv", {"a": "e1"})
        write_clustering(tmp_path / "clusters.csv", Clustering([{"a", "zz"}]))
        assert main(
            [
                "evaluate",
                "--clustering", str(tmp_path / "clusters.csv"),
                "--truth", str(tmp_path / "truth.csv"),
            ]
        ) == 2
