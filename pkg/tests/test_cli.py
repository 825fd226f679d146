import json

import pytest

from handrv.cli import dispatch
from handrv.synthbench import read_labels
from handrv.trajdata import load_dataset, read_manifest


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    code = dispatch([
        "gen-synth", "-o", str(out), "--seed", "3",
        "--tasks", "4", "--per-task", "5", "--motifs-per-traj", "2",
    ])
    assert code == 0
    return out


class TestGenSynth:
    def test_outputs_validate(self, synth_dir):
        play = load_dataset(synth_dir / "play.jsonl")
        hand = load_dataset(synth_dir / "hand.jsonl")
        assert len(play) == 20
        assert len(hand) == 4
        assert all(t.source == "hand" for t in hand)
        labels, queries = read_labels(synth_dir / "labels.json")
        assert len(labels) == 40
        assert set(queries.values()) == {t.id.removeprefix("hand-") for t in hand}


class TestSegment:
    def test_prints_table(self, synth_dir, capsys):
        assert dispatch(["segment", "--play", str(synth_dir / "play.jsonl"),
                         "--epsilon", "0.5"]) == 0
        out = capsys.readouterr().out
        assert "traj_id" in out
        assert "# 40 segments from 20 trajectories" in out

    def test_split_even_mode(self, synth_dir, capsys):
        assert dispatch(["segment", "--play", str(synth_dir / "hand.jsonl"),
                         "--split-even", "2", "--min-len", "1"]) == 0
        assert "# 8 segments from 4 trajectories" in capsys.readouterr().out


class TestRetrieve:
    def run(self, synth_dir, tmp_path, *extra):
        out = tmp_path / "out"
        code = dispatch([
            "retrieve",
            "--play", str(synth_dir / "play.jsonl"),
            "--hand", str(synth_dir / "hand.jsonl"),
            "--query-id", "hand-line-reach",
            "--M", "20", "--K", "10", "--epsilon", "0.5",
            "-o", str(out), *extra,
        ])
        return code, out / "manifest.json"

    def test_smoke_manifest_validates(self, synth_dir, tmp_path):
        code, manifest_path = self.run(synth_dir, tmp_path)
        assert code == 0
        manifest = read_manifest(manifest_path)
        assert manifest.query_id == "hand-line-reach"
        assert len(manifest.matches) == 10

    def test_flags_round_trip_into_params(self, synth_dir, tmp_path):
        code, manifest_path = self.run(
            synth_dir, tmp_path,
            "--min-len", "4", "--split-even", "1", "--seed", "11",
            "--weight-scope", "union", "--distance-mode", "path",
        )
        assert code == 0
        params = read_manifest(manifest_path).params
        assert params == {
            "M": 20, "K": 10, "epsilon": 0.5, "min_len": 4, "split_even": 1,
            "use_visual_filter": True, "distance_mode": "path",
            "weight_scope": "union", "weight_norm": "sum_exp_minmax", "seed": 11,
        }

    def test_no_visual_filter_recorded(self, synth_dir, tmp_path):
        code, manifest_path = self.run(synth_dir, tmp_path, "--no-visual-filter")
        assert code == 0
        manifest = read_manifest(manifest_path)
        assert manifest.params["use_visual_filter"] is False
        assert all(m.cost_visual is None for m in manifest.matches)

    def test_k_exceeding_m_is_usage_error(self, synth_dir, tmp_path, capsys):
        code = dispatch([
            "retrieve",
            "--play", str(synth_dir / "play.jsonl"),
            "--hand", str(synth_dir / "hand.jsonl"),
            "--K", "50", "--M", "25",
            "-o", str(tmp_path / "x"),
        ])
        assert code == 2

    def test_threads_do_not_change_bytes(self, synth_dir, tmp_path):
        outputs = []
        for threads in ("1", "4"):
            out = tmp_path / f"t{threads}"
            code = dispatch([
                "retrieve",
                "--play", str(synth_dir / "play.jsonl"),
                "--hand", str(synth_dir / "hand.jsonl"),
                "--query-id", "hand-scoop",
                "--M", "20", "--K", "10", "--epsilon", "0.5",
                "--threads", threads,
                "-o", str(out),
            ])
            assert code == 0
            outputs.append((out / "manifest.json").read_bytes())
        assert outputs[0] == outputs[1]

    def test_ambiguous_hand_file_is_validation_error(self, synth_dir, tmp_path):
        code = dispatch([
            "retrieve",
            "--play", str(synth_dir / "play.jsonl"),
            "--hand", str(synth_dir / "hand.jsonl"),
            "-o", str(tmp_path / "x"),
        ])
        assert code == 1

    def test_missing_file_is_validation_error(self, synth_dir, tmp_path):
        code = dispatch([
            "retrieve", "--play", str(synth_dir / "nope.jsonl"),
            "--hand", str(synth_dir / "hand.jsonl"), "-o", str(tmp_path / "x"),
        ])
        assert code == 1


class TestEval:
    def test_writes_report(self, synth_dir, tmp_path):
        out = tmp_path / "ev"
        code = dispatch([
            "eval",
            "--play", str(synth_dir / "play.jsonl"),
            "--hand", str(synth_dir / "hand.jsonl"),
            "--labels", str(synth_dir / "labels.json"),
            "--M", "20", "--K", "5", "--epsilon", "0.5",
            "-o", str(out),
        ])
        assert code == 0
        report = json.loads((out / "bench-report.json").read_text())
        assert {m["name"] for m in report["modes"]} == {"full", "path-only", "embedding", "visual-only"}
        for m in report["modes"]:
            assert 0.0 <= m["precision_mean"] <= 1.0


class TestBench:
    def test_writes_report_and_chart(self, tmp_path):
        out = tmp_path / "bench"
        code = dispatch([
            "bench", "-o", str(out), "--seeds", "0,1,2",
            "--tasks", "3", "--per-task", "3", "--motifs-per-traj", "2",
            "--M", "15", "--K", "5",
        ])
        assert code == 0
        report = json.loads((out / "bench-report.json").read_text())
        assert report["seeds"] == [0, 1, 2]
        svg = (out / "bench-report.svg").read_text()
        assert svg.startswith("<svg") and "full" in svg


class TestExportSvg:
    def test_writes_overlay(self, synth_dir, tmp_path):
        out = tmp_path / "out"
        code = dispatch([
            "retrieve",
            "--play", str(synth_dir / "play.jsonl"),
            "--hand", str(synth_dir / "hand.jsonl"),
            "--query-id", "hand-scoop",
            "--M", "20", "--K", "5", "--epsilon", "0.5",
            "-o", str(out),
        ])
        assert code == 0
        svg_path = tmp_path / "overlay.svg"
        code = dispatch([
            "export-svg",
            "--manifest", str(out / "manifest.json"),
            "--play", str(synth_dir / "play.jsonl"),
            "--hand", str(synth_dir / "hand.jsonl"),
            "-o", str(svg_path),
        ])
        assert code == 0
        content = svg_path.read_text()
        assert content.startswith("<svg")
        assert "query" in content


class TestUsageErrors:
    def test_unknown_command(self):
        assert dispatch(["frobnicate"]) == 2

    def test_no_command(self):
        assert dispatch([]) == 2

    def test_bad_distance_mode(self, synth_dir, tmp_path):
        code = dispatch([
            "retrieve", "--play", "x", "--hand", "y",
            "--distance-mode", "psychic", "-o", str(tmp_path),
        ])
        assert code == 2
