import json

import numpy as np
import pytest

from handrv.errors import ValidationError
from handrv.pathops import make_segment, segment_kinematic
from handrv.synthbench import (
    BenchConfig,
    MODES,
    compare_modes,
    confusable_config,
    gen_hand,
    gen_play,
    motif_anchors,
    motif_deltas,
    precision_at_k,
    rank_by_provided_scores,
    read_labels,
    write_labels,
)
from handrv.trajdata import Match, RetrievalManifest, load_embeddings

from conftest import make_traj

SMALL = BenchConfig(tasks=3, per_task=4, motifs_per_traj=2)


def dataset_equal(a, b):
    assert [t.id for t in a.trajectories] == [t.id for t in b.trajectories]
    for ta, tb in zip(a.trajectories, b.trajectories):
        np.testing.assert_array_equal(ta.track, tb.track)
        np.testing.assert_array_equal(ta.kin, tb.kin)
        np.testing.assert_array_equal(
            load_embeddings(ta).vectors, load_embeddings(tb).vectors
        )
    assert a.labels == b.labels


class TestGenPlay:
    def test_seed_determinism(self):
        dataset_equal(gen_play(SMALL, 5), gen_play(SMALL, 5))

    def test_different_seeds_differ(self):
        a, b = gen_play(SMALL, 5), gen_play(SMALL, 6)
        assert not np.array_equal(a.trajectories[0].track, b.trajectories[0].track)

    def test_noiseless_single_motif_recovery(self):
        cfg = BenchConfig(tasks=4, per_task=3, motifs_per_traj=1, sigma_p=0.0, sigma_e=0.0)
        data = gen_play(cfg, 1)
        for traj in data.trajectories:
            segs = segment_kinematic(traj, cfg.pause_eps, cfg.min_len)
            assert len(segs) == 1
            assert (traj.id, segs[0].start, segs[0].end) in data.labels

    def test_pause_recovery_multi_motif(self):
        data = gen_play(SMALL, 3)
        for traj in data.trajectories:
            segs = segment_kinematic(traj, SMALL.pause_eps, SMALL.min_len)
            assert len(segs) == SMALL.motifs_per_traj
            for seg in segs:
                assert (traj.id, seg.start, seg.end) in data.labels

    def test_default_config_segment_count(self):
        data = gen_play(BenchConfig(), 0)
        assert len(data.trajectories) == 240
        assert len(data.labels) == 720  # 6 tasks x 40 trajectories x 3 motifs

    def test_every_trajectory_validates(self):
        for traj in gen_play(SMALL, 2).trajectories:
            traj.validate()


class TestGenHand:
    def test_zero_noise_zero_offset_matches_canonical(self):
        cfg = BenchConfig(sigma_hand=0.0, sigma_e=0.0,
                          scale_jitter=(1.0, 1.0), amp_jitter=(1.0, 1.0))
        demo = gen_hand("push", 3, cfg, offset=(0.0, 0.0))
        canonical = motif_deltas("push", 36)
        np.testing.assert_allclose(np.diff(demo.track, axis=0), canonical, atol=2**-18)

    def test_offset_changes_track_not_deltas(self):
        cfg = BenchConfig(sigma_hand=0.0)
        a = gen_hand("scoop", 4, cfg, offset=(0.0, 0.0))
        b = gen_hand("scoop", 4, cfg, offset=(37.0, -12.0))
        assert not np.array_equal(a.track, b.track)
        np.testing.assert_array_equal(np.diff(a.track, axis=0), np.diff(b.track, axis=0))

    def test_unknown_motif_rejected(self):
        with pytest.raises(ValidationError, match="unknown motif"):
            gen_hand("wiggle", 0)

    def test_determinism(self):
        a, b = gen_hand("slide", 9), gen_hand("slide", 9)
        np.testing.assert_array_equal(a.track, b.track)
        np.testing.assert_array_equal(load_embeddings(a).vectors, load_embeddings(b).vectors)


class TestConfusablePair:
    def test_identical_shape_distinct_anchors(self):
        for duration in (20, 36, 50):
            np.testing.assert_array_equal(
                motif_deltas("push", duration), motif_deltas("slide", duration)
            )
        anchors = motif_anchors(BenchConfig())
        assert not np.array_equal(anchors["push"], anchors["slide"])

    def test_all_other_shapes_distinct(self):
        names = [n for n in BenchConfig().motifs if n != "slide"]
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                assert not np.array_equal(motif_deltas(a, 40), motif_deltas(b, 40))


def manifest_for(spans, k=5):
    params = {
        "M": 10, "K": k, "epsilon": 0.5, "min_len": 5, "split_even": 1,
        "use_visual_filter": False, "distance_mode": "path",
        "weight_scope": "per_query", "weight_norm": "sum_exp_minmax", "seed": 0,
    }
    matches = tuple(
        Match(
            traj_id=t, seg_start=s, seg_end=e, match_start=s, match_end=e,
            query_start=0, query_end=10, cost_path=float(i), weight=1.0,
        )
        for i, (t, s, e) in enumerate(spans)
    )
    return RetrievalManifest(query_id="hand-x", params=params, matches=matches)


class TestPrecisionAtK:
    def test_all_correct(self):
        spans = [(f"p{i}", 0, 10) for i in range(4)]
        labels = {s: "push" for s in spans}
        assert precision_at_k(manifest_for(spans), labels, "push") == 1.0

    def test_three_of_five(self):
        spans = [(f"p{i}", 0, 10) for i in range(5)]
        labels = {s: ("push" if i < 3 else "slide") for i, s in enumerate(spans)}
        assert precision_at_k(manifest_for(spans), labels, "push") == 0.6

    def test_unlabeled_match_rejected(self):
        spans = [("p0", 0, 10)]
        with pytest.raises(ValidationError, match="label"):
            precision_at_k(manifest_for(spans), {}, "push")


class TestCompareModes:
    def test_report_deterministic_and_schema(self):
        cfg = BenchConfig(tasks=3, per_task=4, motifs_per_traj=2, M=20, K=5)
        r1 = compare_modes(cfg, [0, 1, 2])
        r2 = compare_modes(cfg, [0, 1, 2])

        def strip(rep):
            return {
                "cfg": rep["cfg"],
                "seeds": rep["seeds"],
                "modes": [
                    {k: v for k, v in m.items() if k != "wallclock_s"}
                    for m in rep["modes"]
                ],
            }

        assert strip(r1) == strip(r2)
        assert json.dumps(strip(r1))  # JSON-serializable
        assert [m["name"] for m in r1["modes"]] == list(MODES)
        for m in r1["modes"]:
            assert set(m) == {"name", "precision_mean", "precision_per_seed", "wallclock_s"}
            assert len(m["precision_per_seed"]) == 3
            assert 0.0 <= m["precision_mean"] <= 1.0
            assert m["wallclock_s"] >= 0.0

    def test_requires_three_seeds(self):
        with pytest.raises(ValidationError, match="seeds"):
            compare_modes(SMALL, [0, 1])

    def test_separation_sanity_noiseless(self):
        # distinct-shape motifs only, zero noise: every path-based mode is
        # perfect
        cfg = BenchConfig(
            tasks=4, per_task=4, motifs_per_traj=2,
            sigma_p=0.0, sigma_e=0.0, sigma_hand=0.0, M=32, K=4,
        )
        report = compare_modes(cfg, [0, 1, 2], modes=("full", "path-only"))
        for mode in report["modes"]:
            assert mode["precision_mean"] == 1.0

    def test_confusable_config_hand_beats_path_only(self):
        cfg = confusable_config(per_task=6, motifs_per_traj=2, M=30, K=5)
        report = compare_modes(cfg, [0, 1, 2], modes=("full", "path-only"))
        hand, ablated = report["modes"]
        assert hand["precision_mean"] >= ablated["precision_mean"]


class TestLabelsIO:
    def test_round_trip(self, tmp_path):
        labels = {("p0", 0, 10): "push", ("p1", 3, 40): "scoop"}
        queries = {"hand-push": "push"}
        path = tmp_path / "labels.json"
        write_labels(labels, queries, path)
        back_labels, back_queries = read_labels(path)
        assert back_labels == labels
        assert back_queries == queries


class TestScoreStub:
    def test_ranks_by_given_scores(self):
        segs = [make_segment(make_traj(id=f"t{i}", n=8), 0, 8) for i in range(4)]
        picked = rank_by_provided_scores(segs, [0.9, 0.1, 0.5, 0.7], K=2)
        assert [s.traj_id for s in picked] == ["t1", "t2"]

    def test_length_mismatch_rejected(self):
        segs = [make_segment(make_traj(id="t0", n=8), 0, 8)]
        with pytest.raises(ValidationError):
            rank_by_provided_scores(segs, [0.1, 0.2], K=1)
