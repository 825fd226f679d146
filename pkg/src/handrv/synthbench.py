"""Synthetic labeled benchmark for retrieval relevance.

Play trajectories are built by chaining parametric 2D motion motifs with
short low-motion pauses between them, so kinematic segmentation can recover
the motif boundaries exactly. Every frame carries a synthetic embedding:
the motif's anchor vector plus correlated noise (a per-segment bias shared
by all frames of a segment, modelling consistent appearance, plus small
per-frame jitter). Query demos reuse a motif with its own noise, a global
position offset, and a stronger embedding bias that stands in for the
visual gap between a human hand and a robot gripper.

Two motifs (``push`` and ``slide``) share an identical motion shape but
distinct anchors, so path-only retrieval provably confuses them while the
visual filter can tell them apart.

Tracks are snapped to a 2**-20 px grid so that adding an integer offset to
a track is exact in floating point and translation-invariance tests can
compare manifests byte for byte.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError
from .pathops import Segment, segment_kinematic, split_even
from .retrieval import RetrievalParams, retrieve
from .trajdata import EmbeddingTable, RetrievalManifest, Trajectory
from .visfilter import filter_top_m

GRID = 2.0**20  # track quantization: dyadic grid keeps integer shifts exact

MOTIF_NAMES = ("line-reach", "arc-press", "pick-lift-place", "scoop", "push", "slide")

# push and slide intentionally share one shape; see _motif_velocity.
_CONFUSABLE_PAIR = ("push", "slide")

_BASE_DURATION = {
    "line-reach": 36,
    "arc-press": 44,
    "pick-lift-place": 48,
    "scoop": 40,
    "push": 36,
    "slide": 36,
}


def _motif_velocity(name: str, t: np.ndarray) -> np.ndarray:
    """Canonical velocity profile sampled at phases t in [0, 1).

    Speeds sit well above the delta-level track noise so shape differences,
    not jitter, dominate alignment costs; directions are chosen so no two
    distinct motifs share a long stretch of similar velocity.
    """
    if name == "line-reach":
        v = np.empty((t.size, 2))
        v[:, 0] = 14.0 * np.cos(0.7)
        v[:, 1] = 14.0 * np.sin(0.7)
        return v
    if name == "arc-press":
        v = np.empty((t.size, 2))
        sweep = t < 0.7
        theta = np.deg2rad(170.0) - (t[sweep] / 0.7) * np.deg2rad(75.0)
        v[sweep, 0] = 13.0 * np.cos(theta)
        v[sweep, 1] = 13.0 * np.sin(theta)
        v[~sweep, 0] = 0.0
        v[~sweep, 1] = 12.0
        return v
    if name == "pick-lift-place":
        v = np.empty((t.size, 2))
        for i, phase in enumerate(t):
            if phase < 0.25:
                v[i] = (0.0, 14.0)  # descend
            elif phase < 0.5:
                v[i] = (0.0, -15.0)  # lift
            elif phase < 0.75:
                v[i] = (7.0, -2.0)  # carry
            else:
                v[i] = (0.0, 14.0)  # place
        return v
    if name == "scoop":
        theta = -3 * np.pi / 4 + t * (np.pi / 2)
        return 15.0 * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    if name in _CONFUSABLE_PAIR:
        v = np.empty((t.size, 2))
        v[:, 0] = 14.0
        v[:, 1] = 0.0
        return v
    raise ValidationError(f"unknown motif {name!r}")


def motif_deltas(name: str, duration: int) -> np.ndarray:
    """Per-frame deltas of one motif instance with `duration` steps."""
    if duration < 1:
        raise ValidationError(f"motif duration must be >= 1, got {duration}")
    t = np.arange(duration) / duration
    return _motif_velocity(name, t)


@dataclass(frozen=True, kw_only=True)
class BenchConfig:
    """Benchmark shape and noise knobs. Defaults match the standard run."""

    tasks: int = 6
    per_task: int = 40
    motifs_per_traj: int = 3
    sigma_p: float = 2.0  # track noise, px
    sigma_e: float = 1.0  # embedding noise unit
    K: int = 25
    M: int = 100
    min_len: int = 5
    fps: float = 5.0
    dim: int = 16
    anchor_scale: float = 4.5
    dominant_prob: float = 0.5
    pause_eps: float = 0.5
    pause_frames: tuple[int, int] = (3, 8)
    scale_jitter: tuple[float, float] = (0.85, 1.15)
    amp_jitter: tuple[float, float] = (0.9, 1.1)
    bias_play: float = 1.0  # per-segment embedding bias, in sigma_e units
    jit_play: float = 0.3  # per-frame embedding jitter
    bias_hand: float = 2.0  # per-demo bias: the hand/robot appearance gap
    jit_hand: float = 0.6
    sigma_hand: float = 2.0  # query track noise, px
    hand_offset_range: float = 60.0
    motifs: tuple[str, ...] = MOTIF_NAMES
    query_motifs: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if not (1 <= self.tasks <= len(self.motifs)):
            raise ValidationError(f"tasks must be in [1, {len(self.motifs)}]")
        for value in (self.per_task, self.motifs_per_traj):
            if value < 1:
                raise ValidationError("per_task and motifs_per_traj must be >= 1")
        if self.sigma_p < 0 or self.sigma_e < 0:
            raise ValidationError("noise scales must be >= 0")

    @property
    def active_motifs(self) -> tuple[str, ...]:
        return self.motifs[: self.tasks]

    def to_dict(self) -> dict:
        doc = {
            "tasks": self.tasks,
            "per_task": self.per_task,
            "motifs_per_traj": self.motifs_per_traj,
            "sigma_p": self.sigma_p,
            "sigma_e": self.sigma_e,
            "K": self.K,
            "M": self.M,
            "min_len": self.min_len,
            "pause_eps": self.pause_eps,
            "anchor_scale": self.anchor_scale,
            "motifs": list(self.active_motifs),
        }
        if self.query_motifs is not None:
            doc["query_motifs"] = list(self.query_motifs)
        return doc


def confusable_config(**overrides) -> BenchConfig:
    """Default config with queries restricted to the identical-shape pair."""
    return BenchConfig(query_motifs=_CONFUSABLE_PAIR, **overrides)


def motif_anchors(cfg: BenchConfig) -> dict[str, np.ndarray]:
    """One axis-aligned anchor vector per motif; pause frames use zeros."""
    anchors = {}
    for i, name in enumerate(cfg.motifs):
        vec = np.zeros(cfg.dim)
        vec[i % cfg.dim] = cfg.anchor_scale
        anchors[name] = vec
    return anchors


@dataclass
class LabeledDataset:
    """Generated play trajectories plus ground-truth motif labels per segment."""

    trajectories: list[Trajectory]
    labels: dict[tuple[str, int, int], str]


def _quantize(track: np.ndarray) -> np.ndarray:
    return np.round(track * GRID) / GRID


def _embed(
    anchor: np.ndarray, n_frames: int, bias_sd: float, jit_sd: float, rng
) -> np.ndarray:
    vectors = np.tile(anchor, (n_frames, 1))
    if bias_sd > 0:
        vectors = vectors + rng.normal(0.0, bias_sd, anchor.shape[0])
    if jit_sd > 0:
        vectors = vectors + rng.normal(0.0, jit_sd, (n_frames, anchor.shape[0]))
    # pass through f32 so in-memory tables match blob round-trips bit for bit
    return vectors.astype(np.float32).astype(np.float64)


def _instance_deltas(name: str, cfg: BenchConfig, rng) -> np.ndarray:
    lo, hi = cfg.scale_jitter
    duration = max(2, int(round(_BASE_DURATION[name] * rng.uniform(lo, hi))))
    amp = rng.uniform(*cfg.amp_jitter)
    return motif_deltas(name, duration) * amp


def gen_play(cfg: BenchConfig, seed: int) -> LabeledDataset:
    """Generate the labeled play dataset for one seed.

    Each trajectory chains ``motifs_per_traj`` motif instances (biased toward
    the trajectory's dominant task) separated by below-threshold pauses;
    the kin channel is written so segmentation at ``cfg.pause_eps`` recovers
    exactly the generated motif spans.
    """
    rng = np.random.default_rng(seed)
    motifs = cfg.active_motifs
    anchors = motif_anchors(cfg)
    trajectories: list[Trajectory] = []
    labels: dict[tuple[str, int, int], str] = {}

    for traj_idx in range(cfg.tasks * cfg.per_task):
        dominant = motifs[traj_idx // cfg.per_task]
        traj_id = f"play-{traj_idx:04d}"
        picks = [
            dominant if rng.random() < cfg.dominant_prob else motifs[rng.integers(len(motifs))]
            for _ in range(cfg.motifs_per_traj)
        ]

        pos = rng.uniform(150.0, 450.0, 2)
        points: list[np.ndarray] = []
        kin: list[float] = []
        emb_rows: list[np.ndarray] = []
        spans: list[tuple[int, int, str]] = []

        for slot, name in enumerate(picks):
            if slot > 0:
                # pause: the tracked point holds position, kin sits below the
                # threshold, embeddings fall back to the idle anchor
                gap = int(rng.integers(cfg.pause_frames[0], cfg.pause_frames[1] + 1))
                for _ in range(gap):
                    points.append(pos.copy())
                    kin.append(float(rng.uniform(0.0, 0.4 * cfg.pause_eps)))
                emb_rows.append(
                    _embed(np.zeros(cfg.dim), gap, cfg.bias_play * cfg.sigma_e,
                           cfg.jit_play * cfg.sigma_e, rng)
                )
            deltas = _instance_deltas(name, cfg, rng)
            start = len(points)
            points.append(pos.copy())
            for d in deltas:
                pos = pos + d
                points.append(pos.copy())
            speeds = np.linalg.norm(deltas, axis=1)
            kin.extend(float(s) for s in speeds)
            kin.append(float(speeds[-1]))
            n_frames = len(deltas) + 1
            emb_rows.append(
                _embed(anchors[name], n_frames, cfg.bias_play * cfg.sigma_e,
                       cfg.jit_play * cfg.sigma_e, rng)
            )
            spans.append((start, start + n_frames, name))

        track = np.asarray(points)
        if cfg.sigma_p > 0:
            track = track + rng.normal(0.0, cfg.sigma_p, track.shape)
        track = _quantize(track)
        kin_arr = np.asarray(kin)
        vectors = np.vstack(emb_rows)
        assert kin_arr.shape[0] == track.shape[0] == vectors.shape[0]
        traj = Trajectory(
            id=traj_id,
            source="play",
            fps=cfg.fps,
            track=track,
            kin=kin_arr,
            embeddings=EmbeddingTable(stride=1, dim=cfg.dim, vectors=vectors),
        )
        traj.validate()
        trajectories.append(traj)
        for s, e, name in spans:
            labels[(traj_id, s, e)] = name

    return LabeledDataset(trajectories=trajectories, labels=labels)


def gen_hand(
    motif: str,
    seed: int,
    cfg: BenchConfig = BenchConfig(),
    offset: Optional[tuple[float, float]] = None,
) -> Trajectory:
    """Generate one query demonstration of ``motif``.

    The track is the motif shape plus a global viewpoint offset (drawn from
    the seed when not given) and query-side noise; embeddings carry the
    stronger per-demo bias that models the hand/robot appearance gap.

    Raises:
        ValidationError: unknown motif name.
    """
    if motif not in cfg.motifs:
        raise ValidationError(f"unknown motif {motif!r}; have {list(cfg.motifs)}")
    rng = np.random.default_rng(seed)
    deltas = _instance_deltas(motif, cfg, rng)
    drawn_offset = rng.uniform(-cfg.hand_offset_range, cfg.hand_offset_range, 2)
    if offset is None:
        off = drawn_offset
    else:
        off = np.asarray(offset, dtype=np.float64)
    track = np.vstack([np.zeros(2), np.cumsum(deltas, axis=0)]) + np.asarray([300.0, 300.0]) + off
    if cfg.sigma_hand > 0:
        track = track + rng.normal(0.0, cfg.sigma_hand, track.shape)
    track = _quantize(track)
    anchors = motif_anchors(cfg)
    vectors = _embed(
        anchors[motif], track.shape[0], cfg.bias_hand * cfg.sigma_e,
        cfg.jit_hand * cfg.sigma_e, rng,
    )
    traj = Trajectory(
        id=f"hand-{motif}",
        source="hand",
        fps=cfg.fps,
        track=track,
        embeddings=EmbeddingTable(stride=1, dim=cfg.dim, vectors=vectors),
    )
    traj.validate()
    return traj


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _count_relevant(
    spans: Sequence[tuple[str, int, int]],
    labels: dict[tuple[str, int, int], str],
    query_motif: str,
) -> float:
    if not spans:
        return 0.0
    hits = 0
    for span in spans:
        if span not in labels:
            raise ValidationError(f"retrieved segment {span} has no ground-truth label")
        if labels[span] == query_motif:
            hits += 1
    return hits / len(spans)


def precision_at_k(
    manifest: RetrievalManifest,
    labels: dict[tuple[str, int, int], str],
    query_motif: str,
) -> float:
    """Fraction of retrieved segments whose label matches the query motif.

    Raises:
        ValidationError: a retrieved segment is missing from ``labels``.
    """
    spans = [(m.traj_id, m.seg_start, m.seg_end) for m in manifest.matches]
    return _count_relevant(spans, labels, query_motif)


def rank_by_provided_scores(
    segments: Sequence[Segment], scores: Sequence[float], K: int
) -> list[Segment]:
    """Baseline stub: rank segments by externally supplied scalar scores."""
    if len(segments) != len(scores):
        raise ValidationError("one score per segment required")
    order = sorted(zip(scores, segments), key=lambda p: (p[0], p[1].traj_id, p[1].start))
    return [seg for _, seg in order[:K]]


# retrieval variants scored by the benchmark: the full pipeline, its
# no-filter ablation, embedding-space matching, and visual ranking alone
MODES = ("full", "path-only", "embedding", "visual-only")


def _mode_params(mode: str, cfg: BenchConfig) -> Optional[RetrievalParams]:
    common = dict(
        M=cfg.M, K=cfg.K, epsilon=cfg.pause_eps, min_len=cfg.min_len, split_even=1
    )
    if mode == "full":
        return RetrievalParams(use_visual_filter=True, distance_mode="path", **common)
    if mode == "path-only":
        return RetrievalParams(use_visual_filter=False, distance_mode="path", **common)
    if mode == "embedding":
        return RetrievalParams(use_visual_filter=False, distance_mode="embedding", **common)
    if mode == "visual-only":
        return None  # rank by visual cost alone, no warping
    raise ValidationError(f"unknown mode {mode!r}")


def run_mode(
    mode: str,
    queries: Sequence[tuple[str, Trajectory]],
    play_segments: Sequence[Segment],
    labels: dict[tuple[str, int, int], str],
    cfg: BenchConfig,
    threads: Optional[int] = None,
) -> float:
    """Mean precision of one mode over the given (motif, demo) queries."""
    params = _mode_params(mode, cfg)
    precisions = []
    for motif, demo in queries:
        query_seg = split_even(demo, 1)[0]
        if params is None:
            picked = filter_top_m(query_seg, list(play_segments), cfg.K)
            spans = [(s.traj_id, s.start, s.end) for s in picked]
            precisions.append(_count_relevant(spans, labels, motif))
        else:
            manifest = retrieve([query_seg], list(play_segments), params, threads=threads)
            precisions.append(precision_at_k(manifest, labels, motif))
    return float(np.mean(precisions))


def compare_modes(
    cfg: BenchConfig,
    seeds: Sequence[int],
    threads: Optional[int] = None,
    modes: Sequence[str] = MODES,
) -> dict:
    """Run every mode over every seed and report precision and wall-clock.

    Returns a JSON-ready report:
    ``{cfg, seeds, modes: [{name, precision_mean, precision_per_seed,
    wallclock_s}]}``.
    """
    if len(seeds) < 3:
        raise ValidationError(f"need at least 3 seeds, got {len(seeds)}")
    per_mode: dict[str, list[float]] = {m: [] for m in modes}
    clocks: dict[str, float] = {m: 0.0 for m in modes}
    for seed in seeds:
        data = gen_play(cfg, seed)
        segments: list[Segment] = []
        for traj in data.trajectories:
            segments.extend(segment_kinematic(traj, cfg.pause_eps, cfg.min_len))
        query_motifs = cfg.query_motifs or cfg.active_motifs
        queries = [
            (motif, gen_hand(motif, seed * 1009 + i, cfg))
            for i, motif in enumerate(query_motifs)
        ]
        for mode in modes:
            t0 = time.perf_counter()
            per_mode[mode].append(run_mode(mode, queries, segments, data.labels, cfg, threads))
            clocks[mode] += time.perf_counter() - t0
    return {
        "cfg": cfg.to_dict(),
        "seeds": list(seeds),
        "modes": [
            {
                "name": mode,
                "precision_mean": float(np.mean(per_mode[mode])),
                "precision_per_seed": [float(p) for p in per_mode[mode]],
                "wallclock_s": round(clocks[mode], 3),
            }
            for mode in modes
        ],
    }


# ---------------------------------------------------------------------------
# label persistence (CLI interchange)
# ---------------------------------------------------------------------------


def write_labels(labels: dict[tuple[str, int, int], str], queries: dict[str, str], path) -> None:
    doc = {
        "segments": [
            {"traj_id": t, "start": s, "end": e, "motif": m}
            for (t, s, e), m in sorted(labels.items())
        ],
        "queries": dict(sorted(queries.items())),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def read_labels(path) -> tuple[dict[tuple[str, int, int], str], dict[str, str]]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    labels = {
        (rec["traj_id"], int(rec["start"]), int(rec["end"])): rec["motif"]
        for rec in doc.get("segments", [])
    }
    return labels, dict(doc.get("queries", {}))
