"""Retrieval loop: filter candidates, match paths, rank, weight, emit manifest.

For each query segment the play segments are optionally narrowed to the M
most visually similar, each survivor is aligned once with subsequence DTW
(its best window inside the segment), the K cheapest alignments are kept,
and their costs are turned into training weights in [0.01, 100].

Candidate scoring may run on a thread pool; results are reduced in a fixed
total order, so the manifest is identical for any worker count.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegeneratePathError, InvalidCostError, ValidationError
from .pathops import DEFAULT_MIN_LEN, Segment
from .sdtw import MatchResult, sdtw_match
from .trajdata import (
    DISTANCE_MODES,
    WEIGHT_HI,
    WEIGHT_LO,
    WEIGHT_NORM,
    WEIGHT_SCOPES,
    Match,
    RetrievalManifest,
    load_embeddings,
    validate_manifest,
)
from .visfilter import embedding_sequence, filter_top_m, visual_cost

logger = logging.getLogger(__name__)


@dataclass(frozen=True, kw_only=True)
class RetrievalParams:
    """Knobs of one retrieval run; recorded verbatim in the manifest."""

    epsilon: float
    M: int = 100
    K: int = 25
    min_len: int = DEFAULT_MIN_LEN
    split_even: Optional[int] = None
    use_visual_filter: bool = True
    distance_mode: str = "path"
    weight_scope: str = "per_query"
    seed: int = 0

    def __post_init__(self):
        if self.M < 1 or self.K < 1:
            raise ValidationError("M and K must be >= 1")
        if self.use_visual_filter and self.K > self.M:
            raise ValidationError(f"K = {self.K} > M = {self.M} with filtering enabled")
        if self.distance_mode not in DISTANCE_MODES:
            raise ValidationError(f"unknown distance_mode {self.distance_mode!r}")
        if self.weight_scope not in WEIGHT_SCOPES:
            raise ValidationError(f"unknown weight_scope {self.weight_scope!r}")
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be > 0")

    def to_dict(self) -> dict:
        return {
            "M": self.M,
            "K": self.K,
            "epsilon": float(self.epsilon),
            "min_len": self.min_len,
            "split_even": self.split_even,
            "use_visual_filter": self.use_visual_filter,
            "distance_mode": self.distance_mode,
            "weight_scope": self.weight_scope,
            "weight_norm": WEIGHT_NORM,
            "seed": self.seed,
        }


def normalize_weights(costs) -> np.ndarray:
    """Map alignment costs to training weights in [0.01, 100].

    Each cost is divided by the sum of all costs, exponentiated with a minus
    sign, and the resulting values are min-max mapped onto [0.01, 100], so
    the cheapest match always gets weight 100 and the dearest 0.01. If every
    cost is equal (including a single match) the map is degenerate and all
    weights are 1.

    Raises:
        InvalidCostError: empty input, negative or non-finite cost.
    """
    arr = np.asarray(list(costs), dtype=np.float64)
    if arr.size == 0:
        raise InvalidCostError("cannot normalize an empty cost list")
    if not np.isfinite(arr).all():
        raise InvalidCostError("costs must be finite")
    if (arr < 0).any():
        raise InvalidCostError("costs must be >= 0")
    if np.all(arr == arr[0]):
        return np.ones_like(arr)
    u = np.exp(-arr / arr.sum())
    umin, umax = u.min(), u.max()
    t = (u - umin) / (umax - umin)
    # convex blend rather than lo + span*t: exact at both endpoints in floats
    return WEIGHT_LO * (1.0 - t) + WEIGHT_HI * t


def rank_matches(matches: Sequence[tuple], K: int):
    """Top-K entries of (Segment, MatchResult, ...) tuples.

    Ordered by (cost, traj_id, segment start); the order is total, so any
    permutation of the input produces the same output.
    """
    def key(item):
        seg, res = item[0], item[1]
        return (res.cost, seg.traj_id, seg.start, seg.end)

    return sorted(matches, key=key)[:K]


def _query_sequence(seg: Segment, mode: str) -> np.ndarray:
    if mode == "embedding":
        return embedding_sequence(seg)
    if len(seg.relpath) == 0:
        raise DegeneratePathError(
            f"{seg.traj_id} [{seg.start}, {seg.end}): too short for a relative path"
        )
    return seg.relpath


def _match_span(seg: Segment, res: MatchResult, mode: str) -> tuple[int, int]:
    # Delta index i connects frames (start + i, start + i + 1); a window of
    # deltas [s, e) therefore spans frames [start + s, start + e + 1). In
    # embedding mode elements are frames already.
    if mode == "embedding":
        return seg.start + res.start, seg.start + res.end
    return seg.start + res.start, seg.start + res.end + 1


def retrieve(
    hand_segments: Sequence[Segment],
    play_segments: Sequence[Segment],
    params: RetrievalParams,
    threads: Optional[int] = None,
) -> RetrievalManifest:
    """Run the full retrieval loop and return a validated manifest.

    Args:
        hand_segments: segments of one query trajectory.
        play_segments: candidate segments from the play dataset.
        params: run configuration; recorded in the manifest.
        threads: worker count for candidate scoring (default: machine cores).

    Raises:
        ValidationError: no query segments, or mixed query trajectories.
        MissingEmbeddingsError: filtering or embedding mode without embeddings.
    """
    if not hand_segments:
        raise ValidationError("no query segments given")
    query_ids = {seg.traj_id for seg in hand_segments}
    if len(query_ids) != 1:
        raise ValidationError(f"query segments span multiple trajectories: {sorted(query_ids)}")
    query_id = hand_segments[0].traj_id

    warnings = []
    if not play_segments:
        logger.warning("empty play segment set; emitting empty manifest")
        warnings.append("empty play segment set")

    needs_embeddings = params.use_visual_filter or params.distance_mode == "embedding"
    if needs_embeddings:
        for seg in list(hand_segments) + list(play_segments):
            load_embeddings(seg.traj)

    if threads is None:
        threads = os.cpu_count() or 1

    entries = []  # (query_span, seg, match_result, cost_visual), grouped by query
    blocks = []  # (offset, length) of each query segment's block in entries
    for hand_seg in sorted(hand_segments, key=lambda s: (s.start, s.end)):
        if params.use_visual_filter:
            candidates = filter_top_m(hand_seg, list(play_segments), params.M)
        else:
            candidates = list(play_segments)
        query_seq = _query_sequence(hand_seg, params.distance_mode)
        cand_seqs = [_query_sequence(c, params.distance_mode) for c in candidates]

        if threads > 1 and len(candidates) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                chunk = max(1, len(cand_seqs) // (threads * 4))
                results = list(
                    pool.map(lambda s: sdtw_match(query_seq, s), cand_seqs, chunksize=chunk)
                )
        else:
            results = [sdtw_match(query_seq, s) for s in cand_seqs]

        top = rank_matches(list(zip(candidates, results)), params.K)
        span = (hand_seg.start, hand_seg.end)
        blocks.append((len(entries), len(top)))
        for seg, res in top:
            vis = visual_cost(hand_seg, seg) if params.use_visual_filter else None
            entries.append((span, seg, res, vis))

    if not entries:
        weights = []
    elif params.weight_scope == "union":
        weights = list(normalize_weights([res.cost for _, _, res, _ in entries]))
    else:
        weights = []
        for offset, length in blocks:
            block = entries[offset : offset + length]
            if block:
                weights.extend(normalize_weights([e[2].cost for e in block]))

    matches = []
    for (span, seg, res, vis), weight in zip(entries, weights):
        ms, me = _match_span(seg, res, params.distance_mode)
        matches.append(
            Match(
                traj_id=seg.traj_id,
                seg_start=seg.start,
                seg_end=seg.end,
                match_start=ms,
                match_end=me,
                query_start=span[0],
                query_end=span[1],
                cost_path=res.cost,
                weight=float(weight),
                cost_visual=vis,
            )
        )

    manifest = RetrievalManifest(
        query_id=query_id,
        params=params.to_dict(),
        matches=tuple(matches),
        warnings=tuple(warnings),
    )
    validate_manifest(manifest)
    return manifest
