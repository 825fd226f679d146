"""Boundary-frame visual cost and the top-M candidate filter.

The visual cost between two segments is the squared Euclidean distance
between their first-frame embeddings plus the same for their last frames:
how similar the scenes look where each behavior begins and ends. Candidates
are ranked by this cost and only the M cheapest survive to path matching.
"""

from __future__ import annotations

import numpy as np

from .errors import IncompatibleEmbeddingsError
from .pathops import Segment
from .trajdata import EmbeddingTable, Trajectory, load_embeddings


def nearest_row(table: EmbeddingTable, frame: int) -> int:
    """Index of the stored row whose frame is closest to ``frame``.

    Ties (equidistant stored frames) resolve to the earlier row.
    """
    rows = table.vectors.shape[0]
    lo = min(frame // table.stride, rows - 1)
    hi = min(lo + 1, rows - 1)
    if abs(hi * table.stride - frame) < abs(frame - lo * table.stride):
        return hi
    return lo


def boundary_embedding(traj: Trajectory, frame: int) -> np.ndarray:
    """Embedding vector for ``frame``, via the nearest stored row."""
    table = load_embeddings(traj)
    return table.vectors[nearest_row(table, frame)]


def visual_cost(q: Segment, r: Segment) -> float:
    """Sum of squared first-frame and last-frame embedding distances.

    Raises:
        MissingEmbeddingsError: either parent trajectory lacks embeddings.
        IncompatibleEmbeddingsError: embedding dimensions differ.
    """
    qt = load_embeddings(q.traj)
    rt = load_embeddings(r.traj)
    if qt.dim != rt.dim:
        raise IncompatibleEmbeddingsError(
            f"embedding dims differ: {q.traj_id} has {qt.dim}, {r.traj_id} has {rt.dim}"
        )
    d_first = qt.vectors[nearest_row(qt, q.start)] - rt.vectors[nearest_row(rt, r.start)]
    d_last = qt.vectors[nearest_row(qt, q.end - 1)] - rt.vectors[nearest_row(rt, r.end - 1)]
    return float(d_first @ d_first + d_last @ d_last)


def rank_by_visual(q: Segment, candidates: list[Segment]) -> list[tuple[float, Segment]]:
    """All candidates with their visual costs, cheapest first.

    The order is total — ties resolve by (traj_id, start) — so the result
    does not depend on the input order.
    """
    scored = [(visual_cost(q, c), c) for c in candidates]
    scored.sort(key=lambda item: (item[0], item[1].traj_id, item[1].start))
    return scored


def filter_top_m(q: Segment, candidates: list[Segment], M: int) -> list[Segment]:
    """The min(M, len(candidates)) segments most visually similar to ``q``."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    return [seg for _, seg in rank_by_visual(q, candidates)[:M]]


def embedding_sequence(seg: Segment) -> np.ndarray:
    """Per-frame embedding matrix for a segment, one row per frame.

    Frames between stored rows take the nearest row (earlier on ties), the
    same reconciliation as :func:`boundary_embedding`.
    """
    table = load_embeddings(seg.traj)
    frames = np.arange(seg.start, seg.end)
    lo = np.minimum(frames // table.stride, table.vectors.shape[0] - 1)
    hi = np.minimum(lo + 1, table.vectors.shape[0] - 1)
    take_hi = np.abs(hi * table.stride - frames) < np.abs(frames - lo * table.stride)
    rows = np.where(take_hi, hi, lo)
    return table.vectors[rows]
