"""Relative-path conversion and sub-trajectory segmentation.

A trajectory's absolute track is converted to per-frame deltas so that
matching is invariant to where a motion starts in the image. Long play
trajectories are cut wherever the kinematic magnitude drops below a
threshold (the teleoperator pausing between behaviors); query demos are cut
into a user-chosen number of even pieces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePathError, InfeasibleSplitError, MissingKinematicsError
from .trajdata import Trajectory

DEFAULT_MIN_LEN = 5


def to_relative(track: np.ndarray) -> np.ndarray:
    """Forward differences of an absolute 2D path: deltas[t] = track[t+1] - track[t].

    Raises:
        DegeneratePathError: fewer than 2 points.
    """
    track = np.asarray(track, dtype=np.float64)
    if track.ndim != 2 or track.shape[1] != 2:
        raise DegeneratePathError("track must be an (N, 2) array")
    if track.shape[0] < 2:
        raise DegeneratePathError(f"path length {track.shape[0]} < 2")
    return np.diff(track, axis=0)


@dataclass(frozen=True, eq=False)
class Segment:
    """A contiguous frame range [start, end) of a trajectory with its deltas."""

    traj: Trajectory
    start: int
    end: int
    relpath: np.ndarray  # (end - start - 1, 2)

    @property
    def traj_id(self) -> str:
        return self.traj.id

    @property
    def n_frames(self) -> int:
        return self.end - self.start

    def __repr__(self) -> str:  # keep reprs short; tracks are large
        return f"Segment({self.traj_id!r}, [{self.start}, {self.end}))"


def make_segment(traj: Trajectory, start: int, end: int) -> Segment:
    if not (0 <= start < end <= traj.n_frames):
        raise ValueError(f"segment [{start}, {end}) out of range for N={traj.n_frames}")
    return Segment(traj=traj, start=start, end=end, relpath=np.diff(traj.track[start:end], axis=0))


def segment_kinematic(
    traj: Trajectory, epsilon: float, min_len: int = DEFAULT_MIN_LEN
) -> list[Segment]:
    """Cut a trajectory at pauses: maximal runs of frames with kin < epsilon.

    Each below-threshold run collapses to a single cut; the surviving runs of
    moving frames become segments, and those shorter than ``min_len`` frames
    are discarded.

    Raises:
        MissingKinematicsError: the trajectory has no kin data.
    """
    if traj.kin is None:
        raise MissingKinematicsError(f"{traj.id}: kinematic magnitudes absent")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    moving = traj.kin >= epsilon
    segments: list[Segment] = []
    n = traj.n_frames
    start = None
    for i in range(n + 1):
        if i < n and moving[i]:
            if start is None:
                start = i
        elif start is not None:
            if i - start >= min_len:
                segments.append(make_segment(traj, start, i))
            start = None
    return segments


def split_even(traj: Trajectory, n: int, min_len: int = 1) -> list[Segment]:
    """Split [0, N) into n contiguous segments with lengths differing by <= 1.

    Remainder frames go to the earliest segments, so the result does not
    depend on anything but (N, n).

    Raises:
        InfeasibleSplitError: n < 1 or the pieces would undercut ``min_len``.
    """
    N = traj.n_frames
    if n < 1:
        raise InfeasibleSplitError(f"cannot split into {n} segments")
    if n > N // max(min_len, 1):
        raise InfeasibleSplitError(
            f"{traj.id}: cannot split {N} frames into {n} segments of >= {min_len}"
        )
    base, rem = divmod(N, n)
    segments = []
    pos = 0
    for i in range(n):
        length = base + (1 if i < rem else 0)
        segments.append(make_segment(traj, pos, pos + length))
        pos += length
    return segments


def default_epsilon(trajectories, percentile: float = 10.0) -> float:
    """Threshold used when the caller does not supply one: a low percentile of
    all kin values across the dataset, adapting to whatever units it uses."""
    kins = [t.kin for t in trajectories if t.kin is not None]
    if not kins:
        raise MissingKinematicsError("no trajectory carries kinematic magnitudes")
    value = float(np.percentile(np.concatenate(kins), percentile))
    if value <= 0:
        # Degenerate datasets (many exact zeros); fall back to the smallest
        # positive magnitude so the threshold stays valid.
        positive = np.concatenate(kins)
        positive = positive[positive > 0]
        value = float(positive.min()) if positive.size else 1e-9
    return value
