import numpy as np
import pytest

from handrv.trajdata import EmbeddingTable, Trajectory


def make_traj(
    id="t0",
    source="play",
    fps=5.0,
    track=None,
    kin=None,
    actions=None,
    embeddings=None,
    n=10,
):
    """Small valid trajectory for unit tests; override any field."""
    if track is None:
        rng = np.random.default_rng(hash(id) % (2**32))
        track = np.cumsum(rng.uniform(-3, 3, (n, 2)), axis=0) + 200.0
    track = np.asarray(track, dtype=np.float64)
    traj = Trajectory(
        id=id,
        source=source,
        fps=fps,
        track=track,
        kin=None if kin is None else np.asarray(kin, dtype=np.float64),
        actions=None if actions is None else np.asarray(actions, dtype=np.float64),
        embeddings=embeddings,
    )
    return traj


def make_table(n_frames, stride=1, dim=4, seed=0, vectors=None):
    if vectors is None:
        rows = -(-n_frames // stride)
        vectors = np.random.default_rng(seed).normal(0, 1, (rows, dim))
        vectors = vectors.astype(np.float32).astype(np.float64)
    return EmbeddingTable(stride=stride, dim=dim, vectors=np.asarray(vectors, dtype=np.float64))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
