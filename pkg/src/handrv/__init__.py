"""Motion-path retrieval over robot play datasets.

Given a single query demonstration's tracked 2D path, find the most
behaviorally similar sub-trajectories in a task-agnostic play dataset and
emit a weighted training manifest.
"""

from .errors import (
    DegeneratePathError,
    HandrvError,
    IncompatibleEmbeddingsError,
    InfeasibleBandError,
    InfeasibleSplitError,
    InvalidCostError,
    MissingEmbeddingsError,
    MissingKinematicsError,
    ParseError,
    SizeMismatchError,
    ValidationError,
)
from .synthbench import BenchConfig, LabeledDataset, compare_modes, gen_hand, gen_play, precision_at_k
from .pathops import Segment, make_segment, segment_kinematic, split_even, to_relative
from .retrieval import RetrievalParams, normalize_weights, rank_matches, retrieve
from .sdtw import MatchResult, dtw_full, sdtw_banded, sdtw_match, sdtw_oracle
from .trajdata import (
    EmbeddingRef,
    EmbeddingTable,
    Match,
    RetrievalManifest,
    Trajectory,
    load_dataset,
    load_embeddings,
    read_manifest,
    write_dataset,
    write_manifest,
)
from .visfilter import boundary_embedding, filter_top_m, visual_cost

__version__ = "0.1.0"

__all__ = [
    "BenchConfig",
    "DegeneratePathError",
    "EmbeddingRef",
    "EmbeddingTable",
    "HandrvError",
    "IncompatibleEmbeddingsError",
    "InfeasibleBandError",
    "InfeasibleSplitError",
    "InvalidCostError",
    "Match",
    "MatchResult",
    "MissingEmbeddingsError",
    "MissingKinematicsError",
    "ParseError",
    "RetrievalManifest",
    "RetrievalParams",
    "Segment",
    "SizeMismatchError",
    "Trajectory",
    "ValidationError",
    "boundary_embedding",
    "dtw_full",
    "filter_top_m",
    "load_dataset",
    "load_embeddings",
    "make_segment",
    "normalize_weights",
    "rank_matches",
    "read_manifest",
    "retrieve",
    "sdtw_banded",
    "sdtw_match",
    "sdtw_oracle",
    "segment_kinematic",
    "split_even",
    "to_relative",
    "visual_cost",
    "write_dataset",
    "write_manifest",
    "LabeledDataset",
    "compare_modes",
    "gen_hand",
    "gen_play",
    "precision_at_k",
]
