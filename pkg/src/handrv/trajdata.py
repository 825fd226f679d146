"""Data model and interchange formats for trajectory datasets and manifests.

A dataset is a line-delimited JSON file (one trajectory per line) plus one raw
binary blob per trajectory that carries embeddings:

    {"id": str, "source": "play"|"hand", "fps": num, "track": [[x,y],...],
     "kin": [num,...]?, "actions": [[...],...]?,
     "embeddings": {"file": str, "stride": int, "dim": int,
                    "dtype": "f32", "layout": "row-major"}?}

Embedding blobs are raw little-endian 32-bit floats, row-major, with
``ceil(n_frames / stride)`` rows. Blob paths are resolved relative to the
dataset file. Unknown top-level keys are ignored so adapters may annotate
lines with extra metadata.

A retrieval manifest is a single JSON document:

    {"query_id": str, "params": {...}, "matches": [...]}

All loaded objects are treated as immutable; there is no mutation API.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional, Union

import numpy as np

from .errors import (
    MissingEmbeddingsError,
    ParseError,
    SizeMismatchError,
    ValidationError,
)

SOURCES = ("play", "hand")
DISTANCE_MODES = ("path", "embedding")
WEIGHT_SCOPES = ("per_query", "union")
WEIGHT_LO = 0.01
WEIGHT_HI = 100.0


@dataclass(eq=False)
class EmbeddingTable:
    """Strided per-frame embedding vectors for one trajectory."""

    stride: int
    dim: int
    vectors: np.ndarray  # (rows, dim) float64

    def validate(self, n_frames: int) -> None:
        if self.stride < 1:
            raise ValidationError(f"embedding stride must be >= 1, got {self.stride}")
        if self.dim < 1:
            raise ValidationError(f"embedding dim must be >= 1, got {self.dim}")
        rows = expected_rows(n_frames, self.stride)
        if self.vectors.shape != (rows, self.dim):
            raise ValidationError(
                f"embedding table shape {self.vectors.shape} != expected ({rows}, {self.dim})"
            )
        if not np.isfinite(self.vectors).all():
            raise ValidationError("embedding table contains non-finite entries")


@dataclass(eq=False)
class EmbeddingRef:
    """Lazy reference to an embedding blob on disk."""

    path: Path
    stride: int
    dim: int
    _table: Optional[EmbeddingTable] = field(default=None, repr=False)


EmbeddingSource = Union[EmbeddingTable, EmbeddingRef]


def expected_rows(n_frames: int, stride: int) -> int:
    return math.ceil(n_frames / stride)


@dataclass(eq=False)
class Trajectory:
    """One recorded episode: a tracked 2D point plus optional extras."""

    id: str
    source: str
    fps: float
    track: np.ndarray  # (N, 2) float64, pixel units
    kin: Optional[np.ndarray] = None  # (N,) float64, >= 0
    actions: Optional[np.ndarray] = None  # (N, A) float64, opaque passthrough
    embeddings: Optional[EmbeddingSource] = None

    @property
    def n_frames(self) -> int:
        return int(self.track.shape[0])

    def validate(self) -> None:
        if not self.id:
            raise ValidationError("trajectory id must be non-empty")
        if self.source not in SOURCES:
            raise ValidationError(f"{self.id}: source must be one of {SOURCES}")
        if not (math.isfinite(self.fps) and self.fps > 0):
            raise ValidationError(f"{self.id}: fps must be a positive real")
        if self.track.ndim != 2 or self.track.shape[1] != 2:
            raise ValidationError(f"{self.id}: track must be a sequence of (x, y) pairs")
        n = self.n_frames
        if n < 2:
            raise ValidationError(f"{self.id}: N >= 2 violated (track length {n})")
        if not np.isfinite(self.track).all():
            raise ValidationError(f"{self.id}: track contains non-finite coordinates")
        if self.kin is not None:
            if self.kin.shape != (n,):
                raise ValidationError(f"{self.id}: |kin| = {self.kin.shape[0]} != N = {n}")
            if not np.isfinite(self.kin).all() or (self.kin < 0).any():
                raise ValidationError(f"{self.id}: kin values must be finite and >= 0")
        if self.actions is not None:
            if self.actions.ndim != 2 or self.actions.shape[0] != n:
                raise ValidationError(
                    f"{self.id}: actions must be N vectors of constant dimension"
                )
            if not np.isfinite(self.actions).all():
                raise ValidationError(f"{self.id}: actions contain non-finite values")
        if isinstance(self.embeddings, EmbeddingTable):
            self.embeddings.validate(n)
        elif isinstance(self.embeddings, EmbeddingRef):
            if self.embeddings.stride < 1 or self.embeddings.dim < 1:
                raise ValidationError(f"{self.id}: embedding stride and dim must be >= 1")


def load_embeddings(traj: Trajectory) -> EmbeddingTable:
    """Return the trajectory's embedding table, reading its blob on first use.

    Raises:
        MissingEmbeddingsError: the trajectory declares no embeddings.
        SizeMismatchError: the blob length is not rows * dim * 4 bytes.
        ValidationError: decoded entries are non-finite.
    """
    src = traj.embeddings
    if src is None:
        raise MissingEmbeddingsError(f"{traj.id}: trajectory carries no embeddings")
    if isinstance(src, EmbeddingTable):
        return src
    if src._table is None:
        rows = expected_rows(traj.n_frames, src.stride)
        raw = Path(src.path).read_bytes()
        expected = rows * src.dim * 4
        if len(raw) != expected:
            raise SizeMismatchError(
                f"{traj.id}: embedding blob {src.path} has {len(raw)} bytes, "
                f"expected {expected} ({rows} rows x {src.dim} dims x 4 bytes)"
            )
        vectors = (
            np.frombuffer(raw, dtype="<f4").astype(np.float64).reshape(rows, src.dim)
        )
        table = EmbeddingTable(stride=src.stride, dim=src.dim, vectors=vectors)
        table.validate(traj.n_frames)
        src._table = table
    return src._table


# ---------------------------------------------------------------------------
# dataset JSONL
# ---------------------------------------------------------------------------


def _as_float_array(value, shape_desc: str, ctx: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{ctx}: {shape_desc} is not numeric: {exc}") from None
    return arr


def _parse_record(rec: dict, base_dir: Path, line_no: int) -> Trajectory:
    for key in ("id", "source", "fps", "track"):
        if key not in rec:
            raise ValidationError(f"line {line_no}: missing required field '{key}'")
    ctx = f"line {line_no} (id={rec['id']!r})"
    track = _as_float_array(rec["track"], "track", ctx)
    if track.ndim != 2 or track.shape[1] != 2:
        raise ValidationError(f"{ctx}: track must be a list of [x, y] pairs")
    kin = None
    if rec.get("kin") is not None:
        kin = _as_float_array(rec["kin"], "kin", ctx)
        if kin.ndim != 1:
            raise ValidationError(f"{ctx}: kin must be a flat list of numbers")
    actions = None
    if rec.get("actions") is not None:
        act = rec["actions"]
        if not isinstance(act, list) or not act:
            raise ValidationError(f"{ctx}: actions must be a non-empty list of vectors")
        dims = {len(a) if isinstance(a, list) else -1 for a in act}
        if len(dims) != 1 or -1 in dims:
            raise ValidationError(f"{ctx}: actions must have constant dimension")
        actions = _as_float_array(act, "actions", ctx)
    embeddings = None
    if rec.get("embeddings") is not None:
        emb = rec["embeddings"]
        for key in ("file", "stride", "dim", "dtype", "layout"):
            if key not in emb:
                raise ValidationError(f"{ctx}: embeddings record missing '{key}'")
        if emb["dtype"] != "f32":
            raise ValidationError(f"{ctx}: unsupported embedding dtype {emb['dtype']!r}")
        if emb["layout"] != "row-major":
            raise ValidationError(f"{ctx}: unsupported embedding layout {emb['layout']!r}")
        embeddings = EmbeddingRef(
            path=base_dir / emb["file"], stride=int(emb["stride"]), dim=int(emb["dim"])
        )
    traj = Trajectory(
        id=str(rec["id"]),
        source=rec["source"],
        fps=float(rec["fps"]),
        track=track,
        kin=kin,
        actions=actions,
        embeddings=embeddings,
    )
    try:
        traj.validate()
    except ValidationError as exc:
        raise ValidationError(f"line {line_no}: {exc}") from None
    return traj


def load_dataset(path) -> list[Trajectory]:
    """Load and validate a JSONL dataset. Embedding blobs are not read yet.

    Raises:
        ParseError: a line is not valid JSON (message carries the line number).
        ValidationError: a record violates a trajectory invariant or reuses an id.
    """
    path = Path(path)
    base_dir = path.parent
    trajectories: list[Trajectory] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(line_no, f"malformed JSON: {exc.msg}") from None
            if not isinstance(rec, dict):
                raise ParseError(line_no, "expected a JSON object")
            traj = _parse_record(rec, base_dir, line_no)
            if traj.id in seen:
                raise ValidationError(f"line {line_no}: duplicate trajectory id {traj.id!r}")
            seen.add(traj.id)
            trajectories.append(traj)
    return trajectories


def _float_list(arr: np.ndarray) -> list:
    return [[float(v) for v in row] for row in arr]


def write_dataset(trajectories: Iterable[Trajectory], path, blob_dir=None) -> None:
    """Write trajectories as JSONL with one embedding blob per trajectory.

    Blobs land in ``blob_dir`` (default: ``<stem>_emb`` next to the dataset)
    and are referenced by relative path. On-disk references are copied into
    the new blob directory, so the written dataset is self-contained and a
    write/read/write cycle reproduces identical bytes.
    """
    path = Path(path)
    if blob_dir is None:
        blob_dir = path.parent / (path.stem + "_emb")
    blob_dir = Path(blob_dir)
    lines = []
    for traj in trajectories:
        traj.validate()
        rec: dict[str, Any] = {
            "id": traj.id,
            "source": traj.source,
            "fps": float(traj.fps),
            "track": _float_list(traj.track),
        }
        if traj.kin is not None:
            rec["kin"] = [float(v) for v in traj.kin]
        if traj.actions is not None:
            rec["actions"] = _float_list(traj.actions)
        if traj.embeddings is not None:
            src = traj.embeddings
            if isinstance(src, EmbeddingTable):
                raw = src.vectors.astype("<f4").tobytes(order="C")
            else:
                raw = Path(src.path).read_bytes()
            blob_dir.mkdir(parents=True, exist_ok=True)
            blob_path = blob_dir / f"{traj.id}.f32"
            blob_path.write_bytes(raw)
            rec["embeddings"] = {
                "file": str(blob_path.relative_to(path.parent)),
                "stride": src.stride,
                "dim": src.dim,
                "dtype": "f32",
                "layout": "row-major",
            }
        lines.append(json.dumps(rec, ensure_ascii=True, separators=(",", ":")))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# retrieval manifest
# ---------------------------------------------------------------------------

PARAM_FIELDS = (
    "M",
    "K",
    "epsilon",
    "min_len",
    "split_even",
    "use_visual_filter",
    "distance_mode",
    "weight_scope",
    "weight_norm",
    "seed",
)

# the one implemented cost-to-weight map, recorded for reproducibility:
# divide by the cost sum, exponentiate negated, min-max onto [0.01, 100]
WEIGHT_NORM = "sum_exp_minmax"


@dataclass(eq=True, frozen=True)
class Match:
    """One retrieved span: reference segment, matched sub-span, costs, weight."""

    traj_id: str
    seg_start: int
    seg_end: int
    match_start: int
    match_end: int
    query_start: int
    query_end: int
    cost_path: float
    weight: float
    cost_visual: Optional[float] = None


@dataclass(eq=True, frozen=True)
class RetrievalManifest:
    query_id: str
    params: dict
    matches: tuple[Match, ...]
    warnings: tuple[str, ...] = ()


def validate_manifest(manifest: RetrievalManifest) -> None:
    p = manifest.params
    missing = [k for k in PARAM_FIELDS if k not in p]
    if missing:
        raise ValidationError(f"manifest params missing {missing}")
    if p["distance_mode"] not in DISTANCE_MODES:
        raise ValidationError(f"params.distance_mode: unknown mode {p['distance_mode']!r}")
    if p["weight_scope"] not in WEIGHT_SCOPES:
        raise ValidationError(f"params.weight_scope: unknown scope {p['weight_scope']!r}")
    if p["weight_norm"] != WEIGHT_NORM:
        raise ValidationError(f"params.weight_norm: unknown map {p['weight_norm']!r}")
    if p["K"] < 1 or p["M"] < 1:
        raise ValidationError("params.K and params.M must be >= 1")
    if p["use_visual_filter"] and p["K"] > p["M"]:
        raise ValidationError(f"params: K = {p['K']} > M = {p['M']} with filtering enabled")
    per_query: dict[tuple[int, int], list[Match]] = {}
    for i, m in enumerate(manifest.matches):
        ctx = f"matches[{i}]"
        if not (math.isfinite(m.cost_path) and m.cost_path >= 0):
            raise ValidationError(f"{ctx}.cost_path: must be finite and >= 0")
        if m.cost_visual is not None and not (
            math.isfinite(m.cost_visual) and m.cost_visual >= 0
        ):
            raise ValidationError(f"{ctx}.cost_visual: must be finite and >= 0")
        if not (WEIGHT_LO <= m.weight <= WEIGHT_HI):
            raise ValidationError(
                f"{ctx}.weight: {m.weight} outside [{WEIGHT_LO}, {WEIGHT_HI}]"
            )
        if not (0 <= m.seg_start <= m.match_start < m.match_end <= m.seg_end):
            raise ValidationError(
                f"{ctx}: span ordering violated "
                f"({m.seg_start} <= {m.match_start} < {m.match_end} <= {m.seg_end})"
            )
        if not (0 <= m.query_start < m.query_end):
            raise ValidationError(f"{ctx}: query span [{m.query_start}, {m.query_end}) invalid")
        per_query.setdefault((m.query_start, m.query_end), []).append(m)
    for span, group in per_query.items():
        if len(group) > p["K"]:
            raise ValidationError(
                f"query span {span}: {len(group)} matches exceed K = {p['K']}"
            )
        keys = [(m.cost_path, m.traj_id, m.seg_start) for m in group]
        if keys != sorted(keys):
            raise ValidationError(
                f"query span {span}: matches not sorted by (cost_path, traj_id, seg_start)"
            )


def _match_to_json(m: Match) -> dict:
    rec = {
        "traj_id": m.traj_id,
        "seg_start": m.seg_start,
        "seg_end": m.seg_end,
        "match_start": m.match_start,
        "match_end": m.match_end,
        "query_start": m.query_start,
        "query_end": m.query_end,
        "cost_path": float(m.cost_path),
    }
    if m.cost_visual is not None:
        rec["cost_visual"] = float(m.cost_visual)
    rec["weight"] = float(m.weight)
    return rec


def write_manifest(manifest: RetrievalManifest, path) -> None:
    """Serialize a manifest to JSON. Invalid manifests are refused.

    Serialization is deterministic: fixed key order, fixed separators, and
    shortest round-trip float encoding, so equal manifests produce equal bytes.
    """
    validate_manifest(manifest)
    doc: dict[str, Any] = {
        "query_id": manifest.query_id,
        "params": {k: manifest.params[k] for k in PARAM_FIELDS},
        "matches": [_match_to_json(m) for m in manifest.matches],
    }
    if manifest.warnings:
        doc["warnings"] = list(manifest.warnings)
    Path(path).write_text(
        json.dumps(doc, ensure_ascii=True, indent=2) + "\n", encoding="utf-8"
    )


def _expect(doc: dict, key: str, kinds, where: str):
    if key not in doc:
        raise ValidationError(f"{where}.{key}: missing")
    val = doc[key]
    if kinds is not None and not isinstance(val, kinds):
        raise ValidationError(f"{where}.{key}: wrong type {type(val).__name__}")
    return val


def read_manifest(path) -> RetrievalManifest:
    """Read and validate a manifest written by :func:`write_manifest`."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, f"malformed manifest JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ValidationError("manifest: expected a JSON object")
    query_id = _expect(doc, "query_id", str, "manifest")
    params_doc = _expect(doc, "params", dict, "manifest")
    params = {}
    for k in PARAM_FIELDS:
        if k not in params_doc:
            raise ValidationError(f"manifest.params.{k}: missing")
        params[k] = params_doc[k]
    matches_doc = _expect(doc, "matches", list, "manifest")
    matches = []
    for i, rec in enumerate(matches_doc):
        where = f"manifest.matches[{i}]"
        if not isinstance(rec, dict):
            raise ValidationError(f"{where}: expected an object")
        matches.append(
            Match(
                traj_id=_expect(rec, "traj_id", str, where),
                seg_start=_expect(rec, "seg_start", int, where),
                seg_end=_expect(rec, "seg_end", int, where),
                match_start=_expect(rec, "match_start", int, where),
                match_end=_expect(rec, "match_end", int, where),
                query_start=_expect(rec, "query_start", int, where),
                query_end=_expect(rec, "query_end", int, where),
                cost_path=float(_expect(rec, "cost_path", (int, float), where)),
                weight=float(_expect(rec, "weight", (int, float), where)),
                cost_visual=(
                    float(rec["cost_visual"]) if rec.get("cost_visual") is not None else None
                ),
            )
        )
    warnings = tuple(doc.get("warnings", ()))
    manifest = RetrievalManifest(
        query_id=query_id, params=params, matches=tuple(matches), warnings=warnings
    )
    validate_manifest(manifest)
    return manifest
