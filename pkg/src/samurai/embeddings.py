"""Portable embedding records and the cosine-similarity kernel.

File format: UTF-8, LF line endings, one JSON object per line. The first
line is a header::

    {"header": {"encoder": "...", "silhouette": "white_on_black", "dims": {...}}}

followed by one record per line::

    {"id": "...", "modality": "...", "vector": [...]}

Vectors may arrive unnormalized; the loader L2-normalizes every vector so
similarity is always a plain dot product downstream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from samurai import kernels
from samurai.errors import (
    DimensionMismatch,
    DuplicateRecord,
    MissingEmbedding,
    ParseError,
    PolarityMismatch,
    ZeroVector,
)

MODALITIES = ("object_rgb", "object_silhouette", "query_text", "query_shape")
SILHOUETTE_POLARITY = "white_on_black"


@dataclass
class EmbeddingRecord:
    id: str
    modality: str
    vector: np.ndarray


def normalize(vector) -> np.ndarray:
    """Scale to unit Euclidean norm; result is float32."""
    arr = np.asarray(vector, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ZeroVector("empty vector")
    if not np.isfinite(arr).all():
        raise ValueError("vector has non-finite entries")
    norm = math.sqrt(float(np.dot(arr, arr)))
    if norm == 0.0:
        raise ZeroVector("cannot normalize the zero vector")
    return (arr / norm).astype(np.float32)


def cosine(a, b) -> float:
    """Dot product of two unit vectors, clamped to [-1, 1]."""
    a = np.ascontiguousarray(a, dtype=np.float32)
    b = np.ascontiguousarray(b, dtype=np.float32)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cosine of dim {a.shape} vs {b.shape}")
    return min(1.0, max(-1.0, kernels.dot_f32(a, b)))


class EmbeddingStore:
    """Unit-normalized vectors keyed by (modality, id). Immutable once loaded."""

    def __init__(self, encoder: str = "unknown", silhouette: str = SILHOUETTE_POLARITY):
        self.encoder = encoder
        self.silhouette = silhouette
        self._dims: dict[str, int] = {}
        self._vectors: dict[str, dict[str, np.ndarray]] = {m: {} for m in MODALITIES}
        self._matrix_cache: dict = {}

    # -- construction --------------------------------------------------

    def add(self, record: EmbeddingRecord) -> None:
        if record.modality not in MODALITIES:
            raise ParseError(0, f"unknown modality {record.modality!r}")
        try:
            vec = normalize(record.vector)
        except ZeroVector:
            raise ZeroVector(f"zero vector for {record.modality}/{record.id}") from None
        expected = self._dims.get(record.modality)
        if expected is None:
            self._dims[record.modality] = vec.size
        elif vec.size != expected:
            raise DimensionMismatch(
                f"{record.modality}: expected dim {expected}, got {vec.size} (id {record.id})"
            )
        bucket = self._vectors[record.modality]
        if record.id in bucket:
            raise DuplicateRecord(f"duplicate record {record.modality}/{record.id}")
        bucket[record.id] = vec
        self._matrix_cache.clear()

    # -- queries ---------------------------------------------------------

    def dim(self, modality: str) -> int | None:
        return self._dims.get(modality)

    def ids(self, modality: str) -> list[str]:
        return sorted(self._vectors[modality])

    def has(self, modality: str, record_id: str) -> bool:
        return record_id in self._vectors[modality]

    def get(self, modality: str, record_id: str) -> np.ndarray:
        try:
            return self._vectors[modality][record_id]
        except KeyError:
            raise MissingEmbedding([(modality, record_id)]) from None

    def matrix(self, modality: str, ids) -> np.ndarray:
        """Stack vectors for ``ids`` into a contiguous (N, D) float32 matrix."""
        key = (modality, tuple(ids))
        cached = self._matrix_cache.get(key)
        if cached is not None:
            return cached
        bucket = self._vectors[modality]
        missing = [(modality, i) for i in ids if i not in bucket]
        if missing:
            raise MissingEmbedding(missing)
        out = np.ascontiguousarray(np.stack([bucket[i] for i in ids]), dtype=np.float32)
        self._matrix_cache[key] = out
        return out


def load_embeddings(path) -> EmbeddingStore:
    """Parse and validate an embedding file."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")

    header = _parse_header(lines[0] if lines else "")
    silhouette = header.get("silhouette")
    if silhouette != SILHOUETTE_POLARITY:
        raise PolarityMismatch(
            f"header silhouette {silhouette!r} does not match {SILHOUETTE_POLARITY!r}"
        )
    encoder = header.get("encoder")
    if not isinstance(encoder, str) or not encoder:
        raise ParseError(1, "header is missing a non-empty 'encoder' string")
    declared_dims = header.get("dims", {})
    if not isinstance(declared_dims, dict):
        raise ParseError(1, "header 'dims' must be an object")

    store = EmbeddingStore(encoder=encoder, silhouette=silhouette)
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        record = _parse_record(line, line_no)
        store.add(record)

    for modality, declared in declared_dims.items():
        seen = store.dim(modality)
        if seen is not None and seen != declared:
            raise DimensionMismatch(
                f"{modality}: header declares dim {declared}, file has {seen}"
            )
    return store


def write_embeddings(path, encoder: str, records, dims: dict | None = None) -> None:
    """Write records in the interchange format (sorted by modality then id)."""
    records = sorted(records, key=lambda r: (r.modality, r.id))
    if dims is None:
        dims = {}
        for rec in records:
            dims.setdefault(rec.modality, int(np.asarray(rec.vector).size))
    header = {"header": {"encoder": encoder, "silhouette": SILHOUETTE_POLARITY, "dims": dims}}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for rec in records:
            vec = [float(v) for v in np.asarray(rec.vector, dtype=np.float32)]
            fh.write(json.dumps({"id": rec.id, "modality": rec.modality, "vector": vec}) + "\n")


def _parse_header(line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(1, f"invalid JSON in header: {exc}") from None
    if not isinstance(obj, dict) or "header" not in obj or not isinstance(obj["header"], dict):
        raise ParseError(1, "first line must be a {'header': {...}} object")
    return obj["header"]


def _parse_record(line: str, line_no: int) -> EmbeddingRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(line_no, f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ParseError(line_no, "record must be a JSON object")
    missing = {"id", "modality", "vector"} - obj.keys()
    if missing:
        raise ParseError(line_no, f"record missing keys {sorted(missing)}")
    rid, modality, vector = obj["id"], obj["modality"], obj["vector"]
    if not isinstance(rid, str) or not rid:
        raise ParseError(line_no, "'id' must be a non-empty string")
    if modality not in MODALITIES:
        raise ParseError(line_no, f"unknown modality {modality!r}")
    if not isinstance(vector, list) or not vector:
        raise ParseError(line_no, "'vector' must be a non-empty array")
    try:
        arr = np.asarray(vector, dtype=np.float64)
    except (TypeError, ValueError):
        raise ParseError(line_no, "'vector' must be a flat numeric array") from None
    if arr.ndim != 1:
        raise ParseError(line_no, "'vector' must be a flat numeric array")
    if not np.isfinite(arr).all():
        raise ParseError(line_no, "'vector' has non-finite entries")
    return EmbeddingRecord(id=rid, modality=modality, vector=arr)
