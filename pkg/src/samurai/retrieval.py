"""Retrieval strategies over an embedding store.

Five strategies: text-only, shape-only, two text-then-shape hybrids (the
hybrid filters the catalog to the top-M by text similarity, keeps the
top-K of those by shape similarity, and orders the final list by either
key), and weighted majority voting over the other four.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from samurai import kernels
from samurai.errors import (
    CatalogMismatch,
    ConfigError,
    DimensionMismatch,
    MissingEmbedding,
    ParseError,
    SceneMismatch,
)

logger = logging.getLogger("samurai.retrieval")

STRATEGY_TEXT = "text"
STRATEGY_SHAPE = "shape"
STRATEGY_HYBRID_SHAPE = "ts-shape"
STRATEGY_HYBRID_TEXT = "ts-text"
STRATEGY_VOTE = "vote"
STRATEGIES = (
    STRATEGY_TEXT,
    STRATEGY_SHAPE,
    STRATEGY_HYBRID_SHAPE,
    STRATEGY_HYBRID_TEXT,
    STRATEGY_VOTE,
)
BASE_STRATEGIES = STRATEGIES[:4]

# packed vote score: votes + borda / _BORDA_SCALE (debug aid, rank-preserving
# over the first two sort keys)
_BORDA_SCALE = 10**6

RESULTS_HEADER = "scene_id,rank,object_id,score"


@dataclass(frozen=True)
class VoteWeights:
    text: int = 1
    shape: int = 1
    hybrid_shape: int = 2
    hybrid_text: int = 2

    def __post_init__(self):
        values = (self.text, self.shape, self.hybrid_shape, self.hybrid_text)
        if any(w < 0 for w in values):
            raise ConfigError(f"vote weights must be non-negative, got {values}")
        if not any(values):
            raise ConfigError("at least one vote weight must be positive")

    def for_strategy(self, strategy: str) -> int:
        return {
            STRATEGY_TEXT: self.text,
            STRATEGY_SHAPE: self.shape,
            STRATEGY_HYBRID_SHAPE: self.hybrid_shape,
            STRATEGY_HYBRID_TEXT: self.hybrid_text,
        }[strategy]


@dataclass(frozen=True)
class RetrievalParams:
    k: int = 10
    m: int = 15
    weights: VoteWeights = field(default_factory=VoteWeights)

    def __post_init__(self):
        if not 1 <= self.k <= self.m:
            raise ConfigError(f"need 1 <= K <= M, got K={self.k}, M={self.m}")

    def clamped(self, catalog_size: int) -> "RetrievalParams":
        m = min(self.m, catalog_size)
        k = min(self.k, m)
        if (k, m) != (self.k, self.m):
            logger.warning(
                "clamped K=%d M=%d to K=%d M=%d for catalog of %d",
                self.k, self.m, k, m, catalog_size,
            )
        return RetrievalParams(k=k, m=m, weights=self.weights)


@dataclass
class RankedList:
    scene_id: str
    strategy: str
    entries: list[tuple[str, float]]

    def ids(self) -> list[str]:
        return [oid for oid, _ in self.entries]

    def rank_of(self, object_id: str) -> int | None:
        for rank, (oid, _) in enumerate(self.entries, start=1):
            if oid == object_id:
                return rank
        return None


def _scores_for(store, modality: str, ids, query: np.ndarray) -> np.ndarray:
    matrix = store.matrix(modality, ids)
    if matrix.shape[1] != query.shape[0]:
        raise DimensionMismatch(
            f"query dim {query.shape[0]} vs {modality} dim {matrix.shape[1]}"
        )
    return np.clip(kernels.score_matrix_f32(matrix, query), -1.0, 1.0)


def _top(ids, scores, k: int) -> list[tuple[str, float]]:
    order = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    return [(ids[i], float(scores[i])) for i in order[:k]]


def rank_text(scene_id: str, store, k: int = 10, object_ids=None) -> RankedList:
    """Rank objects by cosine between the query text and object RGB embeddings."""
    ids = list(object_ids) if object_ids is not None else store.ids("object_rgb")
    query = store.get("query_text", scene_id)
    scores = _scores_for(store, "object_rgb", ids, query)
    return RankedList(scene_id, STRATEGY_TEXT, _top(ids, scores, min(k, len(ids))))


def rank_shape(scene_id: str, store, k: int = 10, object_ids=None) -> RankedList:
    """Rank objects by cosine between the query shape and object silhouette embeddings."""
    ids = list(object_ids) if object_ids is not None else store.ids("object_silhouette")
    query = store.get("query_shape", scene_id)
    scores = _scores_for(store, "object_silhouette", ids, query)
    return RankedList(scene_id, STRATEGY_SHAPE, _top(ids, scores, min(k, len(ids))))


def rank_hybrid(scene_id: str, store, params: RetrievalParams, order: str,
                object_ids=None) -> RankedList:
    """Filter to the text top-M, keep the shape top-K, order by ``order``.

    ``order`` is ``"shape"`` or ``"text"``; both variants select the same
    K-member set and differ only in the final ordering key. Shape ties
    during selection fall back to text score (so a flat shape signal
    degenerates to text ranking), then object id. Reported scores are
    those of the ordering key.
    """
    if order not in ("shape", "text"):
        raise ConfigError(f"hybrid order must be 'shape' or 'text', got {order!r}")
    ids = list(object_ids) if object_ids is not None else store.ids("object_rgb")
    params = params.clamped(len(ids))

    text_query = store.get("query_text", scene_id)
    text_scores = _scores_for(store, "object_rgb", ids, text_query)
    candidates = _top(ids, text_scores, params.m)
    cand_ids = [oid for oid, _ in candidates]
    text_by_id = dict(candidates)

    shape_query = store.get("query_shape", scene_id)
    shape_scores = _scores_for(store, "object_silhouette", cand_ids, shape_query)
    shape_by_id = {oid: float(s) for oid, s in zip(cand_ids, shape_scores)}
    selected = sorted(
        cand_ids,
        key=lambda oid: (-shape_by_id[oid], -text_by_id[oid], oid),
    )[: params.k]

    if order == "shape":
        strategy = STRATEGY_HYBRID_SHAPE
        entries = sorted(
            ((oid, shape_by_id[oid]) for oid in selected),
            key=lambda e: (-e[1], e[0]),
        )
    else:
        strategy = STRATEGY_HYBRID_TEXT
        entries = sorted(
            ((oid, text_by_id[oid]) for oid in selected),
            key=lambda e: (-e[1], e[0]),
        )
    return RankedList(scene_id, strategy, entries)


def majority_vote(lists: dict[str, RankedList], weights: VoteWeights, k: int = 10,
                  catalog_ids=None) -> RankedList:
    """Fuse the four base strategies by weighted per-appearance voting.

    Order: weighted votes desc, weighted Borda points desc, text score desc
    (objects absent from the text list sort last), object id asc. The
    reported score packs the first two keys as votes + borda/1e6.
    """
    expected = set(BASE_STRATEGIES)
    if set(lists) != expected:
        raise ConfigError(f"majority vote needs lists for {sorted(expected)}")
    scene_ids = {lst.scene_id for lst in lists.values()}
    if len(scene_ids) != 1:
        raise SceneMismatch(f"vote inputs span scenes {sorted(scene_ids)}")
    if catalog_ids is not None:
        catalog = set(catalog_ids)
        stray = {oid for lst in lists.values() for oid in lst.ids()} - catalog
        if stray:
            raise CatalogMismatch(f"objects outside the catalog: {sorted(stray)}")

    votes: dict[str, int] = {}
    borda: dict[str, int] = {}
    for strategy, lst in lists.items():
        w = weights.for_strategy(strategy)
        length = len(lst.entries)
        for rank, (oid, _) in enumerate(lst.entries, start=1):
            votes[oid] = votes.get(oid, 0) + w
            borda[oid] = borda.get(oid, 0) + w * (length + 1 - rank)
    text_score = dict(lists[STRATEGY_TEXT].entries)

    ordered = sorted(
        votes,
        key=lambda o: (-votes[o], -borda[o], -text_score.get(o, float("-inf")), o),
    )
    entries = [(o, votes[o] + borda[o] / _BORDA_SCALE) for o in ordered[:k]]
    return RankedList(next(iter(scene_ids)), STRATEGY_VOTE, entries)


def _modalities_for(strategy: str) -> tuple[list[str], list[str]]:
    """(scene modalities, object modalities) a strategy needs."""
    if strategy == STRATEGY_TEXT:
        return ["query_text"], ["object_rgb"]
    if strategy == STRATEGY_SHAPE:
        return ["query_shape"], ["object_silhouette"]
    return ["query_text", "query_shape"], ["object_rgb", "object_silhouette"]


def rank_scene(scene_id: str, store, params: RetrievalParams, strategy: str,
               object_ids=None) -> RankedList:
    """Run one strategy for one scene."""
    if strategy == STRATEGY_TEXT:
        return rank_text(scene_id, store, params.k, object_ids)
    if strategy == STRATEGY_SHAPE:
        return rank_shape(scene_id, store, params.k, object_ids)
    if strategy == STRATEGY_HYBRID_SHAPE:
        return rank_hybrid(scene_id, store, params, "shape", object_ids)
    if strategy == STRATEGY_HYBRID_TEXT:
        return rank_hybrid(scene_id, store, params, "text", object_ids)
    if strategy == STRATEGY_VOTE:
        base = {
            s: rank_scene(scene_id, store, params, s, object_ids)
            for s in BASE_STRATEGIES
        }
        return majority_vote(base, params.weights, params.k, catalog_ids=object_ids)
    raise ConfigError(f"unknown strategy {strategy!r}")


def retrieve_all(manifest, store, params: RetrievalParams, strategy: str,
                 workers: int | None = None) -> list[RankedList]:
    """One ranked list per manifest scene, in manifest order."""
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}")
    scene_ids = [s.scene_id for s in manifest.scenes]
    object_ids = [o.object_id for o in manifest.objects]

    scene_mods, object_mods = _modalities_for(strategy)
    missing = [
        (m, sid) for m in scene_mods for sid in scene_ids if not store.has(m, sid)
    ] + [
        (m, oid) for m in object_mods for oid in object_ids if not store.has(m, oid)
    ]
    if missing:
        raise MissingEmbedding(missing)

    params = params.clamped(len(object_ids))

    def run(scene_id: str) -> RankedList:
        return rank_scene(scene_id, store, params, strategy, object_ids)

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, scene_ids))
    return [run(sid) for sid in scene_ids]


def write_results_csv(path, ranked_lists) -> None:
    """Results CSV: dense 1-based ranks, 6-decimal scores, LF endings."""
    rows = [RESULTS_HEADER]
    for lst in sorted(ranked_lists, key=lambda r: r.scene_id):
        for rank, (oid, score) in enumerate(lst.entries, start=1):
            rows.append(f"{lst.scene_id},{rank},{oid},{score:.6f}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(rows) + "\n")


def read_results_csv(path) -> list[RankedList]:
    """Parse a results CSV, enforcing the writer's format."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if not lines or lines[0] != RESULTS_HEADER:
        raise ParseError(1, f"results header must be {RESULTS_HEADER!r}")
    out: list[RankedList] = []
    seen: set[str] = set()
    current: RankedList | None = None
    for line_no, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ParseError(line_no, f"expected 4 fields, got {len(parts)}")
        scene_id, rank_s, object_id, score_s = parts
        try:
            rank, score = int(rank_s), float(score_s)
        except ValueError:
            raise ParseError(line_no, f"bad rank/score in {line!r}") from None
        if current is None or scene_id != current.scene_id:
            if scene_id in seen:
                raise ParseError(line_no, f"scene {scene_id} rows are not contiguous")
            if current is not None and scene_id < current.scene_id:
                raise ParseError(line_no, "scenes must be sorted ascending")
            seen.add(scene_id)
            current = RankedList(scene_id, "", [])
            out.append(current)
        if rank != len(current.entries) + 1:
            raise ParseError(line_no, f"ranks must be dense from 1, got {rank}")
        if object_id in dict(current.entries):
            raise ParseError(line_no, f"duplicate object {object_id} in {scene_id}")
        current.entries.append((object_id, score))
    return out
