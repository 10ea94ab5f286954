"""Recall@k and mean reciprocal rank over ranked lists and ground truth.

Metrics are computed in double precision and printed to four decimal
places. Per-scene ranks are computed once and every metric derives from
them, accumulated in sorted scene-id order for bit-exact reports.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from samurai.errors import EmptyResults, MissingTruth, ParseError, UnknownScene

logger = logging.getLogger("samurai.metrics")

TRUTH_HEADER = "scene_id,object_id"
DEFAULT_CUTOFF = 10
RECALL_KS = (1, 5, 10)


@dataclass
class EvalReport:
    num_queries: int
    recall_at: dict[int, float]
    mrr: float
    per_scene: dict[str, int | None]

    def to_json(self) -> str:
        """Fixed key order, 4-decimal metrics, scenes sorted, LF endings."""
        parts = [f'"num_queries": {self.num_queries}']
        for k in RECALL_KS:
            parts.append(f'"recall_at_{k}": {self.recall_at[k]:.4f}')
        parts.append(f'"mrr": {self.mrr:.4f}')
        scenes = ", ".join(
            f"{json.dumps(sid)}: {self.per_scene[sid] if self.per_scene[sid] is not None else 'null'}"
            for sid in sorted(self.per_scene)
        )
        parts.append(f'"per_scene": {{{scenes}}}')
        return "{" + ", ".join(parts) + "}"


def per_scene_ranks(results, truth: dict[str, str], lenient: bool = False) -> dict[str, int | None]:
    """Rank of the correct object per scene; None when outside the list.

    Scenes present in the truth but absent from the results are fatal
    unless ``lenient``, in which case they join the denominator with no
    rank. Result scenes missing from the truth are always fatal.
    """
    ranks: dict[str, int | None] = {}
    for lst in results:
        if lst.scene_id in ranks:
            raise ParseError(0, f"duplicate scene {lst.scene_id} in results")
        if lst.scene_id not in truth:
            raise MissingTruth(f"no ground truth for scene {lst.scene_id}")
        ranks[lst.scene_id] = lst.rank_of(truth[lst.scene_id])
    unknown = sorted(set(truth) - set(ranks))
    if unknown:
        if not lenient:
            raise UnknownScene(f"truth scenes missing from results: {unknown}")
        logger.warning("counting %d truth-only scenes as unranked: %s", len(unknown), unknown)
        for sid in unknown:
            ranks[sid] = None
    return ranks


def _recall(ranks: dict[str, int | None], k: int) -> float:
    hits = sum(1 for r in ranks.values() if r is not None and r <= k)
    return hits / len(ranks)


def _mrr(ranks: dict[str, int | None], cutoff: int) -> float:
    total = 0.0
    for sid in sorted(ranks):
        r = ranks[sid]
        if r is not None and r <= cutoff:
            total += 1.0 / r
    return total / len(ranks)


def recall_at_k(results, truth: dict[str, str], k: int, lenient: bool = False) -> float:
    """Fraction of scenes whose correct object appears in the top k."""
    ranks = per_scene_ranks(results, truth, lenient)
    if not ranks:
        raise EmptyResults("no scenes to evaluate")
    return _recall(ranks, k)


def mrr(results, truth: dict[str, str], cutoff: int = DEFAULT_CUTOFF,
        lenient: bool = False) -> float:
    """Mean of 1/rank, zero when the correct object is beyond the cutoff."""
    ranks = per_scene_ranks(results, truth, lenient)
    if not ranks:
        raise EmptyResults("no scenes to evaluate")
    return _mrr(ranks, cutoff)


def evaluate(results, truth: dict[str, str], cutoff: int = DEFAULT_CUTOFF,
             lenient: bool = False) -> EvalReport:
    """Full report: per-scene ranks, Recall@{1,5,10}, MRR."""
    ranks = per_scene_ranks(results, truth, lenient)
    if not ranks:
        raise EmptyResults("no scenes to evaluate")
    return EvalReport(
        num_queries=len(ranks),
        recall_at={k: _recall(ranks, k) for k in RECALL_KS},
        mrr=_mrr(ranks, cutoff),
        per_scene=dict(ranks),
    )


def load_truth_csv(path) -> dict[str, str]:
    """Ground-truth CSV: scene_id,object_id rows (header optional)."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    truth: dict[str, str] = {}
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if line_no == 1 and line == TRUTH_HEADER:
            continue
        parts = line.split(",")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ParseError(line_no, f"expected 'scene_id,object_id', got {line!r}")
        sid, oid = parts
        if sid in truth:
            raise ParseError(line_no, f"duplicate truth entry for scene {sid}")
        truth[sid] = oid
    if not truth:
        raise EmptyResults(f"truth file {path} has no entries")
    return truth


def write_truth_csv(path, truth: dict[str, str]) -> None:
    rows = [TRUTH_HEADER] + [f"{sid},{truth[sid]}" for sid in sorted(truth)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(rows) + "\n")
