"""Planted-ground-truth dataset generation.

Every scene's query embeddings are noisy copies of its target object's
embeddings, and rejection sampling keeps every other object far enough
away that the target wins by construction: with noise magnitude e and all
competitor cosines at most 1 - (2e + 2e^2) - slack, the planted target's
similarity strictly exceeds every competitor's.

With ``adversarial="text-decoys"``, one extra object per scene is planted
to beat the target on text similarity (but not shape), so text-only
ranking demotes the target to rank 2 while shape-aware strategies keep it
at rank 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from samurai.errors import ConfigError, InfeasibleMargin
from samurai.embeddings import EmbeddingRecord, write_embeddings
from samurai.masks import DEFAULT_MASK_COLOR
from samurai.metrics import write_truth_csv

logger = logging.getLogger("samurai.synth")

ENCODER_NAME = "synthetic-planted-v1"
ADVERSARIAL_TEXT_DECOYS = "text-decoys"

_SCORE_TOL = 1e-6  # required winner margin re-checked numerically at generation


@dataclass
class SynthConfig:
    scenes: int
    objects: int
    dim: int
    seed: int
    adversarial: str | None = None
    noise: float = 0.05
    margin_slack: float = 1e-3
    max_retries: int = 1000

    def __post_init__(self):
        if self.scenes < 1:
            raise ConfigError(f"need at least 1 scene, got {self.scenes}")
        if self.objects < self.scenes:
            raise ConfigError(
                f"need at least as many objects as scenes, got {self.objects} < {self.scenes}"
            )
        if self.dim < 2:
            raise ConfigError(f"need dimension >= 2, got {self.dim}")
        if self.noise < 0:
            raise ConfigError(f"noise must be non-negative, got {self.noise}")
        if self.adversarial not in (None, ADVERSARIAL_TEXT_DECOYS):
            raise ConfigError(f"unknown adversarial mode {self.adversarial!r}")


@dataclass
class SynthDataset:
    scene_ids: list[str]
    object_ids: list[str]
    targets: dict[str, str]
    records: list[EmbeddingRecord]
    decoys: dict[str, str] = field(default_factory=dict)


def _unit(rng, dim: int) -> np.ndarray:
    while True:
        v = rng.standard_normal(dim)
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            return v / norm


def _sample_with_margin(rng, dim: int, anchors: np.ndarray, max_cos: float,
                        retries: int, what: str) -> np.ndarray:
    """A unit vector whose cosine against every anchor stays below max_cos."""
    for _ in range(retries):
        v = _unit(rng, dim)
        if anchors.size == 0 or float((anchors @ v).max()) <= max_cos:
            return v
    raise InfeasibleMargin(
        f"could not sample {what} with cosine <= {max_cos:.4f} "
        f"after {retries} attempts (dim={dim})"
    )


def _planted_query(rng, anchor: np.ndarray, competitors: np.ndarray, noise: float,
                   retries: int, what: str) -> np.ndarray:
    """A noisy copy of the anchor that still beats every competitor."""
    dim = anchor.size
    for _ in range(retries):
        q = anchor + noise * _unit(rng, dim)
        q = q / np.linalg.norm(q)
        own = float(q @ anchor)
        best = float((competitors @ q).max()) if competitors.size else -1.0
        if own > best + _SCORE_TOL:
            return q
    raise InfeasibleMargin(f"could not plant {what} with a winning margin")


def generate(config: SynthConfig) -> SynthDataset:
    """Build the planted dataset deterministically from the seed."""
    rng = np.random.default_rng(config.seed)
    eps = config.noise
    max_cos = 1.0 - (2.0 * eps + 2.0 * eps * eps + config.margin_slack)
    if max_cos <= -1.0:
        raise ConfigError(f"noise {eps} leaves no feasible margin")

    scene_ids = [f"scene_{i:04d}" for i in range(config.scenes)]
    object_ids = [f"obj_{i:04d}" for i in range(config.objects)]
    target_idx = rng.permutation(config.objects)[: config.scenes]
    targets = {scene_ids[i]: object_ids[int(target_idx[i])] for i in range(config.scenes)}

    # object vectors per modality: targets first (mutual margin), then the rest
    vectors: dict[str, dict[str, np.ndarray]] = {"rgb": {}, "sil": {}}
    for space in ("rgb", "sil"):
        anchors = np.empty((0, config.dim))
        for i in range(config.scenes):
            v = _sample_with_margin(rng, config.dim, anchors, max_cos,
                                    config.max_retries, f"{space} target vector")
            vectors[space][object_ids[int(target_idx[i])]] = v
            anchors = np.vstack([anchors, v])
        for oid in object_ids:
            if oid in vectors[space]:
                continue
            vectors[space][oid] = _sample_with_margin(
                rng, config.dim, anchors, max_cos, config.max_retries,
                f"{space} object vector")

    target_rgb = np.stack([vectors["rgb"][targets[s]] for s in scene_ids])
    target_sil = np.stack([vectors["sil"][targets[s]] for s in scene_ids])

    # planted queries: noisy copies that numerically beat every other object
    queries: dict[str, dict[str, np.ndarray]] = {"text": {}, "shape": {}}
    for i, sid in enumerate(scene_ids):
        tid = targets[sid]
        for space, qspace, anchor in (
            ("rgb", "text", target_rgb[i]),
            ("sil", "shape", target_sil[i]),
        ):
            competitors = np.stack([vectors[space][o] for o in object_ids if o != tid])
            queries[qspace][sid] = _planted_query(
                rng, anchor, competitors, eps, config.max_retries,
                f"{qspace} query for {sid}")

    decoys: dict[str, str] = {}
    if config.adversarial == ADVERSARIAL_TEXT_DECOYS:
        sil_targets = np.stack([vectors["sil"][targets[s]] for s in scene_ids])
        for i, sid in enumerate(scene_ids):
            did = f"obj_decoy_{i:04d}"
            decoys[sid] = did
            vectors["rgb"][did] = _plant_text_decoy(
                rng, sid, scene_ids, targets, vectors["rgb"], queries["text"],
                eps, config.max_retries)
            vectors["sil"][did] = _sample_with_margin(
                rng, config.dim, sil_targets, max_cos, config.max_retries,
                f"silhouette for decoy {did}")
        object_ids = sorted(object_ids + list(decoys.values()))
        _verify_shape_winners(scene_ids, object_ids, targets, vectors["sil"], queries["shape"])

    records = [
        EmbeddingRecord(oid, "object_rgb", vectors["rgb"][oid]) for oid in object_ids
    ] + [
        EmbeddingRecord(oid, "object_silhouette", vectors["sil"][oid]) for oid in object_ids
    ] + [
        EmbeddingRecord(sid, "query_text", queries["text"][sid]) for sid in scene_ids
    ] + [
        EmbeddingRecord(sid, "query_shape", queries["shape"][sid]) for sid in scene_ids
    ]
    return SynthDataset(
        scene_ids=scene_ids,
        object_ids=object_ids,
        targets=targets,
        records=records,
        decoys=decoys,
    )


def _plant_text_decoy(rng, sid, scene_ids, targets, rgb, text_queries, eps, retries):
    """An RGB vector that beats the target for this scene's text query only.

    Target rank must stay exactly 2 for this scene and 1 for every other,
    so the decoy is re-checked against every scene's query.
    """
    q = text_queries[sid]
    own_target = float(q @ rgb[targets[sid]])
    for _ in range(retries):
        v = q + (eps / 10.0 if eps > 0 else 1e-3) * _unit(rng, q.size)
        v = v / np.linalg.norm(v)
        if float(q @ v) <= own_target + _SCORE_TOL:
            continue
        ok = True
        for other in scene_ids:
            if other == sid:
                continue
            oq = text_queries[other]
            if float(oq @ v) >= float(oq @ rgb[targets[other]]) - _SCORE_TOL:
                ok = False
                break
        if ok:
            return v
    raise InfeasibleMargin(f"could not plant a text decoy for {sid}")


def _verify_shape_winners(scene_ids, object_ids, targets, sil, shape_queries):
    for sid in scene_ids:
        q = shape_queries[sid]
        tid = targets[sid]
        own = float(q @ sil[tid])
        best_other = max(float(q @ sil[o]) for o in object_ids if o != tid)
        if own <= best_other + _SCORE_TOL:
            raise InfeasibleMargin(f"shape margin for {sid} was not preserved")


def write_dataset(data: SynthDataset, out_dir, seed: int = 0) -> None:
    """Write the raster tree, embedding file, and truth CSV under ``out_dir``."""
    from pathlib import Path

    out = Path(out_dir)
    raster_rng = np.random.default_rng(seed ^ 0x5EED)
    key = DEFAULT_MASK_COLOR
    for sid in data.scene_ids:
        scene_dir = out / "scenes" / sid
        scene_dir.mkdir(parents=True, exist_ok=True)
        img = np.full((16, 16, 3), 40, dtype=np.uint8)
        img[4:10, 5:11] = key
        Image.fromarray(img).save(scene_dir / "masked.png")
        prompt = f"a synthetic prompt describing {data.targets[sid]}\n"
        (scene_dir / "query.txt").write_bytes(prompt.encode("utf-8"))
    for oid in data.object_ids:
        obj_dir = out / "objects" / oid
        obj_dir.mkdir(parents=True, exist_ok=True)
        img = raster_rng.integers(0, 256, size=(8, 8, 3), dtype=np.uint8)
        Image.fromarray(img).save(obj_dir / "image.png")
    write_embeddings(out / "embeddings.jsonl", ENCODER_NAME, data.records)
    write_truth_csv(out / "truth.csv", data.targets)
