"""Dataset discovery and validation.

Expected layout::

    <root>/scenes/<scene_id>/masked.png    key-colored RGB raster
    <root>/scenes/<scene_id>/query.txt     natural-language prompt
    <root>/objects/<object_id>/image.png   candidate RGB raster

File names are conventions and can be overridden; any other files inside
the entries (textures, 3-D models, ...) are ignored.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from samurai.errors import (
    DecodeError,
    EmptyDataset,
    MalformedDataset,
    MissingRoot,
    Utf8Error,
)

logger = logging.getLogger("samurai.dataset")

SCENE_IMAGE_NAME = "masked.png"
PROMPT_NAME = "query.txt"
OBJECT_IMAGE_NAME = "image.png"


@dataclass(frozen=True)
class SceneEntry:
    scene_id: str
    masked_image_path: Path
    query_text: str


@dataclass(frozen=True)
class ObjectEntry:
    object_id: str
    rgb_image_path: Path


@dataclass(frozen=True)
class Manifest:
    scenes: tuple[SceneEntry, ...]
    objects: tuple[ObjectEntry, ...]

    def scene_ids(self) -> list[str]:
        return [s.scene_id for s in self.scenes]

    def object_ids(self) -> list[str]:
        return [o.object_id for o in self.objects]


def read_prompt(path: Path) -> str:
    """Prompt text, verbatim minus one trailing newline."""
    try:
        raw = path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise Utf8Error(f"{path}: {exc}") from None
    if raw.endswith("\n"):
        raw = raw[:-1]
        if raw.endswith("\r"):
            raw = raw[:-1]
    return raw


def load_image_rgb(path: Path) -> np.ndarray:
    """Decode to an (H, W, 3) uint8 array; alpha is dropped."""
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"))
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise DecodeError(f"{path}: {exc}") from None


def scan_dataset(
    root,
    scene_image_name: str = SCENE_IMAGE_NAME,
    prompt_name: str = PROMPT_NAME,
    object_image_name: str = OBJECT_IMAGE_NAME,
    lenient: bool = False,
) -> Manifest:
    """Walk the tree and build a manifest sorted by id.

    Malformed entries (missing files, empty or undecodable prompts) abort
    the scan unless ``lenient``, in which case they are logged and skipped.
    """
    root = Path(root)
    if not root.is_dir():
        raise MissingRoot(f"dataset root {root} does not exist")
    scenes_dir = root / "scenes"
    objects_dir = root / "objects"
    for required in (scenes_dir, objects_dir):
        if not required.is_dir():
            raise MissingRoot(f"missing required directory {required}")

    malformed: list[tuple[str, str]] = []
    scenes: list[SceneEntry] = []
    for entry in sorted(p for p in scenes_dir.iterdir() if p.is_dir()):
        image_path = entry / scene_image_name
        prompt_path = entry / prompt_name
        if not image_path.is_file():
            malformed.append((entry.name, f"missing {scene_image_name}"))
            continue
        if not prompt_path.is_file():
            malformed.append((entry.name, f"missing {prompt_name}"))
            continue
        try:
            text = read_prompt(prompt_path)
        except Utf8Error as exc:
            malformed.append((entry.name, str(exc)))
            continue
        if not text.strip():
            malformed.append((entry.name, "empty prompt"))
            continue
        scenes.append(SceneEntry(entry.name, image_path, text))

    objects: list[ObjectEntry] = []
    for entry in sorted(p for p in objects_dir.iterdir() if p.is_dir()):
        image_path = entry / object_image_name
        if not image_path.is_file():
            malformed.append((entry.name, f"missing {object_image_name}"))
            continue
        objects.append(ObjectEntry(entry.name, image_path))

    if malformed:
        if not lenient:
            raise MalformedDataset(malformed)
        for eid, reason in malformed:
            logger.warning("skipping %s: %s", eid, reason)
    if not scenes or not objects:
        raise EmptyDataset(
            f"dataset at {root} has {len(scenes)} scenes and {len(objects)} objects"
        )
    return Manifest(scenes=tuple(scenes), objects=tuple(objects))


def load_scene(entry: SceneEntry) -> tuple[np.ndarray, str]:
    """Decoded scene raster plus its prompt."""
    return load_image_rgb(entry.masked_image_path), entry.query_text
