"""Masked-region preprocessing.

Four sequential steps turn a key-colored scene image into a query crop:
color keying to a binary mask, largest-connected-component selection,
padded bounding-box cropping, and mask refinement inside the crop.

Masks are boolean (H, W) arrays; images are uint8 (H, W, 3) arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from samurai import kernels
from samurai.errors import EmptyMask, EmptyRefinedMask, InternalError

DEFAULT_MASK_COLOR = (135, 206, 235)
DEFAULT_PADDING = 10
DEFAULT_CONNECTIVITY = 8


@dataclass(frozen=True)
class MaskKey:
    """Reference color for mask keying, with a per-channel tolerance."""

    r: int
    g: int
    b: int
    tolerance: int = 0

    def __post_init__(self):
        for name in ("r", "g", "b"):
            v = getattr(self, name)
            if not 0 <= v <= 255:
                raise ValueError(f"channel {name}={v} outside 0..255")
        if not 0 <= self.tolerance <= 255:
            raise ValueError(f"tolerance {self.tolerance} outside 0..255")


@dataclass(frozen=True)
class BBox:
    """Pixel box, top-left inclusive, bottom-right exclusive."""

    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0


@dataclass(frozen=True)
class Component:
    """One connected component: label, flat row-major indices, size."""

    label: int
    indices: np.ndarray
    size: int

    def to_mask(self, shape) -> np.ndarray:
        out = np.zeros(shape[0] * shape[1], dtype=bool)
        out[self.indices] = True
        return out.reshape(shape)


@dataclass
class CroppedQuery:
    scene_id: str
    crop_rgb: np.ndarray
    refined_mask: np.ndarray


@dataclass
class PreprocessResult:
    """Crop artifacts plus the per-step statistics worth persisting."""

    query: CroppedQuery
    bbox: BBox
    component_sizes: list[int] = field(default_factory=list)
    mask_popcount: int = 0
    largest_popcount: int = 0
    refined_popcount: int = 0


def extract_mask(image: np.ndarray, key: MaskKey) -> np.ndarray:
    """True where the max per-channel distance to the key color is within tolerance."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError("image must be (H, W, 3)")
    diff = np.abs(image.astype(np.int16) - np.array([key.r, key.g, key.b], dtype=np.int16))
    return diff.max(axis=2) <= key.tolerance


def connected_components(mask: np.ndarray, connectivity: int = DEFAULT_CONNECTIVITY) -> list[Component]:
    """Components of the true pixels, sorted by (size desc, first pixel asc)."""
    labels = kernels.label_components(np.asarray(mask, dtype=bool), connectivity)
    flat = labels.ravel()
    n = int(flat.max())
    if n == 0:
        return []
    sizes = np.bincount(flat, minlength=n + 1)
    comps = [
        Component(label=lab, indices=np.flatnonzero(flat == lab), size=int(sizes[lab]))
        for lab in range(1, n + 1)
    ]
    # labels are numbered by first appearance, so label order is first-pixel order
    comps.sort(key=lambda c: (-c.size, c.label))
    return comps


def largest_component(mask: np.ndarray, connectivity: int = DEFAULT_CONNECTIVITY) -> np.ndarray:
    """Keep only the largest component (ties: earliest first pixel)."""
    mask = np.asarray(mask, dtype=bool)
    labels = kernels.label_components(mask, connectivity)
    n = int(labels.max())
    if n == 0:
        raise EmptyMask("mask has no true pixels")
    sizes = np.bincount(labels.ravel(), minlength=n + 1)
    sizes[0] = 0
    best = int(np.flatnonzero(sizes == sizes.max())[0])
    return labels == best


def padded_bbox(mask: np.ndarray, padding: int = DEFAULT_PADDING) -> BBox:
    """Tight bounds of the true pixels, padded and clamped to the raster."""
    mask = np.asarray(mask, dtype=bool)
    if padding < 0:
        raise ValueError(f"padding must be non-negative, got {padding}")
    rows = np.flatnonzero(mask.any(axis=1))
    if rows.size == 0:
        raise EmptyMask("mask has no true pixels")
    cols = np.flatnonzero(mask.any(axis=0))
    h, w = mask.shape
    return BBox(
        x0=max(int(cols[0]) - padding, 0),
        y0=max(int(rows[0]) - padding, 0),
        x1=min(int(cols[-1]) + 1 + padding, w),
        y1=min(int(rows[-1]) + 1 + padding, h),
    )


def crop_and_refine(image: np.ndarray, bbox: BBox, key: MaskKey, scene_id: str = "") -> CroppedQuery:
    """Crop to the box and re-key the mask inside the crop."""
    image = np.asarray(image)
    h, w = image.shape[:2]
    if not (0 <= bbox.x0 < bbox.x1 <= w and 0 <= bbox.y0 < bbox.y1 <= h):
        raise InternalError(f"bbox {bbox} invalid for {w}x{h} image")
    crop = np.ascontiguousarray(image[bbox.y0:bbox.y1, bbox.x0:bbox.x1])
    refined = extract_mask(crop, key)
    if not refined.any():
        raise EmptyRefinedMask(
            f"scene {scene_id or '?'}: no key-colored pixel inside the crop"
        )
    return CroppedQuery(scene_id=scene_id, crop_rgb=crop, refined_mask=refined)


def render_silhouette(mask: np.ndarray) -> np.ndarray:
    """White foreground on black background, 3 channels."""
    mask = np.asarray(mask, dtype=bool)
    out = np.zeros((*mask.shape, 3), dtype=np.uint8)
    out[mask] = 255
    return out


def preprocess_scene(
    scene_id: str,
    image: np.ndarray,
    key: MaskKey,
    padding: int = DEFAULT_PADDING,
    connectivity: int = DEFAULT_CONNECTIVITY,
) -> PreprocessResult:
    """Run the full four-step pipeline for one scene image."""
    full = extract_mask(image, key)
    if not full.any():
        raise EmptyMask(f"scene {scene_id}: no pixel within tolerance of the mask color")
    comps = connected_components(full, connectivity)
    largest = comps[0].to_mask(full.shape)
    bbox = padded_bbox(largest, padding)
    query = crop_and_refine(image, bbox, key, scene_id)
    return PreprocessResult(
        query=query,
        bbox=bbox,
        component_sizes=[c.size for c in comps],
        mask_popcount=int(full.sum()),
        largest_popcount=comps[0].size,
        refined_popcount=int(query.refined_mask.sum()),
    )
