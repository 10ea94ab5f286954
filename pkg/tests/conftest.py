import numpy as np
import pytest
from PIL import Image

from samurai.embeddings import EmbeddingRecord, EmbeddingStore


def make_mask(rows):
    """Boolean mask from strings of '0'/'1' (or '.'/'#')."""
    return np.array([[c in "1#" for c in row] for row in rows], dtype=bool)


def make_store(records, encoder="test"):
    store = EmbeddingStore(encoder=encoder)
    for rid, modality, vec in records:
        store.add(EmbeddingRecord(rid, modality, np.asarray(vec, dtype=np.float64)))
    return store


def random_mask(rng, max_side=64, density=None):
    h = int(rng.integers(1, max_side + 1))
    w = int(rng.integers(1, max_side + 1))
    if density is None:
        density = rng.uniform(0.1, 0.9)
    return rng.random((h, w)) < density


@pytest.fixture
def tiny_dataset(tmp_path):
    """Two scenes and three objects with key-colored mask regions."""
    return build_dataset(tmp_path / "data", scenes=2, objects=3)


def build_dataset(root, scenes=2, objects=3, key=(135, 206, 235)):
    for i in range(scenes):
        scene = root / "scenes" / f"s{i}"
        scene.mkdir(parents=True)
        img = np.zeros((24, 24, 3), dtype=np.uint8)
        img[4 + i : 12 + i, 6 : 14 + i] = key
        Image.fromarray(img).save(scene / "masked.png")
        (scene / "query.txt").write_text(f"a fixture prompt {i}\n", encoding="utf-8")
    for i in range(objects):
        obj = root / "objects" / f"o{i}"
        obj.mkdir(parents=True)
        img = np.full((8, 8, 3), 10 * i + 5, dtype=np.uint8)
        Image.fromarray(img).save(obj / "image.png")
    return root
