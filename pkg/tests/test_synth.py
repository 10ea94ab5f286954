import numpy as np
import pytest

from samurai.dataset import scan_dataset
from samurai.embeddings import cosine, load_embeddings
from samurai.errors import ConfigError, InfeasibleMargin
from samurai.metrics import load_truth_csv
from samurai.synth import SynthConfig, generate, write_dataset


def winners(store, scene_ids, object_ids, query_modality, object_modality):
    out = {}
    for sid in scene_ids:
        q = store.get(query_modality, sid)
        scored = sorted(
            ((cosine(q, store.get(object_modality, oid)), oid) for oid in object_ids),
            reverse=True,
        )
        out[sid] = scored[0][1]
    return out


class TestGenerate:
    def test_planted_targets_win_both_modalities(self):
        data = generate(SynthConfig(scenes=6, objects=20, dim=16, seed=5))
        from conftest import make_store

        store = make_store([(r.id, r.modality, r.vector) for r in data.records])
        text_winners = winners(store, data.scene_ids, data.object_ids,
                               "query_text", "object_rgb")
        shape_winners = winners(store, data.scene_ids, data.object_ids,
                                "query_shape", "object_silhouette")
        assert text_winners == data.targets
        assert shape_winners == data.targets

    def test_adversarial_decoys_take_text_but_not_shape(self):
        data = generate(
            SynthConfig(scenes=5, objects=15, dim=16, seed=8, adversarial="text-decoys")
        )
        from conftest import make_store

        store = make_store([(r.id, r.modality, r.vector) for r in data.records])
        text_winners = winners(store, data.scene_ids, data.object_ids,
                               "query_text", "object_rgb")
        shape_winners = winners(store, data.scene_ids, data.object_ids,
                                "query_shape", "object_silhouette")
        for sid in data.scene_ids:
            assert text_winners[sid] == data.decoys[sid] != data.targets[sid]
            assert shape_winners[sid] == data.targets[sid]

    def test_infeasible_margin(self):
        with pytest.raises(InfeasibleMargin):
            generate(SynthConfig(scenes=20, objects=40, dim=2, seed=1, noise=0.3,
                                 max_retries=50))

    def test_parameter_validation(self):
        with pytest.raises(ConfigError):
            SynthConfig(scenes=0, objects=5, dim=8, seed=0)
        with pytest.raises(ConfigError):
            SynthConfig(scenes=5, objects=3, dim=8, seed=0)
        with pytest.raises(ConfigError):
            SynthConfig(scenes=2, objects=5, dim=1, seed=0)


class TestWriteDataset:
    def test_same_seed_byte_identical(self, tmp_path):
        for sub in ("a", "b"):
            data = generate(SynthConfig(scenes=3, objects=9, dim=8, seed=42))
            write_dataset(data, tmp_path / sub, seed=42)
        for rel in ("embeddings.jsonl", "truth.csv", "scenes/scene_0000/masked.png",
                    "objects/obj_0000/image.png"):
            assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()

    def test_outputs_scan_and_load(self, tmp_path):
        data = generate(SynthConfig(scenes=3, objects=9, dim=8, seed=2))
        write_dataset(data, tmp_path / "d", seed=2)
        manifest = scan_dataset(tmp_path / "d")
        assert manifest.scene_ids() == data.scene_ids
        assert manifest.object_ids() == data.object_ids
        store = load_embeddings(tmp_path / "d" / "embeddings.jsonl")
        assert store.ids("object_rgb") == data.object_ids
        assert np.linalg.norm(store.get("query_text", "scene_0000")) == pytest.approx(
            1.0, abs=1e-6
        )
        truth = load_truth_csv(tmp_path / "d" / "truth.csv")
        assert truth == data.targets
