import numpy as np
import pytest
from PIL import Image

from conftest import build_dataset
from samurai.dataset import load_scene, read_prompt, scan_dataset
from samurai.errors import (
    DecodeError,
    EmptyDataset,
    MalformedDataset,
    MissingRoot,
    Utf8Error,
)


class TestScan:
    def test_counts_and_sort_order(self, tmp_path):
        root = build_dataset(tmp_path / "d", scenes=3, objects=5)
        manifest = scan_dataset(root)
        assert manifest.scene_ids() == ["s0", "s1", "s2"]
        assert manifest.object_ids() == ["o0", "o1", "o2", "o3", "o4"]

    def test_scan_is_deterministic(self, tmp_path):
        root = build_dataset(tmp_path / "d")
        assert scan_dataset(root) == scan_dataset(root)

    def test_missing_root(self, tmp_path):
        with pytest.raises(MissingRoot):
            scan_dataset(tmp_path / "nope")

    def test_missing_objects_dir_named(self, tmp_path):
        root = build_dataset(tmp_path / "d")
        import shutil

        shutil.rmtree(root / "objects")
        with pytest.raises(MissingRoot) as err:
            scan_dataset(root)
        assert "objects" in str(err.value)

    def test_malformed_entry_fatal_by_default(self, tmp_path):
        root = build_dataset(tmp_path / "d", scenes=2)
        (root / "scenes" / "s1" / "query.txt").unlink()
        with pytest.raises(MalformedDataset) as err:
            scan_dataset(root)
        assert err.value.entries == [("s1", "missing query.txt")]

    def test_lenient_skips_malformed(self, tmp_path):
        root = build_dataset(tmp_path / "d", scenes=3)
        (root / "scenes" / "s1" / "masked.png").unlink()
        manifest = scan_dataset(root, lenient=True)
        assert manifest.scene_ids() == ["s0", "s2"]

    def test_empty_prompt_is_malformed(self, tmp_path):
        root = build_dataset(tmp_path / "d")
        (root / "scenes" / "s0" / "query.txt").write_text("  \n", encoding="utf-8")
        with pytest.raises(MalformedDataset):
            scan_dataset(root)

    def test_empty_dataset(self, tmp_path):
        root = tmp_path / "d"
        (root / "scenes").mkdir(parents=True)
        (root / "objects").mkdir()
        with pytest.raises(EmptyDataset):
            scan_dataset(root)

    def test_name_overrides(self, tmp_path):
        root = build_dataset(tmp_path / "d", scenes=1, objects=1)
        (root / "scenes" / "s0" / "masked.png").rename(root / "scenes" / "s0" / "m.png")
        (root / "objects" / "o0" / "image.png").rename(root / "objects" / "o0" / "rgb.png")
        manifest = scan_dataset(root, scene_image_name="m.png", object_image_name="rgb.png")
        assert manifest.scene_ids() == ["s0"]

    def test_stray_files_ignored(self, tmp_path):
        root = build_dataset(tmp_path / "d")
        (root / "scenes" / "README").write_text("not a scene", encoding="utf-8")
        (root / "objects" / "o0" / "model.obj").write_text("v 0 0 0", encoding="utf-8")
        manifest = scan_dataset(root)
        assert "README" not in manifest.scene_ids()


class TestLoadScene:
    def test_round_trip(self, tmp_path):
        root = build_dataset(tmp_path / "d", scenes=1)
        manifest = scan_dataset(root)
        raster, text = load_scene(manifest.scenes[0])
        assert raster.shape == (24, 24, 3) and raster.dtype == np.uint8
        assert text == "a fixture prompt 0"

    def test_trailing_newline_stripped(self, tmp_path):
        path = tmp_path / "q.txt"
        path.write_bytes(b"a red wooden chair\n")
        assert read_prompt(path) == "a red wooden chair"
        path.write_bytes(b"a red wooden chair")
        assert read_prompt(path) == "a red wooden chair"
        path.write_bytes(b"two lines\nkept\n")
        assert read_prompt(path) == "two lines\nkept"

    def test_invalid_utf8(self, tmp_path):
        path = tmp_path / "q.txt"
        path.write_bytes(b"\xff\xfe broken")
        with pytest.raises(Utf8Error):
            read_prompt(path)

    def test_truncated_png(self, tmp_path):
        root = build_dataset(tmp_path / "d", scenes=1)
        image_path = root / "scenes" / "s0" / "masked.png"
        image_path.write_bytes(image_path.read_bytes()[:20])
        manifest = scan_dataset(root)
        with pytest.raises(DecodeError):
            load_scene(manifest.scenes[0])

    def test_alpha_dropped(self, tmp_path):
        path = tmp_path / "rgba.png"
        rgba = np.zeros((4, 4, 4), dtype=np.uint8)
        rgba[..., 3] = 128
        Image.fromarray(rgba, mode="RGBA").save(path)
        from samurai.dataset import load_image_rgb

        assert load_image_rgb(path).shape == (4, 4, 3)
