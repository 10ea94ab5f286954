"""Command-line entry point.

Subcommands: ``preprocess`` (mask pipeline artifacts), ``retrieve``
(ranked results CSV), ``evaluate`` (metrics report JSON), ``synth``
(planted synthetic dataset). ``SAMURAI_LOG`` sets the log level.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal
invariant violation.
"""

from __future__ import annotations

import functools
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
from PIL import Image

from samurai import dataset as ds
from samurai import masks, metrics, retrieval, synth
from samurai.embeddings import load_embeddings
from samurai.errors import SamuraiError
from samurai.kernels import BACKEND

logger = logging.getLogger("samurai")


def _setup_logging():
    level = os.environ.get("SAMURAI_LOG", "WARNING").upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        level = "WARNING"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SamuraiError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)
        except click.ClickException:
            raise
        except Exception as exc:
            logger.debug("unexpected failure", exc_info=True)
            click.echo(f"internal error: {exc}", err=True)
            sys.exit(4)

    return wrapper


def _parse_rgb(_ctx, _param, value: str) -> tuple[int, int, int]:
    parts = value.split(",")
    if len(parts) != 3:
        raise click.BadParameter(f"expected R,G,B, got {value!r}")
    try:
        rgb = tuple(int(p) for p in parts)
    except ValueError:
        raise click.BadParameter(f"expected integers, got {value!r}") from None
    if any(not 0 <= c <= 255 for c in rgb):
        raise click.BadParameter(f"channels must be 0..255, got {value!r}")
    return rgb


def _parse_weights(_ctx, _param, value: str) -> retrieval.VoteWeights:
    parts = value.split(",")
    if len(parts) != 4:
        raise click.BadParameter(f"expected 4 comma-separated weights, got {value!r}")
    try:
        a, b, c, d = (int(p) for p in parts)
    except ValueError:
        raise click.BadParameter(f"expected integers, got {value!r}") from None
    try:
        return retrieval.VoteWeights(text=a, shape=b, hybrid_shape=c, hybrid_text=d)
    except SamuraiError as exc:
        raise click.BadParameter(str(exc)) from None


@click.group()
@click.version_option(package_name="samurai-retrieval")
def main():
    """Shape-aware multimodal retrieval engine."""
    _setup_logging()
    logger.debug("kernel backend: %s", BACKEND)


@main.command("preprocess")
@click.option("--root", required=True, type=click.Path(path_type=Path), help="Dataset root.")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path),
              help="Artifact output directory.")
@click.option("--mask-color", default="135,206,235", callback=_parse_rgb, show_default=True,
              help="Mask key color as R,G,B.")
@click.option("--pad", default=masks.DEFAULT_PADDING, show_default=True,
              help="Bounding-box padding in pixels.")
@click.option("--connectivity", type=click.Choice(["4", "8"]), default="8", show_default=True)
@click.option("--tolerance", default=0, show_default=True,
              help="Per-channel color keying tolerance.")
@click.option("--scene-image-name", default=ds.SCENE_IMAGE_NAME, show_default=True)
@click.option("--object-image-name", default=ds.OBJECT_IMAGE_NAME, show_default=True)
@click.option("--lenient", is_flag=True, help="Skip malformed or unprocessable scenes.")
@click.option("--workers", default=0, show_default="cpu count",
              help="Parallel scene workers.")
@_handle_errors
def cmd_preprocess(root, out_dir, mask_color, pad, connectivity, tolerance,
                   scene_image_name, object_image_name, lenient, workers):
    """Crop each scene's masked region and render its silhouette."""
    if pad < 0:
        raise click.BadParameter("--pad must be non-negative")
    if not 0 <= tolerance <= 255:
        raise click.BadParameter("--tolerance must be 0..255")
    key = masks.MaskKey(*mask_color, tolerance=tolerance)
    connectivity = int(connectivity)
    manifest = ds.scan_dataset(root, scene_image_name=scene_image_name,
                               object_image_name=object_image_name, lenient=lenient)

    def run(entry: ds.SceneEntry) -> tuple[str, str | None]:
        image, _ = ds.load_scene(entry)
        result = masks.preprocess_scene(entry.scene_id, image, key, pad, connectivity)
        scene_out = out_dir / entry.scene_id
        scene_out.mkdir(parents=True, exist_ok=True)
        Image.fromarray(result.query.crop_rgb).save(scene_out / "crop.png")
        silhouette = masks.render_silhouette(result.query.refined_mask)
        Image.fromarray(silhouette).save(scene_out / "silhouette.png")
        stats = {
            "scene_id": entry.scene_id,
            "bbox": [result.bbox.x0, result.bbox.y0, result.bbox.x1, result.bbox.y1],
            "component_sizes": result.component_sizes,
            "mask_popcount": result.mask_popcount,
            "largest_popcount": result.largest_popcount,
            "refined_popcount": result.refined_popcount,
            "connectivity": connectivity,
            "mask_color": list(mask_color),
            "tolerance": tolerance,
            "padding": pad,
        }
        (scene_out / "preprocess.json").write_bytes(
            (json.dumps(stats, sort_keys=True) + "\n").encode("utf-8"))
        return entry.scene_id, None

    processed, skipped = [], []
    for scene_id, err in _map_scenes(run, manifest.scenes, workers, lenient):
        (processed if err is None else skipped).append(scene_id)
        if err is not None:
            logger.warning("skipped %s: %s", scene_id, err)
    click.echo(
        f"preprocessed {len(processed)}/{len(manifest.scenes)} scenes "
        f"({len(manifest.objects)} catalog objects) -> {out_dir}"
    )
    if skipped:
        click.echo(f"skipped: {', '.join(skipped)}", err=True)


def _map_scenes(run, scenes, workers, lenient):
    """Run per-scene work with ordered collection; errors respect --lenient."""

    def guarded(entry):
        try:
            return run(entry)
        except SamuraiError as exc:
            if lenient:
                return entry.scene_id, str(exc)
            raise

    if workers == 0:
        workers = os.cpu_count() or 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            yield from pool.map(guarded, scenes)
    else:
        for entry in scenes:
            yield guarded(entry)


@main.command("retrieve")
@click.option("--embeddings", "embeddings_path", required=True,
              type=click.Path(path_type=Path), help="Embedding file (JSONL).")
@click.option("--manifest", "manifest_root", required=True,
              type=click.Path(path_type=Path), help="Dataset root to rank.")
@click.option("--strategy", required=True,
              type=click.Choice(list(retrieval.STRATEGIES)))
@click.option("--k", default=10, show_default=True, help="Final list depth.")
@click.option("--m", default=15, show_default=True, help="Hybrid text-filter depth.")
@click.option("--weights", default="1,1,2,2", callback=_parse_weights, show_default=True,
              help="Vote weights: text,shape,hybrid-shape,hybrid-text.")
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path),
              help="Results CSV path.")
@click.option("--lenient", is_flag=True, help="Skip malformed dataset entries.")
@click.option("--workers", default=0, show_default="cpu count")
@_handle_errors
def cmd_retrieve(embeddings_path, manifest_root, strategy, k, m, weights, out_path,
                 lenient, workers):
    """Rank catalog objects for every scene and write the results CSV."""
    params = retrieval.RetrievalParams(k=k, m=m, weights=weights)
    manifest = ds.scan_dataset(manifest_root, lenient=lenient)
    store = load_embeddings(embeddings_path)
    if workers == 0:
        workers = os.cpu_count() or 1
    results = retrieval.retrieve_all(manifest, store, params, strategy, workers=workers)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    retrieval.write_results_csv(out_path, results)
    click.echo(f"ranked {len(results)} scenes with strategy={strategy} -> {out_path}")


@main.command("evaluate")
@click.option("--results", "results_path", required=True, type=click.Path(path_type=Path),
              help="Results CSV.")
@click.option("--truth", "truth_path", required=True, type=click.Path(path_type=Path),
              help="Ground-truth CSV.")
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path),
              help="Report JSON path.")
@click.option("--lenient", is_flag=True,
              help="Count truth-only scenes as unranked instead of failing.")
@_handle_errors
def cmd_evaluate(results_path, truth_path, out_path, lenient):
    """Score a results CSV against ground truth."""
    results = retrieval.read_results_csv(results_path)
    truth = metrics.load_truth_csv(truth_path)
    report = metrics.evaluate(results, truth, lenient=lenient)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_bytes((report.to_json() + "\n").encode("utf-8"))
    click.echo(
        f"queries={report.num_queries} "
        + " ".join(f"R@{k}={report.recall_at[k]:.4f}" for k in metrics.RECALL_KS)
        + f" MRR={report.mrr:.4f}"
    )


@main.command("synth")
@click.option("--scenes", default=50, show_default=True)
@click.option("--objects", default=200, show_default=True)
@click.option("--dim", default=64, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--adversarial", type=click.Choice([synth.ADVERSARIAL_TEXT_DECOYS]),
              default=None, help="Plant decoys separating the strategies.")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@_handle_errors
def cmd_synth(scenes, objects, dim, seed, adversarial, out_dir):
    """Generate a planted dataset: rasters, embeddings, and ground truth."""
    config = synth.SynthConfig(scenes=scenes, objects=objects, dim=dim, seed=seed,
                               adversarial=adversarial)
    data = synth.generate(config)
    synth.write_dataset(data, out_dir, seed=seed)
    click.echo(
        f"planted {len(data.scene_ids)} scenes over {len(data.object_ids)} objects "
        f"(dim={dim}, seed={seed}"
        + (f", adversarial={adversarial}" if adversarial else "")
        + f") -> {out_dir}"
    )


if __name__ == "__main__":
    main()
