"""Command-line entry points.

Exit codes: 0 ok, 2 invalid input, 3 no reference marker, 4 I/O failure.
Set WOUNDAMBIT_LOG (debug/info/warning/error) to control verbosity.
"""

from __future__ import annotations

import json
import logging
import os
import shutil
import sys
from pathlib import Path

import click
import numpy as np
from PIL import Image

from . import calibrate, expert
from .dedup import DEFAULT_THRESHOLD, dedup as run_dedup
from .errors import IOFailureError, WoundAmbitError
from .metrics import ConfusionCounts, accumulate, finalize, majority_vote
from .markers.render import render_reference_sheet
from .mask import binarize, load_image, load_mask, save_mask
from .overlay import save_overlay
from .pipeline import measure_image

log = logging.getLogger("woundambit")


def _setup_logging():
    level = os.environ.get("WOUNDAMBIT_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr)


def _fail(err: WoundAmbitError):
    click.echo(f"error: {err}", err=True)
    sys.exit(err.exit_code)


@click.group()
def main():
    """Wound measurement and segmentation-evaluation toolkit."""
    _setup_logging()


@main.command()
@click.option("--image", "image_path", required=True, type=click.Path(exists=True))
@click.option("--mask", "mask_path", required=True, type=click.Path(exists=True))
@click.option("--layout", "layout_path", type=click.Path(exists=True), help="Reference layout JSON; default is the built-in sheet.")
@click.option("--binarize-threshold", default=128, show_default=True)
@click.option("--resize-mask", is_flag=True, help="Nearest-neighbor resize the mask to the image size if they differ.")
@click.option("--out", "out_path", type=click.Path(), help="Write the measurement JSON here instead of stdout.")
@click.option("--overlay", "overlay_path", type=click.Path(), help="Also render the overlay PNG.")
def measure(image_path, mask_path, layout_path, binarize_threshold, resize_mask, out_path, overlay_path):
    """Measure wound size from a photo plus a segmentation mask."""
    try:
        image = load_image(image_path)
        mask = load_mask(mask_path, threshold=binarize_threshold)
        if resize_mask and mask.shape != image.shape[:2]:
            h, w = image.shape[:2]
            im = Image.fromarray(np.where(mask, 255, 0).astype(np.uint8))
            mask = np.asarray(im.resize((w, h), Image.NEAREST)) >= 128
        layout = calibrate.load_layout(layout_path) if layout_path else None
        report, overlay = measure_image(image, mask, layout, want_overlay=overlay_path is not None)
        for warning in report["warnings"]:
            click.echo(f"warning: {warning}", err=True)
        text = json.dumps(report, indent=2)
        if out_path:
            Path(out_path).write_text(text)
        else:
            click.echo(text)
        if overlay_path:
            save_overlay(overlay, overlay_path)
    except WoundAmbitError as e:
        _fail(e)


def _paired_stems(pred_dir: Path, gt_dir: Path):
    preds = {p.stem: p for p in pred_dir.iterdir() if p.suffix.lower() == ".png"}
    gts = {p.stem: p for p in gt_dir.iterdir() if p.suffix.lower() == ".png"}
    common = sorted(set(preds) & set(gts))
    if not common:
        raise IOFailureError("no prediction/ground-truth pairs with matching file stems")
    return [(stem, preds[stem], gts[stem]) for stem in common]


@main.command()
@click.option("--pred-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--gt-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--binarize-threshold", default=128, show_default=True)
@click.option("--out", "out_path", type=click.Path())
def metrics(pred_dir, gt_dir, binarize_threshold, out_path):
    """Micro-averaged IoU/Dice/precision/recall over mask pairs (paired by stem)."""
    try:
        acc = ConfusionCounts()
        for stem, pred_path, gt_path in _paired_stems(Path(pred_dir), Path(gt_dir)):
            accumulate(
                load_mask(pred_path, binarize_threshold), load_mask(gt_path, binarize_threshold), acc
            )
        report = finalize(acc)
        click.echo(report.format_row())
        payload = json.dumps(report.as_dict(), indent=2)
        if out_path:
            Path(out_path).write_text(payload)
        else:
            click.echo(payload)
    except WoundAmbitError as e:
        _fail(e)


@main.command()
@click.option("--mask-dir", "mask_dirs", multiple=True, required=True, type=click.Path(exists=True, file_okay=False), help="Repeat once per model; masks paired by file stem.")
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--binarize-threshold", default=128, show_default=True)
def ensemble(mask_dirs, out_dir, binarize_threshold):
    """Pixel-wise majority vote across mask sets."""
    try:
        dirs = [Path(d) for d in mask_dirs]
        stems = set.intersection(
            *({p.stem for p in d.iterdir() if p.suffix.lower() == ".png"} for d in dirs)
        )
        if not stems:
            raise IOFailureError("no mask stems common to all directories")
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for stem in sorted(stems):
            voted = majority_vote(
                [load_mask(d / f"{stem}.png", binarize_threshold) for d in dirs]
            )
            save_mask(voted, out / f"{stem}.png")
        click.echo(f"wrote {len(stems)} ensembled masks to {out}")
    except WoundAmbitError as e:
        _fail(e)


@main.command()
@click.option("--dir", "image_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--threshold", default=DEFAULT_THRESHOLD, show_default=True)
@click.option("--report", "report_path", type=click.Path())
@click.option("--apply", "apply_moves", is_flag=True, help="Move duplicates into a quarantine subdirectory (default: dry run).")
def dedup(image_dir, threshold, report_path, apply_moves):
    """Drop byte-identical and perceptually near-duplicate images."""
    try:
        root = Path(image_dir)
        files = sorted(p for p in root.iterdir() if p.is_file() and p.suffix.lower() in (".png", ".jpg", ".jpeg"))
        entries, raw = [], {}
        for p in files:
            try:
                entries.append((p.name, load_image(p)))
                raw[p.name] = p.read_bytes()
            except (WoundAmbitError, OSError) as e:
                entries.append((p.name, np.empty(0)))  # recorded as per-file error
                log.warning("unreadable %s: %s", p, e)
        report = run_dedup(entries, threshold=threshold, raw_bytes=raw)
        if apply_moves and report.duplicates:
            quarantine = root / "duplicates"
            quarantine.mkdir(exist_ok=True)
            for pair in report.duplicates:
                shutil.move(str(root / pair.duplicate_id), str(quarantine / pair.duplicate_id))
        payload = json.dumps(report.as_dict(), indent=2)
        if report_path:
            Path(report_path).write_text(payload)
        click.echo(f"kept {len(report.kept)}, duplicates {len(report.duplicates)}, errors {len(report.errors)}")
        if not report_path:
            click.echo(payload)
    except WoundAmbitError as e:
        _fail(e)


def _variant_predictions(measurement_dir: Path) -> dict:
    """Per-image (height, width) of the largest wound from measurement/1 files."""
    preds = {}
    for path in sorted(measurement_dir.glob("*.json")):
        with open(path) as f:
            doc = json.load(f)
        if doc.get("schema") != "measurement/1" or not doc.get("wounds"):
            continue
        top = doc["wounds"][0]  # wounds are sorted by area descending
        preds[path.stem] = (top["height_mm"], top["width_mm"])
    return preds


@main.command(name="eval")
@click.option("--ratings", "ratings_path", required=True, type=click.Path(exists=True))
@click.option("--measurements", "measurement_specs", multiple=True, metavar="VARIANT=DIR", help="Directory of per-image measurement JSONs for one variant; repeatable.")
@click.option("--rel-dev-threshold", default=0.5, show_default=True)
@click.option("--out", "out_path", type=click.Path())
def eval_cmd(ratings_path, measurement_specs, rel_dev_threshold, out_path):
    """Expert-assessment report: CMA, ECR and (with measurements) size errors."""
    try:
        ratings = expert.load_ratings(ratings_path)
        kept, gt = expert.filter_consistent(ratings, threshold=rel_dev_threshold)
        rows = {}
        for variant in ratings.variants:
            rows[variant] = {
                "cma": expert.cma(ratings, variant),
                "ecr": expert.ecr(ratings, variant),
            }
        for spec_item in measurement_specs:
            if "=" not in spec_item:
                raise IOFailureError(f"--measurements expects VARIANT=DIR, got {spec_item!r}")
            variant, dir_path = spec_item.split("=", 1)
            if variant not in rows:
                raise IOFailureError(f"variant {variant!r} not present in the ratings file")
            preds = _variant_predictions(Path(dir_path))
            err = expert.size_errors(preds, gt)
            for w in err.warnings:
                click.echo(f"warning: {variant}: {w}", err=True)
            rows[variant]["size"] = err.as_dict()
        payload = {
            "rel_dev_threshold": rel_dev_threshold,
            "kept_images": kept,
            "n_rated_images": len(ratings.images),
            "variants": rows,
        }
        click.echo(f"{'variant':<16} {'CMA':>6} {'ECR':>6}   MPH+/-SD      MAE   MAPE   MPW+/-SD      MAE   MAPE")
        for variant, row in rows.items():
            line = f"{variant:<16} {row['cma']:>6.1f} {row['ecr']:>6.1f}"
            if "size" in row:
                s = row["size"]
                line += (
                    f"   {s['mph']:.1f}+/-{s['mph_sd']:.1f}  {s['mae_h']:>5.1f}  {s['mape_h']:>5.1f}"
                    f"   {s['mpw']:.1f}+/-{s['mpw_sd']:.1f}  {s['mae_w']:>5.1f}  {s['mape_w']:>5.1f}"
                )
            click.echo(line)
        if out_path:
            Path(out_path).write_text(json.dumps(payload, indent=2))
    except WoundAmbitError as e:
        _fail(e)


@main.command(name="gen-ro")
@click.option("--dpi", default=300, show_default=True)
@click.option("--out", "out_path", default="reference-sheet.png", show_default=True, type=click.Path())
@click.option("--layout-out", default="ro-layout.json", show_default=True, type=click.Path())
def gen_ro(dpi, out_path, layout_out):
    """Emit a print-ready reference-object sheet plus its layout file."""
    try:
        sheet, layout = render_reference_sheet(dpi=dpi)
        Image.fromarray(sheet, mode="L").save(out_path)
        calibrate.save_layout(layout, layout_out)
        click.echo(f"wrote {out_path} ({sheet.shape[1]}x{sheet.shape[0]} px at {dpi} dpi) and {layout_out}")
    except WoundAmbitError as e:
        _fail(e)


def _default_bundle_dir():
    candidates = [
        Path(__file__).resolve().parent / "ui",
        Path(__file__).resolve().parents[2] / "frontend" / "dist",
    ]
    for c in candidates:
        if (c / "index.html").exists():
            return c
    return None


@main.command()
@click.option("--images", "images_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--masks", "mask_specs", multiple=True, required=True, metavar="VARIANT=DIR", help="Mask directory for one model variant; repeatable.")
@click.option("--ratings", "ratings_path", default="ratings.json", show_default=True, type=click.Path())
@click.option("--port", default=8787, show_default=True)
@click.option("--seed", type=int, help="Seed the task shuffle for reproducible sessions.")
@click.option("--ui-dir", type=click.Path(exists=True, file_okay=False), help="Override the UI bundle directory.")
def annotate(images_dir, mask_specs, ratings_path, port, seed, ui_dir):
    """Serve the blind mask-review UI and its ratings API."""
    try:
        variant_dirs = {}
        for spec_item in mask_specs:
            if "=" not in spec_item:
                raise IOFailureError(f"--masks expects VARIANT=DIR, got {spec_item!r}")
            variant, dir_path = spec_item.split("=", 1)
            variant_dirs[variant] = dir_path
        from .server import serve_annotate

        bundle = Path(ui_dir) if ui_dir else _default_bundle_dir()
        server = serve_annotate(
            images_dir, variant_dirs, ratings_path, port=port, seed=seed, static_dir=bundle
        )
        click.echo(f"annotation service on http://127.0.0.1:{port}/ (ratings -> {ratings_path})")
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            server.shutdown()
    except WoundAmbitError as e:
        _fail(e)


if __name__ == "__main__":
    main()
