"""Desk-scale studies: the patch-size sweep and the corpus comparison.

Both runners stage their whole output in a temp directory inside the
output root and rename it into place at the end, so a crashed run never
leaves a half-written result. Run directories are named by a hash of the
configuration and the resolved input paths: re-running the same study
lands in the same place.
"""

from __future__ import annotations

import csv
import hashlib
import os
import shutil
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import EmptyListError, InvalidConfigError, ManifestError, QuiltError
from .metrics import (
    GRADIENT_THRESHOLD,
    MetricsRow,
    color_histogram_distance,
    structure_score,
    write_metrics_csv,
)
from .quilting import TransferConfig
from .raster import RasterImage, load_image, save_image
from .transfer import TransferJob, transfer

DEFAULT_PATCH_SIZES = (5, 11, 16, 20)
_GUTTER = 4
MANIFEST_HEADER = ("content", "style", "external")


@dataclass(frozen=True)
class SweepSpec:
    """A patch-size sweep over one content/style pair.

    base_cfg supplies everything except the patch size, which comes from
    patch_sizes; an unset overlap re-derives per size.
    """

    content: Path
    style: Path
    patch_sizes: tuple[int, ...] = DEFAULT_PATCH_SIZES
    base_cfg: TransferConfig = TransferConfig(patch_size=DEFAULT_PATCH_SIZES[0])

    def __post_init__(self):
        sizes = tuple(self.patch_sizes)
        if not sizes:
            raise InvalidConfigError("patch_sizes must not be empty")
        if any(s < 2 for s in sizes):
            raise InvalidConfigError(f"every patch size must be >= 2, got {sizes}")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise InvalidConfigError(f"patch sizes must be strictly increasing, got {sizes}")
        object.__setattr__(self, "patch_sizes", sizes)
        object.__setattr__(self, "content", Path(self.content))
        object.__setattr__(self, "style", Path(self.style))


@dataclass(frozen=True)
class ManifestRow:
    content: Path
    style: Path
    external: Path | None = None


@dataclass(frozen=True)
class ComparisonManifest:
    rows: tuple[ManifestRow, ...]


@dataclass(frozen=True)
class RowFailure:
    """A manifest row that could not be processed; the run went on without it."""

    index: int
    reason: str


def load_manifest(path) -> ComparisonManifest:
    """Read a comparison manifest CSV.

    Exact header content,style,external; the external field may be empty.
    Relative paths resolve against the manifest's own directory.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ManifestError(f"{path}: empty manifest") from None
        if tuple(h.strip() for h in header) != MANIFEST_HEADER:
            raise ManifestError(
                f"{path}: header must be {','.join(MANIFEST_HEADER)!r}, got {','.join(header)!r}"
            )
        base = path.parent
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) not in (2, 3):
                raise ManifestError(f"{path}:{lineno}: expected 2 or 3 fields, got {len(rec)}")
            ext = rec[2].strip() if len(rec) == 3 else ""
            rows.append(
                ManifestRow(
                    content=base / rec[0].strip(),
                    style=base / rec[1].strip(),
                    external=(base / ext) if ext else None,
                )
            )
    if not rows:
        raise ManifestError(f"{path}: no data rows")
    return ComparisonManifest(tuple(rows))


def emit_montage(images, labels=None) -> RasterImage:
    """Single-row montage: panels padded to the largest size, white gutters.

    labels are validated one-per-image but not painted; panel geometry is
    fixed by the images alone.
    """
    images = list(images)
    if not images:
        raise EmptyListError("montage needs at least one image")
    if labels is not None and len(labels) != len(images):
        raise ValueError(f"got {len(labels)} labels for {len(images)} images")
    arrs = [img.pixels for img in images]
    max_h = max(a.shape[0] for a in arrs)
    max_w = max(a.shape[1] for a in arrs)
    panels = [
        np.pad(
            a,
            ((0, max_h - a.shape[0]), (0, max_w - a.shape[1]), (0, 0)),
            constant_values=255,
        )
        for a in arrs
    ]
    gutter = np.full((max_h, _GUTTER, 3), 255, dtype=np.uint8)
    strips = [panels[0]]
    for panel in panels[1:]:
        strips.append(gutter)
        strips.append(panel)
    return RasterImage(np.concatenate(strips, axis=1))


def _stack_montage_rows(rows) -> RasterImage:
    """Stack single-row montages vertically with the same white gutter."""
    arrs = [r.pixels for r in rows]
    max_w = max(a.shape[1] for a in arrs)
    padded = [
        np.pad(a, ((0, 0), (0, max_w - a.shape[1]), (0, 0)), constant_values=255)
        for a in arrs
    ]
    gutter = np.full((_GUTTER, max_w, 3), 255, dtype=np.uint8)
    strips = [padded[0]]
    for panel in padded[1:]:
        strips.append(gutter)
        strips.append(panel)
    return RasterImage(np.concatenate(strips, axis=0))


def _cfg_token(cfg: TransferConfig) -> str:
    return (
        f"p={cfg.patch_size},o={cfg.overlap},w={cfg.out_width},h={cfg.out_height},"
        f"eps={cfg.tolerance!r},alpha={cfg.alpha!r},seed={cfg.seed}"
    )


def _run_token(kind: str, cfg: TransferConfig, paths, sizes=None) -> str:
    parts = [kind, _cfg_token(cfg)]
    if sizes is not None:
        parts.append("sizes=" + ",".join(str(s) for s in sizes))
    parts.extend(str(Path(p).resolve()) for p in paths)
    return hashlib.sha256("|".join(parts).encode("utf-8")).hexdigest()[:12]


def _run_comment(cfg: TransferConfig, sizes=None) -> str:
    overlap = cfg.overlap if cfg.overlap is not None else "auto"
    comment = (
        f"seed={cfg.seed} tolerance={cfg.tolerance} alpha={cfg.alpha} overlap={overlap}"
    )
    if sizes is not None:
        comment += " sizes=" + ",".join(str(s) for s in sizes)
    return comment


def _stage(out_root: Path, token: str):
    out_root.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".stage-{token}-", dir=out_root))
    (tmp / "images").mkdir()
    return tmp


def _commit(tmp: Path, final_dir: Path) -> None:
    if final_dir.exists():
        shutil.rmtree(final_dir)
    os.replace(tmp, final_dir)


def run_sweep(spec: SweepSpec, out_root, threads: int = 1,
              grad_threshold: float = GRADIENT_THRESHOLD,
              clock=time.perf_counter):
    """One transfer per patch size, same seed throughout.

    Returns (rows, run_dir). The run directory holds images/patch_NN.png,
    metrics.csv, and montage.png; nothing is left behind on failure.
    """
    content = load_image(spec.content)
    style = load_image(spec.style)
    out_root = Path(out_root)
    token = _run_token("sweep", spec.base_cfg, [spec.content, spec.style], spec.patch_sizes)
    final_dir = out_root / token
    tmp = _stage(out_root, token)
    try:
        rows = []
        outputs = []
        for size in spec.patch_sizes:
            cfg = replace(spec.base_cfg, patch_size=size)
            job = TransferJob.create(content, style, cfg)
            t0 = clock()
            out = transfer(job, threads=threads)
            wall = clock() - t0
            name = f"patch_{size:02d}"
            save_image(out, tmp / "images" / f"{name}.png", "png")
            rows.append(
                MetricsRow(
                    image_id=name,
                    patch_size=size,
                    color_distance=color_histogram_distance(out, style),
                    structure_score=structure_score(out, content, grad_threshold),
                    wall_time_s=wall,
                )
            )
            outputs.append(out)
        labels = ["content", "style"] + [f"p={s}" for s in spec.patch_sizes]
        montage = emit_montage([content, style, *outputs], labels=labels)
        save_image(montage, tmp / "montage.png", "png")
        write_metrics_csv(rows, tmp / "metrics.csv",
                          run_comment=_run_comment(spec.base_cfg, spec.patch_sizes))
        _commit(tmp, final_dir)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return rows, final_dir


def run_comparison(manifest: ComparisonManifest, cfg: TransferConfig, out_root,
                   threads: int = 1, grad_threshold: float = GRADIENT_THRESHOLD,
                   clock=time.perf_counter):
    """Transfer every manifest row at one config and score the results.

    External outputs, when present, are scored with the same two proxy
    metrics (their wall_time_s is recorded as 0.0: the work happened
    elsewhere). Rows that fail validation or processing are reported as
    failures and skipped; the rest of the run completes.

    Returns (rows, failures, run_dir).
    """
    all_paths = []
    for row in manifest.rows:
        all_paths.extend([row.content, row.style])
        if row.external is not None:
            all_paths.append(row.external)
    out_root = Path(out_root)
    token = _run_token("compare", cfg, all_paths)
    final_dir = out_root / token
    tmp = _stage(out_root, token)

    def process(index: int, row: ManifestRow):
        content = load_image(row.content)
        style = load_image(row.style)
        external = load_image(row.external) if row.external is not None else None
        if external is not None and (
            external.width != content.width or external.height != content.height
        ):
            raise ManifestError(
                f"external output {row.external} is {external.width}x{external.height}, "
                f"content is {content.width}x{content.height}"
            )
        job = TransferJob.create(content, style, cfg)
        t0 = clock()
        out = transfer(job, threads=1)
        wall = clock() - t0
        rid = f"row{index:02d}_{row.content.stem}"
        save_image(out, tmp / "images" / f"{rid}_traditional.png", "png")
        rows = [
            MetricsRow(rid, cfg.patch_size, color_histogram_distance(out, style),
                       structure_score(out, content, grad_threshold), wall,
                       method="traditional")
        ]
        panels = [content, style, out]
        if external is not None:
            rows.append(
                MetricsRow(rid, cfg.patch_size, color_histogram_distance(external, style),
                           structure_score(external, content, grad_threshold), 0.0,
                           method="external")
            )
            panels.append(external)
        return rows, emit_montage(panels)

    results: list = [None] * len(manifest.rows)
    failures: list[RowFailure] = []
    try:
        if threads > 1 and len(manifest.rows) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [
                    pool.submit(process, i, row) for i, row in enumerate(manifest.rows)
                ]
                for i, fut in enumerate(futures):
                    try:
                        results[i] = fut.result()
                    except (QuiltError, OSError) as exc:
                        failures.append(RowFailure(i, str(exc)))
        else:
            for i, row in enumerate(manifest.rows):
                try:
                    results[i] = process(i, row)
                except (QuiltError, OSError) as exc:
                    failures.append(RowFailure(i, str(exc)))
        metric_rows = [r for res in results if res is not None for r in res[0]]
        montage_rows = [res[1] for res in results if res is not None]
        write_metrics_csv(metric_rows, tmp / "metrics.csv",
                          run_comment=_run_comment(cfg), with_method=True)
        if montage_rows:
            save_image(_stack_montage_rows(montage_rows), tmp / "montage.png", "png")
        _commit(tmp, final_dir)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return metric_rows, failures, final_dir
