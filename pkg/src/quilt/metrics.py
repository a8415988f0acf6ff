"""Palette and structure proxies for judging outputs.

Both scores are heuristic proxies: they order runs, they do not measure
perceptual quality, and every CSV they land in says so in a comment.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatchError, EmptyImageError
from .raster import RasterImage, to_luminance

BINS_PER_CHANNEL = 8
GRADIENT_THRESHOLD = 0.05

CSV_HEADER = ("image_id", "patch_size", "color_distance", "structure_score", "wall_time_s")
PROXY_NOTE = "# color_distance and structure_score are heuristic proxies, not perceptual measurements"


def _image(img) -> RasterImage:
    return img if isinstance(img, RasterImage) else RasterImage(np.asarray(img))


def color_histogram(img) -> np.ndarray:
    """Joint RGB histogram: 8 bins per channel, 512 bins total, sums to 1."""
    px = _image(img).pixels
    q = (px >> 5).astype(np.int64)  # 256 levels -> 8 bins per channel
    idx = (q[..., 0] << 6) | (q[..., 1] << 3) | q[..., 2]
    counts = np.bincount(idx.ravel(), minlength=512).astype(np.float64)
    total = counts.sum()
    if total == 0:
        raise EmptyImageError("histogram needs at least one pixel")
    return counts / total


def color_histogram_distance(a, b) -> float:
    """Chi-square distance between joint color histograms.

    0.0 for identical palettes, 1.0 for fully disjoint ones; symmetric.
    Empty bins on both sides contribute nothing.
    """
    ha, hb = color_histogram(a), color_histogram(b)
    num = (ha - hb) ** 2
    den = ha + hb
    live = den > 0
    return float(0.5 * (num[live] / den[live]).sum())


def structure_score(output, content, grad_threshold: float = GRADIENT_THRESHOLD) -> float:
    """Mean |cos| between luminance gradients where both images have edges.

    Gradients are central differences over interior pixels; a pixel counts
    only when both gradient magnitudes exceed grad_threshold. Identical
    images score exactly 1.0; no qualifying pixels scores 0.0.
    """
    out_img, content_img = _image(output), _image(content)
    if out_img.pixels.shape != content_img.pixels.shape:
        raise DimensionMismatchError(
            f"images differ: {out_img.width}x{out_img.height} vs {content_img.width}x{content_img.height}"
        )
    la = to_luminance(out_img).values
    lb = to_luminance(content_img).values
    gxa, gya, sqa = _gradients(la)
    gxb, gyb, sqb = _gradients(lb)
    t2 = grad_threshold * grad_threshold
    qualify = (sqa > t2) & (sqb > t2)
    if not qualify.any():
        return 0.0
    dot = np.abs(gxa * gxb + gya * gyb)[qualify]
    denom = np.sqrt(sqa[qualify] * sqb[qualify])
    return float(np.minimum(dot / denom, 1.0).mean())


def _gradients(lum: np.ndarray):
    # interior pixels only; boundary pixels have no central difference
    gx = (lum[1:-1, 2:] - lum[1:-1, :-2]) / 2.0
    gy = (lum[2:, 1:-1] - lum[:-2, 1:-1]) / 2.0
    return gx, gy, gx * gx + gy * gy


@dataclass(frozen=True)
class MetricsRow:
    """One scored output. method stays None outside comparison runs."""

    image_id: str
    patch_size: int
    color_distance: float
    structure_score: float
    wall_time_s: float
    method: str | None = None


def write_metrics_csv(rows, path, run_comment: str | None = None,
                      with_method: bool = False) -> None:
    """Write rows under the fixed schema; comment lines precede the header."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        if run_comment:
            fh.write(f"# {run_comment}\n")
        fh.write(PROXY_NOTE + "\n")
        writer = csv.writer(fh)
        header = CSV_HEADER + (("method",) if with_method else ())
        writer.writerow(header)
        for row in rows:
            rec = [
                row.image_id,
                row.patch_size,
                f"{row.color_distance:.6f}",
                f"{row.structure_score:.6f}",
                f"{row.wall_time_s:.3f}",
            ]
            if with_method:
                rec.append(row.method or "")
            writer.writerow(rec)
