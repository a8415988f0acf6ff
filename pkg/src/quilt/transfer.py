"""Content-guided synthesis: the style image supplies every block, the
content image says where each block should land.

Guidance is a luminance correspondence term: candidate windows are scored
against the content luminance under the block's destination, blended with
the usual overlap term by alpha. Luminance is one simple choice of
guidance channel among several that would work; it is this package's
design decision, and alpha=1 recovers plain synthesis exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidConfigError, OutOfBoundsError
from .quilting import TransferConfig, _as_pixels, _assemble, plan_grid
from .raster import LuminanceMap, RasterImage, to_luminance


@dataclass(frozen=True)
class TransferJob:
    """One transfer run: both images, their luminance maps, the config."""

    content: RasterImage
    style: RasterImage
    cfg: TransferConfig
    content_lum: LuminanceMap
    style_lum: LuminanceMap

    @classmethod
    def create(cls, content: RasterImage, style: RasterImage, cfg: TransferConfig) -> "TransferJob":
        """Build a job, defaulting unset output dimensions to the content size."""
        if cfg.out_width is None or cfg.out_height is None:
            cfg = replace(
                cfg,
                out_width=cfg.out_width if cfg.out_width is not None else content.width,
                out_height=cfg.out_height if cfg.out_height is not None else content.height,
            )
        return cls(
            content=content,
            style=style,
            cfg=cfg,
            content_lum=to_luminance(content),
            style_lum=to_luminance(style),
        )


def correspondence_error(style_lum, sx: int, sy: int, content_lum, cx: int, cy: int,
                         patch_size: int) -> float:
    """Summed squared difference between two p x p luminance windows."""
    a = style_lum.values if isinstance(style_lum, LuminanceMap) else np.asarray(style_lum, dtype=np.float64)
    b = content_lum.values if isinstance(content_lum, LuminanceMap) else np.asarray(content_lum, dtype=np.float64)
    p = patch_size
    if sx < 0 or sy < 0 or sy + p > a.shape[0] or sx + p > a.shape[1]:
        raise OutOfBoundsError(f"style window {p}x{p}@({sx},{sy}) out of bounds")
    if cx < 0 or cy < 0 or cy + p > b.shape[0] or cx + p > b.shape[1]:
        raise OutOfBoundsError(f"content window {p}x{p}@({cx},{cy}) out of bounds")
    d = a[sy : sy + p, sx : sx + p] - b[cy : cy + p, cx : cx + p]
    return float((d * d).sum())


def transfer(job: TransferJob, threads: int = 1, debug_dir=None, on_candidates=None) -> RasterImage:
    """Run content-guided synthesis and crop to the configured output size.

    The block grid may overhang the output before cropping; the content
    luminance map is edge-replicated out to canvas size so overhanging
    windows still have guidance values.
    """
    cfg = job.cfg
    style = _as_pixels(job.style)
    if min(style.shape[:2]) < cfg.patch_size:
        raise InvalidConfigError(
            f"patch_size {cfg.patch_size} exceeds the {style.shape[1]}x{style.shape[0]} style image"
        )
    plan = plan_grid(cfg)
    clum = job.content_lum.values[: plan.canvas_height, : plan.canvas_width]
    pad_y = plan.canvas_height - clum.shape[0]
    pad_x = plan.canvas_width - clum.shape[1]
    if pad_y or pad_x:
        clum = np.pad(clum, ((0, pad_y), (0, pad_x)), mode="edge")
    corr = (job.style_lum.values, clum)
    canvas = _assemble(style, cfg, corr=corr, threads=threads, debug_dir=debug_dir,
                       on_candidates=on_candidates)
    return RasterImage(canvas[: cfg.out_height, : cfg.out_width])
