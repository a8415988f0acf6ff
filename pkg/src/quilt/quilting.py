"""Raster-order block synthesis: grid planning, candidate search, assembly.

The output grows block by block, left to right then top to bottom. Each
block is drawn from the candidate set of source windows whose overlap
error lands within (1 + tolerance) of the best available, then stitched
in along a minimum-error seam.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InvalidConfigError, OutOfBoundsError, SourceTooSmallError
from .raster import RasterImage, save_image
from .seam import (
    OverlapKind,
    OverlapSpec,
    apply_seam,
    build_seam_mask,
    min_cost_horizontal_seam,
    min_cost_vertical_seam,
    render_error_surface,
)

# Candidate scoring walks the source in fixed 8-row bands. Threads only
# ever split work along band boundaries, so results cannot depend on the
# worker count.
_BAND_ROWS = 8


@dataclass(frozen=True)
class TransferConfig:
    """Every synthesis tunable in one place.

    overlap=None means the usual one-sixth of the patch, never below one
    pixel. Output dimensions may stay None for runs that default to the
    content image size.
    """

    patch_size: int
    out_width: int | None = None
    out_height: int | None = None
    overlap: int | None = None
    tolerance: float = 0.1
    alpha: float = 0.8
    seed: int = 42

    def __post_init__(self):
        p = self.patch_size
        if not isinstance(p, int) or isinstance(p, bool) or p < 2:
            raise InvalidConfigError(f"patch_size must be an integer >= 2, got {p!r}")
        if self.overlap is not None and not (1 <= self.overlap < p):
            raise InvalidConfigError(
                f"overlap must satisfy 1 <= overlap < patch_size, got {self.overlap}"
            )
        if not (self.tolerance >= 0):
            raise InvalidConfigError(f"tolerance must be >= 0, got {self.tolerance}")
        if not (0.0 <= self.alpha <= 1.0):
            raise InvalidConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        for name in ("out_width", "out_height"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise InvalidConfigError(f"{name} must be >= 1, got {v}")

    @property
    def overlap_width(self) -> int:
        if self.overlap is not None:
            return self.overlap
        return max(1, round(self.patch_size / 6))

    @property
    def step(self) -> int:
        return self.patch_size - self.overlap_width


@dataclass(frozen=True)
class GridPlan:
    """Block placement geometry for one run."""

    step: int
    grid_rows: int
    grid_cols: int
    canvas_width: int
    canvas_height: int
    blocks: tuple[tuple[int, int, int, int], ...]  # (row, col, x, y), raster order


@dataclass(frozen=True)
class CandidateSet:
    """Source windows within (1 + tolerance) of the best error.

    Entries are (sx, sy, error) in raster (sy, sx) order. Errors are exact
    integers whenever only the overlap term is in play, floats otherwise.
    """

    min_error: int | float
    entries: tuple[tuple[int, int, int | float], ...]


def plan_grid(cfg: TransferConfig) -> GridPlan:
    """Smallest raster-order grid whose canvas covers the requested output."""
    if cfg.out_width is None or cfg.out_height is None:
        raise InvalidConfigError("output dimensions are required to plan a grid")
    p, step = cfg.patch_size, cfg.step
    if cfg.out_width < p or cfg.out_height < p:
        raise InvalidConfigError(
            f"requested {cfg.out_width}x{cfg.out_height} output is smaller than one {p}px block"
        )
    nx = 1 + math.ceil((cfg.out_width - p) / step)
    ny = 1 + math.ceil((cfg.out_height - p) / step)
    blocks = tuple((i, j, j * step, i * step) for i in range(ny) for j in range(nx))
    return GridPlan(
        step=step,
        grid_rows=ny,
        grid_cols=nx,
        canvas_width=p + (nx - 1) * step,
        canvas_height=p + (ny - 1) * step,
        blocks=blocks,
    )


def _as_pixels(img) -> np.ndarray:
    arr = img.pixels if isinstance(img, RasterImage) else np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.dtype != np.uint8:
        raise ValueError(f"expected (h, w, 3) uint8 pixels, got {arr.dtype} {arr.shape}")
    return arr


def _as_lum(lum) -> np.ndarray:
    arr = lum.values if hasattr(lum, "values") else np.asarray(lum, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a (h, w) luminance array, got shape {arr.shape}")
    return arr


def _overlap_rects(kind: OverlapKind, p: int, o: int):
    """Block-local (row0, col0, height, width) rectangles covering the overlap.

    The L-shaped case splits into the full-height left strip plus the top
    strip to its right, so the o x o corner is counted exactly once.
    """
    if kind is OverlapKind.LEFT_ONLY:
        return ((0, 0, p, o),)
    if kind is OverlapKind.TOP_ONLY:
        return ((0, 0, o, p),)
    if kind is OverlapKind.LEFT_AND_TOP:
        return ((0, 0, p, o), (0, o, o, p - o))
    return ()


def overlap_error(source, sx: int, sy: int, canvas, ox: int, oy: int,
                  spec: OverlapSpec, patch_size: int) -> int:
    """Exact integer SSD between one candidate block and the canvas under it."""
    src = _as_pixels(source)
    cv = _as_pixels(canvas)
    p = patch_size
    if sx < 0 or sy < 0 or sy + p > src.shape[0] or sx + p > src.shape[1]:
        raise OutOfBoundsError(f"source window {p}x{p}@({sx},{sy}) out of bounds")
    if ox < 0 or oy < 0 or oy + p > cv.shape[0] or ox + p > cv.shape[1]:
        raise OutOfBoundsError(f"canvas window {p}x{p}@({ox},{oy}) out of bounds")
    total = 0
    for r0, c0, h, w in _overlap_rects(spec.kind, p, spec.width):
        a = src[sy + r0 : sy + r0 + h, sx + c0 : sx + c0 + w].astype(np.int64)
        b = cv[oy + r0 : oy + r0 + h, ox + c0 : ox + c0 + w].astype(np.int64)
        d = a - b
        total += int((d * d).sum())
    return total


def _band_edges(ny: int):
    return [(lo, min(lo + _BAND_ROWS, ny)) for lo in range(0, ny, _BAND_ROWS)]


def _run_bands(bands, fn, threads: int, executor) -> None:
    if executor is not None and len(bands) > 1:
        list(executor.map(lambda b: fn(*b), bands))
    elif threads > 1 and len(bands) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda b: fn(*b), bands))
    else:
        for lo, hi in bands:
            fn(lo, hi)


def find_candidates(source, canvas, ox: int, oy: int, spec: OverlapSpec,
                    cfg: TransferConfig, corr=None, threads: int = 1,
                    _executor=None) -> CandidateSet:
    """Score every valid source window and keep those within tolerance.

    corr, when given, is a (style_luminance, content_luminance) pair; the
    content map must cover the canvas. Scores blend the normalized overlap
    term with the normalized correspondence term by alpha. At alpha == 1
    (or with no corr at all) scoring stays in exact integers; alpha == 0
    drops the overlap term entirely.
    """
    src = _as_pixels(source)
    cv = _as_pixels(canvas)
    p = cfg.patch_size
    sh, sw = src.shape[:2]
    if sh < p or sw < p:
        raise SourceTooSmallError(f"source {sw}x{sh} admits no {p}x{p} block")
    if ox < 0 or oy < 0 or oy + p > cv.shape[0] or ox + p > cv.shape[1]:
        raise OutOfBoundsError(f"canvas window {p}x{p}@({ox},{oy}) out of bounds")
    ny, nx = sh - p + 1, sw - p + 1
    bands = _band_edges(ny)
    rects = _overlap_rects(spec.kind, p, spec.width)

    use_corr = corr is not None and cfg.alpha < 1.0
    pure_corr = corr is not None and cfg.alpha == 0.0

    ov = None
    if not pure_corr:
        ov = np.zeros((ny, nx), dtype=np.int64)
        for r0, c0, h, w in rects:
            template = cv[oy + r0 : oy + r0 + h, ox + c0 : ox + c0 + w].astype(np.int32)
            win = sliding_window_view(src, (h, w, 3))[:, :, 0]

            def fill(lo, hi, win=win, template=template, r0=r0, c0=c0):
                view = win[lo + r0 : hi + r0, c0 : c0 + nx]
                diff = view.astype(np.int32)
                diff -= template
                ov[lo:hi] += np.einsum("nmhwc,nmhwc->nm", diff, diff, dtype=np.int64)

            _run_bands(bands, fill, threads, _executor)

    ce = None
    if use_corr:
        style_lum = _as_lum(corr[0])
        content_lum = _as_lum(corr[1])
        if style_lum.shape != src.shape[:2]:
            raise ValueError(
                f"style luminance {style_lum.shape} does not match source {src.shape[:2]}"
            )
        if content_lum.shape[0] < oy + p or content_lum.shape[1] < ox + p:
            raise OutOfBoundsError(
                f"content luminance {content_lum.shape} does not cover window @({ox},{oy})"
            )
        template = np.ascontiguousarray(content_lum[oy : oy + p, ox : ox + p])
        ce = np.zeros((ny, nx), dtype=np.float64)
        lwin = sliding_window_view(style_lum, (p, p))

        def fill_ce(lo, hi):
            diff = lwin[lo:hi, :nx] - template
            ce[lo:hi] = np.einsum("nmhw,nmhw->nm", diff, diff)

        _run_bands(bands, fill_ce, threads, _executor)

    if not use_corr:
        errors = ov  # exact integers
        integer = True
    elif pure_corr:
        errors = ce / (p * p)
        integer = False
    else:
        n_ov = 3 * sum(h * w for _, _, h, w in rects)
        ov_norm = ov / n_ov if n_ov else np.zeros_like(ce)
        errors = cfg.alpha * ov_norm + (1.0 - cfg.alpha) * (ce / (p * p))
        integer = False

    min_error = errors.min()
    threshold = (1.0 + cfg.tolerance) * min_error
    ys, xs = np.nonzero(errors <= threshold)
    picked = errors[ys, xs].tolist()  # int64 -> int, float64 -> float
    entries = tuple(zip(xs.tolist(), ys.tolist(), picked))
    return CandidateSet(
        min_error=int(min_error) if integer else float(min_error),
        entries=entries,
    )


def select_block(cands: CandidateSet, rng: np.random.Generator) -> tuple[int, int]:
    """Uniform draw over the candidate entries; consumes exactly one draw."""
    n = len(cands.entries)
    if n == 0:
        raise ValueError("candidate set is empty")
    sx, sy, _ = cands.entries[int(rng.integers(0, n))]
    return sx, sy


def _overlap_kind(i: int, j: int) -> OverlapKind:
    if i == 0 and j == 0:
        return OverlapKind.NONE
    if i == 0:
        return OverlapKind.LEFT_ONLY
    if j == 0:
        return OverlapKind.TOP_ONLY
    return OverlapKind.LEFT_AND_TOP


def _strip_surface(block: np.ndarray, canvas: np.ndarray, x: int, y: int,
                   rows: int, cols: int) -> np.ndarray:
    """Per-pixel SSD (summed over channels) for a block-corner strip."""
    a = block[:rows, :cols].astype(np.int32)
    b = canvas[y : y + rows, x : x + cols].astype(np.int32)
    d = a - b
    return (d * d).sum(axis=2, dtype=np.int64).astype(np.float64)


def _write_seam_debug(debug_dir, i, j, vsurf, hsurf):
    debug_dir = Path(debug_dir)
    debug_dir.mkdir(parents=True, exist_ok=True)
    if vsurf is not None:
        vpath, _ = min_cost_vertical_seam(vsurf)
        img = render_error_surface(vsurf, vpath, vertical=True)
        save_image(img, debug_dir / f"block_r{i:03d}_c{j:03d}_vertical.png", "png")
    if hsurf is not None:
        hpath, _ = min_cost_horizontal_seam(hsurf)
        img = render_error_surface(hsurf, hpath, vertical=False)
        save_image(img, debug_dir / f"block_r{i:03d}_c{j:03d}_horizontal.png", "png")


def _assemble(src: np.ndarray, cfg: TransferConfig, corr=None, threads: int = 1,
              debug_dir=None, on_candidates=None) -> np.ndarray:
    """Run the block loop on a writable canvas; callers crop afterwards."""
    plan = plan_grid(cfg)
    p, o = cfg.patch_size, cfg.overlap_width
    canvas = np.zeros((plan.canvas_height, plan.canvas_width, 3), dtype=np.uint8)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for index, (i, j, x, y) in enumerate(plan.blocks):
            spec = OverlapSpec(_overlap_kind(i, j), o)
            cands = find_candidates(
                src, canvas, x, y, spec, cfg, corr=corr, threads=threads, _executor=executor
            )
            if on_candidates is not None:
                on_candidates(index, (i, j), cands)
            sx, sy = select_block(cands, rng)
            block = src[sy : sy + p, sx : sx + p]
            if spec.kind is OverlapKind.NONE:
                canvas[y : y + p, x : x + p] = block
                continue
            vsurf = hsurf = None
            if spec.kind in (OverlapKind.LEFT_ONLY, OverlapKind.LEFT_AND_TOP):
                vsurf = _strip_surface(block, canvas, x, y, p, o)
            if spec.kind in (OverlapKind.TOP_ONLY, OverlapKind.LEFT_AND_TOP):
                hsurf = _strip_surface(block, canvas, x, y, o, p)
            mask = build_seam_mask(spec, vsurf, hsurf)
            apply_seam(canvas, block, x, y, mask)
            if debug_dir is not None:
                _write_seam_debug(debug_dir, i, j, vsurf, hsurf)
    finally:
        if executor is not None:
            executor.shutdown(wait=True)
    return canvas


def synthesize(source, cfg: TransferConfig, threads: int = 1,
               debug_dir=None, on_candidates=None) -> RasterImage:
    """Grow an out_width x out_height texture from the source image.

    Deterministic for a given (source, cfg): the seeded generator is the
    only random input and thread counts never change the result.
    """
    src = _as_pixels(source)
    if cfg.out_width is None or cfg.out_height is None:
        raise InvalidConfigError("synthesize needs out_width and out_height")
    if min(src.shape[:2]) < cfg.patch_size:
        raise InvalidConfigError(
            f"patch_size {cfg.patch_size} exceeds the {src.shape[1]}x{src.shape[0]} source"
        )
    canvas = _assemble(src, cfg, threads=threads, debug_dir=debug_dir,
                       on_candidates=on_candidates)
    return RasterImage(canvas[: cfg.out_height, : cfg.out_width])
