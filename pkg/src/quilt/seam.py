"""Minimum-cost boundary seams through overlap error surfaces.

A vertical seam picks one column per row, moving at most one column
sideways between rows (8-connected, monotone top to bottom); horizontal
seams are the transpose. The mask a seam induces decides, pixel by
pixel, whether the freshly chosen block or the existing canvas wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import EmptySurfaceError, OutOfBoundsError, SpecMismatchError
from .raster import RasterImage


class OverlapKind(Enum):
    NONE = "none"
    LEFT_ONLY = "left"
    TOP_ONLY = "top"
    LEFT_AND_TOP = "left_and_top"


@dataclass(frozen=True)
class OverlapSpec:
    """Which sides of a block overlap already-written canvas, and how wide."""

    kind: OverlapKind
    width: int


def min_cost_vertical_seam(surface) -> tuple[np.ndarray, float]:
    """Cheapest monotone top-to-bottom path through the surface.

    Dynamic program: each cell accumulates its own cost plus the cheapest
    of the three neighbors above it. Ties break toward the smallest column
    index, both when picking the bottom endpoint and at every backtrack
    step, so equal-cost surfaces always yield the same path.

    Returns (path, cost) with one column index per row.
    """
    e = np.asarray(surface, dtype=np.float64)
    if e.ndim != 2 or e.size == 0:
        raise EmptySurfaceError(f"surface must be 2-D and non-empty, got shape {e.shape}")
    if np.any(e < 0):
        raise ValueError("surface values must be non-negative")
    rows, cols = e.shape
    acc = e.copy()
    for i in range(1, rows):
        prev = acc[i - 1]
        best = prev.copy()
        np.minimum(best[1:], prev[:-1], out=best[1:])
        np.minimum(best[:-1], prev[1:], out=best[:-1])
        acc[i] += best
    path = np.empty(rows, dtype=np.int64)
    j = int(np.argmin(acc[-1]))  # argmin takes the first minimum: smallest column
    path[-1] = j
    for i in range(rows - 2, -1, -1):
        lo = max(0, j - 1)
        j = lo + int(np.argmin(acc[i, lo : min(cols, j + 2)]))
        path[i] = j
    return path, float(acc[-1, path[-1]])


def min_cost_horizontal_seam(surface) -> tuple[np.ndarray, float]:
    """Cheapest monotone left-to-right path; one row index per column."""
    e = np.asarray(surface, dtype=np.float64)
    if e.ndim != 2 or e.size == 0:
        raise EmptySurfaceError(f"surface must be 2-D and non-empty, got shape {e.shape}")
    return min_cost_vertical_seam(e.T)


def build_seam_mask(spec: OverlapSpec, vertical_surface=None, horizontal_surface=None) -> np.ndarray:
    """Boolean take-new mask for a p x p block, True where the block wins.

    A vertical seam at column s means columns >= s take the new block in
    that row; horizontal seams behave symmetrically over rows. With both
    overlaps the two full-block masks are ANDed, which resolves the corner
    pixels and leaves the non-overlap interior True.
    """
    kind = spec.kind
    if kind is OverlapKind.NONE:
        raise SpecMismatchError("a block with no overlap needs no seam mask")
    want_v = kind in (OverlapKind.LEFT_ONLY, OverlapKind.LEFT_AND_TOP)
    want_h = kind in (OverlapKind.TOP_ONLY, OverlapKind.LEFT_AND_TOP)
    if want_v != (vertical_surface is not None) or want_h != (horizontal_surface is not None):
        raise SpecMismatchError(f"overlap kind {kind.value} does not match the surfaces supplied")

    p = None
    vfull = hfull = None
    if want_v:
        v = np.asarray(vertical_surface, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != spec.width:
            raise SpecMismatchError(
                f"vertical surface must be (p, {spec.width}), got {v.shape}"
            )
        p = v.shape[0]
        vpath, _ = min_cost_vertical_seam(v)
        vfull = np.arange(p)[None, :] >= vpath[:, None]
    if want_h:
        h = np.asarray(horizontal_surface, dtype=np.float64)
        if h.ndim != 2 or h.shape[0] != spec.width:
            raise SpecMismatchError(
                f"horizontal surface must be ({spec.width}, p), got {h.shape}"
            )
        if p is not None and h.shape[1] != p:
            raise SpecMismatchError(
                f"surface sizes disagree: vertical says p={p}, horizontal says p={h.shape[1]}"
            )
        p = h.shape[1]
        hpath, _ = min_cost_horizontal_seam(h)
        hfull = np.arange(p)[:, None] >= hpath[None, :]
    if vfull is not None and hfull is not None:
        return vfull & hfull
    return vfull if vfull is not None else hfull


def apply_seam(canvas: np.ndarray, block: np.ndarray, ox: int, oy: int, mask: np.ndarray) -> None:
    """Write block pixels into the canvas wherever the mask says take-new."""
    if mask.ndim != 2 or mask.dtype != np.bool_:
        raise ValueError(f"mask must be a 2-D boolean array, got {mask.dtype} {mask.shape}")
    p, q = mask.shape
    if block.shape != (p, q, 3):
        raise ValueError(f"block shape {block.shape} does not match mask {mask.shape}")
    if not isinstance(canvas, np.ndarray) or canvas.ndim != 3:
        raise ValueError("canvas must be a (h, w, 3) array")
    if not canvas.flags.writeable:
        raise ValueError("canvas must be writable")
    if ox < 0 or oy < 0 or oy + p > canvas.shape[0] or ox + q > canvas.shape[1]:
        raise OutOfBoundsError(
            f"block {q}x{p}@({ox},{oy}) exceeds canvas {canvas.shape[1]}x{canvas.shape[0]}"
        )
    region = canvas[oy : oy + p, ox : ox + q]
    region[mask] = block[mask]


def render_error_surface(surface, path=None, vertical: bool = True) -> RasterImage:
    """Grayscale visualization of a surface, the seam drawn in white.

    Surface values normalize to 0..200 so the 255 seam always stands out.
    """
    s = np.asarray(surface, dtype=np.float64)
    if s.ndim != 2 or s.size == 0:
        raise EmptySurfaceError(f"surface must be 2-D and non-empty, got shape {s.shape}")
    lo, hi = float(s.min()), float(s.max())
    if hi > lo:
        gray = ((s - lo) / (hi - lo) * 200.0).astype(np.uint8)
    else:
        gray = np.zeros(s.shape, dtype=np.uint8)
    rgb = np.repeat(gray[:, :, None], 3, axis=2)
    if path is not None:
        idx = np.asarray(path, dtype=np.int64)
        if vertical:
            rgb[np.arange(s.shape[0]), idx] = 255
        else:
            rgb[idx, np.arange(s.shape[1])] = 255
    return RasterImage(rgb)
