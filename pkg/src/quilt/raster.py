"""8-bit RGB raster images: PNG/PPM codecs, luminance maps, cropping.

Everything downstream works on plain RGB. Decoding normalizes the
wilder PNG variants up front: palette images are expanded, 16-bit
samples keep their high byte, and any alpha is composited over white.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    CorruptDataError,
    EmptyImageError,
    OutOfBoundsError,
    UnsupportedFormatError,
)

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


@dataclass(frozen=True, eq=False)
class RasterImage:
    """Decoded image. Pixel data is copied in and locked read-only."""

    pixels: np.ndarray  # (height, width, 3) uint8, row-major

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected a (h, w, 3) pixel array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            raise ValueError(f"pixel array must be uint8, got {arr.dtype}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise EmptyImageError("image must be at least 1x1")
        arr = np.array(arr, dtype=np.uint8, order="C", copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def to_array(self) -> np.ndarray:
        """Writable copy of the pixel data."""
        return self.pixels.copy()


@dataclass(frozen=True, eq=False)
class LuminanceMap:
    """Per-pixel luminance in [0, 1], same grid as the image it came from."""

    values: np.ndarray  # (height, width) float64

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"expected a (h, w) value array, got shape {arr.shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


def load_image(path) -> RasterImage:
    """Decode a PNG or binary PPM (P6) file into 8-bit RGB.

    The container is sniffed from magic bytes, not the file extension.
    Unknown containers raise UnsupportedFormatError; streams that declare
    a known container but cannot be decoded raise CorruptDataError.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if data.startswith(_PNG_MAGIC):
        return RasterImage(_decode_png(data))
    if data.startswith(b"P6"):
        return RasterImage(_decode_ppm(data))
    raise UnsupportedFormatError(f"{path}: not a PNG or binary PPM (P6) file")


def save_image(img: RasterImage, path, format: str) -> None:
    """Write a PNG or binary PPM. Missing directories surface as OSError."""
    fmt = format.lower()
    if fmt == "png":
        Image.fromarray(np.asarray(img.pixels)).save(str(path), format="PNG")
    elif fmt == "ppm":
        header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(img.pixels.tobytes())
    else:
        raise UnsupportedFormatError(f"unknown save format: {format!r}")


def to_luminance(img: RasterImage) -> LuminanceMap:
    """Rec. 601 luminance, computed as (299 R + 587 G + 114 B) / 255000.

    Integer weights keep the endpoints exact: all-black maps to 0.0 and
    all-white to 1.0 with no float residue.
    """
    px = img.pixels.astype(np.int64)
    num = 299 * px[..., 0] + 587 * px[..., 1] + 114 * px[..., 2]
    return LuminanceMap(num / 255000.0)


def crop(img: RasterImage, x0: int, y0: int, width: int, height: int) -> RasterImage:
    """Axis-aligned sub-image. The window must lie fully inside the image."""
    if width < 1 or height < 1:
        raise OutOfBoundsError(f"crop window must be at least 1x1, got {width}x{height}")
    if x0 < 0 or y0 < 0 or x0 + width > img.width or y0 + height > img.height:
        raise OutOfBoundsError(
            f"crop window {width}x{height}@({x0},{y0}) exceeds image {img.width}x{img.height}"
        )
    return RasterImage(img.pixels[y0 : y0 + height, x0 : x0 + width])


# --------------------------------------------------------------------------
# codecs


def _decode_png(data: bytes) -> np.ndarray:
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except UnidentifiedImageError as exc:
        raise CorruptDataError(f"unreadable PNG stream: {exc}") from exc
    except (OSError, SyntaxError, ValueError) as exc:
        raise CorruptDataError(f"invalid PNG stream: {exc}") from exc
    return _flatten_to_rgb(img)


def _flatten_to_rgb(img) -> np.ndarray:
    # 16-bit grayscale: keep the high byte, same reduction Pillow applies
    # to 16-bit RGB on its own.
    if img.mode in ("I", "I;16", "I;16B", "I;16L"):
        arr = np.asarray(img).astype(np.uint32)
        img = Image.fromarray((arr >> 8).astype(np.uint8))
    # tRNS transparency rides in .info for palette / gray / RGB images.
    if "transparency" in img.info and img.mode in ("P", "L", "RGB"):
        img = img.convert("RGBA")
    elif img.mode == "P":
        img = img.convert("RGB")
    if img.mode in ("LA", "PA"):
        img = img.convert("RGBA")
    if img.mode == "RGBA":
        base = Image.new("RGBA", img.size, (255, 255, 255, 255))
        img = Image.alpha_composite(base, img)
        img = img.convert("RGB")
    if img.mode != "RGB":
        img = img.convert("RGB")
    return np.asarray(img, dtype=np.uint8)


def _decode_ppm(data: bytes) -> np.ndarray:
    fields, pos = _ppm_header_fields(data)
    width, height, maxval = fields
    if maxval != 255:
        raise UnsupportedFormatError(f"only maxval 255 PPMs are supported, got {maxval}")
    if width < 1 or height < 1:
        raise CorruptDataError(f"bad PPM dimensions {width}x{height}")
    need = width * height * 3
    raw = data[pos : pos + need]
    if len(raw) < need:
        raise CorruptDataError(f"PPM pixel data truncated: expected {need} bytes, got {len(raw)}")
    return np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3).copy()


def _ppm_header_fields(data: bytes):
    """Parse 'P6 <w> <h> <maxval>' allowing comments, return fields and the
    offset of the first pixel byte (exactly one whitespace past maxval)."""
    pos = 2
    fields = []
    while len(fields) < 3:
        # skip whitespace and '#' comment lines
        while pos < len(data):
            ch = data[pos : pos + 1]
            if ch.isspace():
                pos += 1
            elif ch == b"#":
                nl = data.find(b"\n", pos)
                if nl < 0:
                    raise CorruptDataError("unterminated comment in PPM header")
                pos = nl + 1
            else:
                break
        start = pos
        while pos < len(data) and data[pos : pos + 1].isdigit():
            pos += 1
        if pos == start:
            raise CorruptDataError("malformed PPM header")
        fields.append(int(data[start:pos]))
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise CorruptDataError("PPM header must end with a whitespace byte")
    return fields, pos + 1
