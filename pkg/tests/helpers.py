"""Small shared builders for the test suite."""

import numpy as np

from quilt import RasterImage


def rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def random_pixels(r, width, height):
    return r.integers(0, 256, size=(height, width, 3), dtype=np.uint8)


def random_image(r, width, height):
    return RasterImage(random_pixels(r, width, height))


def pixel_set(arr):
    return set(map(tuple, np.asarray(arr).reshape(-1, 3).tolist()))


def textured_pixels(seed, width, height):
    """Structured test image: gradients plus seeded speckle, full 0..255 range."""
    r = rng(seed)
    yy, xx = np.mgrid[0:height, 0:width]
    base = np.stack(
        [
            (xx * 255 / max(width - 1, 1)),
            (yy * 255 / max(height - 1, 1)),
            ((xx + yy) * 255 / max(width + height - 2, 1)),
        ],
        axis=2,
    )
    noise = r.integers(-40, 41, size=(height, width, 3))
    return np.clip(base + noise, 0, 255).astype(np.uint8)


def textured_image(seed, width, height):
    return RasterImage(textured_pixels(seed, width, height))
