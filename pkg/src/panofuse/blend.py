"""Multi-band (Laplacian pyramid) blending across a seam.

Pyramids use the separable 5-tap binomial filter (1, 4, 6, 4, 1)/16 with
reflect-101 borders; each level halves width and height (rounded up). All
arithmetic runs in float64 per channel; quantization happens once at the
end, rounding half away from zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_TAPS = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


@dataclass
class ImagePyramid:
    levels: list
    kind: str  # "gaussian" | "laplacian"

    def __post_init__(self):
        if self.kind not in ("gaussian", "laplacian"):
            raise ValueError(f"unknown pyramid kind {self.kind!r}")
        if not self.levels:
            raise ValueError("pyramid needs at least one level")


def default_levels(width, height):
    """Level count heuristic: leave the coarsest band at roughly 16 px."""
    return max(1, int(np.floor(np.log2(min(width, height)))) - 4)


def _filter_axis(img, axis):
    pad = [(0, 0)] * img.ndim
    pad[axis] = (2, 2)
    padded = np.pad(img, pad, mode="reflect")  # reflect-101
    out = np.zeros_like(img)
    sl = [slice(None)] * img.ndim
    n = img.shape[axis]
    for i, t in enumerate(_TAPS):
        sl[axis] = slice(i, i + n)
        out += t * padded[tuple(sl)]
    return out


def _smooth(img):
    return _filter_axis(_filter_axis(img, 0), 1)


def _downsample(img):
    return _smooth(img)[::2, ::2]


def _upsample(img, shape):
    out = np.zeros(shape[:2] + img.shape[2:], dtype=np.float64)
    out[::2, ::2] = img
    return _smooth(out) * 4.0


def _check_levels(img, levels):
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if min(img.shape[0], img.shape[1]) < 2 ** (levels - 1):
        raise ValueError(
            f"too many pyramid levels ({levels}) for raster {img.shape[1]}x{img.shape[0]}")


def build_gaussian(img, levels):
    arr = np.asarray(img, dtype=np.float64)
    _check_levels(arr, levels)
    out = [arr]
    for _ in range(levels - 1):
        out.append(_downsample(out[-1]))
    return ImagePyramid(out, "gaussian")


def build_pyramids(img, levels):
    """Laplacian pyramid of ``img``; the last level is the coarsest Gaussian."""
    gauss = build_gaussian(img, levels).levels
    laps = []
    for i in range(levels - 1):
        laps.append(gauss[i] - _upsample(gauss[i + 1], gauss[i].shape))
    laps.append(gauss[-1])
    return ImagePyramid(laps, "laplacian")


def collapse(pyr: ImagePyramid):
    """Reconstruct the full-resolution raster from a Laplacian pyramid."""
    if pyr.kind != "laplacian":
        raise ValueError("collapse expects a laplacian pyramid")
    acc = pyr.levels[-1]
    for lap in reversed(pyr.levels[:-1]):
        acc = _upsample(acc, lap.shape) + lap
    return acc


def _quantize(img):
    return np.clip(np.floor(np.abs(img) + 0.5) * np.sign(img), 0, 255).astype(np.uint8)


def multiband_blend(img1, img2, mask, levels=None):
    """Blend two rasters across a binary mask (1 selects ``img1``).

    The Laplacian levels of the inputs are mixed with the Gaussian pyramid
    of the mask, then collapsed: low frequencies transition over a wide
    band, high frequencies over a narrow one. uint8 inputs come back
    quantized; float inputs come back float, clamped to [0, 255].
    """
    a = np.asarray(img1)
    b = np.asarray(img2)
    m = np.asarray(mask)
    if a.shape != b.shape or m.shape != a.shape[:2]:
        raise ValueError(
            f"dimension mismatch: img1 {a.shape}, img2 {b.shape}, mask {m.shape}")
    if levels is None:
        levels = default_levels(a.shape[1], a.shape[0])
    lap1 = build_pyramids(a.astype(np.float64), levels).levels
    lap2 = build_pyramids(b.astype(np.float64), levels).levels
    # the blend weights are the smoothed Gaussian levels of the mask, so even
    # a single-band blend transitions over the 5-tap support
    mg = [_smooth(lvl) for lvl in build_gaussian(m.astype(np.float64), levels).levels]
    blended = []
    for l1, l2, ml in zip(lap1, lap2, mg):
        if l1.ndim == 3:
            ml = ml[..., None]
        blended.append(ml * l1 + (1.0 - ml) * l2)
    out = collapse(ImagePyramid(blended, "laplacian"))
    if a.dtype == np.uint8 and b.dtype == np.uint8:
        return _quantize(out)
    return np.clip(out, 0.0, 255.0)
