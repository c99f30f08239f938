"""Optimal seamline search inside a pairwise overlap rectangle.

The energy of a pixel combines HSV color differences and V-channel gradient
terms; the labeling that minimizes the summed energy of cut 4-neighbor links
is found by an exact min-cut. Pixels visible in only one image are forced to
that image's label; links touching pixels outside the shared-valid region
carry a large constant penalty so the seam stays where both images overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateOverlapError
from .mincut import min_cut_grid

_P1_EPS = 1e-6


@dataclass(frozen=True)
class SeamParams:
    """``w`` balances V against S color differences; ``p1`` is the penalty
    for links outside the shared-valid region (None = derive from content:
    twice the largest gradient magnitude, floored above the largest pixel
    energy)."""

    w: float = 0.5
    p1: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.w <= 1.0):
            raise ValueError("w must lie in [0, 1]")
        if self.p1 is not None and self.p1 <= 0:
            raise ValueError("p1 must be positive")


@dataclass(frozen=True)
class OverlapRegion:
    """Axis-aligned rect (x0, y0, width, height) in pano coordinates plus the
    per-image validity masks cropped to it."""

    x0: int
    y0: int
    width: int
    height: int
    valid1: np.ndarray
    valid2: np.ndarray

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("overlap rectangle is empty")
        for name in ("valid1", "valid2"):
            m = np.asarray(getattr(self, name), dtype=bool)
            if m.shape != (self.height, self.width):
                raise ValueError(f"{name} shape {m.shape} != rect {(self.height, self.width)}")
            object.__setattr__(self, name, m)


@dataclass
class SeamGraph:
    """Grid graph over the rect: symmetric 4-neighbor link weights plus hard
    terminal assignments (1 = keep image 1, 2 = keep image 2)."""

    right_w: np.ndarray
    down_w: np.ndarray
    forced: np.ndarray
    p1: float
    seeded_columns: tuple = ()


@dataclass
class SeamLabeling:
    labels: np.ndarray
    energy: float
    seeded_columns: tuple = field(default_factory=tuple)


def bbox_intersection(mask1, mask2):
    """Intersection of the bounding rectangles of two masks, or None."""
    boxes = []
    for m in (mask1, mask2):
        ys, xs = np.nonzero(m)
        if ys.size == 0:
            return None
        boxes.append((xs.min(), ys.min(), xs.max(), ys.max()))
    x0 = max(boxes[0][0], boxes[1][0])
    y0 = max(boxes[0][1], boxes[1][1])
    x1 = min(boxes[0][2], boxes[1][2])
    y1 = min(boxes[0][3], boxes[1][3])
    if x1 < x0 or y1 < y0:
        return None
    return int(x0), int(y0), int(x1 - x0 + 1), int(y1 - y0 + 1)


def make_overlap(mask1, mask2):
    """OverlapRegion over the bbox intersection of two validity masks."""
    rect = bbox_intersection(mask1, mask2)
    if rect is None:
        return None
    x0, y0, w, h = rect
    return OverlapRegion(x0, y0, w, h,
                         mask1[y0:y0 + h, x0:x0 + w],
                         mask2[y0:y0 + h, x0:x0 + w])


def rgb_to_vs(rgb):
    """V and S channels of HSV, both in [0, 1], from an RGB raster (0-255)."""
    arr = np.asarray(rgb, dtype=np.float64) / 255.0
    mx = arr.max(axis=-1)
    mn = arr.min(axis=-1)
    v = mx
    s = np.where(mx > 0, (mx - mn) / np.where(mx > 0, mx, 1.0), 0.0)
    return v, s


def _central_gradients(v):
    """Central-difference gradients of the V channel (one-sided at borders,
    zero along axes too short to difference)."""
    gx = np.zeros_like(v)
    gy = np.zeros_like(v)
    if v.shape[1] >= 2:
        gx[:, 1:-1] = (v[:, 2:] - v[:, :-2]) / 2.0
        gx[:, 0] = v[:, 1] - v[:, 0]
        gx[:, -1] = v[:, -1] - v[:, -2]
    if v.shape[0] >= 2:
        gy[1:-1, :] = (v[2:, :] - v[:-2, :]) / 2.0
        gy[0, :] = v[1, :] - v[0, :]
        gy[-1, :] = v[-1, :] - v[-2, :]
    return gx, gy


def energy_field(img1, img2, params: SeamParams):
    """Per-pixel energies (C_c, C_g, C) over a rect.

    Color: w|V1 - V2| + (1 - w)|S1 - S2|. Gradient: the mean absolute
    gradient of both images plus the absolute gradient differences. Values
    are meaningful only where both images are valid; the caller masks.
    """
    v1, s1 = rgb_to_vs(img1)
    v2, s2 = rgb_to_vs(img2)
    g1x, g1y = _central_gradients(v1)
    g2x, g2y = _central_gradients(v2)
    c_c = params.w * np.abs(v1 - v2) + (1.0 - params.w) * np.abs(s1 - s2)
    c_g = 0.25 * (np.abs(g1x) + np.abs(g2x) + np.abs(g1y) + np.abs(g2y)) \
        + np.abs(g1x - g2x) + np.abs(g1y - g2y)
    grad_mag = np.sqrt(np.maximum(g1x ** 2 + g1y ** 2, g2x ** 2 + g2y ** 2))
    return c_c, c_g, c_c + c_g, float(grad_mag.max(initial=0.0))


def pixel_energy(x, img1, img2, params: SeamParams = SeamParams()):
    """Energy triple (C_c, C_g, C) of one pixel ``x = (col, row)`` inside the
    overlap; both images must be valid there (callers pass cropped rasters)."""
    c_c, c_g, c, _ = energy_field(img1, img2, params)
    col, row = x
    return float(c_c[row, col]), float(c_g[row, col]), float(c[row, col])


def build_seam_graph(ov: OverlapRegion, img1, img2, params: SeamParams = SeamParams()):
    """Assemble the grid graph for an overlap.

    Links with both endpoints in the shared-valid region weigh C(x) + C(y);
    every other link weighs p1. Exclusive pixels are forced to their image's
    label. When an exclusive set is empty the rect border column nearest to
    that image's valid-area centroid is forced instead (fallback seeding).
    """
    h, w = ov.height, ov.width
    shared = ov.valid1 & ov.valid2
    c_c, c_g, c, grad_max = energy_field(img1, img2, params)
    if c.shape != (h, w):
        raise ValueError("image crops do not match the overlap rect")
    c = np.where(shared, c, 0.0)
    c_max = float(c.max(initial=0.0))
    p1 = params.p1 if params.p1 is not None else max(2.0 * grad_max, 2.0 * c_max + _P1_EPS)

    right_w = np.full((h, max(w - 1, 0)), p1)
    down_w = np.full((max(h - 1, 0), w), p1)
    both_h = shared[:, :-1] & shared[:, 1:]
    both_v = shared[:-1, :] & shared[1:, :]
    right_w[both_h] = (c[:, :-1] + c[:, 1:])[both_h]
    down_w[both_v] = (c[:-1, :] + c[1:, :])[both_v]

    forced = np.zeros((h, w), dtype=np.uint8)
    forced[ov.valid1 & ~ov.valid2] = 1
    forced[ov.valid2 & ~ov.valid1] = 2

    seeded = []
    if not (forced == 1).any() or not (forced == 2).any():
        if w < 2:
            raise DegenerateOverlapError(
                "overlap has no exclusive pixels and is too narrow to seed")
        cols = _fallback_columns(ov)
        for lab, colx in cols:
            if not (forced == lab).any():
                forced[:, colx] = lab
                seeded.append((lab, colx))
        if not (forced == 1).any() or not (forced == 2).any():
            raise DegenerateOverlapError("fallback seeding failed to place both terminals")
    graph = SeamGraph(right_w, down_w, forced, p1)
    graph.seeded_columns = tuple(seeded)
    return graph


def _fallback_columns(ov: OverlapRegion):
    """Border columns nearest each image's valid-area centroid; ties give
    image 1 its nearest border and image 2 the opposite one."""
    w = ov.width
    cents = []
    for m in (ov.valid1, ov.valid2):
        xs = np.nonzero(m)[1]
        cents.append(float(xs.mean()) if xs.size else (w - 1) / 2.0)
    col1 = 0 if cents[0] <= (w - 1) / 2.0 else w - 1
    col2 = 0 if cents[1] <= (w - 1) / 2.0 else w - 1
    if col1 == col2:
        col2 = w - 1 - col1
    return [(1, col1), (2, col2)]


def labeling_energy(labels, right_w, down_w):
    """Sum of link weights between 4-neighbors with differing labels."""
    diff_h = labels[:, :-1] != labels[:, 1:]
    diff_v = labels[:-1, :] != labels[1:, :]
    return float(right_w[diff_h].sum() + down_w[diff_v].sum())


def min_cut(graph: SeamGraph) -> SeamLabeling:
    """Exact globally optimal labeling of the seam graph."""
    if not (graph.forced == 1).any() or not (graph.forced == 2).any():
        raise DegenerateOverlapError("graph needs at least one pixel forced to each label")
    labels = min_cut_grid(graph.right_w, graph.down_w, graph.forced)
    energy = labeling_energy(labels, graph.right_w, graph.down_w)
    return SeamLabeling(labels=labels, energy=energy,
                        seeded_columns=getattr(graph, "seeded_columns", ()))


def extract_seam(labeling: SeamLabeling):
    """All 4-adjacent pixel pairs with differing labels, row-major, as
    ((x, y), (x2, y2)) tuples."""
    labels = labeling.labels
    h, w = labels.shape
    pairs = []
    for y in range(h):
        for x in range(w):
            if x + 1 < w and labels[y, x] != labels[y, x + 1]:
                pairs.append(((x, y), (x + 1, y)))
            if y + 1 < h and labels[y, x] != labels[y + 1, x]:
                pairs.append(((x, y), (x, y + 1)))
    return pairs
