"""Metric distance between panorama pixels via the panoramic depth map.

Distances are Euclidean between the two 3D points recovered from pixel
angles and depth; a rigid motion of the rig changes both endpoints alike,
so the virtual-frame and world-frame distances are identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import PanoGeometry, RigidTransform, pano_inverse, virtual_to_world


@dataclass(frozen=True)
class MeasuredSegment:
    p1: tuple
    p2: tuple
    d1: float
    d2: float
    w1: np.ndarray
    w2: np.ndarray
    length: float


def pano_pixel_to_world(u, v, depth, vpose: RigidTransform, g: PanoGeometry):
    """Pano pixel + depth -> world point (sphere angles, virtual point,
    inverse rig transform)."""
    return virtual_to_world(pano_inverse(u, v, depth, g), vpose)


def depth_at(depth_map, u, v, g: PanoGeometry):
    """Nearest-neighbor depth lookup at a continuous pano pixel.

    Endpoints are user-designated pixels; interpolating across depth
    discontinuities would corrupt measurements at object edges.
    """
    d = np.asarray(depth_map)
    ui = int(np.floor(u + 0.5)) % g.width
    vi = min(int(np.floor(v + 0.5)), g.height - 1)
    if not (0 <= vi < d.shape[0]):
        raise ValueError(f"pixel ({u}, {v}) outside the panorama")
    return float(d[vi, ui])


def measure_segment(p1, p2, depth_map, vpose: RigidTransform, g: PanoGeometry) -> MeasuredSegment:
    """Measure the segment between two pano pixels; raises if either pixel
    has no valid depth, naming the offending pixel."""
    depths = []
    for p in (p1, p2):
        d = depth_at(depth_map, p[0], p[1], g)
        if d <= 0:
            raise ValueError(f"pixel ({p[0]}, {p[1]}) has no valid depth")
        depths.append(d)
    w1 = pano_pixel_to_world(p1[0], p1[1], depths[0], vpose, g)
    w2 = pano_pixel_to_world(p2[0], p2[1], depths[1], vpose, g)
    return MeasuredSegment(
        p1=tuple(p1), p2=tuple(p2), d1=depths[0], d2=depths[1],
        w1=w1, w2=w2, length=float(np.linalg.norm(w1 - w2)),
    )


def measure_distance(p1, p2, depth_map, vpose: RigidTransform, g: PanoGeometry) -> float:
    """Euclidean distance in meters between two measured pano pixels."""
    return measure_segment(p1, p2, depth_map, vpose, g).length
