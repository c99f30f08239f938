"""Sparse depth from point clouds, guided densification, panoramic assembly.

Depth rasters are float64 arrays in meters with 0 marking invalid pixels
(physical depth 0 is impossible: it would be the projection center). Point
clouds are (N, 3) float64 arrays in the world frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import (
    CameraIntrinsics,
    PanoGeometry,
    RigidTransform,
    pano_forward,
    pixel_to_world,
    world_to_virtual,
)


@dataclass(frozen=True)
class DensifyParams:
    """Knobs of the guided upsampler.

    ``sigma_color`` is on a 0-255 channel scale. The spatial bandwidth per
    pixel adapts to half the distance of its ``k_nearest``-th valid sample.
    """

    k_nearest: int = 8
    max_radius: int = 30
    sigma_color: float = 10.0
    enhancement_iters: int = 3
    enhancement_lambda: float = 0.2

    def __post_init__(self):
        if self.k_nearest < 1:
            raise ValueError("k_nearest must be >= 1")
        if self.max_radius < 1:
            raise ValueError("max_radius must be >= 1")
        if self.sigma_color <= 0:
            raise ValueError("sigma_color must be positive")
        if not (0.0 < self.enhancement_lambda < 1.0):
            raise ValueError("enhancement_lambda must lie in (0, 1)")
        if self.enhancement_iters < 0:
            raise ValueError("enhancement_iters must be >= 0")


def project_sparse_depth(cloud, k: CameraIntrinsics, pose: RigidTransform):
    """Project a world-frame cloud into a camera, keeping the nearest depth.

    Points behind the camera or landing outside the sensor are dropped.
    When several points rasterize (nearest integer) to one pixel the
    smallest Z_c wins, which resolves occlusions.
    """
    pts = np.asarray(cloud, dtype=np.float64)
    if pts.size == 0:
        raise ValueError("point cloud is empty")
    cam = pose.apply(pts)
    z = cam[:, 2]
    front = z > 0
    cam = cam[front]
    z = z[front]
    u = k.fx * cam[:, 0] / z + k.u0
    v = k.fy * cam[:, 1] / z + k.v0
    ui = np.floor(u + 0.5).astype(np.int64)
    vi = np.floor(v + 0.5).astype(np.int64)
    inside = (ui >= 0) & (ui < k.width) & (vi >= 0) & (vi < k.height)
    return kernels.scatter_min_depth(vi[inside], ui[inside], z[inside], (k.height, k.width))


def _as_guide(guide, shape):
    g = np.asarray(guide, dtype=np.float64)
    if g.ndim == 2:
        g = g[:, :, None]
    if g.ndim != 3 or g.shape[:2] != shape:
        raise ValueError(f"guide shape {g.shape} does not match depth shape {shape}")
    return np.ascontiguousarray(g)


def densify(sparse, guide, p: DensifyParams = DensifyParams()):
    """Fill the invalid pixels of a sparse depth map guided by an RGB image.

    Valid input pixels keep their exact values. Each invalid pixel receives
    a weighted average of the valid samples within ``max_radius`` (spatial
    Gaussian with per-pixel adaptive bandwidth times a color Gaussian on the
    guide), then ``enhancement_iters`` Jacobi sweeps of edge-aware diffusion
    run over the newly filled pixels. Pixels with no sample in range stay
    invalid.
    """
    d = np.asarray(sparse, dtype=np.float64)
    g = _as_guide(guide, d.shape)
    valid = d > 0
    if not valid.any():
        raise ValueError("sparse depth has no valid samples")
    if valid.all():
        return d.copy()
    out = kernels.guided_fill(d, g, p.k_nearest, p.max_radius, p.sigma_color)
    if p.enhancement_iters > 0:
        fill_mask = ~valid
        out = kernels.edge_aware_diffuse(
            out, g, fill_mask, p.enhancement_lambda, p.sigma_color, p.enhancement_iters
        )
    return out


def build_pano_depth(dense_maps, intrinsics, cam_poses, vpose: RigidTransform, g: PanoGeometry):
    """Assemble the panoramic depth map by direct mapping.

    Every valid camera-depth pixel is lifted to the world, moved into the
    virtual frame and splatted onto the nearest pano pixel with its radial
    distance. Pano pixels hit several times store the arithmetic mean.
    """
    if not (len(dense_maps) == len(intrinsics) == len(cam_poses)):
        raise ValueError("dense_maps, intrinsics and cam_poses must have equal length")
    sums = np.zeros((g.height, g.width), dtype=np.float64)
    counts = np.zeros((g.height, g.width), dtype=np.int64)
    for depth, k, pose in zip(dense_maps, intrinsics, cam_poses):
        d = np.asarray(depth, dtype=np.float64)
        if d.shape != (k.height, k.width):
            raise ValueError(f"depth map shape {d.shape} does not match intrinsics "
                             f"{(k.height, k.width)}")
        vs, us = np.nonzero(d > 0)
        if vs.size == 0:
            continue
        p_w = pixel_to_world(us.astype(np.float64), vs.astype(np.float64), d[vs, us], k, pose)
        p_v = world_to_virtual(p_w, vpose)
        u_pano, v_pano = pano_forward(p_v, g)
        radius = np.linalg.norm(p_v, axis=-1)
        ui = np.floor(u_pano + 0.5).astype(np.int64) % g.width
        vi = np.minimum(np.floor(v_pano + 0.5).astype(np.int64), g.height - 1)
        kernels.scatter_sum_count(vi, ui, radius, sums, counts)
    out = np.zeros_like(sums)
    hit = counts > 0
    out[hit] = sums[hit] / counts[hit]
    return out


def fill_invalid_depth(pano_depth, rows=None):
    """Fill invalid pixels from the minimum of the first valid value seen in
    each of the 8 compass directions.

    ``rows`` restricts the pixels that get written (the nadir band is filled
    elsewhere); the directional scans always read the whole original raster,
    so the result is independent of scan order. Pixels with no valid value
    in any direction stay invalid.
    """
    d = np.asarray(pano_depth, dtype=np.float64)
    if rows is None:
        rows = (0, d.shape[0])
    row_lo, row_hi = rows
    if not (0 <= row_lo <= row_hi <= d.shape[0]):
        raise ValueError(f"row range {rows} outside raster of height {d.shape[0]}")
    return kernels.directional_min_fill(d, row_lo, row_hi)
