"""Per-station orchestration: depth maps, inverse-mapped renders, seamed and
blended composites, and nadir hole filling from neighboring stations."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import blend as blend_mod
from . import kernels
from . import seam as seam_mod
from .depth_fusion import DensifyParams, build_pano_depth, densify, fill_invalid_depth, \
    project_sparse_depth
from .geometry import (
    PanoGeometry,
    RigidTransform,
    camera_to_pixel,
    pano_angles,
    pano_inverse,
    virtual_to_world,
    world_to_camera,
)
from .seam import SeamParams, build_seam_graph, extract_seam, make_overlap, min_cut

COVER_NONE = -1
COVER_NADIR = -2

NADIR_FRACTION = 0.2


@dataclass
class StationBundle:
    """One capture station: N camera images with calibration, the rig's
    virtual-frame pose, the world-frame cloud, and the sensor height above
    the floor."""

    station_id: str
    images: list
    intrinsics: list
    cam_poses: list
    virtual_pose: RigidTransform
    cloud: np.ndarray
    h_floor: float
    image_paths: list = None
    cloud_path: str = None

    def __post_init__(self):
        n = len(self.images)
        if n < 2:
            raise ValueError("a station needs at least 2 cameras")
        if not (len(self.intrinsics) == len(self.cam_poses) == n):
            raise ValueError("images, intrinsics and poses must have equal length")
        if self.h_floor <= 0:
            raise ValueError("h_floor must be positive")
        for i, (img, k) in enumerate(zip(self.images, self.intrinsics)):
            if img.shape[:2] != (k.height, k.width):
                raise ValueError(f"camera {i}: image {img.shape[:2]} does not match "
                                 f"intrinsics {(k.height, k.width)}")

    def virtual_origin(self):
        return virtual_to_world(np.zeros(3), self.virtual_pose)


@dataclass
class SeamRecord:
    """Seam solve bookkeeping in unrolled pano coordinates (for debugging and
    the containment checks)."""

    cam_index: int
    x0: int
    y0: int
    shift: int
    labels: np.ndarray
    valid1: np.ndarray
    valid2: np.ndarray
    energy: float
    pano_width: int

    def pairs_pano(self):
        pairs = extract_seam(seam_mod.SeamLabeling(self.labels, self.energy))
        out = []
        for (x1, y1), (x2, y2) in pairs:
            out.append((
                ((self.x0 + x1 - self.shift) % self.pano_width, self.y0 + y1),
                ((self.x0 + x2 - self.shift) % self.pano_width, self.y0 + y2),
            ))
        return out


@dataclass
class PanoComposite:
    rgb: np.ndarray
    depth: np.ndarray
    coverage: np.ndarray
    geometry: PanoGeometry
    seams: list = field(default_factory=list)

    def covered_mask(self):
        return self.coverage != COVER_NONE


def nadir_row(g: PanoGeometry) -> int:
    return int(np.ceil((1.0 - NADIR_FRACTION) * g.height))


def nadir_depth(beta, h_floor):
    """Distance to the floor plane along a ray at polar angle ``beta``.

    The magnitude guard keeps the length positive on the bottom band, where
    cos(beta) is negative under the beta-from-zenith convention.
    """
    return h_floor / np.abs(np.cos(beta))


def render_camera_to_pano(bundle: StationBundle, cam_index: int, pano_depth, g: PanoGeometry):
    """Inverse mapping: pano pixels with valid depth sample one camera.

    Each pixel's sphere point (depth as radius) is lifted to the world and
    projected into the camera; in-bounds, in-front pixels sample the image
    bilinearly. Returns (float64 RGB raster, valid mask).
    """
    depth = np.asarray(pano_depth, dtype=np.float64)
    if depth.shape != (g.height, g.width):
        raise ValueError("pano depth does not match the pano geometry")
    rgb = np.zeros((g.height, g.width, 3), dtype=np.float64)
    mask = np.zeros((g.height, g.width), dtype=bool)
    vs, us = np.nonzero(depth > 0)
    if vs.size == 0:
        return rgb, mask
    p_v = pano_inverse(us.astype(np.float64), vs.astype(np.float64), depth[vs, us], g)
    p_w = virtual_to_world(p_v, bundle.virtual_pose)
    k = bundle.intrinsics[cam_index]
    p_c = world_to_camera(p_w, bundle.cam_poses[cam_index])
    z = p_c[:, 2]
    front = z > 0
    if not front.any():
        return rgb, mask
    u, v = camera_to_pixel(p_c[front], k)
    inb = (u >= 0) & (u <= k.width - 1) & (v >= 0) & (v <= k.height - 1)
    sel_v = vs[front][inb]
    sel_u = us[front][inb]
    samples = kernels.bilinear_sample(bundle.images[cam_index], u[inb], v[inb])
    rgb[sel_v, sel_u] = samples
    mask[sel_v, sel_u] = True
    return rgb, mask


def camera_azimuths(bundle: StationBundle):
    """Azimuth of each camera's optical axis in the virtual frame."""
    az = []
    for pose in bundle.cam_poses:
        d_w = pose.rotation.T @ np.array([0.0, 0.0, 1.0])
        d_v = bundle.virtual_pose.rotation @ d_w
        az.append(float(np.arctan2(d_v[1], d_v[0])))
    return az


def _center_column(az: float, g: PanoGeometry) -> int:
    return int(np.floor(g.width * (np.pi - az) / (2 * np.pi) + 0.5)) % g.width


def stitch_station(bundle: StationBundle, g: PanoGeometry,
                   seam_params: SeamParams = None,
                   densify_params: DensifyParams = None,
                   blend_levels: int = None) -> PanoComposite:
    """Full single-station stitch.

    Per camera: sparse projection then guided densification. The panoramic
    depth map is assembled by direct mapping, invalid pixels above the nadir
    band are filled, every camera is inverse-rendered, and the renders are
    folded in ascending optical-axis azimuth with a seam + multi-band blend
    per overlap. The wrap-around overlap is handled by the last fold because
    each fold recenters the incoming image before intersecting bounding
    boxes.
    """
    seam_params = seam_params or SeamParams()
    densify_params = densify_params or DensifyParams()

    dense_maps = []
    for img, k, pose in zip(bundle.images, bundle.intrinsics, bundle.cam_poses):
        sparse = project_sparse_depth(bundle.cloud, k, pose)
        dense_maps.append(densify(sparse, img, densify_params))

    pano_depth = build_pano_depth(dense_maps, bundle.intrinsics, bundle.cam_poses,
                                  bundle.virtual_pose, g)
    pano_depth = fill_invalid_depth(pano_depth, rows=(0, nadir_row(g)))

    renders = [render_camera_to_pano(bundle, i, pano_depth, g)
               for i in range(len(bundle.images))]

    azimuths = camera_azimuths(bundle)
    order = sorted(range(len(renders)), key=lambda i: azimuths[i])

    comp_rgb = np.zeros((g.height, g.width, 3), dtype=np.float64)
    comp_mask = np.zeros((g.height, g.width), dtype=bool)
    coverage = np.full((g.height, g.width), COVER_NONE, dtype=np.int16)
    seams = []

    for idx in order:
        new_rgb, new_mask = renders[idx]
        if not new_mask.any():
            continue
        if not comp_mask.any():
            comp_rgb[new_mask] = new_rgb[new_mask]
            comp_mask |= new_mask
            coverage[new_mask] = idx
            continue
        shift = (g.width // 2 - _center_column(azimuths[idx], g)) % g.width
        r_comp_rgb = np.roll(comp_rgb, shift, axis=1)
        r_comp_mask = np.roll(comp_mask, shift, axis=1)
        r_cover = np.roll(coverage, shift, axis=1)
        r_new_rgb = np.roll(new_rgb, shift, axis=1)
        r_new_mask = np.roll(new_mask, shift, axis=1)

        ov = make_overlap(r_comp_mask, r_new_mask)
        if ov is None:
            r_comp_rgb[r_new_mask] = r_new_rgb[r_new_mask]
            r_cover[r_new_mask] = idx
            r_comp_mask |= r_new_mask
        else:
            ys = slice(ov.y0, ov.y0 + ov.height)
            xs = slice(ov.x0, ov.x0 + ov.width)
            crop1 = r_comp_rgb[ys, xs]
            crop2 = r_new_rgb[ys, xs]
            v1 = ov.valid1
            v2 = ov.valid2
            graph = build_seam_graph(ov, crop1, crop2, seam_params)
            labeling = min_cut(graph)
            seams.append(SeamRecord(idx, ov.x0, ov.y0, shift, labeling.labels,
                                    v1.copy(), v2.copy(), labeling.energy, g.width))
            img1 = np.where(v1[..., None], crop1, crop2)
            img2 = np.where(v2[..., None], crop2, crop1)
            levels = blend_levels or blend_mod.default_levels(ov.width, ov.height)
            levels = min(levels, int(np.floor(np.log2(max(min(ov.width, ov.height), 1)))) + 1)
            blended = blend_mod.multiband_blend(img1, img2, (labeling.labels == 1), levels)
            any_valid = v1 | v2
            crop1[any_valid] = blended[any_valid]
            cov_crop = r_cover[ys, xs]
            take2 = (labeling.labels == 2) & v2
            cov_crop[take2] = idx
            # outside the rect only one image can be valid
            outside_new = r_new_mask & ~r_comp_mask
            outside_new[ys, xs] = False
            r_comp_rgb[outside_new] = r_new_rgb[outside_new]
            r_cover[outside_new] = idx
            r_comp_mask |= r_new_mask

        comp_rgb = np.roll(r_comp_rgb, -shift, axis=1)
        comp_mask = np.roll(r_comp_mask, -shift, axis=1)
        coverage = np.roll(r_cover, -shift, axis=1)

    rgb8 = np.clip(np.floor(comp_rgb + 0.5), 0, 255).astype(np.uint8)
    rgb8[~comp_mask] = 0
    return PanoComposite(rgb=rgb8, depth=pano_depth, coverage=coverage,
                         geometry=g, seams=seams)


def fill_black_hole(composite: PanoComposite, current: StationBundle,
                    neighbors, g: PanoGeometry, max_neighbors: int = 4) -> PanoComposite:
    """Fill the nadir band (bottom fifth) from neighboring stations.

    Band pixels get depth h / |cos beta| (the floor distance along the ray),
    are lifted to the world with the current station's rig pose, and take
    the first in-bounds, in-front RGB sample scanning the nearest stations
    first. Occlusion is deliberately not checked. Pixels never resolved stay
    black.
    """
    out = PanoComposite(rgb=composite.rgb.copy(), depth=composite.depth.copy(),
                        coverage=composite.coverage.copy(), geometry=composite.geometry,
                        seams=composite.seams)
    if not neighbors:
        warnings.warn("no neighboring stations: nadir band left black")
        return out

    r0 = nadir_row(g)
    band_v, band_u = np.nonzero(out.coverage[r0:, :] == COVER_NONE)
    if band_v.size == 0:
        return out
    band_v = band_v + r0
    alpha, beta = pano_angles(band_u.astype(np.float64), band_v.astype(np.float64), g)
    cosb = np.cos(beta)
    ok = np.abs(cosb) > 1e-12
    band_v, band_u = band_v[ok], band_u[ok]
    alpha, beta, cosb = alpha[ok], beta[ok], cosb[ok]
    depth = nadir_depth(beta, current.h_floor)
    sb = np.sin(beta)
    p_v = np.stack([depth * sb * np.cos(alpha), depth * sb * np.sin(alpha),
                    depth * cosb], axis=-1)
    p_w = virtual_to_world(p_v, current.virtual_pose)

    origin = current.virtual_origin()
    ranked = sorted(neighbors, key=lambda b: float(np.linalg.norm(b.virtual_origin() - origin)))
    ranked = ranked[:max_neighbors]

    remaining = np.arange(band_v.size)
    for nb in ranked:
        if remaining.size == 0:
            break
        for cam, (img, k, pose) in enumerate(zip(nb.images, nb.intrinsics, nb.cam_poses)):
            if remaining.size == 0:
                break
            p_c = world_to_camera(p_w[remaining], pose)
            z = p_c[:, 2]
            front = z > 0
            if not front.any():
                continue
            u = k.fx * p_c[front, 0] / z[front] + k.u0
            v = k.fy * p_c[front, 1] / z[front] + k.v0
            inb = (u >= 0) & (u <= k.width - 1) & (v >= 0) & (v <= k.height - 1)
            if not inb.any():
                continue
            hit = remaining[front][inb]
            samples = kernels.bilinear_sample(img, u[inb], v[inb])
            out.rgb[band_v[hit], band_u[hit]] = np.clip(
                np.floor(samples + 0.5), 0, 255).astype(np.uint8)
            out.depth[band_v[hit], band_u[hit]] = depth[hit]
            out.coverage[band_v[hit], band_u[hit]] = COVER_NADIR
            keep = np.ones(remaining.size, dtype=bool)
            pos = np.nonzero(front)[0][inb]
            keep[pos] = False
            remaining = remaining[keep]
    return out
