"""Synthetic box-room scenes with analytic ground truth.

The room is an axis-aligned box (floor at z = 0) whose inside walls carry a
deterministic low-contrast procedural texture: a checker plus thin marker
stripes whose crossings sit at known world coordinates, so measured segment
lengths have exact ground truth. The floor is flat-shaded. Cameras render by
exact ray-box intersection; the cloud samples the faces on a regular grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import CameraIntrinsics, PanoGeometry, RigidTransform
from .pipeline import StationBundle

FLOOR_COLOR = np.array([90.0, 90.0, 100.0])
BASE_GRAY = 120.0
# kept deliberately low-contrast: the guided densifier's color weights get
# one-sided near strong edges, which biases depth on oblique surfaces
CHECKER_AMP = 5.0
STRIPE_AMP = 8.0
STRIPE_HALF_WIDTH = 0.03
MARKER_A = (-1.0, -0.6, 0.6, 1.0)
MARKER_B = (0.3, 1.2, 1.8, 2.7)


@dataclass(frozen=True)
class SceneSpec:
    """Box room + rig layout + sampling density; everything deterministic."""

    room: tuple = (4.0, 6.0, 3.0)
    stations: tuple = ((0.0, -1.6), (0.0, 1.6))
    sensor_height: float = 1.5
    camera_count: int = 6
    image_width: int = 640
    image_height: int = 480
    hfov_deg: float = 100.0
    rig_radius: float = 0.05
    cloud_density: float = 50.0
    texture_pattern: str = "checker-stripes"
    texture_cell: float = 0.4
    seed: int = 0
    jitter: float = 0.0

    def __post_init__(self):
        if min(self.room) <= 0:
            raise ValueError("room dimensions must be positive")
        if self.cloud_density <= 0:
            raise ValueError("cloud density must be positive")
        if self.camera_count < 2:
            raise ValueError("rig needs at least 2 cameras")
        if not self.stations:
            raise ValueError("at least one station required")
        if not (0 < self.sensor_height < self.room[2]):
            raise ValueError("sensor height must lie inside the room")


@dataclass(frozen=True)
class Segment:
    name: str
    w1: np.ndarray
    w2: np.ndarray
    length: float


@dataclass
class SceneTruth:
    spec: SceneSpec
    segments: list


def _intrinsics(spec: SceneSpec) -> CameraIntrinsics:
    fx = (spec.image_width / 2.0) / np.tan(np.radians(spec.hfov_deg) / 2.0)
    return CameraIntrinsics(
        fx=fx, fy=fx,
        u0=(spec.image_width - 1) / 2.0, v0=(spec.image_height - 1) / 2.0,
        width=spec.image_width, height=spec.image_height,
    )


def rig_poses(spec: SceneSpec, origin):
    """Camera-from-world poses for an outward-looking horizontal ring.

    Camera axes: +Z optical (outward), +X right, +Y down.
    """
    poses = []
    for i in range(spec.camera_count):
        th = 2.0 * np.pi * i / spec.camera_count
        c, s = np.cos(th), np.sin(th)
        center = np.asarray(origin, dtype=np.float64) + spec.rig_radius * np.array([c, s, 0.0])
        rot = np.array([
            [s, -c, 0.0],
            [0.0, 0.0, -1.0],
            [c, s, 0.0],
        ])
        poses.append(RigidTransform(rot, -rot @ center))
    return poses


def _ray_box_exit(spec: SceneSpec, origin, dirs):
    """Exit distance and face id for rays leaving a point inside the box.

    Faces: 0/1 -> x = +-wx/2, 2/3 -> y = +-wy/2, 4 -> floor z=0,
    5 -> ceiling z=wz.
    """
    wx, wy, wz = spec.room
    o = np.asarray(origin, dtype=np.float64)
    d = np.asarray(dirs, dtype=np.float64)
    bounds_lo = np.array([-wx / 2.0, -wy / 2.0, 0.0])
    bounds_hi = np.array([wx / 2.0, wy / 2.0, wz])
    with np.errstate(divide="ignore", invalid="ignore"):
        t_hi = (bounds_hi - o) / d
        t_lo = (bounds_lo - o) / d
    t_axis = np.where(d > 0, t_hi, np.where(d < 0, t_lo, np.inf))
    axis = np.argmin(t_axis, axis=-1)
    t = np.take_along_axis(t_axis, axis[..., None], axis=-1)[..., 0]
    sign_pos = np.take_along_axis(d, axis[..., None], axis=-1)[..., 0] > 0
    face = np.where(axis == 0, np.where(sign_pos, 0, 1),
                    np.where(axis == 1, np.where(sign_pos, 2, 3),
                             np.where(sign_pos, 5, 4)))
    return t, face


def _face_coords(points, face):
    """Face-local (a, b) texture coordinates."""
    a = np.where(face < 2, points[..., 1], points[..., 0])
    b = np.where(face < 4, points[..., 2], points[..., 1])
    return a, b


def texture(points, face, spec: SceneSpec):
    """Deterministic wall shading; pure function of the hit point."""
    points = np.asarray(points, dtype=np.float64)
    face = np.asarray(face)
    a, b = _face_coords(points, face)
    checker = ((np.floor(a / spec.texture_cell) + np.floor(b / spec.texture_cell)) % 2)
    rgb = np.full(a.shape + (3,), BASE_GRAY)
    rgb[..., 0] += CHECKER_AMP * (2.0 * checker - 1.0)  # checker on R only
    rgb[..., 2] += face * 2.0
    stripe_a = np.zeros(a.shape, dtype=bool)
    for pos in MARKER_A:
        stripe_a |= np.abs(a - pos) <= STRIPE_HALF_WIDTH
    stripe_b = np.zeros(b.shape, dtype=bool)
    for pos in MARKER_B:
        stripe_b |= np.abs(b - pos) <= STRIPE_HALF_WIDTH
    rgb[..., 1] += STRIPE_AMP * (stripe_a | stripe_b)
    flat = face == 4
    rgb[flat] = FLOOR_COLOR
    return np.clip(np.floor(rgb + 0.5), 0, 255).astype(np.uint8)


def render_camera(spec: SceneSpec, pose: RigidTransform, k: CameraIntrinsics):
    """Ray-cast one pinhole camera; returns (uint8 RGB image, analytic Z_c)."""
    us, vs = np.meshgrid(np.arange(k.width), np.arange(k.height))
    dir_cam = np.stack([(us - k.u0) / k.fx, (vs - k.v0) / k.fy, np.ones_like(us, float)],
                       axis=-1)
    rot_inv = pose.rotation.T
    center = -(rot_inv @ pose.translation)
    dir_world = dir_cam @ rot_inv.T
    t, face = _ray_box_exit(spec, center, dir_world)
    hits = center + t[..., None] * dir_world
    img = texture(hits, face, spec)
    return img, t


def make_cloud(spec: SceneSpec):
    """Regular grid sampling of the box faces at ``cloud_density`` pts/m^2."""
    wx, wy, wz = spec.room
    s = 1.0 / np.sqrt(spec.cloud_density)
    rng = np.random.default_rng(spec.seed)
    pts = []

    def grid(lo_a, hi_a, lo_b, hi_b):
        a = np.arange(lo_a + 0.5 * s, hi_a, s)
        b = np.arange(lo_b + 0.5 * s, hi_b, s)
        aa, bb = np.meshgrid(a, b)
        if spec.jitter > 0:
            aa = aa + rng.uniform(-0.5, 0.5, aa.shape) * spec.jitter * s
            bb = bb + rng.uniform(-0.5, 0.5, bb.shape) * spec.jitter * s
        return aa.ravel(), bb.ravel()

    for sign in (1.0, -1.0):
        a, b = grid(-wy / 2, wy / 2, 0.0, wz)
        pts.append(np.stack([np.full_like(a, sign * wx / 2), a, b], axis=-1))
        a, b = grid(-wx / 2, wx / 2, 0.0, wz)
        pts.append(np.stack([a, np.full_like(a, sign * wy / 2), b], axis=-1))
    a, b = grid(-wx / 2, wx / 2, -wy / 2, wy / 2)
    pts.append(np.stack([a, b, np.zeros_like(a)], axis=-1))
    pts.append(np.stack([a, b, np.full_like(a, wz)], axis=-1))
    return np.concatenate(pts, axis=0)


def ground_truth_segments(spec: SceneSpec):
    """Ten segments between texture-marker crossings with exact lengths.

    All endpoints sit on flat wall interior (stripe crossings), where the
    depth field is smooth; creases and corners are deliberately avoided.
    """
    wx, wy, wz = spec.room
    a1, a2 = -0.6, 0.6
    b1, b2 = 1.2, 1.8
    walls = {
        "xpos": lambda a, b: np.array([wx / 2, a, b]),
        "xneg": lambda a, b: np.array([-wx / 2, a, b]),
        "yneg": lambda a, b: np.array([a, -wy / 2, b]),
    }
    segs = []
    for name, to_world in walls.items():
        segs.append(Segment(f"{name}-horizontal", to_world(a1, b1), to_world(a2, b1),
                            abs(a2 - a1)))
        segs.append(Segment(f"{name}-vertical", to_world(a1, b1), to_world(a1, b2),
                            abs(b2 - b1)))
        if name != "xneg":
            segs.append(Segment(f"{name}-diagonal", to_world(a1, b1), to_world(a2, b2),
                                float(np.hypot(a2 - a1, b2 - b1))))
    segs.append(Segment("xpos-tall", np.array([wx / 2, -0.6, 0.3]),
                        np.array([wx / 2, -0.6, 2.7]), 2.4))
    segs.append(Segment("yneg-wide", np.array([-1.0, -wy / 2, 1.2]),
                        np.array([1.0, -wy / 2, 1.2]), 2.0))
    return segs


def synth_scene(spec: SceneSpec):
    """Generate station bundles plus ground truth for a box-room scene."""
    cloud = make_cloud(spec)
    k = _intrinsics(spec)
    bundles = []
    for si, (sx, sy) in enumerate(spec.stations):
        origin = np.array([sx, sy, spec.sensor_height])
        poses = rig_poses(spec, origin)
        images = []
        for pose in poses:
            img, _ = render_camera(spec, pose, k)
            images.append(img)
        vpose = RigidTransform(np.eye(3), -origin)
        bundles.append(StationBundle(
            station_id=f"station{si}", images=images,
            intrinsics=[k] * spec.camera_count, cam_poses=poses,
            virtual_pose=vpose, cloud=cloud, h_floor=spec.sensor_height,
        ))
    return bundles, SceneTruth(spec=spec, segments=ground_truth_segments(spec))


def analytic_camera_depth(spec: SceneSpec, station_idx: int, cam_idx: int):
    origin = np.array([*spec.stations[station_idx], spec.sensor_height])
    pose = rig_poses(spec, origin)[cam_idx]
    _, t = render_camera(spec, pose, _intrinsics(spec))
    return t


def analytic_pano_depth(spec: SceneSpec, station_idx: int, g: PanoGeometry):
    """Exact radial depth from the station's virtual origin per pano pixel."""
    origin = np.array([*spec.stations[station_idx], spec.sensor_height])
    us, vs = np.meshgrid(np.arange(g.width), np.arange(g.height))
    alpha = np.pi - us * (2.0 * np.pi) / g.width
    beta = np.pi * vs / g.height
    sb = np.sin(beta)
    dirs = np.stack([sb * np.cos(alpha), sb * np.sin(alpha), np.cos(beta)], axis=-1)
    t, _ = _ray_box_exit(spec, origin, dirs)
    return t
