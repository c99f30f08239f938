"""Coordinate-frame math: world/camera/pixel, virtual rig frame, sphere mapping.

Conventions used throughout the package:

* world -> camera:   P_c = R @ P_w + t        (pose stores R, t)
* world -> virtual:  P_v = R_v @ P_w + T_v    (rig pose, same storage)
* panorama:          column u maps azimuth alpha in (-pi, pi] via
                     u = U * (pi - alpha) / (2 pi); row v maps the polar
                     angle beta in [0, pi] measured from +Z via v = V * beta / pi.

All functions broadcast over leading dimensions: points are arrays of shape
(..., 3), pixel coordinates are arrays of shape (...,). Pixel coordinates are
continuous; rasterization belongs to callers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_ROT_TOL = 1e-9


@dataclass(frozen=True)
class RigidTransform:
    """Proper rigid motion p_dst = R @ p_src + t between two named frames."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = np.array(self.rotation, dtype=np.float64)
        t = np.array(self.translation, dtype=np.float64).reshape(3)
        if R.shape != (3, 3):
            raise ValueError(f"rotation must be 3x3, got {R.shape}")
        ortho_err = float(np.abs(R.T @ R - np.eye(3)).max())
        if ortho_err > _ROT_TOL:
            raise ValueError(f"rotation is not orthonormal (max |R^T R - I| = {ortho_err:.3e})")
        det = float(np.linalg.det(R))
        if abs(det - 1.0) > _ROT_TOL:
            raise ValueError(f"rotation must be proper (det = {det:.12f}, expected 1)")
        R.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    def apply(self, points):
        p = np.asarray(points, dtype=np.float64)
        return p @ self.rotation.T + self.translation

    def invert(self) -> "RigidTransform":
        return RigidTransform(self.rotation.T, -(self.rotation.T @ self.translation))

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """Transform equivalent to applying `other` first, then `self`."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole parameters in pixels (no distortion; inputs are pre-undistorted)."""

    fx: float
    fy: float
    u0: float
    v0: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("sensor size must be positive")
        if not (0 <= self.u0 < self.width):
            raise ValueError(f"u0={self.u0} outside [0, {self.width})")
        if not (0 <= self.v0 < self.height):
            raise ValueError(f"v0={self.v0} outside [0, {self.height})")


@dataclass(frozen=True)
class PanoGeometry:
    """Equirectangular raster size; width is twice the height, both even."""

    width: int
    height: int

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("panorama dimensions must be positive")
        if self.width != 2 * self.height:
            raise ValueError(f"panorama width must be 2x height, got {self.width}x{self.height}")
        if self.width % 2 or self.height % 2:
            raise ValueError("panorama dimensions must be even")


@dataclass(frozen=True)
class SphericalDirection:
    """Azimuth alpha in [-pi, pi] and polar angle beta in [0, pi] from +Z."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (-np.pi <= self.alpha <= np.pi):
            raise ValueError(f"alpha={self.alpha} outside [-pi, pi]")
        if not (0.0 <= self.beta <= np.pi):
            raise ValueError(f"beta={self.beta} outside [0, pi]")


def world_to_camera(p_w, pose: RigidTransform):
    """Map world points into the camera frame (P_c = R p_w + t)."""
    return pose.apply(p_w)


def camera_to_pixel(p_c, k: CameraIntrinsics):
    """Project camera-frame points to continuous pixel coordinates.

    No bounds clamp: callers decide visibility. Raises for points at or
    behind the projection plane (Z_c <= 0).
    """
    p = np.asarray(p_c, dtype=np.float64)
    z = p[..., 2]
    if np.any(z <= 0):
        raise ValueError("point behind camera (Z_c <= 0)")
    u = k.fx * p[..., 0] / z + k.u0
    v = k.fy * p[..., 1] / z + k.v0
    return u, v


def pixel_to_world(u, v, depth, k: CameraIntrinsics, pose: RigidTransform):
    """Lift pixel + metric depth back to the world frame.

    Inverse of world_to_camera followed by camera_to_pixel.
    """
    d = np.asarray(depth, dtype=np.float64)
    if np.any(d <= 0):
        raise ValueError("depth must be positive")
    x = (np.asarray(u, dtype=np.float64) - k.u0) * d / k.fx
    y = (np.asarray(v, dtype=np.float64) - k.v0) * d / k.fy
    p_c = np.stack([x, y, d], axis=-1)
    return pose.invert().apply(p_c)


def world_to_virtual(p_w, rig_pose: RigidTransform):
    """Map world points into the rig-centered virtual frame."""
    return rig_pose.apply(p_w)


def virtual_to_world(p_v, rig_pose: RigidTransform):
    """Map virtual-frame points back to the world frame (R_v^-1 (p_v - T_v))."""
    return rig_pose.invert().apply(p_v)


def pano_forward(p_v, g: PanoGeometry):
    """Spherical forward mapping: virtual-frame point -> pano pixel.

    alpha = atan2(Y, X), beta = atan2(hypot(X, Y), Z). At the poles alpha is
    undefined; atan2(0, 0) = 0 is used for determinism. Returned u lies in
    [0, U), v in [0, V].
    """
    p = np.asarray(p_v, dtype=np.float64)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    rxy = np.hypot(x, y)
    if np.any((rxy == 0) & (z == 0)):
        raise ValueError("zero direction vector has no panorama pixel")
    alpha = np.arctan2(y, x)
    beta = np.arctan2(rxy, z)
    u = g.width * (np.pi - alpha) / (2.0 * np.pi)
    v = g.height * beta / np.pi
    return u, v


def pano_angles(u, v, g: PanoGeometry):
    """Pano pixel -> (alpha, beta). Accepts u in [0, U), v in [0, V]."""
    uu = np.asarray(u, dtype=np.float64)
    vv = np.asarray(v, dtype=np.float64)
    if np.any((uu < 0) | (uu >= g.width)):
        raise ValueError(f"pano u outside [0, {g.width})")
    if np.any((vv < 0) | (vv > g.height)):
        raise ValueError(f"pano v outside [0, {g.height}]")
    alpha = np.pi - uu * (2.0 * np.pi) / g.width
    beta = np.pi * vv / g.height
    return alpha, beta


def pano_inverse(u, v, depth, g: PanoGeometry):
    """Pano pixel + spherical radius -> virtual-frame point."""
    d = np.asarray(depth, dtype=np.float64)
    if np.any(d <= 0):
        raise ValueError("depth must be positive")
    alpha, beta = pano_angles(u, v, g)
    sb = np.sin(beta)
    return np.stack(
        [d * sb * np.cos(alpha), d * sb * np.sin(alpha), d * np.cos(beta)],
        axis=-1,
    )
