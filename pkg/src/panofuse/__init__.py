"""Fuse LiDAR point clouds with multi-camera rig images into depth-annotated,
measurable equirectangular panoramas."""

__version__ = "0.1.0"

from .geometry import (  # noqa: F401
    CameraIntrinsics,
    PanoGeometry,
    RigidTransform,
    SphericalDirection,
)
