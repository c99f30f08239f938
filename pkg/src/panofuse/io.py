"""File formats: calibration JSON, ASCII point clouds, 16-bit depth PNGs,
and the pano bundle metadata consumed by the measurement clients.

Depth PNGs store millimeters in 16-bit grayscale, 0 = invalid, so a read
after a write is exact up to 1 mm quantization.
"""

from __future__ import annotations

import json
import os

import numpy as np
from PIL import Image

from .errors import CalibrationError, CloudParseError, DepthRangeError
from .geometry import CameraIntrinsics, RigidTransform
from .pipeline import StationBundle

VIRTUAL_CONVENTION = "virtual_from_world"
CAMERA_CONVENTION = "camera_from_world"

DEPTH_SCALE_MM = 1000.0  # millimeters per meter


# ---------------------------------------------------------------------------
# depth rasters

def write_depth_png(depth, path):
    d = np.asarray(depth, dtype=np.float64)
    mm = np.floor(d * DEPTH_SCALE_MM + 0.5)
    if mm.max(initial=0.0) > 65535:
        raise DepthRangeError(
            f"depth {d.max():.3f} m exceeds the 65.535 m range of 16-bit millimeter PNGs")
    if mm.min(initial=0.0) < 0:
        raise DepthRangeError("negative depth cannot be serialized")
    Image.fromarray(mm.astype(np.uint16)).save(path, format="PNG")


def read_depth_png(path):
    img = Image.open(path)
    if img.mode not in ("I;16", "I", "I;16B"):
        raise DepthRangeError(f"{path}: expected a 16-bit grayscale PNG, got mode {img.mode}")
    raw = np.asarray(img).astype(np.float64)
    return raw / DEPTH_SCALE_MM


def write_rgb_png(rgb, path):
    Image.fromarray(np.asarray(rgb, dtype=np.uint8), "RGB").save(path, format="PNG")


def read_rgb_png(path):
    return np.asarray(Image.open(path).convert("RGB"))


# ---------------------------------------------------------------------------
# point clouds

def read_point_cloud(path):
    """Load an ASCII PLY (x, y, z properties; extras ignored) or a
    whitespace-separated XYZ text file. Order is preserved."""
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        first = fh.readline()
        if first.strip() == "ply":
            return _read_ascii_ply(fh)
        return _read_xyz(first, fh)


def _read_ascii_ply(fh):
    n_vertices = None
    props = []
    in_vertex = False
    line_no = 1
    for line in fh:
        line_no += 1
        tok = line.split()
        if not tok:
            continue
        if tok[0] == "format":
            if tok[1] != "ascii":
                raise CloudParseError(f"unsupported PLY format {tok[1]!r} (ASCII only)",
                                      line=line_no)
        elif tok[0] == "element":
            in_vertex = tok[1] == "vertex"
            if in_vertex:
                n_vertices = int(tok[2])
        elif tok[0] == "property" and in_vertex:
            props.append(tok[-1])
        elif tok[0] == "end_header":
            break
    if n_vertices is None:
        raise CloudParseError("PLY header has no vertex element")
    try:
        ix, iy, iz = props.index("x"), props.index("y"), props.index("z")
    except ValueError:
        raise CloudParseError("PLY vertex element lacks x/y/z properties") from None
    pts = np.empty((n_vertices, 3), dtype=np.float64)
    for i in range(n_vertices):
        line_no += 1
        line = fh.readline()
        if not line:
            raise CloudParseError("unexpected end of file in vertex data", line=line_no)
        tok = line.split()
        try:
            pts[i, 0] = float(tok[ix])
            pts[i, 1] = float(tok[iy])
            pts[i, 2] = float(tok[iz])
        except (ValueError, IndexError):
            raise CloudParseError(f"malformed vertex record {line.strip()!r}",
                                  line=line_no) from None
    if not np.isfinite(pts).all():
        raise CloudParseError("point cloud contains non-finite coordinates")
    return pts


def _read_xyz(first, fh):
    pts = []
    for line_no, line in enumerate([first] + list(fh), start=1):
        tok = line.split()
        if not tok or tok[0].startswith("#"):
            continue
        if len(tok) < 3:
            raise CloudParseError(f"expected 3 coordinates, got {len(tok)}", line=line_no)
        try:
            pts.append((float(tok[0]), float(tok[1]), float(tok[2])))
        except ValueError:
            raise CloudParseError(f"non-numeric token in {line.strip()!r}",
                                  line=line_no) from None
    arr = np.asarray(pts, dtype=np.float64).reshape(-1, 3)
    if not np.isfinite(arr).all():
        raise CloudParseError("point cloud contains non-finite coordinates")
    return arr


def write_point_cloud_ply(points, path):
    pts = np.asarray(points, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {len(pts)}\n")
        fh.write("property float x\nproperty float y\nproperty float z\n")
        fh.write("end_header\n")
        for x, y, z in pts:
            fh.write(f"{x:.6f} {y:.6f} {z:.6f}\n")


# ---------------------------------------------------------------------------
# calibration

def _pose_from_json(obj, expect_convention, where):
    for key in ("rotation", "translation", "convention"):
        if key not in obj:
            raise CalibrationError(f"{where}: pose lacks field {key!r}")
    if obj["convention"] != expect_convention:
        raise CalibrationError(
            f"{where}: convention {obj['convention']!r} does not match the required "
            f"{expect_convention!r}")
    rot = np.asarray(obj["rotation"], dtype=np.float64)
    if rot.size != 9:
        raise CalibrationError(f"{where}: rotation must have 9 entries (row-major)")
    try:
        return RigidTransform(rot.reshape(3, 3), np.asarray(obj["translation"], dtype=np.float64))
    except ValueError as exc:
        raise CalibrationError(f"{where}: {exc}") from None


def _pose_to_json(pose: RigidTransform, convention):
    return {
        "rotation": [float(x) for x in pose.rotation.reshape(-1)],
        "translation": [float(x) for x in pose.translation],
        "convention": convention,
    }


def _intrinsics_from_json(obj, where):
    try:
        return CameraIntrinsics(
            fx=float(obj["fx"]), fy=float(obj["fy"]),
            u0=float(obj["u0"]), v0=float(obj["v0"]),
            width=int(obj["width"]), height=int(obj["height"]),
        )
    except KeyError as exc:
        raise CalibrationError(f"{where}: intrinsics lack field {exc}") from None
    except ValueError as exc:
        raise CalibrationError(f"{where}: {exc}") from None


def load_calibration(path, load_assets=True):
    """Parse and fully validate a calibration file into station bundles.

    Asset paths are resolved relative to the calibration file. With
    ``load_assets=False`` images and clouds stay unloaded (images become
    zero rasters of the right size) for tools that only need the geometry.
    """
    base = os.path.dirname(os.path.abspath(path))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CalibrationError(f"{path}: JSON parse error at line {exc.lineno}: {exc.msg}") \
            from None
    if "stations" not in doc:
        raise CalibrationError(f"{path}: missing top-level 'stations' list")
    bundles = []
    for si, st in enumerate(doc["stations"]):
        where = f"station[{si}]"
        sid = st.get("station_id")
        if sid is None:
            raise CalibrationError(f"{where}: missing station_id")
        vpose = _pose_from_json(st.get("virtual_pose", {}), VIRTUAL_CONVENTION,
                                f"{where}.virtual_pose")
        if "h_floor" not in st:
            raise CalibrationError(f"{where}: missing h_floor")
        images, intrinsics, poses, img_paths = [], [], [], []
        for ci, cam in enumerate(st.get("cameras", [])):
            cw = f"{where}.camera[{ci}]"
            k = _intrinsics_from_json(cam.get("intrinsics", {}), cw)
            pose = _pose_from_json(cam.get("pose", {}), CAMERA_CONVENTION, f"{cw}.pose")
            ipath = cam.get("image_path")
            if ipath is None:
                raise CalibrationError(f"{cw}: missing image_path")
            if load_assets:
                img = read_rgb_png(os.path.join(base, ipath))
                if img.shape[:2] != (k.height, k.width):
                    raise CalibrationError(
                        f"{cw}: image {img.shape[:2]} does not match intrinsics "
                        f"{(k.height, k.width)}")
            else:
                img = np.zeros((k.height, k.width, 3), dtype=np.uint8)
            images.append(img)
            intrinsics.append(k)
            poses.append(pose)
            img_paths.append(ipath)
        cpath = st.get("cloud_path")
        if cpath is None:
            raise CalibrationError(f"{where}: missing cloud_path")
        cloud = read_point_cloud(os.path.join(base, cpath)) if load_assets \
            else np.zeros((0, 3))
        try:
            bundles.append(StationBundle(
                station_id=str(sid), images=images, intrinsics=intrinsics,
                cam_poses=poses, virtual_pose=vpose, cloud=cloud,
                h_floor=float(st["h_floor"]), image_paths=img_paths, cloud_path=cpath,
            ))
        except ValueError as exc:
            raise CalibrationError(f"{where}: {exc}") from None
    return bundles


def save_calibration(bundles, path):
    """Serialize bundles back to calibration JSON (asset paths preserved)."""
    stations = []
    for b in bundles:
        cams = []
        for i, (k, pose) in enumerate(zip(b.intrinsics, b.cam_poses)):
            cams.append({
                "intrinsics": {"fx": k.fx, "fy": k.fy, "u0": k.u0, "v0": k.v0,
                               "width": k.width, "height": k.height},
                "pose": _pose_to_json(pose, CAMERA_CONVENTION),
                "image_path": b.image_paths[i] if b.image_paths else f"cam{i}.png",
            })
        stations.append({
            "station_id": b.station_id,
            "virtual_pose": _pose_to_json(b.virtual_pose, VIRTUAL_CONVENTION),
            "cameras": cams,
            "cloud_path": b.cloud_path or "cloud.ply",
            "h_floor": b.h_floor,
        })
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"stations": stations}, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# pano bundle metadata

def write_metadata(path, *, station_id, g, h_floor, virtual_pose, depth_path, rgb_path):
    doc = {
        "pano_width": g.width,
        "pano_height": g.height,
        "depth_scale_mm": 1,
        "h_floor": h_floor,
        "virtual_pose": _pose_to_json(virtual_pose, VIRTUAL_CONVENTION),
        "station_id": station_id,
        "depth_path": depth_path,
        "rgb_path": rgb_path,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def read_metadata(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# seam debug dumps

def write_labeling_png(labels, path):
    """Seam labeling as an 8-bit PNG: label 1 -> 0, label 2 -> 255."""
    img = np.where(np.asarray(labels) == 2, 255, 0).astype(np.uint8)
    Image.fromarray(img, "L").save(path, format="PNG")


def write_seam_pairs(pairs, path):
    with open(path, "w", encoding="utf-8") as fh:
        for (x1, y1), (x2, y2) in pairs:
            fh.write(f"{x1} {y1} {x2} {y2}\n")
