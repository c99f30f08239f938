"""Command line interface.

Subcommands: synth (write a synthetic scene to disk), project (per-camera
sparse depth PNGs), densify (one sparse map -> dense), pano (full station
panorama bundle), measure (metric distance between two pano pixels).
Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io as pio
from .depth_fusion import DensifyParams, densify, project_sparse_depth
from .errors import PanofuseError
from .geometry import PanoGeometry, RigidTransform
from .measure import measure_segment
from .pipeline import fill_black_hole, stitch_station
from .seam import SeamParams
from .synth import SceneSpec, ground_truth_segments, synth_scene


def _build_parser():
    ap = argparse.ArgumentParser(prog="panofuse")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic box-room scene on disk")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--room", nargs=3, type=float, default=[4.0, 6.0, 3.0],
                   metavar=("WX", "WY", "WZ"))
    p.add_argument("--stations", type=int, default=2)
    p.add_argument("--cameras", type=int, default=6)
    p.add_argument("--image-size", nargs=2, type=int, default=[640, 480],
                   metavar=("W", "H"))
    p.add_argument("--cloud-density", type=float, default=50.0)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("project", help="project the cloud into each camera as sparse depth")
    p.add_argument("calibration")
    p.add_argument("--station", default=None, help="station id (default: first)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("densify", help="densify one sparse depth map with an RGB guide")
    p.add_argument("sparse_png")
    p.add_argument("guide_png")
    p.add_argument("--out", required=True, help="output PNG path")
    p.add_argument("--k-nearest", type=int, default=8)
    p.add_argument("--max-radius", type=int, default=30)
    p.add_argument("--sigma-color", type=float, default=10.0)

    p = sub.add_parser("pano", help="stitch a station into a measurable panorama bundle")
    p.add_argument("calibration")
    p.add_argument("--station", default=None, help="station id (default: all stations)")
    p.add_argument("--out", required=True)
    p.add_argument("--pano-width", type=int, default=8192)
    p.add_argument("--seam-w", type=float, default=0.5)
    p.add_argument("--blend-levels", type=int, default=None)
    p.add_argument("--neighbors", type=int, default=4,
                   help="max neighboring stations used to fill the nadir band")
    p.add_argument("--dump-seams", action="store_true",
                   help="also write per-seam labeling PNGs and pixel-pair lists")

    p = sub.add_parser("measure", help="metric distance between two pano pixels")
    p.add_argument("metadata", help="pano bundle metadata JSON")
    p.add_argument("--px", nargs=4, type=float, required=True,
                   metavar=("U1", "V1", "U2", "V2"))
    return ap


def _cmd_synth(args):
    spec = SceneSpec(
        room=tuple(args.room),
        stations=tuple((0.0, -1.6 + 3.2 * i) for i in range(args.stations)),
        camera_count=args.cameras,
        image_width=args.image_size[0], image_height=args.image_size[1],
        cloud_density=args.cloud_density, seed=args.seed,
    )
    bundles, truth = synth_scene(spec)
    os.makedirs(args.out, exist_ok=True)
    pio.write_point_cloud_ply(bundles[0].cloud, os.path.join(args.out, "cloud.ply"))
    for b in bundles:
        paths = []
        for i, img in enumerate(b.images):
            name = f"{b.station_id}_cam{i}.png"
            pio.write_rgb_png(img, os.path.join(args.out, name))
            paths.append(name)
        b.image_paths = paths
        b.cloud_path = "cloud.ply"
    pio.save_calibration(bundles, os.path.join(args.out, "calibration.json"))
    segs = [{"name": s.name, "w1": s.w1.tolist(), "w2": s.w2.tolist(), "length": s.length}
            for s in ground_truth_segments(spec)]
    with open(os.path.join(args.out, "ground_truth.json"), "w", encoding="utf-8") as fh:
        json.dump({"segments": segs, "room": spec.room,
                   "sensor_height": spec.sensor_height}, fh, indent=2)
        fh.write("\n")
    print(f"wrote scene with {len(bundles)} stations to {args.out}")
    return 0


def _select_stations(bundles, station_id):
    if station_id is None:
        return bundles
    sel = [b for b in bundles if b.station_id == station_id]
    if not sel:
        raise PanofuseError(f"station {station_id!r} not found in calibration")
    return sel


def _cmd_project(args):
    bundles = pio.load_calibration(args.calibration)
    station = _select_stations(bundles, args.station or bundles[0].station_id)[0]
    os.makedirs(args.out, exist_ok=True)
    for i, (k, pose) in enumerate(zip(station.intrinsics, station.cam_poses)):
        sparse = project_sparse_depth(station.cloud, k, pose)
        path = os.path.join(args.out, f"{station.station_id}_cam{i}_sparse.png")
        pio.write_depth_png(sparse, path)
        print(path)
    return 0


def _cmd_densify(args):
    sparse = pio.read_depth_png(args.sparse_png)
    guide = pio.read_rgb_png(args.guide_png)
    params = DensifyParams(k_nearest=args.k_nearest, max_radius=args.max_radius,
                           sigma_color=args.sigma_color)
    dense = densify(sparse, guide, params)
    pio.write_depth_png(dense, args.out)
    print(args.out)
    return 0


def _cmd_pano(args):
    if args.pano_width % 4:
        raise PanofuseError("--pano-width must be a multiple of 4")
    g = PanoGeometry(args.pano_width, args.pano_width // 2)
    bundles = pio.load_calibration(args.calibration)
    targets = _select_stations(bundles, args.station)
    os.makedirs(args.out, exist_ok=True)
    for station in targets:
        comp = stitch_station(station, g, seam_params=SeamParams(w=args.seam_w),
                              blend_levels=args.blend_levels)
        neighbors = [b for b in bundles if b.station_id != station.station_id]
        comp = fill_black_hole(comp, station, neighbors, g, max_neighbors=args.neighbors)
        rgb_name = f"{station.station_id}_pano.png"
        depth_name = f"{station.station_id}_depth.png"
        meta_name = f"{station.station_id}_meta.json"
        pio.write_rgb_png(comp.rgb, os.path.join(args.out, rgb_name))
        pio.write_depth_png(comp.depth, os.path.join(args.out, depth_name))
        pio.write_metadata(os.path.join(args.out, meta_name),
                           station_id=station.station_id, g=g, h_floor=station.h_floor,
                           virtual_pose=station.virtual_pose,
                           depth_path=depth_name, rgb_path=rgb_name)
        if args.dump_seams:
            for i, rec in enumerate(comp.seams):
                stem = os.path.join(args.out, f"{station.station_id}_seam{i}")
                pio.write_labeling_png(rec.labels, stem + ".png")
                pio.write_seam_pairs(rec.pairs_pano(), stem + ".txt")
        print(os.path.join(args.out, meta_name))
    return 0


def _cmd_measure(args):
    meta = pio.read_metadata(args.metadata)
    base = os.path.dirname(os.path.abspath(args.metadata))
    depth = pio.read_depth_png(os.path.join(base, meta["depth_path"]))
    g = PanoGeometry(meta["pano_width"], meta["pano_height"])
    vp = meta["virtual_pose"]
    vpose = RigidTransform(np.asarray(vp["rotation"], dtype=np.float64).reshape(3, 3),
                           np.asarray(vp["translation"], dtype=np.float64))
    u1, v1, u2, v2 = args.px
    seg = measure_segment((u1, v1), (u2, v2), depth, vpose, g)
    print(f"distance_m: {seg.length:.3f}")
    print(f"p1_world: {seg.w1[0]:.4f} {seg.w1[1]:.4f} {seg.w1[2]:.4f}")
    print(f"p2_world: {seg.w2[0]:.4f} {seg.w2[1]:.4f} {seg.w2[2]:.4f}")
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "project": _cmd_project,
    "densify": _cmd_densify,
    "pano": _cmd_pano,
    "measure": _cmd_measure,
}


def cli_main(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    try:
        return _COMMANDS[args.command](args)
    except (PanofuseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
