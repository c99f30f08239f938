"""Generate the viewer test fixtures: a small pano bundle plus reference
distances computed by the primary implementation from the same quantized
depth PNG the viewer will decode.

Usage: python scripts/make_viewer_fixtures.py [outdir]
"""

import json
import os
import sys

import numpy as np

from panofuse import io as pio
from panofuse.geometry import PanoGeometry
from panofuse.measure import depth_at, measure_distance
from panofuse.pipeline import fill_black_hole, stitch_station
from panofuse.synth import SceneSpec, synth_scene


def main(outdir):
    os.makedirs(outdir, exist_ok=True)
    spec = SceneSpec(image_width=320, image_height=240)
    g = PanoGeometry(1024, 512)
    bundles, _ = synth_scene(spec)
    comp = stitch_station(bundles[0], g)
    comp = fill_black_hole(comp, bundles[0], [bundles[1]], g)

    rgb_path = os.path.join(outdir, "station0_pano.png")
    depth_path = os.path.join(outdir, "station0_depth.png")
    meta_path = os.path.join(outdir, "station0_meta.json")
    pio.write_rgb_png(comp.rgb, rgb_path)
    pio.write_depth_png(comp.depth, depth_path)
    pio.write_metadata(meta_path, station_id="station0", g=g,
                       h_floor=bundles[0].h_floor,
                       virtual_pose=bundles[0].virtual_pose,
                       depth_path="station0_depth.png", rgb_path="station0_pano.png")

    # the reference distances consume the quantized PNG, exactly like the CLI
    depth = pio.read_depth_png(depth_path)
    rng = np.random.default_rng(99)
    vs, us = np.nonzero(depth > 0)
    pairs = []
    while len(pairs) < 20:
        i, j = rng.integers(0, vs.size, 2)
        # continuous click coordinates, sub-pixel like a real pointer
        p1 = (float(us[i] + rng.uniform(-0.4, 0.4)), float(vs[i] + rng.uniform(-0.4, 0.4)))
        p2 = (float(us[j] + rng.uniform(-0.4, 0.4)), float(vs[j] + rng.uniform(-0.4, 0.4)))
        if depth_at(depth, p1[0], p1[1], g) <= 0 or depth_at(depth, p2[0], p2[1], g) <= 0:
            continue
        d = measure_distance(p1, p2, depth, bundles[0].virtual_pose, g)
        pairs.append({"p1": list(p1), "p2": list(p2), "distance_m": d})
    probe_px = [[13, 200], [512, 256], [700, 450], [1023, 511]]
    probes = [{"u": u, "v": v, "raw_mm": int(round(depth[v, u] * 1000))}
              for u, v in probe_px]
    with open(os.path.join(outdir, "measurements.json"), "w", encoding="utf-8") as fh:
        json.dump({"pairs": pairs, "depth_probes": probes}, fh, indent=2)

    # an 8-bit PNG the loader must reject
    from PIL import Image
    Image.fromarray((comp.depth[:64, :64] * 10).astype(np.uint8)).save(
        os.path.join(outdir, "bad_8bit.png"))
    print(f"fixtures written to {outdir}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "frontend/test/fixtures")
