"""Acceptance suite: one test per criterion, each printing a pass/fail line
with the measured value (run with ``pytest tests/test_acceptance.py -v -s``).

The synthetic end-to-end criteria share one full-scale pipeline run
(4096x2048 panorama, 6-camera rig, 50 pts/m^2 cloud).
"""

import time

import numpy as np
import pytest

from test_depth_fusion import brute_force_fill
from test_seam import exhaustive_min

from panofuse import io as pio
from panofuse.blend import build_pyramids, collapse, multiband_blend
from panofuse.depth_fusion import fill_invalid_depth
from panofuse.geometry import (
    CameraIntrinsics,
    PanoGeometry,
    RigidTransform,
    camera_to_pixel,
    pano_forward,
    pano_inverse,
    pixel_to_world,
    world_to_camera,
)
from panofuse.measure import measure_distance
from panofuse.pipeline import (
    COVER_NONE,
    fill_black_hole,
    nadir_row,
    stitch_station,
)
from panofuse.seam import OverlapRegion, SeamParams, build_seam_graph, min_cut
from panofuse.synth import SceneSpec, analytic_pano_depth, synth_scene


def report(name, ok, detail):
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'} ({detail})")


# ---------------------------------------------------------------------------
# Table 1 regression

TABLE1_ROWS = {
    "L1": ((-3.214, 2.006, 2.325), (-1.592, 1.763, 2.324), 1.64),
    "L2": ((-1.592, 1.763, 2.324), (-1.672, 1.695, 0.106), 2.22),
    "L3": ((3.001, -0.235, 0.073), (2.870, -0.746, 0.069), 0.53),
    "L5": ((-1.452, -0.529, 2.955), (-1.446, -0.496, 0.054), 2.90),
}
# L4 is excluded: the paper itself reports ~40 cm of depth error on that line
# and the Euclidean distance of its printed coordinates (1.493 m) contradicts
# its printed ML (1.47 m).
L4 = ((2.868, 0.696, 2.465), (2.482, -0.746, 2.440), 1.47)


def test_table1_regression():
    g = PanoGeometry(8192, 4096)
    vpose = RigidTransform.identity()
    t0 = time.perf_counter()
    worst = 0.0
    for name, (w1, w2, ml) in TABLE1_ROWS.items():
        depth = np.zeros((g.height, g.width))
        px = []
        for w in (w1, w2):
            u, v = pano_forward(np.asarray(w, float), g)
            depth[min(int(np.floor(v + 0.5)), g.height - 1),
                  int(np.floor(u + 0.5)) % g.width] = np.linalg.norm(w)
            px.append((float(u), float(v)))
        got = measure_distance(px[0], px[1], depth, vpose, g)
        worst = max(worst, abs(got - ml))
    elapsed = time.perf_counter() - t0
    l4_euclid = float(np.linalg.norm(np.subtract(L4[0], L4[1])))
    ok = worst <= 0.01 and elapsed < 1.0
    report("Table 1 regression", ok,
           f"max |ML dev| {worst:.4f} m over L1/L2/L3/L5, {elapsed:.2f}s; "
           f"L4 excluded (euclid {l4_euclid:.3f} vs printed 1.47)")
    assert worst <= 0.01
    assert elapsed < 1.0
    assert l4_euclid == pytest.approx(1.493, abs=0.001)


# ---------------------------------------------------------------------------
# Seam optimality

def test_seam_optimality_exhaustive():
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    checked = 0
    while checked < 200:
        h = int(rng.integers(2, 4))
        w = int(rng.integers(2, 5))
        valid1 = rng.random((h, w)) < 0.75
        valid2 = rng.random((h, w)) < 0.75
        valid1[:, 0] = True
        valid2[:, 0] = False
        valid2[:, -1] = True
        valid1[:, -1] = False
        free = ((valid1 & valid2) | (~valid1 & ~valid2)).sum()
        if free > 12:
            continue
        ov = OverlapRegion(0, 0, w, h, valid1=valid1, valid2=valid2)
        img1 = rng.uniform(0, 255, (h, w, 3))
        img2 = rng.uniform(0, 255, (h, w, 3))
        graph = build_seam_graph(ov, img1, img2, SeamParams(w=rng.uniform(0, 1)))
        lab = min_cut(graph)
        want, _ = exhaustive_min(graph.right_w, graph.down_w, graph.forced)
        assert lab.energy == want, f"instance {checked}: {lab.energy} != {want}"
        checked += 1
    elapsed = time.perf_counter() - t0
    report("Seam optimality", elapsed < 10.0,
           f"200/200 instances exactly optimal, {elapsed:.2f}s")
    assert elapsed < 10.0


# ---------------------------------------------------------------------------
# Geometry round trips

def test_geometry_round_trips():
    rng = np.random.default_rng(11)
    g = PanoGeometry(8192, 4096)
    n = 100_000
    t0 = time.perf_counter()
    u = rng.uniform(0, g.width, n)
    v = rng.uniform(1e-9, g.height - 1e-9, n)
    d = rng.uniform(0.1, 60.0, n)
    p = pano_inverse(u, v, d, g)
    u2, v2 = pano_forward(p, g)
    pano_err = max(np.abs(u2 - u).max(), np.abs(v2 - v).max())

    k = CameraIntrinsics(fx=430.0, fy=430.0, u0=511.5, v0=383.5, width=1024, height=768)
    pose = RigidTransform(
        np.array([[0.0, -1.0, 0.0], [0.0, 0.0, -1.0], [1.0, 0.0, 0.0]]),
        np.array([0.2, -0.4, 1.1]))
    p_w = rng.normal(size=(n, 3)) * 4
    p_c = world_to_camera(p_w, pose)
    keep = p_c[:, 2] > 0.05
    p_w = p_w[keep]
    p_c = p_c[keep]
    uu, vv = camera_to_pixel(p_c, k)
    back = pixel_to_world(uu, vv, p_c[:, 2], k, pose)
    cam_err = (np.abs(back - p_w) / np.maximum(np.abs(p_w), 1e-6)).max()
    elapsed = time.perf_counter() - t0
    ok = pano_err <= 1e-6 and cam_err <= 1e-9 and elapsed < 5.0
    report("Geometry round trips", ok,
           f"pano {pano_err:.2e} px, camera {cam_err:.2e} rel, {elapsed:.2f}s")
    assert pano_err <= 1e-6
    assert cam_err <= 1e-9
    assert elapsed < 5.0


# ---------------------------------------------------------------------------
# Pyramid identity

def test_pyramid_identity_and_blend_identity():
    rng = np.random.default_rng(3)
    worst_rec = 0.0
    for _ in range(20):
        img = rng.integers(0, 256, (64, 64, 3)).astype(np.float64)
        rec = collapse(build_pyramids(img, 4))
        worst_rec = max(worst_rec, float(np.abs(rec - img).max()))
    img = rng.integers(0, 256, (64, 64, 3)).astype(np.uint8)
    worst_blend = 0
    for levels in (1, 2, 4):
        mask = (rng.random((64, 64)) > 0.5).astype(float)
        out = multiband_blend(img, img, mask, levels)
        worst_blend = max(worst_blend, int(np.abs(out.astype(int) - img.astype(int)).max()))
    ok = worst_rec <= 1.0 and worst_blend <= 1
    report("Pyramid identity", ok,
           f"reconstruction dev {worst_rec:.3f} step, identity blend dev {worst_blend} step")
    assert worst_rec <= 1.0
    assert worst_blend <= 1


# ---------------------------------------------------------------------------
# Synthetic end-to-end (shared full-scale run)

E2E_SPEC = SceneSpec(image_width=1024, image_height=768)  # 6 cams, 50 pts/m^2
E2E_GEOM = PanoGeometry(4096, 2048)


@pytest.fixture(scope="module")
def e2e():
    bundles, truth = synth_scene(E2E_SPEC)
    # warm the jit cache on a tiny stitch so the timed run measures the
    # pipeline, not compilation
    warm_spec = SceneSpec(image_width=96, image_height=72, camera_count=3)
    warm_bundles, _ = synth_scene(warm_spec)
    warm = stitch_station(warm_bundles[0], PanoGeometry(256, 128))
    fill_black_hole(warm, warm_bundles[0], [warm_bundles[1]], PanoGeometry(256, 128))

    t0 = time.perf_counter()
    comp = stitch_station(bundles[0], E2E_GEOM)
    comp = fill_black_hole(comp, bundles[0], [bundles[1]], E2E_GEOM)
    elapsed = time.perf_counter() - t0
    return bundles, truth, comp, elapsed


def test_e2e_runtime(e2e):
    _, _, _, elapsed = e2e
    report("End-to-end runtime", elapsed < 300.0, f"4096x2048 pipeline in {elapsed:.0f}s")
    assert elapsed < 300.0


def test_e2e_depth_accuracy(e2e):
    # Known-red criterion: the specified averaging densifier cannot reach
    # 2 cm at 50 pts/m^2 on obliquely viewed surfaces (see the project notes:
    # its bias is ~tan^2(theta) * sigma^2 / Z, which crosses 2 cm near 50 deg
    # incidence; ~25% of covered pixels in this room exceed that). The
    # assertion states the criterion verbatim and reports the honest number.
    bundles, truth, comp, _ = e2e
    gt = analytic_pano_depth(E2E_SPEC, 0, E2E_GEOM)
    cov = comp.covered_mask()
    err = np.abs(comp.depth - gt)[cov]
    frac = float(np.mean(err <= 0.02))
    report("End-to-end depth vs analytic", frac >= 0.95,
           f"{100 * frac:.1f}% of covered pixels within 2 cm (need 95%)")
    assert frac >= 0.95, (
        f"only {100 * frac:.1f}% of covered pixels within 2 cm; structurally "
        "limited by the specified densify kernel at 50 pts/m^2 (see notes)")


def test_e2e_segment_lengths(e2e):
    bundles, truth, comp, _ = e2e
    origin = np.array([*E2E_SPEC.stations[0], E2E_SPEC.sensor_height])
    worst = 0.0
    fails = []
    for seg in truth.segments:
        u1, v1 = pano_forward(seg.w1 - origin, E2E_GEOM)
        u2, v2 = pano_forward(seg.w2 - origin, E2E_GEOM)
        ml = measure_distance((float(u1), float(v1)), (float(u2), float(v2)),
                              comp.depth, bundles[0].virtual_pose, E2E_GEOM)
        tol = max(0.02, 0.01 * seg.length)
        dev = abs(ml - seg.length)
        worst = max(worst, dev - tol)
        if dev > tol:
            fails.append(f"{seg.name} ({dev:.3f} m)")
    ok = not fails
    report("End-to-end segment lengths", ok,
           f"{len(truth.segments) - len(fails)}/{len(truth.segments)} segments within "
           f"max(2 cm, 1%)" + (f"; failed: {', '.join(fails)}" if fails else ""))
    assert not fails
    assert len(truth.segments) == 10


def test_e2e_nadir_coverage(e2e):
    _, _, comp, _ = e2e
    r0 = nadir_row(E2E_GEOM)
    frac = float(np.mean(comp.coverage[r0:] != COVER_NONE))
    report("Nadir band coverage", frac >= 0.95,
           f"{100 * frac:.1f}% of the band covered after one-neighbor fill")
    assert frac >= 0.95


# ---------------------------------------------------------------------------
# Depth-fill oracle

def test_depth_fill_oracle():
    rng = np.random.default_rng(21)
    for _ in range(100):
        d = np.where(rng.random((16, 16)) < rng.uniform(0.05, 0.6),
                     rng.uniform(0.5, 9, (16, 16)), 0.0)
        got = fill_invalid_depth(d)
        want = brute_force_fill(d, (0, 16))
        assert np.array_equal(got, want)
    report("Depth-fill oracle", True, "100/100 random rasters exactly equal")


# ---------------------------------------------------------------------------
# Format round trips

def test_format_round_trips(tmp_path):
    rng = np.random.default_rng(5)
    d = np.where(rng.random((64, 128)) < 0.9, rng.uniform(0.05, 65.0, (64, 128)), 0.0)
    pio.write_depth_png(d, tmp_path / "d.png")
    back = pio.read_depth_png(tmp_path / "d.png")
    depth_dev = float(np.abs(back - d).max())

    from panofuse.cli import cli_main
    out = tmp_path / "scene"
    assert cli_main(["synth", "--out", str(out), "--image-size", "96", "72",
                     "--cameras", "3"]) == 0
    a = pio.load_calibration(out / "calibration.json")
    pio.save_calibration(a, out / "calib2.json")
    b = pio.load_calibration(out / "calib2.json")
    equal = all(
        np.array_equal(x.virtual_pose.rotation, y.virtual_pose.rotation)
        and np.array_equal(x.virtual_pose.translation, y.virtual_pose.translation)
        and all(ki == kj for ki, kj in zip(x.intrinsics, y.intrinsics))
        and all(np.array_equal(pi.rotation, pj.rotation)
                and np.array_equal(pi.translation, pj.translation)
                for pi, pj in zip(x.cam_poses, y.cam_poses))
        and all(np.array_equal(ii, ij) for ii, ij in zip(x.images, y.images))
        and np.array_equal(x.cloud, y.cloud)
        for x, y in zip(a, b))
    ok = depth_dev <= 1e-3 and equal
    report("Format round trips", ok,
           f"depth PNG dev {depth_dev * 1000:.3f} mm, calibration equal: {equal}")
    assert depth_dev <= 1e-3
    assert equal
