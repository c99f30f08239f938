import numpy as np
import pytest

from panofuse.depth_fusion import (
    DensifyParams,
    build_pano_depth,
    densify,
    fill_invalid_depth,
    project_sparse_depth,
)
from panofuse.geometry import CameraIntrinsics, PanoGeometry, RigidTransform, pano_forward

K = CameraIntrinsics(fx=500, fy=500, u0=320, v0=240, width=640, height=480)
IDENT = RigidTransform.identity()


def brute_force_sparse(cloud, k, pose):
    """Per-pixel minimum oracle: plain dict accumulation."""
    best = {}
    for p in np.asarray(cloud, float):
        pc = pose.rotation @ p + pose.translation
        if pc[2] <= 0:
            continue
        u = k.fx * pc[0] / pc[2] + k.u0
        v = k.fy * pc[1] / pc[2] + k.v0
        ui = int(np.floor(u + 0.5))
        vi = int(np.floor(v + 0.5))
        if 0 <= ui < k.width and 0 <= vi < k.height:
            key = (vi, ui)
            best[key] = min(best.get(key, np.inf), pc[2])
    out = np.zeros((k.height, k.width))
    for (vi, ui), z in best.items():
        out[vi, ui] = z
    return out


class TestProjectSparseDepth:
    def test_single_point(self):
        d = project_sparse_depth(np.array([[0.0, 0.0, 2.0]]), K, IDENT)
        assert d[240, 320] == 2.0
        assert (d > 0).sum() == 1

    def test_min_depth_wins(self):
        cloud = np.array([[0.0, 0.0, 5.0], [0.0, 0.0, 2.0]])
        d = project_sparse_depth(cloud, K, IDENT)
        assert d[240, 320] == 2.0

    def test_point_behind_camera_ignored(self):
        cloud = np.array([[0.0, 0.0, -1.0], [0.0, 0.0, 2.0]])
        d = project_sparse_depth(cloud, K, IDENT)
        assert (d > 0).sum() == 1

    def test_empty_cloud_raises(self):
        with pytest.raises(ValueError, match="empty"):
            project_sparse_depth(np.zeros((0, 3)), K, IDENT)

    def test_brute_force_oracle(self, rng):
        cloud = rng.normal(size=(1000, 3)) * np.array([2, 2, 3]) + np.array([0, 0, 4])
        got = project_sparse_depth(cloud, K, IDENT)
        want = brute_force_sparse(cloud, K, IDENT)
        assert np.array_equal(got, want)
        valid = got[got > 0]
        zs = (IDENT.apply(cloud))[:, 2]
        for val in valid.ravel():
            assert np.min(np.abs(zs - val)) <= 1e-9

    def test_monotone_under_cloud_growth(self, rng):
        cloud = rng.normal(size=(300, 3)) + np.array([0, 0, 4])
        extra = rng.normal(size=(300, 3)) + np.array([0, 0, 4])
        d1 = project_sparse_depth(cloud, K, IDENT)
        d2 = project_sparse_depth(np.vstack([cloud, extra]), K, IDENT)
        was_valid = d1 > 0
        assert (d2[was_valid] > 0).all()
        assert (d2[was_valid] <= d1[was_valid] + 1e-12).all()


class TestDensify:
    def test_fully_valid_is_identity(self, rng):
        d = rng.uniform(1, 5, (10, 12))
        guide = rng.integers(0, 255, (10, 12, 3)).astype(np.uint8)
        assert np.array_equal(densify(d, guide), d)

    def test_single_sample_uniform_guide(self):
        d = np.zeros((21, 21))
        d[10, 10] = 3.25
        guide = np.full((21, 21, 3), 128, np.uint8)
        out = densify(d, guide, DensifyParams(max_radius=8))
        yy, xx = np.mgrid[0:21, 0:21]
        within = (yy - 10) ** 2 + (xx - 10) ** 2 <= 64
        assert np.all(out[within] == 3.25)
        assert np.all(out[~within] == 0.0)

    def test_color_edge_blocks_mixing(self):
        d = np.zeros((8, 8))
        d[4, 1] = 1.0
        d[4, 6] = 5.0
        guide = np.zeros((8, 8, 3), np.float64)
        guide[:, 4:, 0] = 200.0  # hard edge, gap 200 on one channel
        out = densify(d, guide, DensifyParams(sigma_color=10.0))
        left = out[:, :4]
        left = left[left > 0]
        assert np.all(np.abs(left - 1.0) <= 0.1)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="match"):
            densify(np.ones((4, 4)), np.zeros((5, 5, 3)))

    def test_no_valid_samples(self):
        with pytest.raises(ValueError, match="valid"):
            densify(np.zeros((4, 4)), np.zeros((4, 4, 3)))

    def test_invalid_params(self):
        with pytest.raises(ValueError, match="k_nearest"):
            DensifyParams(k_nearest=0)
        with pytest.raises(ValueError, match="sigma_color"):
            DensifyParams(sigma_color=0)
        with pytest.raises(ValueError, match="lambda"):
            DensifyParams(enhancement_lambda=1.0)

    def test_valid_pixels_untouched_and_bounded(self, rng):
        d = np.zeros((32, 32))
        ys, xs = rng.integers(0, 32, (2, 40))
        vals = rng.uniform(1, 9, 40)
        d[ys, xs] = vals
        guide = rng.integers(0, 255, (32, 32, 3)).astype(np.uint8)
        out = densify(d, guide)
        assert np.array_equal(out[d > 0], d[d > 0])
        filled = out[(d == 0) & (out > 0)]
        assert filled.min() >= d[d > 0].min() - 1e-12
        assert filled.max() <= d[d > 0].max() + 1e-12


class TestBuildPanoDepth:
    G = PanoGeometry(1024, 512)

    def _center_cam(self):
        # camera at the virtual origin looking along +X (virtual = world)
        rot = np.array([[0.0, -1.0, 0.0],
                        [0.0, 0.0, -1.0],
                        [1.0, 0.0, 0.0]])
        return RigidTransform(rot, np.zeros(3))

    def test_empty_maps_all_invalid(self):
        out = build_pano_depth([np.zeros((480, 640))], [K], [IDENT], IDENT, self.G)
        assert not (out > 0).any()

    def test_overlap_average(self):
        pose = self._center_cam()
        d1 = np.zeros((480, 640))
        d1[240, 320] = 2.0
        d2 = np.zeros((480, 640))
        d2[240, 320] = 3.0
        out = build_pano_depth([d1, d2], [K, K], [pose, pose], IDENT, self.G)
        assert out[256, 512] == pytest.approx(2.5)

    def test_single_pixel_lands_at_center(self):
        pose = self._center_cam()
        d = np.zeros((480, 640))
        d[240, 320] = 4.0
        out = build_pano_depth([d], [K], [pose], IDENT, self.G)
        assert out[256, 512] == pytest.approx(4.0)
        assert (out > 0).sum() == 1

    def test_matches_accumulate_then_divide_oracle(self, rng):
        pose = self._center_cam()
        maps = []
        for _ in range(3):
            d = np.zeros((480, 640))
            ys, xs = rng.integers(0, 480, 50), rng.integers(0, 640, 50)
            d[ys, xs] = rng.uniform(1, 10, 50)
            maps.append(d)
        out = build_pano_depth(maps, [K] * 3, [pose] * 3, IDENT, self.G)
        # oracle: same chain, dict accumulation
        sums, counts = {}, {}
        for d in maps:
            vs, us = np.nonzero(d > 0)
            for v, u in zip(vs, us):
                pc = np.array([(u - K.u0) * d[v, u] / K.fx,
                               (v - K.v0) * d[v, u] / K.fy, d[v, u]])
                pw = pose.rotation.T @ (pc - pose.translation)
                up, vp = pano_forward(pw, self.G)
                key = (min(int(np.floor(vp + 0.5)), self.G.height - 1),
                       int(np.floor(up + 0.5)) % self.G.width)
                sums[key] = sums.get(key, 0.0) + np.linalg.norm(pw)
                counts[key] = counts.get(key, 0) + 1
        want = np.zeros((self.G.height, self.G.width))
        for key in sums:
            want[key] = sums[key] / counts[key]
        assert np.abs(out - want).max() <= 1e-12


def brute_force_fill(depth, rows):
    """Literal 8-direction scanner."""
    h, w = depth.shape
    out = depth.copy()
    dirs = [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)]
    for y in range(rows[0], rows[1]):
        for x in range(w):
            if depth[y, x] != 0:
                continue
            cands = []
            for dy, dx in dirs:
                cy, cx = y + dy, x + dx
                while 0 <= cy < h and 0 <= cx < w:
                    if depth[cy, cx] > 0:
                        cands.append(depth[cy, cx])
                        break
                    cy += dy
                    cx += dx
            if cands:
                out[y, x] = min(cands)
    return out


class TestFillInvalidDepth:
    def test_all_valid_unchanged(self, rng):
        d = rng.uniform(1, 5, (6, 6))
        assert np.array_equal(fill_invalid_depth(d), d)

    def test_center_gets_min_of_eight(self):
        d = np.arange(1.0, 10.0).reshape(3, 3)
        d[1, 1] = 0.0
        out = fill_invalid_depth(d)
        assert out[1, 1] == 1.0

    def test_single_distant_candidate(self):
        d = np.zeros((1, 4))
        d[0, 3] = 2.5
        out = fill_invalid_depth(d)
        assert out[0, 0] == 2.5

    def test_matches_brute_force(self, rng):
        for _ in range(25):
            d = np.where(rng.random((16, 16)) < 0.3, rng.uniform(1, 9, (16, 16)), 0.0)
            assert np.array_equal(fill_invalid_depth(d), brute_force_fill(d, (0, 16)))

    def test_row_range_respected(self, rng):
        d = np.where(rng.random((16, 16)) < 0.3, rng.uniform(1, 9, (16, 16)), 0.0)
        out = fill_invalid_depth(d, rows=(0, 8))
        assert np.array_equal(out[8:], d[8:])
        assert np.array_equal(out[:8], brute_force_fill(d, (0, 8))[:8])

    def test_idempotent_when_fully_filled(self, rng):
        d = np.where(rng.random((12, 12)) < 0.4, rng.uniform(1, 9, (12, 12)), 0.0)
        once = fill_invalid_depth(d)
        if (once > 0).all():
            assert np.array_equal(fill_invalid_depth(once), once)
