import itertools

import numpy as np
import pytest

from panofuse.errors import DegenerateOverlapError
from panofuse.seam import (
    OverlapRegion,
    SeamGraph,
    SeamLabeling,
    SeamParams,
    build_seam_graph,
    extract_seam,
    labeling_energy,
    min_cut,
    pixel_energy,
)


def vs_image(v, s, shape):
    """RGB raster with exact HSV V and S channels (float, 0-255 scale)."""
    v = np.broadcast_to(np.asarray(v, float), shape)
    s = np.broadcast_to(np.asarray(s, float), shape)
    r = v * 255.0
    gb = v * (1.0 - s) * 255.0
    return np.stack([r, gb, gb], axis=-1)


def exhaustive_min(right_w, down_w, forced):
    """Enumerate all labelings of the free pixels; returns (energy, labeling)."""
    h, w = forced.shape
    free = [tuple(p) for p in np.argwhere(forced == 0)]
    best_e, best_l = np.inf, None
    for bits in itertools.product((1, 2), repeat=len(free)):
        lab = forced.copy()
        for (y, x), b in zip(free, bits):
            lab[y, x] = b
        e = labeling_energy(lab, right_w, down_w)
        if e < best_e:
            best_e, best_l = e, lab
    return best_e, best_l


class TestPixelEnergy:
    def test_identical_images_zero(self):
        img = vs_image(0.5, 0.5, (5, 5))
        assert pixel_energy((2, 2), img, img) == (0.0, 0.0, 0.0)

    def test_color_term(self):
        # |dV| = 0.4, |dS| = 0.2, w = 0.5, uniform images so gradients vanish
        img1 = vs_image(0.8, 0.5, (5, 5))
        img2 = vs_image(0.4, 0.3, (5, 5))
        c_c, c_g, c = pixel_energy((2, 2), img1, img2, SeamParams(w=0.5))
        assert c_c == pytest.approx(0.3)
        assert c_g == pytest.approx(0.0)
        assert c == pytest.approx(0.3)

    def test_gradient_term(self):
        # both images: V ramp with slope 0.2/px along x, identical colors
        x = np.arange(5) * 0.2 + 0.1
        v = np.tile(x, (5, 1))
        img = vs_image(v, 0.0, (5, 5))
        c_c, c_g, c = pixel_energy((2, 2), img, img.copy())
        assert c_c == pytest.approx(0.0)
        assert c_g == pytest.approx(0.1)
        assert c == pytest.approx(0.1)


class TestBuildSeamGraph:
    def test_two_exclusive_pixels(self):
        ov = OverlapRegion(0, 0, 2, 1,
                           valid1=np.array([[True, False]]),
                           valid2=np.array([[False, True]]))
        img = vs_image(0.5, 0.5, (1, 2))
        graph = build_seam_graph(ov, img, img)
        assert graph.forced.tolist() == [[1, 2]]
        assert graph.right_w[0, 0] == graph.p1
        lab = min_cut(graph)
        assert lab.labels.tolist() == [[1, 2]]
        assert lab.energy == graph.p1

    def test_fully_shared_triggers_fallback_seeding(self):
        shared = np.ones((4, 6), bool)
        ov = OverlapRegion(0, 0, 6, 4, valid1=shared, valid2=shared)
        img1 = vs_image(0.5, 0.5, (4, 6))
        img2 = vs_image(0.6, 0.5, (4, 6))
        graph = build_seam_graph(ov, img1, img2)
        assert graph.seeded_columns  # fallback engaged
        assert (graph.forced == 1).any() and (graph.forced == 2).any()
        lab = min_cut(graph)
        assert set(np.unique(lab.labels)) <= {1, 2}

    def test_single_column_degenerate(self):
        shared = np.ones((3, 1), bool)
        ov = OverlapRegion(0, 0, 1, 3, valid1=shared, valid2=shared)
        img = vs_image(0.5, 0.5, (3, 1))
        with pytest.raises(DegenerateOverlapError):
            build_seam_graph(ov, img, img)

    def test_penalty_dominates_interior_costs(self, rng):
        valid1 = np.ones((5, 7), bool)
        valid2 = np.ones((5, 7), bool)
        valid1[:, -1] = False
        valid2[:, 0] = False
        ov = OverlapRegion(0, 0, 7, 5, valid1=valid1, valid2=valid2)
        img1 = rng.uniform(0, 255, (5, 7, 3))
        img2 = rng.uniform(0, 255, (5, 7, 3))
        graph = build_seam_graph(ov, img1, img2)
        shared = valid1 & valid2
        both_h = shared[:, :-1] & shared[:, 1:]
        assert graph.p1 > graph.right_w[both_h].max() / 2.0

    def test_invalid_params(self):
        with pytest.raises(ValueError, match="w must"):
            SeamParams(w=1.5)
        with pytest.raises(ValueError, match="p1"):
            SeamParams(p1=-1.0)

    def test_three_by_three_hand_construction(self):
        valid1 = np.array([[1, 1, 0]] * 3, bool)
        valid2 = np.array([[0, 1, 1]] * 3, bool)
        ov = OverlapRegion(0, 0, 3, 3, valid1=valid1, valid2=valid2)
        img1 = vs_image(0.5, 0.2, (3, 3))
        img2 = vs_image(0.9, 0.2, (3, 3))
        graph = build_seam_graph(ov, img1, img2, SeamParams(w=1.0))
        assert (graph.forced[:, 0] == 1).all()
        assert (graph.forced[:, 2] == 2).all()
        assert (graph.forced[:, 1] == 0).all()
        # shared column vertical links carry C sums, C = |dV| = 0.4 per pixel
        assert np.allclose(graph.down_w[:, 1], 0.8)
        # links into exclusive pixels carry the penalty
        assert np.allclose(graph.right_w[:, 0], graph.p1)
        assert np.allclose(graph.right_w[:, 1], graph.p1)
        assert np.allclose(graph.down_w[:, 0], graph.p1)
        assert np.allclose(graph.down_w[:, 2], graph.p1)


class TestMinCut:
    def test_uniform_grid_cuts_one_column(self):
        for m, n in [(2, 3), (3, 3), (3, 2)]:
            c = 0.7
            right_w = np.full((m, n - 1), 2 * c)
            down_w = np.full((m - 1, n), 2 * c)
            forced = np.zeros((m, n), np.uint8)
            forced[:, 0] = 1
            forced[:, -1] = 2
            graph = SeamGraph(right_w, down_w, forced, p1=100.0)
            lab = min_cut(graph)
            want_e, _ = exhaustive_min(right_w, down_w, forced)
            assert lab.energy == want_e == m * 2 * c

    def test_zero_weight_column_gives_zero_energy(self):
        # columns 0 and 1 have zero pixel energy -> links between them cost 0
        c = np.array([[0.0, 0.0, 1.0]] * 3)
        right_w = c[:, :-1] + c[:, 1:]
        down_w = (c[:-1, :] + c[1:, :])
        forced = np.zeros((3, 3), np.uint8)
        forced[:, 0] = 1
        forced[:, 2] = 2
        lab = min_cut(SeamGraph(right_w, down_w, forced, p1=10.0))
        assert lab.energy == 0.0
        assert (lab.labels[:, 1] == 2).all()  # seam follows the zero column

    def test_single_free_pixel_two_cases(self):
        right_w = np.array([[1.0, 3.0]])
        down_w = np.zeros((0, 3))
        forced = np.array([[1, 0, 2]], np.uint8)
        lab = min_cut(SeamGraph(right_w, down_w, forced, p1=10.0))
        assert lab.labels[0, 1] == 2  # sticks with the heavy link's side
        assert lab.energy == 1.0

    def test_exhaustive_oracle_random(self, rng):
        for _ in range(80):
            h = int(rng.integers(2, 4))
            w = int(rng.integers(2, 5))
            right_w = rng.random((h, w - 1))
            down_w = rng.random((h - 1, w))
            forced = rng.choice([0, 0, 1, 2], size=(h, w)).astype(np.uint8)
            if not ((forced == 1).any() and (forced == 2).any()):
                forced[0, 0], forced[h - 1, w - 1] = 1, 2
            if (forced == 0).sum() > 12:
                continue
            lab = min_cut(SeamGraph(right_w, down_w, forced, p1=10.0))
            want_e, _ = exhaustive_min(right_w, down_w, forced)
            assert lab.energy == want_e

    def test_symmetry_under_image_swap(self, rng):
        h, w = 4, 5
        right_w = rng.random((h, w - 1))
        down_w = rng.random((h - 1, w))
        forced = rng.choice([0, 0, 0, 1, 2], size=(h, w)).astype(np.uint8)
        forced[0, 0], forced[-1, -1] = 1, 2
        e1 = min_cut(SeamGraph(right_w, down_w, forced, p1=9.0)).energy
        swapped = np.where(forced == 1, 2, np.where(forced == 2, 1, 0)).astype(np.uint8)
        e2 = min_cut(SeamGraph(right_w, down_w, swapped, p1=9.0)).energy
        assert e1 == pytest.approx(e2, abs=1e-12)

    def test_scaling_energy(self, rng):
        h, w = 3, 4
        right_w = rng.random((h, w - 1))
        down_w = rng.random((h - 1, w))
        forced = np.zeros((h, w), np.uint8)
        forced[:, 0], forced[:, -1] = 1, 2
        lam = 3.5
        base = min_cut(SeamGraph(right_w, down_w, forced, p1=9.0))
        scaled = min_cut(SeamGraph(lam * right_w, lam * down_w, forced, p1=9.0 * lam))
        assert scaled.energy == pytest.approx(lam * base.energy, rel=1e-12)
        # the scaled optimum is also optimal for the unscaled weights
        assert labeling_energy(scaled.labels, right_w, down_w) == pytest.approx(
            base.energy, rel=1e-12)

    def test_hard_constraints_respected(self, rng):
        h, w = 5, 5
        right_w = rng.random((h, w - 1))
        down_w = rng.random((h - 1, w))
        forced = rng.choice([0, 1, 2], size=(h, w), p=[0.6, 0.2, 0.2]).astype(np.uint8)
        forced[0, 0], forced[-1, -1] = 1, 2
        lab = min_cut(SeamGraph(right_w, down_w, forced, p1=9.0))
        m = forced > 0
        assert np.array_equal(lab.labels[m], forced[m])

    def test_needs_both_terminals(self):
        forced = np.zeros((2, 2), np.uint8)
        forced[0, 0] = 1
        with pytest.raises(DegenerateOverlapError):
            min_cut(SeamGraph(np.ones((2, 1)), np.ones((1, 2)), forced, p1=1.0))


class TestExtractSeam:
    def test_uniform_labeling_empty(self):
        lab = SeamLabeling(np.ones((3, 3), np.uint8), 0.0)
        assert extract_seam(lab) == []

    def test_checkerboard(self):
        labels = np.array([[1, 2], [2, 1]], np.uint8)
        pairs = extract_seam(SeamLabeling(labels, 0.0))
        assert len(pairs) == 4

    def test_vertical_split(self):
        labels = np.array([[1, 1, 2]] * 3, np.uint8)
        pairs = extract_seam(SeamLabeling(labels, 0.0))
        assert pairs == [((1, 0), (2, 0)), ((1, 1), (2, 1)), ((1, 2), (2, 2))]
