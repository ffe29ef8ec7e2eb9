import numpy as np
import pytest

from woundambit.errors import InvalidInputError
from woundambit.mask import (
    area_px,
    binarize,
    connected_components,
    extract_contours,
    load_mask,
    save_mask,
)

from conftest import flood_fill_components


class TestBinarize:
    def test_all_zero(self):
        mask = binarize(np.zeros((4, 4), dtype=np.uint8), 128)
        assert not mask.any()
        assert mask.shape == (4, 4)

    def test_all_saturated(self):
        assert binarize(np.full((4, 4), 255, dtype=np.uint8), 128).all()

    def test_threshold_is_inclusive(self):
        mask = binarize(np.array([[127, 128]], dtype=np.uint8), 128)
        assert mask.tolist() == [[False, True]]

    def test_color_uses_luminance(self):
        img = np.zeros((1, 1, 3), dtype=np.uint8)
        img[0, 0] = (0, 255, 0)  # green alone: 0.587 * 255 = 149.7
        assert binarize(img, 128)[0, 0]
        assert not binarize(img, 150)[0, 0]

    def test_empty_image_rejected(self):
        with pytest.raises(InvalidInputError):
            binarize(np.empty((0, 0)))

    def test_idempotent_on_binary_images(self, rng):
        mask = rng.random((12, 12)) > 0.5
        raster = np.where(mask, 255, 0).astype(np.uint8)
        assert np.array_equal(binarize(raster, 128), mask)


class TestConnectedComponents:
    def test_empty_mask(self):
        _, n = connected_components(np.zeros((4, 4), dtype=bool))
        assert n == 0

    def test_diagonal_pixels_are_one_component(self):
        m = np.zeros((3, 3), dtype=bool)
        m[0, 0] = m[1, 1] = True
        _, n = connected_components(m)
        assert n == 1

    def test_two_far_pixels(self):
        m = np.zeros((5, 5), dtype=bool)
        m[0, 0] = m[4, 4] = True
        labels, n = connected_components(m)
        assert n == 2
        oracle_labels, oracle_n = flood_fill_components(m)
        assert oracle_n == 2
        assert labels[0, 0] != labels[4, 4]

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_flood_fill_oracle(self, seed):
        m = np.random.default_rng(seed).random((16, 16)) > 0.6
        labels, n = connected_components(m)
        oracle_labels, oracle_n = flood_fill_components(m)
        assert n == oracle_n
        # same partition: label pairs must be in bijection
        fg = m.nonzero()
        mapping = {}
        for a, b in zip(labels[fg], oracle_labels[fg]):
            assert mapping.setdefault(a, b) == b


class TestContours:
    def test_single_pixel(self):
        m = np.zeros((3, 3), dtype=bool)
        m[1, 1] = True
        (c,) = extract_contours(m)
        assert c.points.tolist() == [[1, 1]]

    def test_filled_3x3_square(self):
        m = np.zeros((5, 5), dtype=bool)
        m[0:3, 0:3] = True
        (c,) = extract_contours(m)
        # all 8 border pixels of the square, each exactly once
        expected = {(x, y) for x in range(3) for y in range(3)} - {(1, 1)}
        assert len(c.points) == 8
        assert {tuple(p) for p in c.points} == expected

    def test_empty_mask(self):
        assert extract_contours(np.zeros((4, 4), dtype=bool)) == []

    def test_consecutive_points_are_8_neighbors(self, rng):
        m = rng.random((16, 16)) > 0.55
        for contour in extract_contours(m):
            pts = contour.points
            nxt = np.roll(pts, -1, axis=0)
            if len(pts) > 1:
                assert (np.abs(pts - nxt).max(axis=1) == 1).all()

    @pytest.mark.parametrize("seed", range(10))
    def test_contour_points_are_boundary_pixels(self, seed):
        m = np.random.default_rng(seed).random((16, 16)) > 0.55
        for contour in extract_contours(m):
            for x, y in contour.points:
                assert m[y, x]
                neighbors = []
                for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    nx, ny = x + dx, y + dy
                    inside = 0 <= nx < 16 and 0 <= ny < 16
                    neighbors.append(m[ny, nx] if inside else False)
                assert not all(neighbors)

    @pytest.mark.parametrize("seed", range(10))
    def test_one_contour_per_component(self, seed):
        m = np.random.default_rng(seed).random((16, 16)) > 0.6
        _, n = connected_components(m)
        assert len(extract_contours(m)) == n

    def test_holes_do_not_add_contours(self):
        m = np.zeros((7, 7), dtype=bool)
        m[1:6, 1:6] = True
        m[3, 3] = False
        assert len(extract_contours(m)) == 1

    def test_orientation_is_consistent(self):
        # counterclockwise with y down: shoelace area is negative
        m = np.zeros((8, 8), dtype=bool)
        m[1:6, 2:7] = True
        (c,) = extract_contours(m)
        x, y = c.points[:, 0], c.points[:, 1]
        area2 = np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        assert area2 < 0


class TestAreaPx:
    def test_empty_and_full(self):
        assert area_px(np.zeros((8, 8), dtype=bool)) == 0
        assert area_px(np.ones((8, 8), dtype=bool)) == 64

    def test_matches_per_pixel_sum_oracle(self, rng):
        m = rng.random((16, 16)) > 0.5
        oracle = sum(1 for y in range(16) for x in range(16) if m[y, x])
        assert area_px(m) == oracle

    def test_equals_sum_of_component_areas(self, rng):
        m = rng.random((16, 16)) > 0.6
        labels, n = connected_components(m)
        assert area_px(m) == sum(int((labels == cid).sum()) for cid in range(1, n + 1))


class TestMaskIO:
    def test_round_trip(self, tmp_path, rng):
        m = rng.random((10, 14)) > 0.5
        path = tmp_path / "m.png"
        save_mask(m, path)
        assert np.array_equal(load_mask(path), m)
