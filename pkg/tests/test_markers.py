import numpy as np
import pytest

from woundambit.errors import InvalidInputError
from woundambit.markers import (
    DetectionParams,
    builtin_dictionary,
    decode_grid,
    detect_markers,
    generate_dictionary,
    marker_corners,
    render_marker,
    render_reference_sheet,
)
from woundambit.markers.dictionary import pairwise_min_distance, rotated_distance


def paste(canvas, patch, x0, y0):
    canvas[y0 : y0 + patch.shape[0], x0 : x0 + patch.shape[1]] = patch
    return canvas


def scene_with_marker(marker_id, side_px=80, canvas=200, x0=60, y0=60, background=255):
    img = np.full((canvas, canvas), background, dtype=np.uint8)
    paste(img, render_marker(marker_id, side_px=side_px), x0, y0)
    return img


class TestDictionary:
    def test_builtin_properties(self):
        d = builtin_dictionary()
        assert len(d) == 8
        assert d.grid_size == 4
        assert sorted(d.entries) == list(range(8))
        assert pairwise_min_distance(list(d.entries.values())) >= 5

    def test_builtin_is_cached_and_deterministic(self):
        assert builtin_dictionary() is builtin_dictionary()
        regen = generate_dictionary(n_entries=8, grid_size=4, min_hamming=5, seed=7)
        for mid in range(8):
            assert np.array_equal(regen.entries[mid], builtin_dictionary().entries[mid])

    def test_self_rotation_margin(self):
        # rotating any entry must change at least min_hamming bits, otherwise
        # the decoded rotation would be ambiguous
        d = builtin_dictionary()
        for bits in d.entries.values():
            for k in (1, 2, 3):
                assert np.count_nonzero(bits != np.rot90(bits, k)) >= d.min_hamming

    def test_rotated_distance_is_symmetric(self, rng):
        a = rng.random((4, 4)) > 0.5
        b = rng.random((4, 4)) > 0.5
        assert rotated_distance(a, b) == rotated_distance(b, a)
        assert rotated_distance(a, np.rot90(a)) == 0

    def test_infeasible_request_fails(self):
        with pytest.raises(ValueError):
            generate_dictionary(n_entries=1, grid_size=4, min_hamming=17, seed=0)


class TestRender:
    def test_border_is_black(self):
        img = render_marker(0, side_px=48)
        assert img.shape == (48, 48)
        module = 48 // 6
        assert (img[:module, :] == 0).all()
        assert (img[-module:, :] == 0).all()
        assert (img[:, :module] == 0).all()
        assert (img[:, -module:] == 0).all()

    def test_module_values_match_entry(self):
        d = builtin_dictionary()
        img = render_marker(3, side_px=60)  # 10 px per module
        for r in range(4):
            for c in range(4):
                px = img[(r + 1) * 10 + 5, (c + 1) * 10 + 5]
                assert (px == 0) == d.entries[3][r, c]

    def test_unknown_id(self):
        with pytest.raises(InvalidInputError):
            render_marker(99)

    def test_marker_corners_geometry(self):
        corners = marker_corners(10, 20, 48)
        assert corners.tolist() == [[9.5, 19.5], [57.5, 19.5], [57.5, 67.5], [9.5, 67.5]]

    def test_reference_sheet(self):
        sheet, layout = render_reference_sheet(dpi=300)
        assert sheet.dtype == np.uint8
        assert layout.distance(0, 1) == pytest.approx(30.0)
        # sheet spans the rectangle plus half-marker-plus-margin padding
        ppm = 300 / 25.4
        assert sheet.shape[1] == round((30 + 2 * (6 + 4)) * ppm)
        assert sheet.shape[0] == round((72 + 2 * (6 + 4)) * ppm)
        dets = detect_markers(sheet)
        assert [d.id for d in dets] == [0, 1, 2, 3]


class TestDecodeGrid:
    def cells_for(self, marker_id, rot90=0):
        d = builtin_dictionary()
        cells = np.ones((6, 6), dtype=bool)
        cells[1:-1, 1:-1] = d.entries[marker_id]
        return np.rot90(cells, rot90)

    def test_exact_match(self):
        assert decode_grid(self.cells_for(2), builtin_dictionary(), 1) == (2, 0, 0)

    @pytest.mark.parametrize("rot", [0, 1, 2, 3])
    def test_rotated_grids_decode_with_rotation(self, rot):
        got = decode_grid(self.cells_for(5, rot), builtin_dictionary(), 1)
        assert got == (5, rot, 0)

    def test_single_bit_error_tolerated(self):
        cells = self.cells_for(1)
        cells[2, 2] = not cells[2, 2]
        got = decode_grid(cells, builtin_dictionary(), 1)
        assert got == (1, 0, 1)

    def test_error_budget_respected(self):
        cells = self.cells_for(1)
        cells[2, 2] = not cells[2, 2]
        assert decode_grid(cells, builtin_dictionary(), 0) is None

    def test_white_border_rejected(self):
        cells = self.cells_for(0)
        cells[0, 3] = False
        assert decode_grid(cells, builtin_dictionary(), 1) is None

    def test_all_black_rejected(self):
        assert decode_grid(np.ones((6, 6), dtype=bool), builtin_dictionary(), 1) is None

    def test_wrong_shape(self):
        with pytest.raises(InvalidInputError):
            decode_grid(np.ones((5, 5), dtype=bool), builtin_dictionary(), 1)


class TestDetect:
    @pytest.mark.parametrize("marker_id", range(8))
    def test_render_detect_identity(self, marker_id):
        dets = detect_markers(scene_with_marker(marker_id))
        assert [d.id for d in dets] == [marker_id]
        assert dets[0].bit_errors == 0
        assert dets[0].decode_rotation == 0

    @pytest.mark.parametrize("side_px", [40, 80, 160])
    def test_corner_accuracy(self, side_px):
        dets = detect_markers(scene_with_marker(2, side_px=side_px, canvas=side_px + 120))
        truth = marker_corners(60, 60, side_px)
        err = np.abs(np.array(dets[0].corners) - truth).max()
        assert err < 0.5

    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    def test_image_rotation_reports_decode_rotation(self, k):
        img = np.rot90(scene_with_marker(4), k)
        (det,) = detect_markers(np.ascontiguousarray(img))
        assert det.id == 4
        assert det.decode_rotation == k

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_corners_stable_under_image_rotation(self, k):
        # corner 0 must track the marker's own top-left, not the image's
        base = detect_markers(scene_with_marker(4))[0]
        n = 200
        rot = detect_markers(np.ascontiguousarray(np.rot90(scene_with_marker(4), k)))[0]

        def rotate_pt(p, times):
            x, y = p
            for _ in range(times):
                x, y = y, n - 1 - x  # np.rot90 pixel mapping
            return (x, y)

        for b, r in zip(base.corners, rot.corners):
            expect = rotate_pt(b, k)
            assert abs(r[0] - expect[0]) < 0.6 and abs(r[1] - expect[1]) < 0.6

    def test_multiple_markers(self):
        img = np.full((200, 420), 255, dtype=np.uint8)
        for i, x0 in enumerate((20, 120, 220, 320)):
            paste(img, render_marker(i, side_px=64), x0, 60)
        dets = detect_markers(img)
        assert [d.id for d in dets] == [0, 1, 2, 3]
        for i, d in enumerate(dets):
            assert d.center[0] == pytest.approx(20 + 100 * i + 31.5, abs=0.5)

    def test_deterministic(self):
        img = scene_with_marker(6)
        a, b = detect_markers(img), detect_markers(img)
        assert [(d.id, d.corners) for d in a] == [(d.id, d.corners) for d in b]

    def test_blank_and_noise_images(self, rng):
        assert detect_markers(np.full((100, 100), 255, dtype=np.uint8)) == []
        for _ in range(5):
            noise = (rng.random((120, 120)) * 255).astype(np.uint8)
            assert detect_markers(noise) == []

    def test_low_contrast_rejected(self):
        img = scene_with_marker(0, background=120)
        dim = np.where(img == 0, 100, 120).astype(np.uint8)  # 20 gray levels of contrast
        assert detect_markers(dim) == []

    def test_tiny_image_rejected(self):
        with pytest.raises(InvalidInputError):
            detect_markers(np.zeros((16, 16), dtype=np.uint8))

    def test_gaussian_noise_robustness(self, rng):
        img = scene_with_marker(3).astype(np.float64)
        noisy = np.clip(img + rng.normal(0, 8, img.shape), 0, 255).astype(np.uint8)
        dets = detect_markers(noisy)
        assert [d.id for d in dets] == [3]

    def test_tilted_sheet(self):
        from woundambit.synthetic import apply_homography, tilt_homography, warp_image

        sheet, layout = render_reference_sheet(dpi=150)
        H = tilt_homography(
            20.0, focal_px=1500.0, plane_size=(sheet.shape[1], sheet.shape[0]), out_center=(320, 320)
        )
        img = warp_image(sheet, H, (640, 640))
        dets = detect_markers(img)
        assert [d.id for d in dets] == [0, 1, 2, 3]
        # reprojection error of every refined corner under the true homography
        ppm = 150 / 25.4
        side_px = round(12.0 * ppm)
        for det in dets:
            cx, cy = {0: (0, 0), 1: (30, 0), 2: (0, 72), 3: (30, 72)}[det.id]
            pad = (6 + 4) * ppm
            x0 = round((cx + 10) * ppm - side_px / 2)
            y0 = round((cy + 10) * ppm - side_px / 2)
            truth = apply_homography(marker_corners(x0, y0, side_px), H)
            err = np.abs(np.array(det.corners) - truth).max()
            assert err < 0.5

    def test_params_can_disable_refinement(self):
        img = scene_with_marker(1)
        dets = detect_markers(img, params=DetectionParams(refine_corners=False))
        assert [d.id for d in dets] == [1]
