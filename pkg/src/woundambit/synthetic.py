"""Synthetic scene generation: reference sheets, elliptical wounds, and
perspective warps with known ground truth. Used by the test suite, the
shipped end-to-end fixture, and the demo scripts.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from .calibrate import ReferenceLayout, default_marker_centers_mm, layout_from_centers
from .markers.dictionary import MarkerDictionary, builtin_dictionary
from .markers.render import marker_corners, render_marker


def ellipse_mask(shape: tuple, center: tuple, a: float, b: float, angle_deg: float = 0.0) -> np.ndarray:
    """Digital ellipse: pixel centers inside the (rotated) ellipse with semi-axes a, b."""
    h, w = shape
    ys, xs = np.mgrid[0:h, 0:w]
    dx = xs - center[0]
    dy = ys - center[1]
    t = math.radians(angle_deg)
    u = dx * math.cos(t) + dy * math.sin(t)
    v = -dx * math.sin(t) + dy * math.cos(t)
    return (u / a) ** 2 + (v / b) ** 2 <= 1.0


def apply_homography(points: np.ndarray, H: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    homo = np.concatenate([pts, np.ones((len(pts), 1))], axis=1) @ H.T
    return homo[:, :2] / homo[:, 2:3]


def warp_image(src: np.ndarray, H: np.ndarray, out_shape: tuple, background: float = 255.0, supersample: int = 3) -> np.ndarray:
    """Render src under homography H (src coords -> output coords) with
    supersampled bilinear resampling; uncovered pixels take the background value."""
    h, w = out_shape
    Hinv = np.linalg.inv(H)
    s = supersample
    offs = (np.arange(s) + 0.5) / s - 0.5
    acc = np.zeros((h, w), dtype=np.float64)
    for oy in offs:
        for ox in offs:
            ys, xs = np.mgrid[0:h, 0:w]
            pts = np.stack([(xs + ox).ravel(), (ys + oy).ravel()], axis=1)
            src_xy = apply_homography(pts, Hinv)
            vals = ndimage.map_coordinates(
                src.astype(np.float64), [src_xy[:, 1], src_xy[:, 0]], order=1, cval=background, mode="constant"
            )
            inside = (
                (src_xy[:, 0] >= -0.5)
                & (src_xy[:, 0] <= src.shape[1] - 0.5)
                & (src_xy[:, 1] >= -0.5)
                & (src_xy[:, 1] <= src.shape[0] - 0.5)
            )
            acc += np.where(inside, vals, background).reshape(h, w)
    return np.clip(acc / (s * s), 0, 255).astype(np.uint8)


def tilt_homography(tilt_deg: float, focal_px: float, plane_size: tuple, out_center: tuple, distance: float | None = None) -> np.ndarray:
    """Homography of a plane rotated about its horizontal center axis by
    tilt_deg and viewed by a pinhole camera centered on the plane."""
    w, h = plane_size
    cx, cy = w / 2.0, h / 2.0
    t = math.radians(tilt_deg)
    distance = distance or focal_px
    # plane point (X, Y) -> 3-D (X - cx, (Y - cy) cos t, d + (Y - cy) sin t)
    r1 = np.array([1.0, 0.0, 0.0])
    r2 = np.array([0.0, math.cos(t), math.sin(t)])
    tvec = np.array([-cx, -cy * math.cos(t), distance - cy * math.sin(t)])
    K = np.array([[focal_px, 0, out_center[0]], [0, focal_px, out_center[1]], [0, 0, 1.0]])
    return K @ np.column_stack([r1, r2, tvec])


class SyntheticScene:
    """Wound photo stand-in: reference markers plus an elliptical wound."""

    def __init__(self, image, wound_mask, layout, marker_truth, px_per_mm, ellipse_truth):
        self.image = image
        self.wound_mask = wound_mask
        self.layout = layout
        self.marker_truth = marker_truth  # id -> (4, 2) corner array
        self.px_per_mm = px_per_mm
        self.ellipse_truth = ellipse_truth  # dict with a, b, angle_deg, center (px)


def make_scene(
    px_per_mm: float = 4.0,
    dictionary: MarkerDictionary | None = None,
    centers_mm: dict | None = None,
    marker_side_mm: float = 12.0,
    ellipse_axes_px: tuple = (40.0, 15.0),
    ellipse_angle_deg: float = 0.0,
    drop_ids: tuple = (),
    wound_gray: int = 90,
) -> SyntheticScene:
    """Flat (fronto-parallel) scene at an exact px/mm scale.

    The reference markers sit on the left, the elliptical wound to their
    right. Marker corner ground truth is exact.
    """
    dictionary = dictionary or builtin_dictionary()
    centers_mm = centers_mm or default_marker_centers_mm()
    layout = layout_from_centers(centers_mm, marker_side_mm=marker_side_mm)

    side_px = marker_side_mm * px_per_mm
    side_int = int(round(side_px))
    pad = (marker_side_mm / 2 + 10.0) * px_per_mm
    xs = [c[0] for c in centers_mm.values()]
    ys = [c[1] for c in centers_mm.values()]
    sheet_w = (max(xs) - min(xs)) * px_per_mm + 2 * pad
    sheet_h = (max(ys) - min(ys)) * px_per_mm + 2 * pad

    a, b = ellipse_axes_px
    wound_cx = sheet_w + 1.5 * max(a, b) + 20
    width = int(round(wound_cx + 1.5 * max(a, b) + 20))
    height = int(round(max(sheet_h, 3 * max(a, b) + 40)))
    image = np.full((height, width), 255, dtype=np.uint8)

    truth = {}
    for mid, (cx, cy) in centers_mm.items():
        x0 = round((cx - min(xs)) * px_per_mm + pad - side_px / 2)
        y0 = round((cy - min(ys)) * px_per_mm + pad - side_px / 2)
        if mid not in drop_ids:
            image[y0 : y0 + side_int, x0 : x0 + side_int] = render_marker(mid, dictionary, side_int)
        truth[mid] = marker_corners(x0, y0, side_int)

    wound_center = (wound_cx, height / 2.0)
    mask = ellipse_mask((height, width), wound_center, a, b, ellipse_angle_deg)
    image[mask] = wound_gray
    return SyntheticScene(
        image=image,
        wound_mask=mask,
        layout=layout,
        marker_truth=truth,
        px_per_mm=px_per_mm,
        ellipse_truth={"a": a, "b": b, "angle_deg": ellipse_angle_deg, "center": wound_center},
    )
