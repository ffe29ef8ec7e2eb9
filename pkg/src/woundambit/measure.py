"""Clinical-convention wound measurement from mask contours.

Height is the longest diagonal of the contour (clinical "longest length");
width is the greatest separation between intersections of a perpendicular
line swept incrementally along that diagonal. Areas come from foreground
pixel counts divided by the squared px/mm ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calibrate import ScaleEstimate
from .mask import Contour, connected_components, extract_contours

MIN_CONTOUR_POINTS = 7
DEFAULT_STEP_PX = 1.0


@dataclass(frozen=True)
class WoundMeasurement:
    contour_index: int
    area_mm2: float
    height_mm: float
    width_mm: float
    height_endpoints: tuple  # ((x, y), (x, y)) in px
    width_endpoints: tuple
    px_per_mm: float


def longest_diagonal(contour: Contour):
    """Point pair of maximum Euclidean distance over all contour points.

    Returns (p1, p2, length_px), or None for contours below the minimum
    point count (the caller skips those). Ties break lexicographically.
    """
    pts = np.asarray(contour.points, dtype=np.float64)
    if len(pts) < MIN_CONTOUR_POINTS:
        return None
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    best = d2.max()
    ii, jj = np.nonzero(d2 == best)
    pairs = []
    for i, j in zip(ii, jj):
        if i == j:
            continue
        a, b = tuple(pts[i]), tuple(pts[j])
        pairs.append((a, b) if a <= b else (b, a))
    p1, p2 = min(pairs)
    return p1, p2, math.sqrt(best)


def perpendicular_width(contour: Contour, diagonal, step_px: float = DEFAULT_STEP_PX):
    """Greatest separation between contour intersections of a perpendicular
    line swept along the diagonal at step_px spacing (both ends included).

    Returns (p1, p2, length_px); degenerate contours (no position with two
    intersections) yield zero width at the diagonal midpoint.
    """
    (ax, ay), (bx, by), length = diagonal[0], diagonal[1], None
    a = np.array([ax, ay], dtype=np.float64)
    b = np.array([bx, by], dtype=np.float64)
    length = float(np.linalg.norm(b - a))
    if length <= 0:
        raise ValueError("diagonal length must be positive")
    u = (b - a) / length  # along the diagonal
    w = np.array([-u[1], u[0]])  # perpendicular

    pts = np.asarray(contour.points, dtype=np.float64)
    nxt = np.roll(pts, -1, axis=0)
    g1 = (pts - a) @ u  # vertex position along the diagonal
    g2 = (nxt - a) @ u
    s1 = pts @ w  # vertex position across the diagonal
    s2 = nxt @ w

    ts = np.arange(0.0, length, step_px)
    ts = np.append(ts, length)

    f1 = g1[None, :] - ts[:, None]
    f2 = g2[None, :] - ts[:, None]
    crossing = f1 * f2 < 0
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = np.where(crossing, f1 / (f1 - f2), np.nan)
    s_cross = s1[None, :] + alpha * (s2 - s1)[None, :]
    # vertices lying exactly on the sweep line count as intersections too
    s_vertex = np.where(f1 == 0, np.broadcast_to(s1, f1.shape), np.nan)
    s_all = np.concatenate([s_cross, s_vertex], axis=1)

    counts = np.count_nonzero(~np.isnan(s_all), axis=1)
    valid = counts >= 2
    if not np.any(valid):
        mid = (a + b) / 2.0
        return (tuple(mid), tuple(mid), 0.0)
    widths = np.full(len(ts), -np.inf)
    widths[valid] = np.nanmax(s_all[valid], axis=1) - np.nanmin(s_all[valid], axis=1)
    row = int(np.argmax(widths))
    width = float(widths[row])

    def point_at(col):
        n = len(pts)
        if col < n:  # crossing intersection
            return tuple(pts[col] + alpha[row, col] * (nxt[col] - pts[col]))
        return tuple(pts[col - n])  # on-line vertex

    lo = int(np.nanargmin(s_all[row]))
    hi = int(np.nanargmax(s_all[row]))
    return (point_at(lo), point_at(hi), width)


def measure_wounds(
    mask: np.ndarray, scale: ScaleEstimate, step_px: float = DEFAULT_STEP_PX
) -> tuple[list[WoundMeasurement], float]:
    """Measure every contour with enough points; total area covers all components.

    Returns (measurements sorted by area descending, total_area_mm2).
    """
    if scale.px_per_mm <= 0:
        raise ValueError("px_per_mm must be positive")
    labels, n = connected_components(mask)
    contours = extract_contours(mask)
    areas_px = np.bincount(labels.ravel(), minlength=n + 1)
    total_area_mm2 = float(areas_px[1:].sum()) / scale.px_per_mm**2

    measurements = []
    for idx, contour in enumerate(contours):
        diag = longest_diagonal(contour)
        if diag is None:
            continue
        p1, p2, height_px = diag
        w1, w2, width_px = perpendicular_width(contour, (p1, p2), step_px)
        measurements.append(
            WoundMeasurement(
                contour_index=idx,
                area_mm2=float(areas_px[idx + 1]) / scale.px_per_mm**2,
                height_mm=height_px / scale.px_per_mm,
                width_mm=width_px / scale.px_per_mm,
                height_endpoints=(p1, p2),
                width_endpoints=(w1, w2),
                px_per_mm=scale.px_per_mm,
            )
        )
    measurements.sort(key=lambda m: m.area_mm2, reverse=True)
    return measurements, total_area_mm2


def measurement_report(
    measurements: list[WoundMeasurement],
    total_area_mm2: float,
    scale: ScaleEstimate,
    warnings: list | None = None,
) -> dict:
    """Result document ('measurement/1') for JSON output."""
    return {
        "schema": "measurement/1",
        "px_per_mm": scale.px_per_mm,
        "method": scale.method,
        "warnings": list(warnings or []),
        "wounds": [
            {
                "contour_index": m.contour_index,
                "area_mm2": m.area_mm2,
                "height_mm": m.height_mm,
                "width_mm": m.width_mm,
                "height_endpoints": [list(m.height_endpoints[0]), list(m.height_endpoints[1])],
                "width_endpoints": [list(m.width_endpoints[0]), list(m.width_endpoints[1])],
            }
            for m in measurements
        ],
        "total_area_mm2": total_area_mm2,
    }
