"""Deterministic marker and reference-sheet rendering.

Rendered markers have a one-module black border around the code grid; sheets
add the physical white margin around each marker. Pixel (i, j) is treated as
covering [i - 0.5, i + 0.5], so a marker pasted with its top-left module at
pixel (x0, y0) has its physical top-left corner at (x0 - 0.5, y0 - 0.5).
"""

from __future__ import annotations

import numpy as np

from ..calibrate import ReferenceLayout, default_marker_centers_mm, layout_from_centers
from ..errors import InvalidInputError
from .dictionary import MarkerDictionary, builtin_dictionary

MM_PER_INCH = 25.4


def render_marker(marker_id: int, dictionary: MarkerDictionary | None = None, side_px: int = 48) -> np.ndarray:
    """Render one marker (border plus code grid) as a uint8 grayscale raster."""
    dictionary = dictionary or builtin_dictionary()
    if marker_id not in dictionary.entries:
        raise InvalidInputError(f"unknown marker id {marker_id}")
    modules = dictionary.grid_size + 2
    if side_px < modules:
        raise InvalidInputError(f"side_px must be at least {modules}")
    bits = dictionary.entries[marker_id]
    grid = np.ones((modules, modules), dtype=bool)  # True = black; border stays black
    grid[1:-1, 1:-1] = bits
    # nearest-module lookup per output pixel
    idx = np.minimum((np.arange(side_px) + 0.5) * modules // side_px, modules - 1).astype(int)
    black = grid[np.ix_(idx, idx)]
    return np.where(black, 0, 255).astype(np.uint8)


def marker_corners(x0: float, y0: float, side_px: float) -> np.ndarray:
    """Physical corners of a marker pasted with its top-left module pixel at (x0, y0),
    clockwise from top-left, in (x, y) image coordinates."""
    left, top = x0 - 0.5, y0 - 0.5
    right, bottom = x0 + side_px - 0.5, y0 + side_px - 0.5
    return np.array([[left, top], [right, top], [right, bottom], [left, bottom]])


def render_reference_sheet(
    dpi: int = 300,
    dictionary: MarkerDictionary | None = None,
    centers_mm: dict | None = None,
    marker_side_mm: float = 12.0,
    margin_mm: float = 4.0,
) -> tuple[np.ndarray, ReferenceLayout]:
    """Print-ready sheet with the default four-marker geometry.

    Returns (uint8 grayscale raster, matching ReferenceLayout).
    """
    dictionary = dictionary or builtin_dictionary()
    centers_mm = centers_mm or default_marker_centers_mm()
    ppm = dpi / MM_PER_INCH
    side_px = max(1, round(marker_side_mm * ppm))
    pad_mm = marker_side_mm / 2 + margin_mm
    xs = [c[0] for c in centers_mm.values()]
    ys = [c[1] for c in centers_mm.values()]
    width = int(round((max(xs) - min(xs) + 2 * pad_mm) * ppm))
    height = int(round((max(ys) - min(ys) + 2 * pad_mm) * ppm))
    sheet = np.full((height, width), 255, dtype=np.uint8)
    for mid, (cx, cy) in centers_mm.items():
        x0 = round((cx - min(xs) + pad_mm) * ppm - side_px / 2)
        y0 = round((cy - min(ys) + pad_mm) * ppm - side_px / 2)
        sheet[y0 : y0 + side_px, x0 : x0 + side_px] = render_marker(mid, dictionary, side_px)
    layout = layout_from_centers(centers_mm, marker_side_mm=marker_side_mm, margin_mm=margin_mm)
    return sheet, layout
