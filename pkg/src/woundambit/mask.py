"""Binary mask primitives: binarization, connected components, outer contours.

Masks are 2-D numpy bool arrays of shape (height, width), True = foreground.
Contour points are (x, y) pixel coordinates with y pointing down.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import InvalidInputError, IOFailureError

# 8-connectivity for component labeling and boundary tracing
_STRUCTURE_8 = np.ones((3, 3), dtype=bool)

# Moore neighborhood in counterclockwise order (image coords, y down),
# starting west: W, SW, S, SE, E, NE, N, NW as (dx, dy)
_MOORE_CCW = [(-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)]


@dataclass(frozen=True)
class Contour:
    """Closed outer boundary of one 8-connected foreground component.

    points: (N, 2) int array of (x, y) pixel coordinates in traversal order.
    """

    points: np.ndarray

    def __len__(self):
        return len(self.points)


def luminance(image: np.ndarray) -> np.ndarray:
    """Collapse a color image to luminance (Rec. 601 weights); pass grayscale through."""
    if image.ndim == 2:
        return np.asarray(image, dtype=np.float64)
    if image.ndim == 3 and image.shape[2] in (3, 4):
        rgb = np.asarray(image[..., :3], dtype=np.float64)
        return rgb @ np.array([0.299, 0.587, 0.114])
    raise InvalidInputError(f"expected 2-D grayscale or 3-channel image, got shape {image.shape}")


def binarize(image: np.ndarray, threshold: int = 128) -> np.ndarray:
    """Threshold an image to a binary mask: foreground iff intensity >= threshold."""
    image = np.asarray(image)
    if image.size == 0:
        raise InvalidInputError("cannot binarize an empty image")
    return luminance(image) >= threshold


def connected_components(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """Label 8-connected foreground components.

    Returns (labels, n) where labels is an int array (background 0, components
    1..n contiguous in row-major order of first appearance).
    """
    labels, n = ndimage.label(mask, structure=_STRUCTURE_8)
    return labels, int(n)


def area_px(mask: np.ndarray) -> int:
    """Number of foreground pixels."""
    return int(np.count_nonzero(mask))


def _trace_boundary(labels: np.ndarray, label: int, start: tuple[int, int]) -> np.ndarray:
    """Moore-neighbor tracing from the component's row-major first pixel.

    Counterclockwise traversal (y down); terminates on re-entering the start
    pixel from the same direction as the initial entry (Jacob's criterion).
    """
    h, w = labels.shape
    sx, sy = start

    def is_fg(x, y):
        return 0 <= x < w and 0 <= y < h and labels[y, x] == label

    offsets = {off: i for i, off in enumerate(_MOORE_CCW)}

    points = [(sx, sy)]
    # start pixel is first in row-major scan, so its west neighbor is background
    cx, cy = sx, sy
    bx, by = sx - 1, sy  # backtrack: last background neighbor examined
    first_move = None
    while True:
        base = offsets[(bx - cx, by - cy)]
        found = None
        for k in range(1, 9):
            idx = (base + k) % 8
            dx, dy = _MOORE_CCW[idx]
            if is_fg(cx + dx, cy + dy):
                found = idx
                break
            bx, by = cx + dx, cy + dy
        if found is None:
            break  # isolated pixel
        # stop on leaving the start pixel in the original direction again
        if (cx, cy) == (sx, sy) and found == first_move:
            break
        if first_move is None:
            first_move = found
        cx, cy = cx + _MOORE_CCW[found][0], cy + _MOORE_CCW[found][1]
        points.append((cx, cy))
        if len(points) > 4 * labels.size:
            raise RuntimeError("contour tracing failed to terminate")
    if len(points) > 1 and points[-1] == points[0]:
        points.pop()
    return np.array(points, dtype=np.int64)


def extract_contours(mask: np.ndarray) -> list[Contour]:
    """One outer contour per 8-connected component; interior holes are ignored."""
    labels, n = connected_components(mask)
    contours = []
    for cid in range(1, n + 1):
        ys, xs = np.nonzero(labels == cid)
        first = int(np.lexsort((xs, ys))[0])  # row-major first pixel
        start = (int(xs[first]), int(ys[first]))
        contours.append(Contour(_trace_boundary(labels, cid, start)))
    return contours


def load_image(path) -> np.ndarray:
    """Read an image file as a numpy array (grayscale 2-D or RGB 3-D uint8)."""
    try:
        with Image.open(path) as im:
            if im.mode in ("L", "I;16", "I"):
                return np.asarray(im.convert("L"))
            return np.asarray(im.convert("RGB"))
    except FileNotFoundError:
        raise
    except OSError as e:
        raise IOFailureError(f"cannot read image {path}: {e}") from e


def load_mask(path, threshold: int = 128) -> np.ndarray:
    """Read a mask raster and binarize it (foreground iff intensity >= threshold)."""
    return binarize(load_image(path), threshold)


def save_mask(mask: np.ndarray, path) -> None:
    """Write a binary mask as an 8-bit grayscale PNG (foreground = 255)."""
    Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L").save(path)
