"""From-scratch square-fiducial detection.

Pipeline: adaptive mean thresholding over several window sizes, boundary
tracing of dark components, polygon simplification to quads, sub-pixel
corner refinement, inverse-homography sampling of the module grid, and
dictionary matching over the four rotations with a strict black border.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from ..errors import InvalidInputError
from ..mask import _MOORE_CCW, _trace_boundary, luminance  # noqa: F401 (shared tracing)
from .dictionary import MarkerDictionary, builtin_dictionary

MODULE_PX = 8  # canonical unwarp resolution per module
CELL_CORE = 6  # central samples per module axis (skip a 1-sample skirt)


@dataclass(frozen=True)
class DetectionParams:
    window_sizes: tuple = (15, 25, 35)
    threshold_offset: float = 7.0
    approx_eps_frac: float = 0.03
    min_area_px: float = 300.0
    min_perimeter_px: float = 40.0
    max_bit_errors: int = 1
    min_contrast: float = 30.0
    refine_corners: bool = True
    refine_half_window: int = 2
    refine_iterations: int = 4


@dataclass(frozen=True)
class MarkerDetection:
    id: int
    corners: tuple  # four (x, y) sub-pixel points, clockwise from canonical top-left
    decode_rotation: int
    bit_errors: int = 0

    @property
    def center(self) -> tuple:
        xs = [c[0] for c in self.corners]
        ys = [c[1] for c in self.corners]
        return (sum(xs) / 4.0, sum(ys) / 4.0)


def decode_grid(cells: np.ndarray, dictionary: MarkerDictionary, max_bit_errors: int):
    """Match a sampled module grid (True = black) against the code book.

    Returns (id, rotation, bit_errors) for the unique best match within
    max_bit_errors, or None. Any white border cell rejects the sample.
    """
    modules = dictionary.grid_size + 2
    if cells.shape != (modules, modules):
        raise InvalidInputError(f"expected {modules}x{modules} cell grid, got {cells.shape}")
    border = np.concatenate([cells[0], cells[-1], cells[1:-1, 0], cells[1:-1, -1]])
    if not border.all():
        return None
    interior = cells[1:-1, 1:-1]
    candidates = []
    for marker_id, entry in dictionary.entries.items():
        for rot in range(4):
            dist = int(np.count_nonzero(np.rot90(interior, rot) != entry))
            candidates.append((dist, marker_id, rot))
    best = min(candidates)
    if best[0] > max_bit_errors:
        return None
    if sum(1 for c in candidates if c[0] == best[0]) > 1:
        return None  # ambiguous
    # report counterclockwise quarter turns of the marker relative to canonical
    return best[1], (4 - best[2]) % 4, best[0]


def _simplify_open(points: np.ndarray, eps: float) -> list[int]:
    """Douglas-Peucker on an open chain; returns kept indices including both ends."""
    keep = [0, len(points) - 1]
    stack = [(0, len(points) - 1)]
    while stack:
        i, j = stack.pop()
        if j <= i + 1:
            continue
        a, b = points[i], points[j]
        ab = b - a
        norm = np.linalg.norm(ab)
        seg = points[i + 1 : j]
        if norm == 0:
            dists = np.linalg.norm(seg - a, axis=1)
        else:
            rel = seg - a
            dists = np.abs(ab[0] * rel[:, 1] - ab[1] * rel[:, 0]) / norm
        k = int(np.argmax(dists))
        if dists[k] > eps:
            mid = i + 1 + k
            keep.append(mid)
            stack.extend([(i, mid), (mid, j)])
    return sorted(set(keep))


def _approx_quad(contour: np.ndarray, eps: float) -> np.ndarray | None:
    """Simplify a closed contour; returns the 4 vertices if it reduces to a quad."""
    pts = contour.astype(np.float64)
    far = int(np.argmax(np.sum((pts - pts[0]) ** 2, axis=1)))
    if far == 0:
        return None
    half1 = pts[: far + 1]
    half2 = np.vstack([pts[far:], pts[:1]])
    idx1 = _simplify_open(half1, eps)
    idx2 = _simplify_open(half2, eps)
    verts = [half1[i] for i in idx1[:-1]] + [half2[i] for i in idx2[:-1]]
    if len(verts) != 4:
        return None
    return np.array(verts)


def _signed_area(quad: np.ndarray) -> float:
    x, y = quad[:, 0], quad[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _is_convex(quad: np.ndarray) -> bool:
    crosses = []
    for i in range(4):
        a = quad[(i + 1) % 4] - quad[i]
        b = quad[(i + 2) % 4] - quad[(i + 1) % 4]
        crosses.append(float(a[0] * b[1] - a[1] * b[0]))
    return all(c > 0 for c in crosses) or all(c < 0 for c in crosses)


def _order_clockwise(quad: np.ndarray) -> np.ndarray:
    # clockwise on screen (y down) has positive shoelace area in these coords
    if _signed_area(quad) < 0:
        quad = quad[::-1]
    start = int(np.argmin(quad.sum(axis=1)))  # start near top-left for stability
    return np.roll(quad, -start, axis=0)


def _homography(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """3x3 homography mapping each src point to its dst point (4-point DLT)."""
    A = np.zeros((8, 8))
    b = np.zeros(8)
    for k, ((x, y), (xp, yp)) in enumerate(zip(src, dst)):
        A[2 * k] = [x, y, 1, 0, 0, 0, -xp * x, -xp * y]
        b[2 * k] = xp
        A[2 * k + 1] = [0, 0, 0, x, y, 1, -yp * x, -yp * y]
        b[2 * k + 1] = yp
    h = np.linalg.solve(A, b)
    return np.append(h, 1.0).reshape(3, 3)


def _sample_cells(lum: np.ndarray, quad: np.ndarray, grid_size: int, min_contrast: float):
    """Sample each module's central sub-grid through the quad homography.

    Returns the (modules, modules) bool grid (True = black) or None when the
    patch lacks contrast.
    """
    modules = grid_size + 2
    side = modules * MODULE_PX
    canonical = np.array([[-0.5, -0.5], [side - 0.5, -0.5], [side - 0.5, side - 0.5], [-0.5, side - 0.5]])
    H = _homography(canonical, quad)

    step = MODULE_PX / (CELL_CORE + 2)
    offsets = -0.5 + (np.arange(CELL_CORE) + 1.5) * step
    coords = []
    for r in range(modules):
        for c in range(modules):
            xs, ys = np.meshgrid(c * MODULE_PX + offsets, r * MODULE_PX + offsets)
            coords.append(np.stack([xs.ravel(), ys.ravel()], axis=1))
    pts = np.concatenate(coords)
    homo = np.concatenate([pts, np.ones((len(pts), 1))], axis=1) @ H.T
    img_xy = homo[:, :2] / homo[:, 2:3]
    values = ndimage.map_coordinates(lum, [img_xy[:, 1], img_xy[:, 0]], order=1, mode="nearest")
    lo, hi = float(values.min()), float(values.max())
    if hi - lo < min_contrast:
        return None
    thr = (lo + hi) / 2.0
    dark = (values < thr).reshape(modules * modules, CELL_CORE * CELL_CORE)
    majority = dark.sum(axis=1) * 2 > CELL_CORE * CELL_CORE
    return majority.reshape(modules, modules)


def _refine_corner(lum, gx, gy, corner, half: int, iterations: int):
    """Gradient-based sub-pixel corner refinement in a (2*half+1)^2 window."""
    h, w = lum.shape
    q = np.array(corner, dtype=np.float64)
    for _ in range(iterations):
        cx, cy = int(round(q[0])), int(round(q[1]))
        x0, x1 = max(cx - half, 0), min(cx + half + 1, w)
        y0, y1 = max(cy - half, 0), min(cy + half + 1, h)
        if x1 - x0 < 2 or y1 - y0 < 2:
            break
        gxs = gx[y0:y1, x0:x1].ravel()
        gys = gy[y0:y1, x0:x1].ravel()
        xs, ys = np.meshgrid(np.arange(x0, x1), np.arange(y0, y1))
        xs, ys = xs.ravel().astype(np.float64), ys.ravel().astype(np.float64)
        gxx = np.sum(gxs * gxs)
        gxy = np.sum(gxs * gys)
        gyy = np.sum(gys * gys)
        G = np.array([[gxx, gxy], [gxy, gyy]])
        if abs(np.linalg.det(G)) < 1e-9:
            break
        bvec = np.array(
            [
                np.sum(gxs * gxs * xs + gxs * gys * ys),
                np.sum(gxs * gys * xs + gys * gys * ys),
            ]
        )
        qn = np.linalg.solve(G, bvec)
        if np.linalg.norm(qn - q) < 1e-3:
            q = qn
            break
        q = qn
    return q


def _candidate_quads(lum: np.ndarray, params: DetectionParams):
    """Quad candidates from all adaptive-threshold window sizes."""
    quads = []
    for window in params.window_sizes:
        mean = ndimage.uniform_filter(lum, size=window, mode="nearest")
        ink = lum < mean - params.threshold_offset
        labels, n = ndimage.label(ink, structure=np.ones((3, 3), dtype=bool))
        if n == 0:
            continue
        sizes = np.bincount(labels.ravel())
        slices = ndimage.find_objects(labels)
        for cid in range(1, n + 1):
            sl = slices[cid - 1]
            height = sl[0].stop - sl[0].start
            width = sl[1].stop - sl[1].start
            if sizes[cid] < params.min_perimeter_px or max(height, width) < 10:
                continue
            ys, xs = np.nonzero(labels[sl] == cid)
            first = int(np.lexsort((xs, ys))[0])
            start = (int(xs[first]) + sl[1].start, int(ys[first]) + sl[0].start)
            contour = _trace_boundary(labels, cid, start)
            if len(contour) < params.min_perimeter_px:
                continue
            perimeter = float(np.sum(np.linalg.norm(np.diff(contour, axis=0, append=contour[:1]), axis=1)))
            quad = _approx_quad(contour, params.approx_eps_frac * perimeter)
            if quad is None or not _is_convex(quad):
                continue
            if abs(_signed_area(quad)) < params.min_area_px:
                continue
            quads.append(_order_clockwise(quad))
    return quads


def detect_markers(
    image: np.ndarray,
    dictionary: MarkerDictionary | None = None,
    params: DetectionParams | None = None,
) -> list[MarkerDetection]:
    """Detect and decode all square fiducials in a grayscale or color image.

    Duplicate IDs keep the candidate with fewer bit errors, then larger area;
    the result is sorted by ID. An image without markers yields an empty list.
    """
    dictionary = dictionary or builtin_dictionary()
    params = params or DetectionParams()
    lum = luminance(np.asarray(image))
    if lum.shape[0] < 32 or lum.shape[1] < 32:
        raise InvalidInputError("image must be at least 32x32")
    gy, gx = np.gradient(lum)

    best: dict[int, tuple] = {}  # id -> (bit_errors, -area, detection)
    for quad in _candidate_quads(lum, params):
        if params.refine_corners:
            quad = np.array(
                [
                    _refine_corner(lum, gx, gy, c, params.refine_half_window, params.refine_iterations)
                    for c in quad
                ]
            )
            if not _is_convex(quad):
                continue
        cells = _sample_cells(lum, quad, dictionary.grid_size, params.min_contrast)
        if cells is None:
            continue
        decoded = decode_grid(cells, dictionary, params.max_bit_errors)
        if decoded is None:
            continue
        marker_id, rotation, errors = decoded
        roll = (4 - rotation) % 4  # corner index of the marker's canonical top-left
        corners = tuple(tuple(float(v) for v in p) for p in np.roll(quad, -roll, axis=0))
        det = MarkerDetection(id=marker_id, corners=corners, decode_rotation=rotation, bit_errors=errors)
        key = (errors, -abs(_signed_area(quad)))
        if marker_id not in best or key < best[marker_id][0]:
            best[marker_id] = (key, det)
    return [best[mid][1] for mid in sorted(best)]
