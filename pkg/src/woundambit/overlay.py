"""Result visualization: wound and marker outlines in green, measurement
diagonals in pink, marker IDs in red.
"""

from __future__ import annotations

import numpy as np
from PIL import Image, ImageDraw

GREEN = (0, 200, 0)
PINK = (255, 105, 180)
RED = (220, 20, 20)


def render_overlay(image: np.ndarray, measurements, contours, detections) -> np.ndarray:
    """Compose the measurement overlay on top of the photo (returns RGB uint8)."""
    if image.ndim == 2:
        base = np.stack([image] * 3, axis=-1)
    else:
        base = image[..., :3]
    im = Image.fromarray(base.astype(np.uint8), mode="RGB")
    draw = ImageDraw.Draw(im)

    for contour in contours:
        pts = [tuple(p) for p in contour.points]
        if len(pts) > 1:
            draw.line(pts + [pts[0]], fill=GREEN, width=2)
        else:
            draw.point(pts[0], fill=GREEN)

    for det in detections:
        corners = [tuple(c) for c in det.corners]
        draw.line(corners + [corners[0]], fill=GREEN, width=2)
        cx, cy = det.center
        draw.text((cx - 4, cy - 6), str(det.id), fill=RED)

    for m in measurements:
        draw.line([tuple(m.height_endpoints[0]), tuple(m.height_endpoints[1])], fill=PINK, width=2)
        if m.width_mm > 0:
            draw.line([tuple(m.width_endpoints[0]), tuple(m.width_endpoints[1])], fill=PINK, width=2)
    return np.asarray(im)


def save_overlay(overlay: np.ndarray, path) -> None:
    Image.fromarray(overlay, mode="RGB").save(path)
