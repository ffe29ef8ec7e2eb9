"""End-to-end measurement: detect reference markers, calibrate, measure the mask."""

from __future__ import annotations

import numpy as np

from .calibrate import ReferenceLayout, coplanarity_check, default_layout, estimate_scale
from .errors import InvalidInputError
from .markers import DetectionParams, detect_markers
from .mask import extract_contours
from .measure import measure_wounds, measurement_report
from .overlay import render_overlay


def measure_image(
    image: np.ndarray,
    wound_mask: np.ndarray,
    layout: ReferenceLayout | None = None,
    params: DetectionParams | None = None,
    step_px: float = 1.0,
    want_overlay: bool = False,
):
    """Run detection, calibration and measurement on one photo/mask pair.

    Returns (report dict, overlay RGB array or None). Raises NoReferenceError
    when no layout marker is found.
    """
    layout = layout or default_layout()
    if wound_mask.shape != image.shape[:2]:
        raise InvalidInputError(
            f"mask dimensions {wound_mask.shape} do not match image {image.shape[:2]}"
        )
    detections = detect_markers(image, params=params)
    scale = estimate_scale(detections, layout)
    warnings = []
    warning = coplanarity_check(scale.per_pair_ratios)
    if warning:
        warnings.append(warning)
    measurements, total = measure_wounds(wound_mask, scale, step_px=step_px)
    report = measurement_report(measurements, total, scale, warnings)
    overlay = None
    if want_overlay:
        overlay = render_overlay(image, measurements, extract_contours(wound_mask), detections)
    return report, overlay
