from .dictionary import MarkerDictionary, builtin_dictionary, generate_dictionary
from .detect import DetectionParams, MarkerDetection, decode_grid, detect_markers
from .render import marker_corners, render_marker, render_reference_sheet

__all__ = [
    "MarkerDictionary",
    "builtin_dictionary",
    "generate_dictionary",
    "DetectionParams",
    "MarkerDetection",
    "decode_grid",
    "detect_markers",
    "marker_corners",
    "render_marker",
    "render_reference_sheet",
]
