"""Wound measurement and segmentation-evaluation toolkit.

Converts binary wound masks plus photos of a printed fiducial reference
sheet into physical wound sizes, and ships the surrounding evaluation
machinery: micro-averaged segmentation metrics, majority-vote ensembling,
perceptual-hash deduplication, and expert-assessment scoring.
"""

from .calibrate import (
    ReferenceLayout,
    ScaleEstimate,
    coplanarity_check,
    default_layout,
    estimate_scale,
    load_layout,
    save_layout,
)
from .dedup import PerceptualHash, dedup, hamming, phash
from .errors import InvalidInputError, IOFailureError, NoReferenceError, WoundAmbitError
from .expert import (
    RatingSet,
    SizeGroundTruth,
    cma,
    ecr,
    filter_consistent,
    load_ratings,
    relative_deviation,
    save_ratings,
    size_errors,
)
from .markers import (
    DetectionParams,
    MarkerDetection,
    MarkerDictionary,
    builtin_dictionary,
    decode_grid,
    detect_markers,
    generate_dictionary,
    render_marker,
    render_reference_sheet,
)
from .mask import (
    Contour,
    area_px,
    binarize,
    connected_components,
    extract_contours,
    load_image,
    load_mask,
    save_mask,
)
from .measure import (
    WoundMeasurement,
    longest_diagonal,
    measure_wounds,
    measurement_report,
    perpendicular_width,
)
from .metrics import ConfusionCounts, MetricReport, accumulate, finalize, majority_vote
from .overlay import render_overlay, save_overlay
from .pipeline import measure_image

__version__ = "0.1.0"
