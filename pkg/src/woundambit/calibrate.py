"""Pixel-to-millimeter scale estimation from fiducial marker detections.

With two or more detected markers the scale is the arithmetic mean of the
per-pair ratios (pixel center distance over the layout's physical distance);
with exactly one marker it falls back to the marker's own pixel size over
its physical side length.
"""

from __future__ import annotations

import itertools
import json
import math
import statistics
from dataclasses import dataclass, field

from .errors import InvalidInputError, NoReferenceError

LAYOUT_SCHEMA = "ro-layout/1"

# dispersion above this fraction of the median pair ratio suggests the
# reference sheet is not coplanar with the wound
COPLANARITY_DISPERSION = 0.15


@dataclass(frozen=True)
class ReferenceLayout:
    """Physical description of the printed reference sheet."""

    marker_side_mm: float = 12.0
    margin_mm: float = 4.0
    required_ids: frozenset = frozenset({0, 1, 2, 3})
    pair_distances_mm: dict = field(default_factory=dict)  # (i, j) with i < j -> mm

    def __post_init__(self):
        if self.marker_side_mm <= 0:
            raise InvalidInputError("marker_side_mm must be positive")
        for pair, dist in self.pair_distances_mm.items():
            if dist <= 0:
                raise InvalidInputError(f"pair distance {pair} must be positive")
        for i, j in itertools.combinations(sorted(self.required_ids), 2):
            if (i, j) not in self.pair_distances_mm:
                raise InvalidInputError(f"missing pair distance for markers {i}-{j}")

    def distance(self, a: int, b: int) -> float:
        return self.pair_distances_mm[(min(a, b), max(a, b))]


def default_marker_centers_mm() -> dict:
    """Marker centers of the default sheet: corners of a 30 mm x 72 mm rectangle."""
    w, h = 30.0, 72.0
    return {0: (0.0, 0.0), 1: (w, 0.0), 2: (0.0, h), 3: (w, h)}


def layout_from_centers(centers: dict, marker_side_mm: float = 12.0, margin_mm: float = 4.0) -> ReferenceLayout:
    """Build a layout (all pairwise center distances) from marker center positions."""
    dists = {}
    for i, j in itertools.combinations(sorted(centers), 2):
        dists[(i, j)] = math.dist(centers[i], centers[j])
    return ReferenceLayout(
        marker_side_mm=marker_side_mm,
        margin_mm=margin_mm,
        required_ids=frozenset(centers),
        pair_distances_mm=dists,
    )


def default_layout() -> ReferenceLayout:
    """Four markers at the corners of a 30 mm x 72 mm rectangle (center-to-center)."""
    return layout_from_centers(default_marker_centers_mm())


def load_layout(path) -> ReferenceLayout:
    with open(path) as f:
        data = json.load(f)
    if data.get("schema") != LAYOUT_SCHEMA:
        raise InvalidInputError(f"expected schema {LAYOUT_SCHEMA!r}, got {data.get('schema')!r}")
    dists = {}
    for key, dist in data["pair_distances_mm"].items():
        i, j = (int(p) for p in key.split("-"))
        if i >= j:
            raise InvalidInputError(f"pair key {key!r} must be 'i-j' with i < j")
        dists[(i, j)] = float(dist)
    return ReferenceLayout(
        marker_side_mm=float(data["marker_side_mm"]),
        margin_mm=float(data["margin_mm"]),
        required_ids=frozenset(data["required_ids"]),
        pair_distances_mm=dists,
    )


def save_layout(layout: ReferenceLayout, path) -> None:
    payload = {
        "schema": LAYOUT_SCHEMA,
        "marker_side_mm": layout.marker_side_mm,
        "margin_mm": layout.margin_mm,
        "required_ids": sorted(layout.required_ids),
        "pair_distances_mm": {f"{i}-{j}": d for (i, j), d in sorted(layout.pair_distances_mm.items())},
    }
    with open(path, "w") as f:
        json.dump(payload, f, indent=2)


@dataclass(frozen=True)
class ScaleEstimate:
    px_per_mm: float
    n_markers: int
    n_pairs: int
    method: str  # "pairwise" | "single-marker"
    per_pair_ratios: tuple = ()  # ((i, j), ratio) diagnostics


def _center(corners) -> tuple[float, float]:
    xs = [c[0] for c in corners]
    ys = [c[1] for c in corners]
    return (sum(xs) / 4.0, sum(ys) / 4.0)


def _marker_px_size(corners) -> float:
    """Mean of the marker's pixel width and height (each the mean of two opposite sides)."""
    d = [math.dist(corners[k], corners[(k + 1) % 4]) for k in range(4)]
    width = (d[0] + d[2]) / 2.0
    height = (d[1] + d[3]) / 2.0
    return (width + height) / 2.0


def estimate_scale(detections, layout: ReferenceLayout) -> ScaleEstimate:
    """Estimate px/mm from the detected reference markers."""
    usable = {d.id: d for d in detections if d.id in layout.required_ids}
    if not usable:
        raise NoReferenceError("no reference marker detected; cannot estimate scale")
    if len(usable) == 1:
        det = next(iter(usable.values()))
        px_per_mm = _marker_px_size(det.corners) / layout.marker_side_mm
        return ScaleEstimate(px_per_mm=px_per_mm, n_markers=1, n_pairs=0, method="single-marker")
    ratios = []
    for i, j in itertools.combinations(sorted(usable), 2):
        px = math.dist(_center(usable[i].corners), _center(usable[j].corners))
        ratios.append(((i, j), px / layout.distance(i, j)))
    px_per_mm = statistics.fmean(r for _, r in ratios)
    return ScaleEstimate(
        px_per_mm=px_per_mm,
        n_markers=len(usable),
        n_pairs=len(ratios),
        method="pairwise",
        per_pair_ratios=tuple(ratios),
    )


def coplanarity_check(per_pair_ratios) -> str | None:
    """Warn when the pair ratios disperse enough to suggest an out-of-plane sheet.

    Returns a warning string, or None when the spread is acceptable (or the
    check is not applicable). Never alters the estimate.
    """
    ratios = [r for _, r in per_pair_ratios]
    if len(ratios) < 2:
        return None
    dispersion = (max(ratios) - min(ratios)) / statistics.median(ratios)
    if dispersion > COPLANARITY_DISPERSION:
        return (
            f"px/mm pair ratios disperse by {dispersion:.2f} (> {COPLANARITY_DISPERSION}); "
            "the reference sheet may not be coplanar with the wound"
        )
    return None
