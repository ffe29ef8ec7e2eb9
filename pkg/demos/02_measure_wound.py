"""Measure a synthetic wound photo end to end.

Renders a flat scene with the four reference markers and an elliptical
"wound", then runs the full pipeline: marker detection, px/mm calibration,
contour measurement, and the overlay figure.
"""

import json
from pathlib import Path

from woundambit.overlay import save_overlay
from woundambit.pipeline import measure_image
from woundambit.synthetic import make_scene

out = Path("demo-output")
out.mkdir(exist_ok=True)

scene = make_scene(px_per_mm=4.0, ellipse_axes_px=(40.0, 15.0), ellipse_angle_deg=25.0)
report, overlay = measure_image(scene.image, scene.wound_mask, scene.layout, want_overlay=True)

print(json.dumps({k: v for k, v in report.items() if k != "wounds"}, indent=2))
for wound in report["wounds"]:
    print(
        f"wound {wound['contour_index']}: "
        f"H {wound['height_mm']:.1f} mm, W {wound['width_mm']:.1f} mm, "
        f"area {wound['area_mm2']:.1f} mm^2"
    )
print(f"(ground truth: H {2*40/4:.1f} mm, W {2*15/4:.1f} mm at exactly 4 px/mm)")

save_overlay(overlay, out / "overlay.png")
print(f"overlay -> {out/'overlay.png'}")
