"""Generate a print-ready reference sheet and check it detects cleanly.

Print the sheet at its native DPI (no "fit to page"), lay it next to the
wound, and keep the camera as parallel to the skin as possible.
"""

from pathlib import Path

from PIL import Image

from woundambit import detect_markers, save_layout
from woundambit.markers import render_reference_sheet

out = Path("demo-output")
out.mkdir(exist_ok=True)

sheet, layout = render_reference_sheet(dpi=300)
Image.fromarray(sheet, mode="L").save(out / "reference-sheet.png")
save_layout(layout, out / "ro-layout.json")
print(f"sheet: {sheet.shape[1]}x{sheet.shape[0]} px at 300 dpi -> {out/'reference-sheet.png'}")

# sanity check: the sheet we just rendered must detect with all four ids
detections = detect_markers(sheet)
print(f"self-check: detected ids {[d.id for d in detections]}")
for det in detections:
    cx, cy = det.center
    print(f"  id {det.id}: center ({cx:7.1f}, {cy:7.1f}) px, {det.bit_errors} bit errors")
