"""Find near-duplicate photos with the DCT perceptual hash.

Builds a small synthetic photo library where two entries are brightness-
tweaked copies of others, and shows the dedup report (greedy, first kept).
"""

import numpy as np

from woundambit.dedup import DEFAULT_THRESHOLD, dedup, hamming, phash


def fake_photo(seed: int, size: int = 96) -> np.ndarray:
    gen = np.random.default_rng(seed)
    ys, xs = np.mgrid[0:size, 0:size]
    img = np.full((size, size), 190.0)
    for _ in range(5):
        cx, cy, r = gen.uniform(10, size - 10), gen.uniform(10, size - 10), gen.uniform(6, 18)
        img -= 110 * np.exp(-((xs - cx) ** 2 + (ys - cy) ** 2) / (2 * r * r))
    return np.clip(img, 0, 255)


library = [(f"photo{i:02d}.png", fake_photo(i)) for i in range(6)]
library.append(("retake03.png", np.clip(fake_photo(3) * 1.06, 0, 255)))
library.append(("retake00.png", np.clip(fake_photo(0) * 0.94, 0, 255)))

report = dedup(library, threshold=DEFAULT_THRESHOLD)
print(f"kept {len(report.kept)} of {len(library)} (threshold {DEFAULT_THRESHOLD})")
for pair in report.duplicates:
    print(f"  {pair.duplicate_id} ~ {pair.kept_id} ({pair.reason}, distance {pair.distance})")

# the hash distance between unrelated photos stays well above the threshold
d = hamming(phash(fake_photo(1)), phash(fake_photo(2)))
print(f"unrelated pair distance: {d}")
