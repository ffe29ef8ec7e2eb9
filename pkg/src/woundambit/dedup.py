"""Near-duplicate image removal: exact byte matching plus 64-bit perceptual hashing.

Hash recipe (pinned so hashes are reproducible across implementations):
grayscale -> 32x32 area-average resize -> 2-D DCT-II -> 64 low-frequency
coefficients taken row-major from the top-left 8x8 block excluding the DC
term, plus coefficient (row 8, col 0) to round out 64 bits -> bit set iff
the coefficient is strictly greater than the median of the 64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy.fft import dctn

from .errors import InvalidInputError
from .mask import luminance

HASH_BITS = 64
DEFAULT_THRESHOLD = 11


@dataclass(frozen=True)
class PerceptualHash:
    """64-bit DCT-median fingerprint of image appearance."""

    bits: np.ndarray  # (64,) bool

    def __post_init__(self):
        if self.bits.shape != (HASH_BITS,):
            raise InvalidInputError(f"hash must have exactly {HASH_BITS} bits")

    def __int__(self) -> int:
        return int("".join("1" if b else "0" for b in self.bits), 2)

    def hex(self) -> str:
        return f"{int(self):016x}"

    def __eq__(self, other):
        return isinstance(other, PerceptualHash) and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return int(self)


def hamming(a: PerceptualHash, b: PerceptualHash) -> int:
    """Number of differing bits between two hashes."""
    return int(np.count_nonzero(a.bits != b.bits))


def _resize_area(gray: np.ndarray, size: int = 32) -> np.ndarray:
    im = Image.fromarray(gray.astype(np.float32), mode="F")
    return np.asarray(im.resize((size, size), Image.BOX), dtype=np.float64)


# row-major (row, col) indices of the 64 retained DCT coefficients
_COEF_INDEX = [(r, c) for r in range(8) for c in range(8) if (r, c) != (0, 0)] + [(8, 0)]
_COEF_ROWS = np.array([rc[0] for rc in _COEF_INDEX])
_COEF_COLS = np.array([rc[1] for rc in _COEF_INDEX])


def phash(image: np.ndarray) -> PerceptualHash:
    """Perceptual hash of a grayscale or color raster."""
    image = np.asarray(image)
    if image.size == 0:
        raise InvalidInputError("cannot hash an empty image")
    small = _resize_area(luminance(image))
    coefs = dctn(small, type=2)
    kept = coefs[_COEF_ROWS, _COEF_COLS]
    return PerceptualHash(bits=kept > np.median(kept))


@dataclass(frozen=True)
class DuplicatePair:
    duplicate_id: str
    kept_id: str
    reason: str  # "bytes" | "phash"
    distance: int


@dataclass
class DedupReport:
    kept: list
    duplicates: list
    errors: list

    def as_dict(self) -> dict:
        return {
            "kept": list(self.kept),
            "duplicates": [
                {
                    "id": d.duplicate_id,
                    "duplicate_of": d.kept_id,
                    "reason": d.reason,
                    "distance": d.distance,
                }
                for d in self.duplicates
            ],
            "errors": list(self.errors),
        }


def dedup(
    images: list[tuple[str, np.ndarray]],
    threshold: int = DEFAULT_THRESHOLD,
    raw_bytes: dict | None = None,
) -> DedupReport:
    """Greedy first-kept duplicate sweep in input order.

    An image is a duplicate if its raw bytes match a kept image exactly
    (when raw_bytes provides them) or its hash is within `threshold`
    Hamming distance of a kept image's hash.
    """
    if not 0 <= threshold <= HASH_BITS:
        raise InvalidInputError(f"threshold must be in [0, {HASH_BITS}]")
    raw_bytes = raw_bytes or {}
    kept: list[str] = []
    kept_hashes: list[PerceptualHash] = []
    byte_index: dict[bytes, str] = {}
    duplicates: list[DuplicatePair] = []
    errors: list[str] = []
    for image_id, raster in images:
        try:
            h = phash(raster)
        except Exception as e:  # unreadable/invalid entry: report, keep going
            errors.append(f"{image_id}: {e}")
            continue
        data = raw_bytes.get(image_id)
        if data is not None and data in byte_index:
            duplicates.append(DuplicatePair(image_id, byte_index[data], "bytes", 0))
            continue
        match = None
        for kid, kh in zip(kept, kept_hashes):
            d = hamming(h, kh)
            if d <= threshold:
                match = (kid, d)
                break
        if match is not None:
            duplicates.append(DuplicatePair(image_id, match[0], "phash", match[1]))
            continue
        kept.append(image_id)
        kept_hashes.append(h)
        if data is not None:
            byte_index[data] = image_id
    return DedupReport(kept=kept, duplicates=duplicates, errors=errors)
