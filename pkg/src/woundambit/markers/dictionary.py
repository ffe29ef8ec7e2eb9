"""Square-fiducial code books.

An entry is a grid_size x grid_size bool matrix (True = black module). The
built-in book has 8 entries on a 4x4 grid, generated so that any two codes,
under every combination of 90-degree rotations, differ in at least 5 bits;
the same margin applies between a code and its own rotations, which is what
makes the decoded rotation unambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import InvalidInputError


@dataclass(frozen=True)
class MarkerDictionary:
    grid_size: int
    entries: dict  # id -> (grid_size, grid_size) bool array, True = black
    min_hamming: int

    def __post_init__(self):
        if self.min_hamming < 1:
            raise InvalidInputError("min_hamming must be >= 1")
        for mid, bits in self.entries.items():
            if bits.shape != (self.grid_size, self.grid_size):
                raise InvalidInputError(f"entry {mid} has wrong shape {bits.shape}")
        if pairwise_min_distance(list(self.entries.values())) < self.min_hamming:
            raise InvalidInputError("entries violate the declared minimum Hamming distance")

    def __len__(self):
        return len(self.entries)


def _rotations(bits: np.ndarray):
    return [np.rot90(bits, k) for k in range(4)]


def rotated_distance(a: np.ndarray, b: np.ndarray) -> int:
    """Minimum Hamming distance between a and every 90-degree rotation of b."""
    return min(int(np.count_nonzero(a != rb)) for rb in _rotations(b))


def _self_distance(bits: np.ndarray) -> int:
    return min(int(np.count_nonzero(bits != np.rot90(bits, k))) for k in (1, 2, 3))


def pairwise_min_distance(entries: list[np.ndarray]) -> int:
    """Smallest rotated Hamming distance over all entry pairs and self-rotations."""
    best = min((_self_distance(e) for e in entries), default=64)
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            best = min(best, rotated_distance(entries[i], entries[j]))
    return best


def generate_dictionary(
    n_entries: int = 8, grid_size: int = 4, min_hamming: int = 5, seed: int = 7
) -> MarkerDictionary:
    """Greedy code-book search over a seeded shuffle of all bit patterns.

    A candidate is accepted when its rotated Hamming distance to every
    accepted code (and to its own rotations) is at least min_hamming.
    """
    n_bits = grid_size * grid_size
    rng = np.random.default_rng(seed)
    order = rng.permutation(1 << n_bits)
    accepted: list[np.ndarray] = []
    for code in order:
        bits = (code >> np.arange(n_bits)[::-1] & 1).astype(bool).reshape(grid_size, grid_size)
        if _self_distance(bits) < min_hamming:
            continue
        if any(rotated_distance(bits, a) < min_hamming for a in accepted):
            continue
        accepted.append(bits)
        if len(accepted) == n_entries:
            break
    if len(accepted) < n_entries:
        raise ValueError(
            f"only found {len(accepted)} codes with distance >= {min_hamming}; "
            "relax the constraints"
        )
    return MarkerDictionary(
        grid_size=grid_size,
        entries={i: accepted[i] for i in range(n_entries)},
        min_hamming=min_hamming,
    )


@lru_cache(maxsize=1)
def builtin_dictionary() -> MarkerDictionary:
    """The default 8-entry 4x4 code book; reference sheets use ids 0-3."""
    return generate_dictionary()
