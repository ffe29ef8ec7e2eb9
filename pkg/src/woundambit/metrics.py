"""Micro-averaged segmentation metrics and pixel-wise majority voting.

Pixel counts are pooled across all evaluated images before any ratio is
computed, so the reported values are micro-averages, not means of per-image
scores. Foreground (wound) is the positive class.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError


@dataclass
class ConfusionCounts:
    """Pooled pixel-level confusion counts."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def merge(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn
        )


@dataclass(frozen=True)
class MetricReport:
    """Micro-averaged IoU, Dice, precision and recall, as ratios in [0, 1]."""

    miou: float
    mdsc: float
    mprc: float
    mrec: float
    degenerate: list = field(default_factory=list)

    def as_dict(self) -> dict:
        d = {
            "miou": self.miou,
            "mdsc": self.mdsc,
            "mprc": self.mprc,
            "mrec": self.mrec,
        }
        if self.degenerate:
            d["degenerate"] = list(self.degenerate)
        return d

    def format_row(self) -> str:
        """One-line percent table with one decimal, e.g. 'mIoU 79.8 | mDSC 88.7 | ...'."""
        return (
            f"mIoU {100 * self.miou:.1f} | mDSC {100 * self.mdsc:.1f} | "
            f"mPrc {100 * self.mprc:.1f} | mRec {100 * self.mrec:.1f}"
        )


def accumulate(pred: np.ndarray, gt: np.ndarray, acc: ConfusionCounts | None = None) -> ConfusionCounts:
    """Add one prediction/ground-truth pair's pixel counts into the accumulator."""
    if acc is None:
        acc = ConfusionCounts()
    pred = np.asarray(pred, dtype=bool)
    gt = np.asarray(gt, dtype=bool)
    if pred.shape != gt.shape:
        raise InvalidInputError(f"shape mismatch: pred {pred.shape} vs gt {gt.shape}")
    acc.tp += int(np.count_nonzero(pred & gt))
    acc.fp += int(np.count_nonzero(pred & ~gt))
    acc.fn += int(np.count_nonzero(~pred & gt))
    acc.tn += int(np.count_nonzero(~pred & ~gt))
    return acc


def _ratio(num: int, den: int, name: str, degenerate: list) -> float:
    # 0/0 means perfect agreement on an all-background set; define as 1.0
    if den == 0:
        degenerate.append(name)
        return 1.0
    return num / den


def finalize(acc: ConfusionCounts) -> MetricReport:
    """Compute the four metrics from pooled counts."""
    degenerate: list = []
    return MetricReport(
        miou=_ratio(acc.tp, acc.tp + acc.fp + acc.fn, "miou", degenerate),
        mdsc=_ratio(2 * acc.tp, 2 * acc.tp + acc.fp + acc.fn, "mdsc", degenerate),
        mprc=_ratio(acc.tp, acc.tp + acc.fp, "mprc", degenerate),
        mrec=_ratio(acc.tp, acc.tp + acc.fn, "mrec", degenerate),
        degenerate=degenerate,
    )


def majority_vote(masks: list[np.ndarray]) -> np.ndarray:
    """Pixel-wise strict majority over K masks (ties at even K vote background)."""
    if not masks:
        raise InvalidInputError("majority_vote needs at least one mask")
    shape = np.asarray(masks[0]).shape
    for m in masks[1:]:
        if np.asarray(m).shape != shape:
            raise InvalidInputError("all masks must share dimensions")
    k = len(masks)
    if k % 2 == 0:
        warnings.warn(f"majority vote over even K={k}: ties resolve to background", stacklevel=2)
    votes = np.zeros(shape, dtype=np.int64)
    for m in masks:
        votes += np.asarray(m, dtype=bool)
    return votes * 2 > k
