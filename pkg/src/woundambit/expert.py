"""Expert-assessment scoring: approval and choice rates, inter-rater
consistency filtering, and size-error statistics against expert-mean ground truth.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field

from .errors import InvalidInputError

RATINGS_SCHEMA = "ratings/1"


@dataclass
class RatingSet:
    """Complete expert annotations for one review session."""

    images: list
    raters: list
    variants: list
    verdicts: dict  # (image, rater, variant) -> "good" | "bad"
    best_choice: dict  # (image, rater) -> variant
    size_estimates: dict  # (image, rater) -> (height_mm, width_mm)

    def validate(self) -> None:
        for img in self.images:
            for rater in self.raters:
                for variant in self.variants:
                    if (img, rater, variant) not in self.verdicts:
                        raise InvalidInputError(f"missing verdict for {(img, rater, variant)}")
                best = self.best_choice.get((img, rater))
                if best not in self.variants:
                    raise InvalidInputError(f"best choice {best!r} for {(img, rater)} not a variant")
                h, w = self.size_estimates[(img, rater)]
                if h <= 0 or w <= 0:
                    raise InvalidInputError(f"non-positive size estimate for {(img, rater)}")


def load_ratings(path) -> RatingSet:
    with open(path) as f:
        data = json.load(f)
    if data.get("schema") != RATINGS_SCHEMA:
        raise InvalidInputError(f"expected schema {RATINGS_SCHEMA!r}, got {data.get('schema')!r}")
    verdicts, best, sizes = {}, {}, {}
    images = []
    for rec in data["records"]:
        img, rater = rec["image"], rec["rater"]
        if img not in images:
            images.append(img)
        for variant, verdict in rec["verdicts"].items():
            verdicts[(img, rater, variant)] = verdict
        best[(img, rater)] = rec["best"]
        sizes[(img, rater)] = (rec["height_mm"], rec["width_mm"])
    rs = RatingSet(
        images=images,
        raters=data["raters"],
        variants=data["variants"],
        verdicts=verdicts,
        best_choice=best,
        size_estimates=sizes,
    )
    rs.validate()
    return rs


def save_ratings(ratings: RatingSet, path) -> None:
    records = []
    for img in ratings.images:
        for rater in ratings.raters:
            records.append(
                {
                    "image": img,
                    "rater": rater,
                    "verdicts": {v: ratings.verdicts[(img, rater, v)] for v in ratings.variants},
                    "best": ratings.best_choice[(img, rater)],
                    "height_mm": ratings.size_estimates[(img, rater)][0],
                    "width_mm": ratings.size_estimates[(img, rater)][1],
                }
            )
    payload = {
        "schema": RATINGS_SCHEMA,
        "raters": ratings.raters,
        "variants": ratings.variants,
        "records": records,
    }
    with open(path, "w") as f:
        json.dump(payload, f, indent=2)


def cma(ratings: RatingSet, variant) -> float:
    """Clinical mask approval: percent of (image, rater) verdicts rating the variant good."""
    if variant not in ratings.variants:
        raise InvalidInputError(f"unknown variant {variant!r}")
    good = sum(
        ratings.verdicts[(img, rater, variant)] == "good"
        for img in ratings.images
        for rater in ratings.raters
    )
    return 100.0 * good / (len(ratings.raters) * len(ratings.images))


def ecr(ratings: RatingSet, variant) -> float:
    """Expert choice rate: percent of (image, rater) cases picking the variant as best."""
    if variant not in ratings.variants:
        raise InvalidInputError(f"unknown variant {variant!r}")
    chosen = sum(
        ratings.best_choice[(img, rater)] == variant
        for img in ratings.images
        for rater in ratings.raters
    )
    return 100.0 * chosen / (len(ratings.raters) * len(ratings.images))


def relative_deviation(estimates) -> float:
    """(max - min) / median of the raters' size estimates for one dimension."""
    estimates = list(estimates)
    if len(estimates) < 2:
        raise InvalidInputError("need at least two estimates")
    if any(e <= 0 for e in estimates):
        raise InvalidInputError("estimates must be positive")
    return (max(estimates) - min(estimates)) / statistics.median(estimates)


@dataclass(frozen=True)
class SizeGroundTruth:
    """Per-image expert-mean height/width in mm, over consistently rated images."""

    heights_mm: dict
    widths_mm: dict

    @property
    def images(self):
        return list(self.heights_mm)


def filter_consistent(ratings: RatingSet, threshold: float = 0.5) -> tuple[list, SizeGroundTruth]:
    """Drop images whose inter-rater size deviation exceeds the threshold in
    either dimension; ground truth is the rater mean over the kept images."""
    kept = []
    heights, widths = {}, {}
    for img in ratings.images:
        hs = [ratings.size_estimates[(img, r)][0] for r in ratings.raters]
        ws = [ratings.size_estimates[(img, r)][1] for r in ratings.raters]
        # a single rater cannot disagree with themselves: keep unconditionally
        one_rater = len(hs) < 2
        if one_rater or (relative_deviation(hs) <= threshold and relative_deviation(ws) <= threshold):
            kept.append(img)
            heights[img] = statistics.fmean(hs)
            widths[img] = statistics.fmean(ws)
    return kept, SizeGroundTruth(heights_mm=heights, widths_mm=widths)


@dataclass
class SizeErrorReport:
    mae_h: float
    mape_h: float
    mae_w: float
    mape_w: float
    mph: float
    mph_sd: float
    mpw: float
    mpw_sd: float
    n: int
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "mph": self.mph,
            "mph_sd": self.mph_sd,
            "mae_h": self.mae_h,
            "mape_h": self.mape_h,
            "mpw": self.mpw,
            "mpw_sd": self.mpw_sd,
            "mae_w": self.mae_w,
            "mape_w": self.mape_w,
            "warnings": self.warnings,
        }


def size_errors(pred: dict, gt: SizeGroundTruth) -> SizeErrorReport:
    """MAE/MAPE of predicted sizes vs expert-mean ground truth, plus the mean
    predicted height/width with sample standard deviation.

    pred maps image id -> (height_mm, width_mm). Images missing a prediction
    are dropped from the means with a warning.
    """
    warnings_ = []
    hs_pred, ws_pred, hs_gt, ws_gt = [], [], [], []
    for img in gt.images:
        if img not in pred:
            warnings_.append(f"no prediction for image {img!r}; dropped")
            continue
        h, w = pred[img]
        hs_pred.append(h)
        ws_pred.append(w)
        hs_gt.append(gt.heights_mm[img])
        ws_gt.append(gt.widths_mm[img])
    n = len(hs_pred)
    if n == 0:
        raise InvalidInputError("no images with both prediction and ground truth")

    def mae(p, g):
        return sum(abs(a - b) for a, b in zip(p, g)) / n

    def mape(p, g):
        return 100.0 * sum(abs(a - b) / b for a, b in zip(p, g)) / n

    sd = lambda xs: statistics.stdev(xs) if len(xs) > 1 else 0.0
    return SizeErrorReport(
        mae_h=mae(hs_pred, hs_gt),
        mape_h=mape(hs_pred, hs_gt),
        mae_w=mae(ws_pred, ws_gt),
        mape_w=mape(ws_pred, ws_gt),
        mph=statistics.fmean(hs_pred),
        mph_sd=sd(hs_pred),
        mpw=statistics.fmean(ws_pred),
        mpw_sd=sd(ws_pred),
        n=n,
        warnings=warnings_,
    )
