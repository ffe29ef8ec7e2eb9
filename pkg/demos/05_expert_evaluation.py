"""Score two mask variants from a simulated expert review session.

Three raters judge every mask good/bad, pick the best variant per image, and
estimate wound sizes; the report shows approval rate (CMA), choice rate
(ECR), the consistency filter, and size errors against the rater-mean ground
truth.
"""

import random

from woundambit.expert import RatingSet, cma, ecr, filter_consistent, size_errors

random.seed(4)
images = [f"case{i:02d}" for i in range(10)]
raters = ["rater-a", "rater-b", "rater-c"]
variants = ["model-x", "model-y"]

verdicts, best, sizes = {}, {}, {}
true_h = {img: random.uniform(15, 60) for img in images}
for img in images:
    for rater in raters:
        # model-x is the stronger variant in this simulation
        verdicts[(img, rater, "model-x")] = "good" if random.random() < 0.9 else "bad"
        verdicts[(img, rater, "model-y")] = "good" if random.random() < 0.6 else "bad"
        best[(img, rater)] = "model-x" if random.random() < 0.75 else "model-y"
        spread = 3.0 if img != "case00" else 25.0  # one deliberately inconsistent case
        sizes[(img, rater)] = (true_h[img] + random.uniform(-spread, spread), 20.0)

ratings = RatingSet(images, raters, variants, verdicts, best, sizes)
for variant in variants:
    print(f"{variant}: CMA {cma(ratings, variant):5.1f}%  ECR {ecr(ratings, variant):5.1f}%")

kept, gt = filter_consistent(ratings, threshold=0.5)
print(f"consistent images: {len(kept)}/{len(images)} (dropped {sorted(set(images) - set(kept))})")

predictions = {img: (gt.heights_mm[img] + 2.0, gt.widths_mm[img] - 1.0) for img in kept}
report = size_errors(predictions, gt)
print(
    f"size errors vs rater mean: MAE H {report.mae_h:.1f} mm ({report.mape_h:.1f}%), "
    f"MAE W {report.mae_w:.1f} mm ({report.mape_w:.1f}%)"
)
