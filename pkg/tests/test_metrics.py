import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from woundambit.errors import InvalidInputError
from woundambit.metrics import ConfusionCounts, accumulate, finalize, majority_vote


def brute_force_counts(pred, gt):
    tp = fp = fn = tn = 0
    for y in range(pred.shape[0]):
        for x in range(pred.shape[1]):
            if pred[y, x] and gt[y, x]:
                tp += 1
            elif pred[y, x]:
                fp += 1
            elif gt[y, x]:
                fn += 1
            else:
                tn += 1
    return tp, fp, fn, tn


class TestAccumulate:
    def test_identity(self):
        acc = accumulate(np.ones((4, 4), bool), np.ones((4, 4), bool))
        assert (acc.tp, acc.fp, acc.fn, acc.tn) == (16, 0, 0, 0)

    def test_total_miss(self):
        acc = accumulate(np.ones((4, 4), bool), np.zeros((4, 4), bool))
        assert (acc.tp, acc.fp, acc.fn, acc.tn) == (0, 16, 0, 0)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            accumulate(np.ones((4, 4), bool), np.ones((4, 5), bool))

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_pixel_loop_oracle(self, seed):
        gen = np.random.default_rng(seed)
        pred = gen.random((8, 8)) > 0.5
        gt = gen.random((8, 8)) > 0.5
        acc = accumulate(pred, gt)
        assert (acc.tp, acc.fp, acc.fn, acc.tn) == brute_force_counts(pred, gt)
        assert acc.total == 64

    def test_accumulation_is_additive(self, rng):
        a_pred, a_gt = rng.random((8, 8)) > 0.5, rng.random((8, 8)) > 0.5
        b_pred, b_gt = rng.random((4, 4)) > 0.5, rng.random((4, 4)) > 0.5
        merged = accumulate(b_pred, b_gt, accumulate(a_pred, a_gt))
        separate = accumulate(a_pred, a_gt).merge(accumulate(b_pred, b_gt))
        assert merged == separate


class TestFinalize:
    def test_perfect(self):
        r = finalize(ConfusionCounts(tp=16))
        assert (r.miou, r.mdsc, r.mprc, r.mrec) == (1.0, 1.0, 1.0, 1.0)
        assert not r.degenerate

    def test_simple_fractions(self):
        r = finalize(ConfusionCounts(tp=1, fp=1, fn=1))
        assert r.miou == pytest.approx(1 / 3)
        assert r.mdsc == pytest.approx(1 / 2)
        assert r.mprc == pytest.approx(1 / 2)
        assert r.mrec == pytest.approx(1 / 2)

    def test_all_zero_counts_degenerate(self):
        r = finalize(ConfusionCounts())
        assert (r.miou, r.mdsc, r.mprc, r.mrec) == (1.0, 1.0, 1.0, 1.0)
        assert set(r.degenerate) == {"miou", "mdsc", "mprc", "mrec"}

    def test_dsc_iou_relation(self, rng):
        for _ in range(50):
            acc = ConfusionCounts(*(int(v) for v in rng.integers(0, 50, 4)))
            r = finalize(acc)
            if "miou" not in r.degenerate:
                assert r.mdsc == pytest.approx(2 * r.miou / (1 + r.miou))
                assert r.mdsc >= r.miou

    def test_swap_pred_gt_swaps_prc_rec(self, rng):
        pred, gt = rng.random((9, 9)) > 0.5, rng.random((9, 9)) > 0.5
        fwd = finalize(accumulate(pred, gt))
        rev = finalize(accumulate(gt, pred))
        assert fwd.mprc == pytest.approx(rev.mrec)
        assert fwd.mrec == pytest.approx(rev.mprc)
        assert fwd.miou == pytest.approx(rev.miou)
        assert fwd.mdsc == pytest.approx(rev.mdsc)

    def test_micro_differs_from_macro(self):
        # a large easy image and a small hard one: pooling pixel counts must
        # not equal the mean of per-image IoUs
        pred_a = np.ones((20, 20), bool)
        gt_a = np.ones((20, 20), bool)
        pred_b = np.zeros((2, 2), bool)
        pred_b[0, 0] = True
        gt_b = np.ones((2, 2), bool)
        micro = finalize(accumulate(pred_b, gt_b, accumulate(pred_a, gt_a))).miou
        iou_a = finalize(accumulate(pred_a, gt_a)).miou
        iou_b = finalize(accumulate(pred_b, gt_b)).miou
        macro = (iou_a + iou_b) / 2
        expected_micro = (400 + 1) / (400 + 4)
        assert micro == pytest.approx(expected_micro)
        assert abs(micro - macro) > 0.05


class TestMajorityVote:
    def test_three_of_five(self):
        masks = [np.array([[v]], dtype=bool) for v in (1, 1, 1, 0, 0)]
        assert majority_vote(masks)[0, 0]

    def test_two_of_five(self):
        masks = [np.array([[v]], dtype=bool) for v in (1, 1, 0, 0, 0)]
        assert not majority_vote(masks)[0, 0]

    def test_k1_identity(self, rng):
        m = rng.random((6, 6)) > 0.5
        assert np.array_equal(majority_vote([m]), m)

    def test_even_k_tie_is_background_with_warning(self):
        masks = [np.ones((2, 2), bool), np.zeros((2, 2), bool)]
        with pytest.warns(UserWarning):
            assert not majority_vote(masks).any()

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            majority_vote([np.ones((2, 2), bool), np.ones((3, 3), bool)])

    @pytest.mark.parametrize("k", [1, 3, 5])
    def test_exhaustive_truth_table(self, k):
        # every vote combination as a K-deep stack of 1x(2^k) masks
        combos = [[(i >> j) & 1 for j in range(k)] for i in range(2**k)]
        masks = [np.array([[c[j] for c in combos]], dtype=bool) for j in range(k)]
        out = majority_vote(masks)
        for i, c in enumerate(combos):
            assert out[0, i] == (sum(c) > k / 2)

    @pytest.mark.filterwarnings("ignore:majority vote over even")
    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(1, 7))
    def test_permutation_invariance(self, seed, k):
        gen = np.random.default_rng(seed)
        masks = [gen.random((5, 5)) > 0.5 for _ in range(k)]
        base = majority_vote(masks)
        perm = [masks[i] for i in gen.permutation(k)]
        assert np.array_equal(majority_vote(perm), base)

    @pytest.mark.filterwarnings("ignore:majority vote over even")
    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(1, 7))
    def test_monotone_in_votes(self, seed, k):
        gen = np.random.default_rng(seed)
        masks = [gen.random((5, 5)) > 0.5 for _ in range(k)]
        base = majority_vote(masks)
        boosted = majority_vote(masks + [np.ones((5, 5), bool)])
        assert (boosted | ~base).all()  # no foreground pixel turned background
