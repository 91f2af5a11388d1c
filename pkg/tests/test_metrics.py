import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llmdetect.errors import MetricsError
from llmdetect.metrics import (confusion_at, evaluation_report, roc_auc,
                               roc_auc_exact, roc_curve, trapezoid_auc_exact)
from oracles import pairwise_auc_oracle


def random_instance(rng, n_max=200):
    n = rng.randint(2, n_max)
    labels = [rng.randint(0, 1) for _ in range(n)]
    if sum(labels) == 0:
        labels[0] = 1
    if sum(labels) == n:
        labels[0] = 0
    # draw from a coarse grid so ties are frequent
    grid = [i / 7 for i in range(8)]
    scores = [rng.choice(grid) if rng.random() < 0.6 else rng.random()
              for _ in range(n)]
    return scores, labels


class TestConfusion:
    def test_threshold_below_min_predicts_all_positive(self):
        c = confusion_at([0.2, 0.7, 0.9], [1, 0, 1], threshold=0.1)
        assert (c.tp, c.fp, c.tn, c.fn) == (2, 1, 0, 0)

    def test_threshold_above_max_predicts_all_negative(self):
        c = confusion_at([0.2, 0.7, 0.9], [1, 0, 1], threshold=0.95)
        assert (c.tp, c.fp, c.tn, c.fn) == (0, 0, 1, 2)

    def test_separable_pair(self):
        c = confusion_at([0.9, 0.1], [1, 0], threshold=0.5)
        assert (c.tp, c.fp, c.tn, c.fn) == (1, 0, 1, 0)

    def test_rule_is_inclusive(self):
        c = confusion_at([0.5], [1], threshold=0.5)
        assert c.tp == 1

    def test_length_mismatch(self):
        with pytest.raises(MetricsError):
            confusion_at([0.5], [1, 0], 0.5)


class TestCurve:
    def test_endpoints(self):
        curve = roc_curve([0.3, 0.9, 0.5], [0, 1, 1])
        assert curve.points[0] == (0.0, 0.0)
        assert curve.points[-1] == (1.0, 1.0)

    def test_perfect_separation_passes_through_corner(self):
        curve = roc_curve([0.9, 0.8, 0.1, 0.2], [1, 1, 0, 0])
        assert (0.0, 1.0) in curve.points

    def test_constant_scores_two_point_diagonal(self):
        curve = roc_curve([0.5, 0.5, 0.5], [1, 0, 1])
        assert curve.points == ((0.0, 0.0), (1.0, 1.0))

    def test_tie_segment_example(self):
        curve = roc_curve([0.8, 0.8, 0.3], [1, 0, 0])
        assert curve.points == ((0.0, 0.0), (0.5, 1.0), (1.0, 1.0))
        assert roc_auc([0.8, 0.8, 0.3], [1, 0, 0]) == 0.75

    def test_monotone_nondecreasing(self):
        rng = random.Random(5)
        for _ in range(50):
            scores, labels = random_instance(rng, n_max=60)
            curve = roc_curve(scores, labels)
            fprs = [p[0] for p in curve.points]
            tprs = [p[1] for p in curve.points]
            assert fprs == sorted(fprs) and tprs == sorted(tprs)

    def test_single_class_rejected(self):
        with pytest.raises(MetricsError):
            roc_curve([0.1, 0.9], [1, 1])


class TestAuc:
    def test_extremes(self):
        assert roc_auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0
        assert roc_auc([0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0]) == 0.0

    def test_all_equal_is_half(self):
        assert roc_auc([0.4] * 6, [1, 0, 1, 0, 1, 0]) == 0.5

    def test_matches_pairwise_oracle_exactly(self):
        rng = random.Random(99)
        for _ in range(300):
            scores, labels = random_instance(rng)
            exact = roc_auc_exact(scores, labels)
            oracle = pairwise_auc_oracle(scores, labels)
            assert exact == oracle
            assert roc_auc(scores, labels) == float(oracle)

    def test_trapezoid_equals_pairwise_exactly(self):
        rng = random.Random(7)
        for _ in range(200):
            scores, labels = random_instance(rng)
            curve = roc_curve(scores, labels)
            assert trapezoid_auc_exact(curve) == pairwise_auc_oracle(
                scores, labels)

    def test_monotone_invariance_exact(self):
        rng = random.Random(21)
        for _ in range(100):
            scores, labels = random_instance(rng, n_max=80)
            transformed = [math.exp(3.0 * s) - 0.5 for s in scores]
            assert roc_auc(transformed, labels) == roc_auc(scores, labels)

    def test_label_complement_exact(self):
        rng = random.Random(13)
        for _ in range(100):
            scores, labels = random_instance(rng, n_max=80)
            flipped = [1 - y for y in labels]
            assert roc_auc_exact(scores, flipped) == 1 - roc_auc_exact(
                scores, labels)

    def test_score_negation_exact(self):
        rng = random.Random(17)
        for _ in range(100):
            scores, labels = random_instance(rng, n_max=80)
            negated = [-s for s in scores]
            assert roc_auc_exact(negated, labels) == 1 - roc_auc_exact(
                scores, labels)

    @given(st.lists(st.tuples(st.floats(0, 1, allow_nan=False),
                              st.integers(0, 1)), min_size=4, max_size=60))
    @settings(max_examples=100, deadline=None)
    def test_bounds_property(self, pairs):
        scores = [s for s, _ in pairs]
        labels = [y for _, y in pairs]
        if len(set(labels)) < 2:
            labels[0] = 1 - labels[0]
        value = roc_auc(scores, labels)
        assert 0.0 <= value <= 1.0


class TestReport:
    def test_schema(self):
        report = evaluation_report([0.9, 0.2, 0.6, 0.4], [1, 0, 1, 0])
        assert set(report) == {"auc", "n_documents", "n_positive",
                               "n_negative", "curve", "confusion"}
        assert len(report["confusion"]) == 9
        assert report["confusion"][0]["threshold"] == 0.1
        assert report["curve"][0] == {"threshold": None, "fpr": 0.0, "tpr": 0.0}

    def test_constant_scores_report_half(self):
        report = evaluation_report([0.5, 0.5], [1, 0])
        assert report["auc"] == 0.5
