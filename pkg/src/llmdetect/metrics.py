"""Exact, tie-aware ROC analysis.

ROC-AUC is computed from integer win/tie pair counts (positives ranked
above negatives score 1, exact score ties score 1/2), so the float result
is the correctly rounded value of an exact rational.  ``roc_auc_exact``
exposes that rational directly; rank-based identities that cannot survive
two independent float roundings hold exactly on it.  The curve places one
point per distinct score threshold (descending), so tied scores enter as a
single diagonal segment.

Decision rule everywhere: predicted positive iff score >= threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import MetricsError

REPORT_THRESHOLDS = [x / 10.0 for x in range(1, 10)]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def tpr(self) -> float:
        if self.tp + self.fn == 0:
            raise MetricsError("TPR undefined: no positive labels")
        return self.tp / (self.tp + self.fn)

    @property
    def fpr(self) -> float:
        if self.fp + self.tn == 0:
            raise MetricsError("FPR undefined: no negative labels")
        return self.fp / (self.fp + self.tn)


@dataclass(frozen=True)
class RocCurve:
    """(FPR, TPR) points from (0,0) to (1,1), one per distinct threshold.

    Integer cumulative counts are kept alongside the float coordinates so
    exact-rational area computation stays possible.
    """

    points: tuple[tuple[float, float], ...]
    thresholds: tuple[float, ...]
    tp_counts: tuple[int, ...]
    fp_counts: tuple[int, ...]
    n_pos: int
    n_neg: int


def _check_inputs(scores, labels) -> tuple[list[float], list[int]]:
    scores = [float(s) for s in scores]
    labels = [int(y) for y in labels]
    if len(scores) != len(labels):
        raise MetricsError(f"{len(scores)} scores but {len(labels)} labels")
    for y in labels:
        if y not in (0, 1):
            raise MetricsError(f"label {y!r} outside {{0, 1}}")
    return scores, labels


def _check_both_classes(labels: list[int]) -> tuple[int, int]:
    n_pos = sum(labels)
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricsError("both classes must be present")
    return n_pos, n_neg


def confusion_at(scores, labels, threshold: float) -> ConfusionCounts:
    """Confusion counts with the inclusive >= decision rule."""
    scores, labels = _check_inputs(scores, labels)
    tp = fp = tn = fn = 0
    for s, y in zip(scores, labels):
        predicted = s >= threshold
        if y == 1:
            tp, fn = (tp + 1, fn) if predicted else (tp, fn + 1)
        else:
            fp, tn = (fp + 1, tn) if predicted else (fp, tn + 1)
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def _tie_groups(scores: list[float], labels: list[int]):
    """Yield (score, n_pos, n_neg) per distinct score, descending."""
    order = sorted(range(len(scores)), key=lambda i: -scores[i])
    i = 0
    while i < len(order):
        j = i
        pos = neg = 0
        current = scores[order[i]]
        while j < len(order) and scores[order[j]] == current:
            pos += labels[order[j]]
            neg += 1 - labels[order[j]]
            j += 1
        yield current, pos, neg
        i = j


def roc_curve(scores, labels) -> RocCurve:
    """One point per distinct score threshold, descending, from (0,0)."""
    scores, labels = _check_inputs(scores, labels)
    n_pos, n_neg = _check_both_classes(labels)
    points = [(0.0, 0.0)]
    thresholds = [math.inf]
    tp_counts = [0]
    fp_counts = [0]
    tp = fp = 0
    for score, pos, neg in _tie_groups(scores, labels):
        tp += pos
        fp += neg
        points.append((fp / n_neg, tp / n_pos))
        thresholds.append(score)
        tp_counts.append(tp)
        fp_counts.append(fp)
    return RocCurve(points=tuple(points), thresholds=tuple(thresholds),
                    tp_counts=tuple(tp_counts), fp_counts=tuple(fp_counts),
                    n_pos=n_pos, n_neg=n_neg)


def _pair_counts(scores: list[float], labels: list[int]) -> tuple[int, int, int, int]:
    """(wins, ties, P, N): positive-over-negative pairs won / tied, exact."""
    n_pos = sum(labels)
    n_neg = len(labels) - n_pos
    wins = ties = 0
    neg_seen = 0
    for _, pos, neg in _tie_groups(scores, labels):
        ties += pos * neg
        wins += pos * (n_neg - neg_seen - neg)
        neg_seen += neg
    return wins, ties, n_pos, n_neg


def roc_auc_exact(scores, labels) -> Fraction:
    """AUC as an exact rational: (wins + ties/2) / (P*N)."""
    scores, labels = _check_inputs(scores, labels)
    _check_both_classes(labels)
    wins, ties, n_pos, n_neg = _pair_counts(scores, labels)
    return Fraction(2 * wins + ties, 2 * n_pos * n_neg)


def roc_auc(scores, labels) -> float:
    """Area under the ROC curve, the correctly rounded exact rational."""
    return float(roc_auc_exact(scores, labels))


def trapezoid_auc_exact(curve: RocCurve) -> Fraction:
    """Exact trapezoidal area under the curve, from its integer counts."""
    area = Fraction(0)
    for i in range(len(curve.points) - 1):
        d_fp = curve.fp_counts[i + 1] - curve.fp_counts[i]
        sum_tp = curve.tp_counts[i] + curve.tp_counts[i + 1]
        area += Fraction(d_fp * sum_tp, 2 * curve.n_pos * curve.n_neg)
    return area


def evaluation_report(scores, labels) -> dict:
    """AUC, curve points, and confusion tables at thresholds 0.1 .. 0.9."""
    scores, labels = _check_inputs(scores, labels)
    curve = roc_curve(scores, labels)
    confusion = []
    for threshold in REPORT_THRESHOLDS:
        c = confusion_at(scores, labels, threshold)
        confusion.append({"threshold": threshold, "tp": c.tp, "fp": c.fp,
                          "tn": c.tn, "fn": c.fn})
    curve_points = [
        {"threshold": thr if math.isfinite(thr) else None, "fpr": fpr, "tpr": tpr}
        for (fpr, tpr), thr in zip(curve.points, curve.thresholds)]
    return {
        "auc": roc_auc(scores, labels),
        "n_documents": len(scores),
        "n_positive": curve.n_pos,
        "n_negative": curve.n_neg,
        "curve": curve_points,
        "confusion": confusion,
    }
