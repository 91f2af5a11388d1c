"""Walkthrough: exact tie-aware ROC analysis.

Run:  python demos/05_roc_analysis.py
"""

from fractions import Fraction

from llmdetect import (confusion_at, roc_auc, roc_auc_exact, roc_curve,
                       trapezoid_auc_exact)

scores = [0.9, 0.8, 0.8, 0.8, 0.6, 0.4, 0.4, 0.1]
labels = [1,   1,   0,   1,   0,   1,   0,   0]

# confusion counts at a threshold (score >= threshold is positive)
c = confusion_at(scores, labels, threshold=0.5)
print(f"threshold 0.5: tp={c.tp} fp={c.fp} tn={c.tn} fn={c.fn} "
      f"tpr={c.tpr:.3f} fpr={c.fpr:.3f}")

# the curve has one point per distinct score; tied scores form a single
# diagonal segment instead of an arbitrary staircase
curve = roc_curve(scores, labels)
print("\nROC points (threshold, fpr, tpr):")
for (fpr, tpr), thr in zip(curve.points, curve.thresholds):
    print(f"    {thr:>6}: ({fpr:.3f}, {tpr:.3f})")

# AUC is computed from exact integer pair counts: a positive-negative pair
# contributes 1 if ranked correctly, 1/2 if tied, 0 otherwise
exact = roc_auc_exact(scores, labels)
print(f"\nexact AUC = {exact} = {float(exact)}")
print(f"float API agrees: {roc_auc(scores, labels)}")

# trapezoidal area under the curve equals the pair count, exactly
area = trapezoid_auc_exact(curve)
assert area == exact
print(f"trapezoid area (exact rational): {area}")

# rank identities hold exactly in rational arithmetic
flipped = [1 - y for y in labels]
assert roc_auc_exact(scores, flipped) == 1 - exact
print(f"label complement: {roc_auc_exact(scores, flipped)} == 1 - {exact}")

# all scores equal -> every pair ties -> exactly 1/2 ("guesswork level")
assert roc_auc_exact([0.5] * 8, labels) == Fraction(1, 2)
print("constant scores give AUC exactly 1/2")
