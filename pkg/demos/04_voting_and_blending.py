"""Walkthrough: weighted soft voting, rank averaging, and blending in
externally produced scores (e.g. from transformer models run elsewhere).

Run:  python demos/04_voting_and_blending.py
"""

import numpy as np

from llmdetect import (rank_average, roc_auc, soft_vote, synth_corpus,
                       tune_weights)
from llmdetect.ensemble import parse_external_scores

rng = np.random.default_rng(3)
labels = [1] * 40 + [0] * 40

# three voters of different quality: scores correlate with the label to
# different degrees
signal = np.array(labels, dtype=float)
voters = {
    "strong": 0.7 * signal + 0.3 * rng.random(80),
    "medium": 0.4 * signal + 0.6 * rng.random(80),
    "noisy":  0.1 * signal + 0.9 * rng.random(80),
}
for name, scores in voters.items():
    print(f"{name:7s} voter AUC {roc_auc(scores, labels):.4f}")

score_lists = [list(v) for v in voters.values()]
uniform = soft_vote(score_lists, [1.0, 1.0, 1.0])
print(f"\nuniform soft vote        AUC {roc_auc(uniform, labels):.4f}")

ranked = rank_average(score_lists, [1.0, 1.0, 1.0])
print(f"uniform rank average     AUC {roc_auc(ranked, labels):.4f}")

# grid-search weights on the simplex (step 0.1, here as validation labels)
weights, tuned_auc = tune_weights(score_lists, labels, step=0.1)
print(f"tuned weights {tuple(round(w, 2) for w in weights)}  "
      f"AUC {tuned_auc:.4f}")

# external voters arrive as id,score CSV; ids keep alignment honest
corpus = synth_corpus(5, seed=1, divergence=0.5)
csv_text = "id,score\n" + "".join(
    f"{doc_id},{0.9 if y else 0.1}\n"
    for doc_id, y in zip(corpus.ids, corpus.labels))
external = parse_external_scores(csv_text)
aligned = external.aligned(corpus.ids)
print(f"\nexternal file parsed: {len(external.scores)} scores, "
      f"aligned AUC {roc_auc(aligned, corpus.labels):.1f}")

# blending: external voter at weight 3 against an internal one at weight 1
internal = [0.45 if y else 0.55 for y in corpus.labels]  # weak, inverted
blend = soft_vote([list(aligned), internal], [3.0, 1.0])
print(f"weak internal AUC {roc_auc(internal, corpus.labels):.2f} -> "
      f"blended AUC {roc_auc(blend, corpus.labels):.2f}")
