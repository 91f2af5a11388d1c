"""Walkthrough: the three classifiers on a synthetic detection task.

Trains multinomial naive Bayes, the SGD logistic-loss linear model, and
gradient-boosted trees (both growth variants) on the same TF-IDF features
and compares held-out ROC-AUC.

Run:  python demos/03_classifiers.py
"""

import time

from llmdetect import (GbdtConfig, SgdConfig, SplitSpec, TfidfConfig, encode,
                       fit_tfidf, roc_auc, split_corpus, synth_corpus,
                       train_bpe, train_gbdt, train_nb, train_sgd,
                       transform_corpus)

corpus = synth_corpus(n_per_class=300, seed=7, divergence=0.5)
train, test = split_corpus(corpus, SplitSpec(test_fraction=0.2, seed=7))
print(f"{len(train)} train / {len(test)} test documents, divergence 0.5")

vocab = train_bpe(train.texts, vocab_size=400)
tfidf = fit_tfidf([encode(vocab, t) for t in train.texts],
                  TfidfConfig(ngram_min=1, ngram_max=2, min_df=2))
X_train = transform_corpus(tfidf, [encode(vocab, t) for t in train.texts])
X_test = transform_corpus(tfidf, [encode(vocab, t) for t in test.texts])
print(f"features: {tfidf.n_features} n-grams\n")

trainers = {
    "naive bayes (alpha=1)":
        lambda: train_nb(X_train, train.labels, alpha=1.0),
    "sgd logistic (8 epochs)":
        lambda: train_sgd(X_train, train.labels,
                          SgdConfig(eta0=0.5, l2=1e-4, epochs=8, seed=7)),
    "gbdt leaf-wise (20 trees)":
        lambda: train_gbdt(X_train, train.labels,
                           GbdtConfig(n_trees=20, learning_rate=0.3,
                                      max_leaves=15, n_bins=16,
                                      min_data_in_leaf=10)),
    "gbdt symmetric (20 trees)":
        lambda: train_gbdt(X_train, train.labels,
                           GbdtConfig(variant="symmetric", n_trees=20,
                                      learning_rate=0.3, depth=5, n_bins=16,
                                      min_data_in_leaf=10)),
}

for name, fit in trainers.items():
    start = time.monotonic()
    model = fit()
    auc = roc_auc(model.predict_proba(X_test), test.labels)
    print(f"{name:28s} held-out AUC {auc:.4f}  "
          f"({time.monotonic() - start:.2f}s)")
