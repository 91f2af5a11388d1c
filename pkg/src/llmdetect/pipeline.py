"""End-to-end wiring: raw texts -> tokens -> TF-IDF -> classifier scores.

This is the layer the CLI and the ensemble runner share.  It owns the
vocabulary-hash handshake: a bundle records the SHA-256 of the tokenizer
file it was trained with and refuses to score tokens from any other.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .corpus import LabeledCorpus
from .errors import ModelError
from .features import (TfidfConfig, TfidfModel, encode_words, fit_tfidf,
                       fit_word_vocab, transform_corpus)
from .models import (KIND_GBDT, KIND_NAIVE_BAYES, KIND_SGD_LINEAR, ModelBundle,
                     save_model, train_gbdt, train_nb, train_sgd, vocab_hash)
from .tokenizer import BpeVocab, TokenSequence, encode

TOKEN_SOURCE_BPE = "bpe"
TOKEN_SOURCE_WHITESPACE = "whitespace"


def word_vocab_ref(word_vocab: list[str]) -> str:
    """Hash standing in for a tokenizer-file ref in whitespace mode."""
    canonical = json.dumps(word_vocab, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(canonical).hexdigest()


def check_vocab_ref(bundle: ModelBundle, vocab_bytes: bytes) -> None:
    actual = vocab_hash(vocab_bytes)
    if bundle.vocab_ref != actual:
        raise ModelError(
            f"vocabulary hash mismatch: bundle was trained with "
            f"{bundle.vocab_ref}, tokenizer file is {actual}")


def tokenize_texts(texts: list[str], tfidf: TfidfModel,
                   bpe_vocab: BpeVocab | None) -> list[TokenSequence]:
    """Tokenize with the scheme a fitted model was built on."""
    if tfidf.word_vocab is not None:
        return [encode_words(tfidf.word_vocab, t, model=tfidf) for t in texts]
    if bpe_vocab is None:
        raise ModelError("model was trained on BPE tokens; a tokenizer "
                         "vocabulary is required to score text")
    return [encode(bpe_vocab, t) for t in texts]


def train_bundle(kind: str, corpus: LabeledCorpus, *, tfidf_config: TfidfConfig,
                 token_source: str = TOKEN_SOURCE_BPE,
                 bpe_vocab: BpeVocab | None = None,
                 vocab_bytes: bytes | None = None,
                 nb_alpha: float = 1.0, sgd_config=None, gbdt_config=None,
                 seed: int | None = None,
                 config_hash: str | None = None) -> bytes:
    """Tokenize, fit TF-IDF, train one classifier, and emit its bundle."""
    texts = corpus.texts
    word_vocab = None
    if token_source == TOKEN_SOURCE_WHITESPACE:
        word_vocab = fit_word_vocab(texts)
        sequences = [encode_words(word_vocab, t) for t in texts]
        ref = word_vocab_ref(word_vocab)
    elif token_source == TOKEN_SOURCE_BPE:
        if bpe_vocab is None or vocab_bytes is None:
            raise ModelError("BPE token source requires a trained tokenizer "
                             "vocabulary (run tokenize-train first)")
        sequences = [encode(bpe_vocab, t) for t in texts]
        ref = vocab_hash(vocab_bytes)
    else:
        raise ModelError(f"unknown token source {token_source!r}")

    tfidf = fit_tfidf(sequences, tfidf_config)
    tfidf.word_vocab = word_vocab
    X = transform_corpus(tfidf, sequences)

    if kind == KIND_NAIVE_BAYES:
        model = train_nb(X, corpus.labels, alpha=nb_alpha)
    elif kind == KIND_SGD_LINEAR:
        model = train_sgd(X, corpus.labels, sgd_config)
    elif kind == KIND_GBDT:
        model = train_gbdt(X, corpus.labels, gbdt_config)
    else:
        raise ModelError(f"unknown model kind {kind!r}")
    return save_model(model, tfidf, ref, seed=seed, config_hash=config_hash)


def score_texts(bundle: ModelBundle, texts: list[str],
                bpe_vocab: BpeVocab | None,
                sequences: list[TokenSequence] | None = None,
                ) -> tuple[np.ndarray, list[TokenSequence]]:
    """Probability of class 1 per text; returns the token sequences too so
    callers scoring several same-vocabulary bundles can reuse them."""
    if sequences is None:
        sequences = tokenize_texts(texts, bundle.tfidf, bpe_vocab)
    X = transform_corpus(bundle.tfidf, sequences)
    return bundle.predict_proba(X), sequences
