"""Three binary probabilistic classifiers behind one scoring contract.

Every trained model exposes ``predict_proba(X) -> per-row P(class 1)`` and
round-trips through a canonical JSON bundle that embeds the TF-IDF model
and references the tokenizer vocabulary by SHA-256 hash, so a bundle can
refuse to score tokens produced by the wrong vocabulary.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from ..errors import ModelError
from ..features import TfidfModel, tfidf_from_dict, tfidf_to_dict
from .common import sigmoid
from .gbdt import (GbdtConfig, GbdtModel, LeafwiseTree, SymmetricTree,
                   build_histograms, compute_bin_edges, find_best_split,
                   train_gbdt)
from .naive_bayes import NaiveBayesModel, train_nb
from .sgd import (SgdConfig, SgdLinearModel, objective, sample_gradient,
                  sample_loss, sgd_step, train_sgd)

BUNDLE_FORMAT_VERSION = 1

KIND_NAIVE_BAYES = "naive_bayes"
KIND_SGD_LINEAR = "sgd_linear"
KIND_GBDT = "gbdt"
MODEL_KINDS = (KIND_NAIVE_BAYES, KIND_SGD_LINEAR, KIND_GBDT)

__all__ = [
    "NaiveBayesModel", "train_nb",
    "SgdConfig", "SgdLinearModel", "train_sgd", "sgd_step",
    "sample_loss", "sample_gradient", "objective",
    "GbdtConfig", "GbdtModel", "train_gbdt",
    "build_histograms", "find_best_split", "compute_bin_edges",
    "LeafwiseTree", "SymmetricTree",
    "sigmoid", "ModelBundle", "save_model", "load_model",
    "model_kind", "predict_proba", "vocab_hash",
    "MODEL_KINDS", "KIND_NAIVE_BAYES", "KIND_SGD_LINEAR", "KIND_GBDT",
]


def model_kind(model) -> str:
    if isinstance(model, NaiveBayesModel):
        return KIND_NAIVE_BAYES
    if isinstance(model, SgdLinearModel):
        return KIND_SGD_LINEAR
    if isinstance(model, GbdtModel):
        return KIND_GBDT
    raise ModelError(f"unknown model type {type(model).__name__}")


def predict_proba(model, X) -> np.ndarray:
    """P(class 1) per row, for any trained classifier."""
    model_kind(model)  # reject foreign objects with a clear error
    return model.predict_proba(X)


def vocab_hash(vocab_bytes: bytes) -> str:
    """SHA-256 of a canonical vocabulary file, used as the bundle's ref."""
    return hashlib.sha256(vocab_bytes).hexdigest()


@dataclass
class ModelBundle:
    """A trained classifier plus everything needed to score raw text."""

    kind: str
    model: object
    tfidf: TfidfModel
    vocab_ref: str
    seed: int | None = None
    config_hash: str | None = None

    def predict_proba(self, X) -> np.ndarray:
        return self.model.predict_proba(X)


def _params_to_dict(model) -> dict:
    if isinstance(model, NaiveBayesModel):
        return {
            "alpha": model.alpha,
            "log_prior": model.log_prior.tolist(),
            "log_likelihood": model.log_likelihood.tolist(),
        }
    if isinstance(model, SgdLinearModel):
        cfg = model.config
        return {
            "theta": model.theta.tolist(),
            "config": {"eta0": cfg.eta0, "l2": cfg.l2,
                       "epochs": cfg.epochs, "seed": cfg.seed},
        }
    if isinstance(model, GbdtModel):
        cfg = model.config
        trees = []
        for tree in model.trees:
            if isinstance(tree, LeafwiseTree):
                trees.append({
                    "columns": tree.columns, "bins": tree.bins,
                    "thresholds": tree.thresholds, "left": tree.left,
                    "right": tree.right, "values": tree.values,
                })
            else:
                trees.append({
                    "columns": tree.columns, "bins": tree.bins,
                    "thresholds": tree.thresholds,
                    "leaf_values": tree.leaf_values,
                })
        return {
            "base_score": model.base_score,
            "n_features": model.n_features,
            "config": {
                "variant": cfg.variant, "n_trees": cfg.n_trees,
                "learning_rate": cfg.learning_rate,
                "max_leaves": cfg.max_leaves, "depth": cfg.depth,
                "n_bins": cfg.n_bins, "min_data_in_leaf": cfg.min_data_in_leaf,
                "lambda_l2": cfg.lambda_l2,
            },
            "trees": trees,
        }
    raise ModelError(f"unknown model type {type(model).__name__}")


def _params_from_dict(kind: str, params: dict):
    try:
        if kind == KIND_NAIVE_BAYES:
            return NaiveBayesModel(
                log_prior=np.array(params["log_prior"], dtype=np.float64),
                log_likelihood=np.array(params["log_likelihood"], dtype=np.float64),
                alpha=float(params["alpha"]))
        if kind == KIND_SGD_LINEAR:
            return SgdLinearModel(
                theta=np.array(params["theta"], dtype=np.float64),
                config=SgdConfig(**params["config"]))
        if kind == KIND_GBDT:
            config = GbdtConfig(**params["config"])
            trees = []
            for entry in params["trees"]:
                if "leaf_values" in entry:
                    trees.append(SymmetricTree(
                        columns=entry["columns"], bins=entry["bins"],
                        thresholds=entry["thresholds"],
                        leaf_values=entry["leaf_values"]))
                else:
                    trees.append(LeafwiseTree(
                        columns=entry["columns"], bins=entry["bins"],
                        thresholds=entry["thresholds"], left=entry["left"],
                        right=entry["right"], values=entry["values"]))
            return GbdtModel(base_score=float(params["base_score"]),
                             config=config,
                             n_features=int(params["n_features"]),
                             trees=trees)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed {kind} parameters: {exc}")
    raise ModelError(f"unknown model kind {kind!r}")


def save_model(model, tfidf: TfidfModel, vocab_ref: str,
               seed: int | None = None, config_hash: str | None = None) -> bytes:
    """Canonical bundle bytes; identical inputs give identical bytes."""
    payload = {
        "format_version": BUNDLE_FORMAT_VERSION,
        "kind": model_kind(model),
        "tfidf": tfidf_to_dict(tfidf),
        "vocab_ref": vocab_ref,
        "parameters": _params_to_dict(model),
        "training": {"seed": seed, "config_hash": config_hash},
    }
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) +
            "\n").encode("utf-8")


def load_model(data: bytes, expected_kind: str | None = None) -> ModelBundle:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelError(f"model bundle is not valid JSON: {exc}")
    if not isinstance(payload, dict):
        raise ModelError("model bundle: top level must be an object")
    version = payload.get("format_version")
    if version != BUNDLE_FORMAT_VERSION:
        raise ModelError(f"field format_version: expected "
                         f"{BUNDLE_FORMAT_VERSION}, got {version!r}")
    kind = payload.get("kind")
    if kind not in MODEL_KINDS:
        raise ModelError(f"field kind: expected one of {MODEL_KINDS}, "
                         f"got {kind!r}")
    if expected_kind is not None and kind != expected_kind:
        raise ModelError(f"bundle holds a {kind} model, expected {expected_kind}")
    for required in ("tfidf", "vocab_ref", "parameters"):
        if required not in payload:
            raise ModelError(f"field {required}: missing from bundle")
    training = payload.get("training") or {}
    return ModelBundle(
        kind=kind,
        model=_params_from_dict(kind, payload["parameters"]),
        tfidf=tfidf_from_dict(payload["tfidf"]),
        vocab_ref=payload["vocab_ref"],
        seed=training.get("seed"),
        config_hash=training.get("config_hash"))
