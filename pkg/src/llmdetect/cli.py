"""Command-line surface wiring the pipeline end to end.

Subcommands: tokenize-train, train, predict, evaluate, ensemble, synth.
Logs go to standard error; data artifacts go to files.  Every command is
deterministic given (inputs, config, seed): re-running produces
byte-identical artifacts.  Failures exit non-zero with a single
machine-greppable ``llmdetect: error[<code>]: ...`` line.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import ensemble as ens
from .config import RunConfig, load_run_config
from .corpus import SplitSpec, load_corpus, save_corpus, split_corpus, synth_corpus
from .errors import ConfigError, EnsembleError, LlmdetectError, ModelError
from .metrics import evaluation_report
from .models import MODEL_KINDS, load_model
from .pipeline import (TOKEN_SOURCE_BPE, check_vocab_ref, score_texts,
                       train_bundle)
from .tokenizer import load_vocab, save_vocab, train_bpe

ENSEMBLE_SPEC_VERSION = 1


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _resolve_format(path, explicit: str | None) -> str:
    if explicit:
        return explicit
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    return "jsonl"


def _load_corpus_arg(path, explicit_format: str | None):
    return load_corpus(path, _resolve_format(path, explicit_format))


def _read_bytes(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except FileNotFoundError:
        raise LlmdetectError(f"no such file: {path}")


def _config_for(args) -> RunConfig:
    config = load_run_config(getattr(args, "config", None))
    if getattr(args, "seed", None) is not None:
        config = config.with_seed(args.seed)
    return config


def _load_bpe_vocab(path):
    data = _read_bytes(path)
    return load_vocab(data), data


def cmd_tokenize_train(args) -> int:
    config = _config_for(args)
    vocab_size = args.vocab_size or config.get("tokenizer", "vocab_size")
    corpus = _load_corpus_arg(args.corpus, args.format)
    vocab = train_bpe(corpus.texts, vocab_size=vocab_size)
    Path(args.out).write_bytes(save_vocab(vocab))
    _log(f"trained {len(vocab.merges)} merges; vocabulary size {vocab.size}")
    return 0


def cmd_train(args) -> int:
    config = _config_for(args)
    corpus = _load_corpus_arg(args.corpus, args.format)

    if args.holdout_fraction:
        spec = SplitSpec(test_fraction=args.holdout_fraction, seed=config.seed)
        corpus, holdout = split_corpus(corpus, spec)
        if args.holdout_out:
            save_corpus(holdout, args.holdout_out,
                        _resolve_format(args.holdout_out, None))
            _log(f"wrote {len(holdout)} held-out documents to {args.holdout_out}")

    token_source = config.get("features", "token_source")
    bpe_vocab = vocab_bytes = None
    if token_source == TOKEN_SOURCE_BPE:
        vocab_path = args.vocab or config.get("tokenizer", "vocab_path")
        if not vocab_path:
            raise ConfigError("tokenizer.vocab_path is empty; train a "
                              "vocabulary with tokenize-train and point the "
                              "config (or --vocab) at it")
        bpe_vocab, vocab_bytes = _load_bpe_vocab(vocab_path)

    bundle_bytes = train_bundle(
        args.kind, corpus,
        tfidf_config=config.tfidf_config(),
        token_source=token_source,
        bpe_vocab=bpe_vocab, vocab_bytes=vocab_bytes,
        nb_alpha=config.get("naive_bayes", "alpha"),
        sgd_config=config.sgd_config(),
        gbdt_config=config.gbdt_config(),
        seed=config.seed, config_hash=config.hash())
    Path(args.out).write_bytes(bundle_bytes)
    _log(f"trained {args.kind} on {len(corpus)} documents -> {args.out}")
    return 0


def _load_ensemble_spec(path) -> ens.EnsembleSpec:
    data = _read_bytes(path)
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise EnsembleError(f"{path}: not valid JSON: {exc}")
    if not isinstance(payload, dict) or "voters" not in payload:
        raise EnsembleError(f"{path}: ensemble spec needs a voters array")
    if payload.get("format_version") != ENSEMBLE_SPEC_VERSION:
        raise EnsembleError(f"{path}: field format_version: expected "
                            f"{ENSEMBLE_SPEC_VERSION}, "
                            f"got {payload.get('format_version')!r}")
    base = Path(path).parent
    voters = []
    for i, entry in enumerate(payload["voters"]):
        if not isinstance(entry, dict) or "weight" not in entry:
            raise EnsembleError(f"{path}: voters[{i}] needs a weight")
        weight = float(entry["weight"])
        if "model" in entry:
            bundle = load_model(_read_bytes(base / entry["model"]))
            voters.append(ens.Voter(weight=weight, bundle=bundle,
                                    name=str(entry["model"])))
        elif "scores" in entry:
            scores = ens.load_external_scores(base / entry["scores"])
            voters.append(ens.Voter(weight=weight, external=scores,
                                    name=str(entry["scores"])))
        else:
            raise EnsembleError(f"{path}: voters[{i}] needs a model or "
                                f"scores path")
    combine = payload.get("combine", ens.COMBINE_PROBABILITY_MEAN)
    return ens.EnsembleSpec(voters=voters, combine=combine)


def _spec_from_config(config) -> ens.EnsembleSpec:
    raw_voters = config.get("ensemble", "voters")
    if not raw_voters.strip():
        raise ConfigError("no ensemble spec given and ensemble.voters is empty")
    paths = [p.strip() for p in raw_voters.split(",") if p.strip()]
    raw_weights = config.get("ensemble", "weights").strip()
    if raw_weights:
        weights = [float(w) for w in raw_weights.split(",")]
        if len(weights) != len(paths):
            raise ConfigError(f"{len(paths)} ensemble.voters but "
                              f"{len(weights)} ensemble.weights")
    else:
        weights = [1.0] * len(paths)
    voters = []
    for p, w in zip(paths, weights):
        if p.endswith(".csv"):
            voters.append(ens.Voter(weight=w,
                                    external=ens.load_external_scores(p), name=p))
        else:
            voters.append(ens.Voter(weight=w, bundle=load_model(_read_bytes(p)),
                                    name=p))
    return ens.EnsembleSpec(voters=voters,
                            combine=config.get("ensemble", "combine"))


def _vocab_for_spec(spec: ens.EnsembleSpec, vocab_path):
    """Load and hash-check the tokenizer file against the spec's bundles."""
    if not vocab_path:
        return None
    bpe_vocab, vocab_bytes = _load_bpe_vocab(vocab_path)
    for voter in spec.voters:
        if voter.bundle is not None and voter.bundle.tfidf.word_vocab is None:
            check_vocab_ref(voter.bundle, vocab_bytes)
    return bpe_vocab


def cmd_predict(args) -> int:
    data = _read_bytes(args.model)
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelError(f"{args.model}: not valid JSON: {exc}")
    corpus = _load_corpus_arg(args.corpus, args.format)

    if isinstance(payload, dict) and "voters" in payload:
        spec = _load_ensemble_spec(args.model)
        bpe_vocab = _vocab_for_spec(spec, args.vocab)
        scores = ens.run_ensemble(spec, corpus, bpe_vocab)
    else:
        bundle = load_model(data)
        bpe_vocab = None
        if bundle.tfidf.word_vocab is None:
            if not args.vocab:
                raise ModelError("bundle was trained on BPE tokens; pass the "
                                 "tokenizer file with --vocab")
            bpe_vocab, vocab_bytes = _load_bpe_vocab(args.vocab)
            check_vocab_ref(bundle, vocab_bytes)
        scores, _ = score_texts(bundle, corpus.texts, bpe_vocab)

    Path(args.out).write_bytes(
        ens.dump_scores(corpus.ids, scores).encode("utf-8"))
    _log(f"scored {len(corpus)} documents -> {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    scores_by_id = ens.load_external_scores(args.scores)
    corpus = _load_corpus_arg(args.corpus, args.format)
    aligned = scores_by_id.aligned(corpus.ids)
    report = evaluation_report(aligned, corpus.labels)

    print(f"documents: {report['n_documents']} "
          f"({report['n_positive']} positive, {report['n_negative']} negative)")
    print(f"roc_auc: {report['auc']!r}")
    print("confusion at thresholds (score >= threshold is positive):")
    print("  threshold      tp      fp      tn      fn")
    for row in report["confusion"]:
        print(f"  {row['threshold']:9.1f} {row['tp']:7d} {row['fp']:7d} "
              f"{row['tn']:7d} {row['fn']:7d}")
    print(f"curve points: {len(report['curve'])}")
    if args.json:
        payload = (json.dumps(report, sort_keys=True, separators=(",", ":"))
                   + "\n").encode("utf-8")
        Path(args.json).write_bytes(payload)
        _log(f"wrote structured report to {args.json}")
    return 0


def cmd_ensemble(args) -> int:
    config = _config_for(args)
    if args.spec:
        spec = _load_ensemble_spec(args.spec)
    else:
        spec = _spec_from_config(config)
    corpus = _load_corpus_arg(args.corpus, args.format)
    bpe_vocab = _vocab_for_spec(spec, args.vocab)

    if args.tune_weights:
        per_voter = ens.collect_voter_scores(spec, corpus, bpe_vocab)
        step = config.get("ensemble", "grid_step")
        weights, auc = ens.tune_weights(per_voter, corpus.labels,
                                        combine=spec.combine, step=step)
        _log(f"tuned weights {list(weights)} (validation auc {auc!r})")
        for voter, w in zip(spec.voters, weights):
            voter.weight = w
        combiner = (ens.soft_vote if spec.combine == ens.COMBINE_PROBABILITY_MEAN
                    else ens.rank_average)
        scores = combiner(per_voter, list(weights))
    else:
        scores = ens.run_ensemble(spec, corpus, bpe_vocab)

    Path(args.out).write_bytes(
        ens.dump_scores(corpus.ids, scores).encode("utf-8"))
    _log(f"combined {len(spec.voters)} voters over {len(corpus)} documents "
         f"-> {args.out}")
    return 0


def cmd_synth(args) -> int:
    config = _config_for(args)
    seed = args.seed if args.seed is not None else config.seed
    corpus = synth_corpus(args.n_per_class, seed=seed, divergence=args.divergence)
    save_corpus(corpus, args.out, args.format or "jsonl")
    _log(f"wrote {len(corpus)} synthetic documents to {args.out}")
    return 0


def _add_common(parser, with_config=True):
    if with_config:
        parser.add_argument("--config", help="run config (INI) path")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--threads", type=int, default=0,
                        help="worker threads (results are identical for any "
                             "value; 0 = machine parallelism)")
    parser.add_argument("--format", choices=["csv", "jsonl"],
                        help="corpus format (default: inferred from suffix)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="llmdetect",
        description="Detect machine-generated text with BPE + TF-IDF + "
                    "classical classifiers + soft voting, scored by ROC-AUC.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokenize-train",
                       help="train a BPE vocabulary from a corpus")
    p.add_argument("corpus")
    p.add_argument("--out", required=True, help="vocabulary file to write")
    p.add_argument("--vocab-size", type=int,
                   help="override tokenizer.vocab_size")
    _add_common(p)
    p.set_defaults(func=cmd_tokenize_train)

    p = sub.add_parser("train", help="train one classifier into a bundle")
    p.add_argument("corpus")
    p.add_argument("--kind", required=True, choices=list(MODEL_KINDS))
    p.add_argument("--out", required=True, help="model bundle to write")
    p.add_argument("--vocab", help="override tokenizer.vocab_path")
    p.add_argument("--holdout-fraction", type=float, default=0.0,
                   help="reserve a stratified fraction before training")
    p.add_argument("--holdout-out", help="where to write the held-out part")
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict",
                       help="score a corpus with a bundle or ensemble spec")
    p.add_argument("model", help="model bundle or ensemble spec path")
    p.add_argument("corpus")
    p.add_argument("--out", required=True, help="score CSV to write")
    p.add_argument("--vocab", help="tokenizer vocabulary file")
    _add_common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="join scores to labels and report")
    p.add_argument("scores", help="id,score CSV")
    p.add_argument("corpus")
    p.add_argument("--json", help="write the structured report here")
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ensemble",
                       help="combine voters over a corpus (optionally tuning "
                            "weights on its labels)")
    p.add_argument("spec", nargs="?",
                   help="ensemble spec JSON (default: config [ensemble])")
    p.add_argument("corpus")
    p.add_argument("--out", required=True, help="score CSV to write")
    p.add_argument("--vocab", help="tokenizer vocabulary file")
    p.add_argument("--tune-weights", action="store_true",
                   help="grid-search weights on the corpus labels")
    _add_common(p)
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    p.add_argument("--n-per-class", type=int, required=True)
    p.add_argument("--divergence", type=float, required=True,
                   help="class separation in [0, 1]")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LlmdetectError as exc:
        print(f"llmdetect: error[{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
