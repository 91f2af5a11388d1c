"""Dataset ingestion, deterministic stratified splitting, and a synthetic
human-vs-machine corpus generator for desk-scale experiments.

Label convention, fixed package-wide: 1 = machine-generated (the positive
class every classifier scores), 0 = human.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from itertools import accumulate
from pathlib import Path

from .errors import CorpusError
from .seeds import stream_rng

CSV_HEADER = ["id", "text", "label"]
JSONL_KEYS = {"id", "text", "label"}

LEXICON_SIZE = 2000
ZIPF_EXPONENT = 1.1
DOC_LENGTH_RANGE = (50, 200)

_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"


@dataclass(frozen=True)
class Document:
    """A single text with a corpus-unique id."""

    id: str
    text: str


@dataclass
class LabeledCorpus:
    """Parallel documents and binary labels (1 = machine-generated)."""

    documents: list[Document]
    labels: list[int]

    def __post_init__(self):
        if len(self.documents) != len(self.labels):
            raise CorpusError(
                f"{len(self.documents)} documents but {len(self.labels)} labels")
        seen: set[str] = set()
        for doc in self.documents:
            if not doc.id:
                raise CorpusError("document id must be non-empty")
            if doc.id in seen:
                raise CorpusError(f"duplicate id {doc.id!r}")
            seen.add(doc.id)
        for label in self.labels:
            if label not in (0, 1):
                raise CorpusError(f"label {label!r} outside {{0, 1}}")

    def __len__(self) -> int:
        return len(self.documents)

    @property
    def ids(self) -> list[str]:
        return [d.id for d in self.documents]

    @property
    def texts(self) -> list[str]:
        return [d.text for d in self.documents]

    def subset(self, indices: list[int]) -> "LabeledCorpus":
        return LabeledCorpus(
            documents=[self.documents[i] for i in indices],
            labels=[self.labels[i] for i in indices])


@dataclass(frozen=True)
class SplitSpec:
    """Test fraction in (0, 1) and the seed driving the shuffle."""

    test_fraction: float
    seed: int

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise CorpusError(
                f"test_fraction must lie in (0, 1), got {self.test_fraction}")


def _parse_label(raw, line_num: int) -> int:
    try:
        label = int(raw)
    except (TypeError, ValueError):
        raise CorpusError(f"label {raw!r} is not an integer at line {line_num}")
    if label not in (0, 1):
        raise CorpusError(f"label out of range at line {line_num}")
    return label


def _read_text(path) -> str:
    try:
        return Path(path).read_bytes().decode("utf-8", errors="strict")
    except FileNotFoundError:
        raise CorpusError(f"no such file: {path}")
    except UnicodeDecodeError as exc:
        raise CorpusError(f"undecodable bytes in {path}: {exc}")


def load_corpus(path, format: str) -> LabeledCorpus:
    """Read a labeled dataset from a csv or jsonl file.

    Row order is preserved.  Malformed rows, duplicate ids, labels outside
    {0, 1}, and non-UTF-8 bytes are hard errors, never repaired.
    """
    raw = _read_text(path)
    if format == "csv":
        return _load_csv(raw, path)
    if format == "jsonl":
        return _load_jsonl(raw, path)
    raise CorpusError(f"unknown corpus format {format!r} (expected csv or jsonl)")


def _load_csv(raw: str, path) -> LabeledCorpus:
    reader = csv.reader(io.StringIO(raw))
    try:
        header = next(reader)
    except StopIteration:
        raise CorpusError(f"{path}: missing header row")
    if header != CSV_HEADER:
        raise CorpusError(f"{path}: header must be {','.join(CSV_HEADER)}, "
                          f"got {','.join(header)}")
    docs: list[Document] = []
    labels: list[int] = []
    seen: set[str] = set()
    for row in reader:
        line_num = reader.line_num
        if len(row) != 3:
            raise CorpusError(
                f"{path}: expected 3 fields, got {len(row)} at line {line_num}")
        doc_id, text, raw_label = row
        if not doc_id:
            raise CorpusError(f"{path}: empty id at line {line_num}")
        if doc_id in seen:
            raise CorpusError(f"{path}: duplicate id {doc_id!r} at line {line_num}")
        seen.add(doc_id)
        docs.append(Document(id=doc_id, text=text))
        labels.append(_parse_label(raw_label, line_num))
    return LabeledCorpus(documents=docs, labels=labels)


def _load_jsonl(raw: str, path) -> LabeledCorpus:
    docs: list[Document] = []
    labels: list[int] = []
    seen: set[str] = set()
    for line_num, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}: invalid JSON at line {line_num}: {exc.msg}")
        if not isinstance(obj, dict) or set(obj) != JSONL_KEYS:
            raise CorpusError(f"{path}: object keys must be exactly "
                              f"{sorted(JSONL_KEYS)} at line {line_num}")
        if not isinstance(obj["id"], str) or not isinstance(obj["text"], str):
            raise CorpusError(f"{path}: id and text must be strings "
                              f"at line {line_num}")
        if isinstance(obj["label"], bool) or not isinstance(obj["label"], int):
            raise CorpusError(f"{path}: label must be an integer at line {line_num}")
        if not obj["id"]:
            raise CorpusError(f"{path}: empty id at line {line_num}")
        if obj["id"] in seen:
            raise CorpusError(f"{path}: duplicate id {obj['id']!r} at line {line_num}")
        seen.add(obj["id"])
        docs.append(Document(id=obj["id"], text=obj["text"]))
        labels.append(_parse_label(obj["label"], line_num))
    return LabeledCorpus(documents=docs, labels=labels)


def dump_corpus(corpus: LabeledCorpus, format: str) -> str:
    """Serialize to the csv or jsonl dataset schema (round-trip exact)."""
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for doc, label in zip(corpus.documents, corpus.labels):
            writer.writerow([doc.id, doc.text, label])
        return buf.getvalue()
    if format == "jsonl":
        lines = []
        for doc, label in zip(corpus.documents, corpus.labels):
            lines.append(json.dumps({"id": doc.id, "text": doc.text, "label": label},
                                    sort_keys=True, separators=(",", ":")))
        return "".join(line + "\n" for line in lines)
    raise CorpusError(f"unknown corpus format {format!r} (expected csv or jsonl)")


def save_corpus(corpus: LabeledCorpus, path, format: str) -> None:
    Path(path).write_bytes(dump_corpus(corpus, format).encode("utf-8"))


def split_corpus(corpus: LabeledCorpus,
                 spec: SplitSpec) -> tuple[LabeledCorpus, LabeledCorpus]:
    """Deterministic stratified train/test partition.

    Per class, round(test_fraction * class size) documents go to test; the
    shuffle is driven by the spec seed's "split" sub-stream.  Row order
    within each part follows the input corpus.
    """
    if len(corpus) < 2:
        raise CorpusError("cannot split a corpus with fewer than 2 documents")
    rng = stream_rng(spec.seed, "split")
    test_idx: list[int] = []
    for cls in (0, 1):
        members = [i for i, y in enumerate(corpus.labels) if y == cls]
        if not members:
            continue
        rng.shuffle(members)
        n_test = round(spec.test_fraction * len(members))
        test_idx.extend(members[:n_test])
    test_set = set(test_idx)
    train_idx = [i for i in range(len(corpus)) if i not in test_set]
    if not test_idx or not train_idx:
        raise CorpusError(
            f"corpus of {len(corpus)} documents is too small to place at least "
            f"one document in each part at test_fraction={spec.test_fraction}")
    return corpus.subset(train_idx), corpus.subset(sorted(test_idx))


def _lexicon() -> list[str]:
    """2,000 distinct two-syllable pseudo-words over a 19-letter alphabet."""
    syllables = [c + v for c in _CONSONANTS for v in _VOWELS]
    return [syllables[i // len(syllables)] + syllables[i % len(syllables)]
            for i in range(LEXICON_SIZE)]


def _zipf_cumulative(ranks: list[float]) -> list[float]:
    weights = [(r + 1.0) ** -ZIPF_EXPONENT for r in ranks]
    return list(accumulate(weights))


def synth_corpus(n_per_class: int, seed: int, divergence: float) -> LabeledCorpus:
    """Generate n_per_class human and n_per_class machine documents.

    Both classes draw words from Zipf-weighted distributions over a shared
    lexicon.  The machine class's rank of word i is interpolated between i
    (divergence 0, identical distributions) and its mirror position
    (divergence 1, disjoint high-frequency vocabularies).  Deterministic in
    the seed; document length is uniform over 50-200 words.
    """
    if n_per_class < 1:
        raise CorpusError(f"n_per_class must be >= 1, got {n_per_class}")
    if not 0.0 <= divergence <= 1.0:
        raise CorpusError(f"divergence must lie in [0, 1], got {divergence}")
    lexicon = _lexicon()
    top = LEXICON_SIZE - 1
    human_cum = _zipf_cumulative([float(i) for i in range(LEXICON_SIZE)])
    machine_cum = _zipf_cumulative(
        [(1.0 - divergence) * i + divergence * (top - i)
         for i in range(LEXICON_SIZE)])
    rng = stream_rng(seed, "synth")
    docs: list[Document] = []
    labels: list[int] = []
    for label, prefix, cum in ((0, "human", human_cum), (1, "machine", machine_cum)):
        for i in range(n_per_class):
            length = rng.randint(*DOC_LENGTH_RANGE)
            words = rng.choices(lexicon, cum_weights=cum, k=length)
            docs.append(Document(id=f"{prefix}-{i:05d}", text=" ".join(words)))
            labels.append(label)
    return LabeledCorpus(documents=docs, labels=labels)
