"""Byte-pair-encoding tokenizer built from scratch.

Training initializes every character as a symbol (plus an end-of-word
marker per whitespace-delimited word), repeatedly merges the most frequent
adjacent symbol pair into a new symbol, and records the merge order.  Ties
on frequency go to the lexicographically smallest (left, right) pair, and
training stops early once no pair occurs at least twice.

Token id layout: id 0 is the reserved unknown sentinel, ids then cover the
initial symbols in sorted order followed by merged symbols in merge order.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .errors import TokenizerError

UNKNOWN_SYMBOL = "<unk>"
END_OF_WORD = "</w>"
FORMAT_VERSION = 1

DEFAULT_VOCAB_SIZE = 5000
MIN_PAIR_FREQUENCY = 2


@dataclass(frozen=True)
class MergeRule:
    """One recorded merge: (left, right) -> left+right at a given rank."""

    left: str
    right: str
    rank: int

    @property
    def merged(self) -> str:
        return self.left + self.right


@dataclass
class BpeVocab:
    """Ordered merge rules plus the symbol table they produced."""

    merges: list[MergeRule]
    symbols: dict[str, int]
    end_of_word_marker: str = END_OF_WORD
    unknown_id: int = 0
    _rank: dict[tuple[str, str], int] = field(default=None, repr=False, compare=False)
    _word_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self._rank is None:
            self._rank = {(m.left, m.right): m.rank for m in self.merges}

    @property
    def size(self) -> int:
        return len(self.symbols)

    def id_to_symbol(self) -> list[str]:
        out = [""] * len(self.symbols)
        for sym, idx in self.symbols.items():
            out[idx] = sym
        return out


@dataclass(frozen=True)
class TokenSequence:
    """Token ids produced by encoding one text."""

    ids: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.ids)


def _word_pairs(syms: list[str]) -> Counter:
    return Counter(zip(syms, syms[1:]))


def _apply_merge(syms: list[str], pair: tuple[str, str]) -> list[str]:
    """Replace occurrences of pair left-to-right, non-overlapping."""
    left, right = pair
    out: list[str] = []
    i = 0
    while i < len(syms):
        if i + 1 < len(syms) and syms[i] == left and syms[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(syms[i])
            i += 1
    return out


def train_bpe(texts: list[str], vocab_size: int = DEFAULT_VOCAB_SIZE) -> BpeVocab:
    """Learn merge rules until the symbol table reaches vocab_size or no
    adjacent pair occurs at least twice."""
    word_freq = Counter()
    for text in texts:
        word_freq.update(text.split())
    if not word_freq:
        raise TokenizerError("empty corpus: no whitespace-delimited words found")

    chars = sorted({ch for word in word_freq for ch in word} | {END_OF_WORD})
    symbols: dict[str, int] = {UNKNOWN_SYMBOL: 0}
    for ch in chars:
        symbols[ch] = len(symbols)
    if vocab_size < len(symbols):
        raise TokenizerError(
            f"vocab_size {vocab_size} is below the {len(symbols)} initial "
            f"symbols (characters + marker + unknown sentinel)")

    # distinct word types with frequencies; merges never cross word boundaries
    words = sorted(word_freq)
    word_syms: list[list[str]] = [list(w) + [END_OF_WORD] for w in words]
    freqs = [word_freq[w] for w in words]

    pair_counts: Counter = Counter()
    pair_words: dict[tuple[str, str], set[int]] = {}
    for wid, syms in enumerate(word_syms):
        for pair, n in _word_pairs(syms).items():
            pair_counts[pair] += n * freqs[wid]
            pair_words.setdefault(pair, set()).add(wid)

    merges: list[MergeRule] = []
    while len(symbols) < vocab_size:
        best_pair = None
        best_count = 0
        for pair, count in pair_counts.items():
            if count > best_count or (count == best_count and
                                      best_pair is not None and pair < best_pair):
                best_pair, best_count = pair, count
        if best_pair is None or best_count < MIN_PAIR_FREQUENCY:
            break

        merged = best_pair[0] + best_pair[1]
        if merged in (UNKNOWN_SYMBOL, END_OF_WORD):
            raise TokenizerError(
                f"corpus would form the reserved symbol {merged!r}")
        merges.append(MergeRule(left=best_pair[0], right=best_pair[1],
                                rank=len(merges)))
        if merged not in symbols:
            symbols[merged] = len(symbols)

        for wid in sorted(pair_words[best_pair]):
            old = word_syms[wid]
            new = _apply_merge(old, best_pair)
            word_syms[wid] = new
            old_pairs = _word_pairs(old)
            new_pairs = _word_pairs(new)
            for pair in old_pairs.keys() | new_pairs.keys():
                delta = new_pairs[pair] - old_pairs[pair]
                if delta:
                    pair_counts[pair] += delta * freqs[wid]
                    if pair_counts[pair] == 0:
                        del pair_counts[pair]
                if new_pairs[pair]:
                    pair_words.setdefault(pair, set()).add(wid)
                elif old_pairs[pair]:
                    members = pair_words.get(pair)
                    if members is not None:
                        members.discard(wid)
                        if not members:
                            del pair_words[pair]

    return BpeVocab(merges=merges, symbols=symbols)


def _encode_word(vocab: BpeVocab, word: str) -> tuple[int, ...]:
    cached = vocab._word_cache.get(word)
    if cached is not None:
        return cached
    syms = list(word) + [vocab.end_of_word_marker]
    while len(syms) > 1:
        best_rank = None
        best_pair = None
        for pair in zip(syms, syms[1:]):
            rank = vocab._rank.get(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank, best_pair = rank, pair
        if best_pair is None:
            break
        syms = _apply_merge(syms, best_pair)
    ids = tuple(vocab.symbols.get(s, vocab.unknown_id) for s in syms)
    vocab._word_cache[word] = ids
    return ids


def encode(vocab: BpeVocab, text: str) -> TokenSequence:
    """Segment text into subword token ids.

    Merge rules apply greedily in ascending rank order within each
    whitespace-delimited word; symbols missing from the table map to the
    unknown id.
    """
    ids: list[int] = []
    for word in text.split():
        ids.extend(_encode_word(vocab, word))
    return TokenSequence(ids=tuple(ids))


def decode(vocab: BpeVocab, seq: TokenSequence) -> str:
    """Invert encode: concatenate symbols, markers become single spaces."""
    table = vocab.id_to_symbol()
    parts: list[str] = []
    for token_id in seq.ids:
        if token_id == vocab.unknown_id:
            raise TokenizerError("sequence contains the unknown id; not invertible")
        if not 0 <= token_id < len(table):
            raise TokenizerError(f"token id {token_id} outside the vocabulary")
        parts.append(table[token_id])
    return "".join(parts).replace(vocab.end_of_word_marker, " ").rstrip(" ")


def save_vocab(vocab: BpeVocab) -> bytes:
    """Canonical serialization; equal vocabularies produce identical bytes."""
    payload = {
        "format_version": FORMAT_VERSION,
        "end_of_word_marker": vocab.end_of_word_marker,
        "merges": [[m.left, m.right] for m in vocab.merges],
        "symbols": vocab.id_to_symbol(),
    }
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) +
            "\n").encode("utf-8")


def load_vocab(data: bytes) -> BpeVocab:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise TokenizerError(f"vocabulary file is not valid JSON: {exc}")
    if not isinstance(payload, dict):
        raise TokenizerError("vocabulary file: top level must be an object")

    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise TokenizerError(f"field format_version: expected {FORMAT_VERSION}, "
                             f"got {version!r}")
    marker = payload.get("end_of_word_marker")
    if not isinstance(marker, str) or not marker:
        raise TokenizerError("field end_of_word_marker: must be a non-empty string")
    raw_symbols = payload.get("symbols")
    if (not isinstance(raw_symbols, list) or
            not all(isinstance(s, str) for s in raw_symbols)):
        raise TokenizerError("field symbols: must be an array of strings")
    if len(set(raw_symbols)) != len(raw_symbols):
        raise TokenizerError("field symbols: duplicate symbol strings")
    if not raw_symbols or raw_symbols[0] != UNKNOWN_SYMBOL:
        raise TokenizerError(f"field symbols: id 0 must be the reserved "
                             f"{UNKNOWN_SYMBOL!r} sentinel")
    symbols = {s: i for i, s in enumerate(raw_symbols)}
    if marker not in symbols:
        raise TokenizerError("field end_of_word_marker: marker missing from symbols")

    raw_merges = payload.get("merges")
    if not isinstance(raw_merges, list):
        raise TokenizerError("field merges: must be an array")
    merges: list[MergeRule] = []
    for rank, entry in enumerate(raw_merges):
        if (not isinstance(entry, list) or len(entry) != 2 or
                not all(isinstance(p, str) for p in entry)):
            raise TokenizerError(f"field merges[{rank}]: must be a [left, right] "
                                 f"pair of strings")
        rule = MergeRule(left=entry[0], right=entry[1], rank=rank)
        if rule.merged not in symbols:
            raise TokenizerError(f"field merges[{rank}]: merged symbol "
                                 f"{rule.merged!r} missing from symbols")
        merges.append(rule)

    return BpeVocab(merges=merges, symbols=symbols, end_of_word_marker=marker)
