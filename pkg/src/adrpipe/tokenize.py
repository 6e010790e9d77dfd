"""Greedy longest-match-first subword tokenization over a plain vocabulary file,
plus a token-overlap report for comparing how two words decompose.

The tokenizer mirrors the usual WordPiece convention: the first piece of a
word is looked up as-is, later pieces with a "##" continuation prefix, and a
word with no full decomposition comes back as ``["[UNK]"]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

CONTINUATION_PREFIX = "##"
UNKNOWN_TOKEN = "[UNK]"


@dataclass(frozen=True)
class SubwordVocab:
    """A token inventory; continuation tokens are stored with their '##' prefix."""

    tokens: frozenset[str]
    continuation_prefix: str = CONTINUATION_PREFIX
    unknown_token: str = UNKNOWN_TOKEN
    max_word_chars: int = 100

    def __post_init__(self):
        object.__setattr__(self, "tokens", frozenset(self.tokens))
        if self.unknown_token not in self.tokens:
            raise ValueError(f"vocabulary must contain the unknown token {self.unknown_token!r}")

    def __len__(self) -> int:
        return len(self.tokens)


class TokenizationReport(NamedTuple):
    word_a: str
    word_b: str
    tokens_a: tuple[str, ...]
    tokens_b: tuple[str, ...]
    shared_tokens: frozenset[str]


class TokenStats(NamedTuple):
    total_words: int
    unk_words: int
    unk_rate: float


def load_vocab(path: str | Path, max_word_chars: int = 100) -> SubwordVocab:
    """Read a one-token-per-line vocabulary file (UTF-8, blank lines skipped)."""
    tokens = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            token = line.strip()
            if token:
                tokens.add(token)
    return SubwordVocab(tokens=frozenset(tokens), max_word_chars=max_word_chars)


def wordpiece_tokenize(word: str, vocab: SubwordVocab) -> list[str]:
    """Decompose one word greedily, longest vocabulary match first.

    The first piece is matched bare, subsequent pieces with the continuation
    prefix. Any position with no match, or a word longer than max_word_chars,
    yields ``[unknown_token]``.
    """
    if not word:
        raise ValueError("word must be non-empty")
    if any(c.isspace() for c in word):
        raise ValueError(f"word must be whitespace-free: {word!r}")
    if len(word) > vocab.max_word_chars:
        return [vocab.unknown_token]
    pieces = []
    pos = 0
    while pos < len(word):
        end = len(word)
        match = None
        while end > pos:
            candidate = word[pos:end]
            if pos > 0:
                candidate = vocab.continuation_prefix + candidate
            if candidate in vocab.tokens:
                match = candidate
                break
            end -= 1
        if match is None:
            return [vocab.unknown_token]
        pieces.append(match)
        pos = end
    return pieces


def overlap_report(word_a: str, word_b: str, vocab: SubwordVocab) -> TokenizationReport:
    """Tokenize both words and report the tokens they have in common."""
    tokens_a = tuple(wordpiece_tokenize(word_a, vocab))
    tokens_b = tuple(wordpiece_tokenize(word_b, vocab))
    return TokenizationReport(
        word_a=word_a,
        word_b=word_b,
        tokens_a=tokens_a,
        tokens_b=tokens_b,
        shared_tokens=frozenset(tokens_a) & frozenset(tokens_b),
    )


def corpus_token_stats(texts: Sequence[str], vocab: SubwordVocab) -> TokenStats:
    """Whitespace-split each text and count words that fail to decompose."""
    total = 0
    unk = 0
    for text in texts:
        for word in text.split():
            total += 1
            if wordpiece_tokenize(word, vocab) == [vocab.unknown_token]:
                unk += 1
    return TokenStats(total, unk, unk / max(total, 1))
