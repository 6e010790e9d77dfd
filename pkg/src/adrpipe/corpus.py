"""Labeled tweet datasets: load/save, stratified splitting, positive duplication.

File format is one record per line, UTF-8, LF line endings:

    tweet_id<TAB>label<TAB>text

An optional header line ``tweet_id\\tlabel\\ttext`` is accepted and skipped.
Tabs and newlines inside fields are not representable; the loader rejects
lines that do not have exactly three fields.
"""

from __future__ import annotations

import math
import random

from ._io import atomic_write_text
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

HEADER = "tweet_id\tlabel\ttext"


@dataclass(frozen=True)
class LabeledTweet:
    """One tweet with a binary label (1 = adverse drug reaction mentioned)."""

    tweet_id: str
    text: str
    label: int

    def __post_init__(self):
        if not self.tweet_id:
            raise ValueError("tweet_id must be non-empty")
        if "\t" in self.tweet_id or "\n" in self.tweet_id:
            raise ValueError(f"tweet_id {self.tweet_id!r} contains tab or newline")
        if "\t" in self.text or "\n" in self.text:
            raise ValueError(f"text of {self.tweet_id} contains tab or newline")
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")


@dataclass(frozen=True)
class Dataset:
    """An ordered, immutable collection of LabeledTweet with tracked class counts."""

    records: tuple[LabeledTweet, ...]
    positive_count: int
    negative_count: int

    @classmethod
    def from_records(cls, records: Iterable[LabeledTweet]) -> "Dataset":
        records = tuple(records)
        seen: set[str] = set()
        for r in records:
            if r.tweet_id in seen:
                raise ValueError(f"duplicate tweet_id {r.tweet_id!r}")
            seen.add(r.tweet_id)
        pos = sum(1 for r in records if r.label == 1)
        return cls(records=records, positive_count=pos, negative_count=len(records) - pos)

    def __len__(self) -> int:
        return len(self.records)

    def labels(self) -> dict[str, int]:
        """tweet_id -> label mapping, e.g. for use as gold labels in evaluation."""
        return {r.tweet_id: r.label for r in self.records}


def load_dataset(path: str | Path) -> Dataset:
    """Read a dataset file, validating every line.

    Raises ValueError naming the offending line number for malformed lines
    (wrong field count, label outside {0,1}) and naming the id for duplicates.
    """
    records = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if lineno == 1 and line == HEADER:
                continue
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(
                    f"expected 3 tab-separated fields at line {lineno}, got {len(fields)}"
                )
            tweet_id, label_text, text = fields
            if label_text not in ("0", "1"):
                raise ValueError(f"label out of range at line {lineno}: {label_text!r}")
            if tweet_id in seen:
                raise ValueError(f"duplicate tweet_id {tweet_id!r} at line {lineno}")
            seen.add(tweet_id)
            records.append(LabeledTweet(tweet_id=tweet_id, text=text, label=int(label_text)))
    return Dataset.from_records(records)


def save_dataset(d: Dataset, path: str | Path, header: bool = True) -> None:
    """Write a dataset in the tab-separated format (LF endings, UTF-8)."""
    lines = []
    if header:
        lines.append(HEADER)
    for r in d.records:
        lines.append(f"{r.tweet_id}\t{r.label}\t{r.text}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def seeded_shuffle(items: list, rng: random.Random) -> None:
    """In-place Fisher-Yates shuffle driven by the given Mersenne Twister RNG.

    Spelled out (rather than rng.shuffle) so the exact algorithm is pinned
    and splits reproduce across platforms and Python versions.
    """
    for i in range(len(items) - 1, 0, -1):
        j = rng.randrange(i + 1)
        items[i], items[j] = items[j], items[i]


def stratified_split(d: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Split per label: train gets floor(train_fraction * count) of each class.

    Membership is chosen by a seeded Fisher-Yates shuffle of each label's
    record indices; record order within each output follows the input order.
    The two outputs partition the input exactly, and the same seed always
    produces the same split.
    """
    if not (0.0 < train_fraction < 1.0):
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    rng = random.Random(seed)
    train_idx: set[int] = set()
    for label in (0, 1):
        idx = [i for i, r in enumerate(d.records) if r.label == label]
        seeded_shuffle(idx, rng)
        take = math.floor(train_fraction * len(idx))
        train_idx.update(idx[:take])
    train = [r for i, r in enumerate(d.records) if i in train_idx]
    dev = [r for i, r in enumerate(d.records) if i not in train_idx]
    return Dataset.from_records(train), Dataset.from_records(dev)


def duplicate_positives(d: Dataset, extra_copies: int) -> Dataset:
    """Append extra_copies duplicates after each positive record.

    Duplicates get suffixed ids (``<tweet_id>#dup1``, ``#dup2``, ...) so
    tweet_id stays unique; negatives and record order are untouched.
    """
    if extra_copies < 0:
        raise ValueError(f"extra_copies must be >= 0, got {extra_copies}")
    records = []
    for r in d.records:
        records.append(r)
        if r.label == 1:
            for k in range(1, extra_copies + 1):
                records.append(LabeledTweet(f"{r.tweet_id}#dup{k}", r.text, r.label))
    return Dataset.from_records(records)
