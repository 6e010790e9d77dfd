"""Ingestion and validation of per-run positive-class probability files.

Files are tab-separated with a mandatory header:

    model_id<TAB>run_id<TAB>tweet_id<TAB>prob

Rows from any number of files are merged into a RunMatrix. Every (model, run)
pair must cover exactly the same tweet set; coverage gaps are a hard error
rather than something to impute, since silent gaps would corrupt recall.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ._io import atomic_write_text

HEADER = "model_id\trun_id\ttweet_id\tprob"


def _truncate(ids: list[str], limit: int = 10) -> str:
    if len(ids) <= limit:
        return ", ".join(ids)
    return ", ".join(ids[:limit]) + f", ... ({len(ids) - limit} more)"


@dataclass(frozen=True)
class PredictionRecord:
    model_id: str
    run_id: str
    tweet_id: str
    prob: float

    def __post_init__(self):
        if not self.model_id or not self.run_id or not self.tweet_id:
            raise ValueError("model_id, run_id and tweet_id must be non-empty")
        for field in (self.model_id, self.run_id, self.tweet_id):
            if "\t" in field or "\n" in field:
                raise ValueError(f"tab or newline in identifier {field!r}")
        if not 0.0 <= self.prob <= 1.0:
            raise ValueError(f"probability out of range: {self.prob}")


@dataclass(frozen=True)
class RunMatrix:
    """Validated (model, run, tweet) -> probability table with rectangular coverage."""

    probs: dict[tuple[str, str, str], float]
    models: tuple[str, ...]
    runs_per_model: dict[str, tuple[str, ...]]
    tweet_ids: tuple[str, ...]

    @classmethod
    def from_records(cls, records: Iterable[PredictionRecord]) -> "RunMatrix":
        probs: dict[tuple[str, str, str], float] = {}
        for rec in records:
            key = (rec.model_id, rec.run_id, rec.tweet_id)
            if key in probs:
                raise ValueError(
                    f"duplicate prediction for model {rec.model_id}, "
                    f"run {rec.run_id}, tweet {rec.tweet_id}"
                )
            probs[key] = rec.prob
        if not probs:
            raise ValueError("no prediction records")

        tweets_by_run: dict[tuple[str, str], set[str]] = {}
        for model_id, run_id, tweet_id in probs:
            tweets_by_run.setdefault((model_id, run_id), set()).add(tweet_id)
        all_tweets = set().union(*tweets_by_run.values())
        problems = []
        for (model_id, run_id), covered in sorted(tweets_by_run.items()):
            missing = sorted(all_tweets - covered)
            if missing:
                noun = "tweet" if len(missing) == 1 else "tweets"
                problems.append(
                    f"run {run_id} of {model_id} missing {noun} {_truncate(missing)}"
                )
        if problems:
            raise ValueError("ragged tweet coverage: " + "; ".join(problems))

        models = tuple(sorted({m for m, _, _ in probs}))
        runs_per_model = {
            m: tuple(sorted({r for mm, r, _ in probs if mm == m})) for m in models
        }
        return cls(
            probs=probs,
            models=models,
            runs_per_model=runs_per_model,
            tweet_ids=tuple(sorted(all_tweets)),
        )

    def run_verdicts(self, model_id: str, run_id: str, threshold: float = 0.5) -> dict[str, int]:
        """Hard 0/1 calls for a single run (used e.g. to screen out bad runs)."""
        return {
            t: int(self.probs[(model_id, run_id, t)] >= threshold) for t in self.tweet_ids
        }


def _parse_file(path: str | Path) -> list[PredictionRecord]:
    records = []
    with open(path, encoding="utf-8") as f:
        first = f.readline().rstrip("\n")
        if first != HEADER:
            raise ValueError(f"{path}: missing or malformed header (expected {HEADER!r})")
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise ValueError(f"{path}: expected 4 fields at line {lineno}")
            model_id, run_id, tweet_id, prob_text = fields
            try:
                prob = float(prob_text)
            except ValueError:
                raise ValueError(f"{path}: bad probability {prob_text!r} at line {lineno}") from None
            if not 0.0 <= prob <= 1.0:
                raise ValueError(f"{path}: probability out of range at line {lineno}: {prob_text}")
            records.append(PredictionRecord(model_id, run_id, tweet_id, prob))
    return records


def load_predictions(paths: Sequence[str | Path], expected_runs: int | None = 5) -> RunMatrix:
    """Parse and merge prediction files into a validated RunMatrix.

    Warns (without failing) when a model's run count differs from
    expected_runs; pass None to skip that check.
    """
    records: list[PredictionRecord] = []
    for path in paths:
        records.extend(_parse_file(path))
    matrix = RunMatrix.from_records(records)
    if expected_runs is not None:
        for model_id in matrix.models:
            n = len(matrix.runs_per_model[model_id])
            if n != expected_runs:
                warnings.warn(
                    f"model {model_id} has {n} runs (expected {expected_runs})",
                    stacklevel=2,
                )
    return matrix


def write_predictions(records: Iterable[PredictionRecord], path: str | Path) -> None:
    """Write records in the standard format, sorted for byte-stable output."""
    rows = sorted(records, key=lambda r: (r.model_id, r.run_id, r.tweet_id))
    lines = [HEADER]
    lines.extend(f"{r.model_id}\t{r.run_id}\t{r.tweet_id}\t{r.prob:.6f}" for r in rows)
    atomic_write_text(path, "\n".join(lines) + "\n")


def average_runs(m: RunMatrix) -> dict[str, dict[str, float]]:
    """Arithmetic mean of each model's runs, per tweet.

    Runs are summed in sorted run_id order so the result is bit-identical
    no matter how the files were loaded.
    """
    out: dict[str, dict[str, float]] = {}
    for model_id in m.models:
        runs = m.runs_per_model[model_id]
        out[model_id] = {
            t: sum(m.probs[(model_id, r, t)] for r in runs) / len(runs) for t in m.tweet_ids
        }
    return out


def filter_runs(
    m: RunMatrix,
    gold: Mapping[str, int],
    min_f1: float,
    threshold: float = 0.5,
) -> RunMatrix:
    """Drop runs whose standalone F1 against gold falls below min_f1.

    This is the screen for runs that never converged (an all-negative run
    scores F1 = 0 and is excluded by any positive min_f1). Models losing all
    their runs are dropped with a warning; an empty result is an error.
    """
    from .evaluate import confusion, metrics  # local import to avoid a cycle

    missing = sorted(t for t in m.tweet_ids if t not in gold)
    if missing:
        raise ValueError(f"gold labels missing for tweets: {_truncate(missing)}")
    gold_subset = {t: gold[t] for t in m.tweet_ids}
    kept: list[PredictionRecord] = []
    dropped_models = []
    for model_id in m.models:
        kept_runs = []
        for run_id in m.runs_per_model[model_id]:
            verdicts = m.run_verdicts(model_id, run_id, threshold)
            f1 = metrics(confusion(verdicts, gold_subset)).f1
            if f1 >= min_f1:
                kept_runs.append(run_id)
        if not kept_runs:
            dropped_models.append(model_id)
        kept.extend(
            PredictionRecord(model_id, r, t, m.probs[(model_id, r, t)])
            for r in kept_runs
            for t in m.tweet_ids
        )
    if dropped_models:
        warnings.warn(
            f"all runs below min F1 {min_f1} for: {', '.join(dropped_models)}",
            stacklevel=2,
        )
    if not kept:
        raise ValueError(f"no runs left after filtering at min F1 {min_f1}")
    return RunMatrix.from_records(kept)
