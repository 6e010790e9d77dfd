"""Recall-oriented evaluation: confusion counts, precision/recall/F1,
run-to-run variability, and attribution of ensemble hits to member subsets.

Conventions: label 1 is the positive (ADR) class; precision and recall are 0
when their denominator is 0, so an all-negative predictor scores 0 across the
board; standard deviations use the sample (n-1) estimator.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Mapping, Sequence


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class AttributionBreakdown:
    """Ensemble TPs and FPs partitioned by the exact set of members voting positive.

    exclusive_fraction[m] is the share of ensemble true positives that model m
    did NOT vote for, i.e. hits the rest of the ensemble contributed without it.
    """

    tp_by_subset: dict[frozenset[str], int]
    fp_by_subset: dict[frozenset[str], int]
    exclusive_fraction: dict[str, float]

    @property
    def tp_total(self) -> int:
        return sum(self.tp_by_subset.values())

    @property
    def fp_total(self) -> int:
        return sum(self.fp_by_subset.values())


@dataclass(frozen=True)
class VariabilityReport:
    scenario: str
    f1_std: float
    recall_std: float
    n_runs: int


def _truncate(ids: list[str], limit: int = 10) -> str:
    if len(ids) <= limit:
        return ", ".join(ids)
    return ", ".join(ids[:limit]) + f", ... ({len(ids) - limit} more)"


def _check_coverage(verdicts: Mapping[str, int], gold: Mapping[str, int]) -> None:
    if set(verdicts) != set(gold):
        only_verdicts = sorted(set(verdicts) - set(gold))
        only_gold = sorted(set(gold) - set(verdicts))
        parts = []
        if only_verdicts:
            parts.append(f"only in verdicts: {_truncate(only_verdicts)}")
        if only_gold:
            parts.append(f"only in gold: {_truncate(only_gold)}")
        raise ValueError("verdict/gold coverage mismatch; " + "; ".join(parts))


def confusion(verdicts: Mapping[str, int], gold: Mapping[str, int]) -> ConfusionCounts:
    """Count tp/fp/tn/fn over identical tweet sets (mismatch is an error)."""
    _check_coverage(verdicts, gold)
    tp = fp = tn = fn = 0
    for tweet_id, v in verdicts.items():
        g = gold[tweet_id]
        if v == 1 and g == 1:
            tp += 1
        elif v == 1 and g == 0:
            fp += 1
        elif v == 0 and g == 0:
            tn += 1
        else:
            fn += 1
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def metrics(c: ConfusionCounts) -> Metrics:
    """Precision, recall, and their harmonic mean (0 on empty denominators)."""
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(precision=precision, recall=recall, f1=f1)


def f1_from(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall (0 when both are 0)."""
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def attribution(decisions: Sequence, gold: Mapping[str, int]) -> AttributionBreakdown:
    """Break ensemble TPs/FPs down by which members voted positive.

    decisions are EnsembleDecision values; only ensemble-positive tweets
    contribute, keyed by the frozenset of positive-voting member ids.
    """
    _check_coverage({d.tweet_id: d.ensemble_verdict for d in decisions}, gold)
    models: set[str] = set()
    tp_by_subset: dict[frozenset[str], int] = {}
    fp_by_subset: dict[frozenset[str], int] = {}
    tp_missed_by: dict[str, int] = {}
    tp_total = 0
    for d in decisions:
        models.update(d.per_model_verdict)
        if d.ensemble_verdict != 1:
            continue
        voters = frozenset(m for m, v in d.per_model_verdict.items() if v == 1)
        if gold[d.tweet_id] == 1:
            tp_by_subset[voters] = tp_by_subset.get(voters, 0) + 1
            tp_total += 1
            for m in d.per_model_verdict:
                if m not in voters:
                    tp_missed_by[m] = tp_missed_by.get(m, 0) + 1
        else:
            fp_by_subset[voters] = fp_by_subset.get(voters, 0) + 1
    exclusive = {
        m: (tp_missed_by.get(m, 0) / tp_total if tp_total else 0.0) for m in sorted(models)
    }
    return AttributionBreakdown(
        tp_by_subset=tp_by_subset,
        fp_by_subset=fp_by_subset,
        exclusive_fraction=exclusive,
    )


def variability(per_run_metrics: Sequence[Metrics], scenario: str) -> VariabilityReport:
    """Sample standard deviation of F1 and recall across repeated runs."""
    if len(per_run_metrics) < 2:
        raise ValueError(f"need at least 2 runs to measure variability, got {len(per_run_metrics)}")
    return VariabilityReport(
        scenario=scenario,
        f1_std=statistics.stdev(m.f1 for m in per_run_metrics),
        recall_std=statistics.stdev(m.recall for m in per_run_metrics),
        n_runs=len(per_run_metrics),
    )


def metrics_table(columns: Mapping[str, Metrics]) -> str:
    """Aligned text table: one column per model, rows F1/Precision/Recall."""
    names = list(columns)
    width = max([len(n) for n in names] + [9])
    header = " ".join(["metric   "] + [n.rjust(width) for n in names])
    rows = []
    for label, attr in (("F1-score", "f1"), ("Precision", "precision"), ("Recall", "recall")):
        cells = [f"{getattr(columns[n], attr):.4f}".rjust(width) for n in names]
        rows.append(" ".join([label.ljust(9)] + cells))
    return "\n".join([header] + rows)


def attribution_table(ab: AttributionBreakdown) -> str:
    """Aligned text table of TP/FP counts per positive-voter subset."""
    subsets = sorted(
        set(ab.tp_by_subset) | set(ab.fp_by_subset),
        key=lambda s: (len(s), tuple(sorted(s))),
    )
    name_width = max([len(" + ".join(sorted(s))) for s in subsets] + [len("positive voters")])
    lines = [f"{'positive voters'.ljust(name_width)}  {'TP':>6} {'FP':>6}"]
    for s in subsets:
        name = " + ".join(sorted(s))
        lines.append(
            f"{name.ljust(name_width)}  {ab.tp_by_subset.get(s, 0):>6} {ab.fp_by_subset.get(s, 0):>6}"
        )
    lines.append(f"{'total'.ljust(name_width)}  {ab.tp_total:>6} {ab.fp_total:>6}")
    return "\n".join(lines)


def variability_table(reports: Sequence[VariabilityReport]) -> str:
    """Aligned text table: one row per scenario, F1 and recall StDev columns."""
    name_width = max([len(r.scenario) for r in reports] + [len("scenario")])
    lines = [f"{'scenario'.ljust(name_width)}  {'F1 StDev':>9} {'Recall StDev':>13} {'runs':>5}"]
    for r in reports:
        lines.append(
            f"{r.scenario.ljust(name_width)}  {r.f1_std:>9.4f} {r.recall_std:>13.4f} {r.n_runs:>5}"
        )
    return "\n".join(lines)
