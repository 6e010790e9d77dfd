#!/usr/bin/env python3
"""The full protocol at desk scale, with the built-in classifier standing in
for heavyweight models.

5,000 synthetic tweets (8% report an adverse reaction) are cleaned, split
80/20, and three differently configured classifiers are each trained five
times with consecutive seeds. Per model, the five runs' probabilities are
averaged; each model then votes at threshold 0.5 and the ensemble predicts
positive if ANY member votes positive. That max-positive rule trades some
precision for recall, which is the metric that matters when missed adverse
reactions are expensive and false alarms can be filtered downstream.
"""

import statistics
import tempfile
from pathlib import Path

from adrpipe import (
    BaselineConfig,
    Dataset,
    EnsembleConfig,
    LabeledTweet,
    PipelineConfig,
    attribution,
    average_runs,
    confusion,
    decide,
    load_lexicon,
    load_predictions,
    make_synthetic_dataset,
    metrics,
    preprocess,
    run_protocol,
    stratified_split,
)
from adrpipe.evaluate import attribution_table, metrics_table

DATA = Path(__file__).resolve().parent.parent / "data"

print("generating 5,000 synthetic tweets (8% positive) ...")
data = make_synthetic_dataset(5000, 0.08, seed=2024)

lexicon = load_lexicon(DATA / "drug_lexicon.tsv")
pipe = PipelineConfig(lexicon=lexicon)
cleaned = Dataset.from_records(
    LabeledTweet(r.tweet_id, preprocess(r.text, pipe), r.label) for r in data.records
)
train_set, dev_set = stratified_split(cleaned, 0.8, seed=11)
print(f"train {len(train_set)} / dev {len(dev_set)} "
      f"({dev_set.positive_count} dev positives)\n")

specs = [
    ("char46", BaselineConfig(ngram_range=(4, 6), feature_mode="char", seed=500)),
    ("word12", BaselineConfig(ngram_range=(1, 2), feature_mode="word", seed=400)),
    ("char35w3", BaselineConfig(ngram_range=(3, 5), feature_mode="char", positive_weight=3, seed=700)),
]
print("training 3 model specs x 5 seeded runs each ...")
with tempfile.TemporaryDirectory() as tmp:
    pred_path = run_protocol(train_set, dev_set, specs, runs=5, out_path=Path(tmp) / "preds.tsv")
    matrix = load_predictions([pred_path])

gold = dev_set.labels()

print("\nper-run F1 before averaging (why averaging is worth it):")
for model_id in matrix.models:
    f1s = [
        metrics(confusion(matrix.run_verdicts(model_id, run_id), gold)).f1
        for run_id in matrix.runs_per_model[model_id]
    ]
    print(f"  {model_id:9s} {[f'{x:.3f}' for x in f1s]}  stdev {statistics.stdev(f1s):.4f}")

decisions = decide(average_runs(matrix), EnsembleConfig())  # 0.5 everywhere

columns = {}
for model_id in matrix.models:
    verdicts = {d.tweet_id: d.per_model_verdict[model_id] for d in decisions}
    columns[model_id] = metrics(confusion(verdicts, gold))
columns["ensemble"] = metrics(confusion({d.tweet_id: d.ensemble_verdict for d in decisions}, gold))

print("\nrun-averaged members vs the max-positive ensemble:")
print(metrics_table(columns))

best = max(m.recall for name, m in columns.items() if name != "ensemble")
print(f"\nensemble recall {columns['ensemble'].recall:.4f} vs best member {best:.4f}")

print("\nwhich members caught the ensemble's positives:")
ab = attribution(decisions, gold)
print(attribution_table(ab))
print("\nshare of ensemble true positives each member MISSED (caught only by the others):")
for model_id, fraction in ab.exclusive_fraction.items():
    print(f"  {model_id:9s} {fraction:.1%}")
