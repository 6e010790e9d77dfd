"""Seeded hashed n-gram logistic classifier used to stand in for the heavyweight
models, so the whole protocol (R runs per model type, run averaging, ensembling,
evaluation) can be exercised end to end in seconds.

Features are character or word n-gram counts hashed with crc32 into a
power-of-two bucket space; training is plain per-example gradient descent on a
class-weighted logistic loss, with the example order reshuffled each epoch by
a seeded Fisher-Yates pass. Everything is deterministic given (data, config).
"""

from __future__ import annotations

import dataclasses
import io
import json
import math
import random
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ._io import atomic_write_bytes
from .corpus import Dataset, seeded_shuffle
from .predictions import PredictionRecord, write_predictions

MODEL_FORMAT_VERSION = 1

FEATURE_MODES = ("char", "word")


@dataclass(frozen=True)
class BaselineConfig:
    ngram_range: tuple[int, int] = (3, 5)
    feature_buckets: int = 2**18
    epochs: int = 8
    learning_rate: float = 0.1
    l2: float = 0.0
    positive_weight: float = 1.0
    seed: int = 0
    feature_mode: str = "char"

    def __post_init__(self):
        object.__setattr__(self, "ngram_range", tuple(self.ngram_range))
        lo, hi = self.ngram_range
        if lo < 1 or hi < lo:
            raise ValueError(f"ngram_range must satisfy 1 <= lo <= hi, got {self.ngram_range}")
        if self.feature_buckets < 1 or self.feature_buckets & (self.feature_buckets - 1):
            raise ValueError(f"feature_buckets must be a power of two, got {self.feature_buckets}")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")
        if self.positive_weight < 1:
            raise ValueError(f"positive_weight must be >= 1, got {self.positive_weight}")
        if self.feature_mode not in FEATURE_MODES:
            raise ValueError(f"feature_mode must be one of {FEATURE_MODES}")


@dataclass(frozen=True, eq=False)
class BaselineModel:
    weights: np.ndarray
    bias: float
    config: BaselineConfig

    def __post_init__(self):
        if self.weights.shape != (self.config.feature_buckets,):
            raise ValueError(
                f"weight vector length {self.weights.shape} does not match "
                f"feature_buckets {self.config.feature_buckets}"
            )


def _ngrams(text: str, cfg: BaselineConfig):
    lo, hi = cfg.ngram_range
    if cfg.feature_mode == "char":
        for n in range(lo, hi + 1):
            for i in range(len(text) - n + 1):
                yield text[i : i + n]
    else:
        words = text.split()
        for n in range(lo, hi + 1):
            for i in range(len(words) - n + 1):
                yield " ".join(words[i : i + n])


def hashed_features(text: str, cfg: BaselineConfig) -> tuple[np.ndarray, np.ndarray]:
    """Hashed n-gram counts as (sorted bucket indices, counts).

    crc32 keeps the hash stable across platforms and processes, unlike the
    salted builtin hash().
    """
    mask = cfg.feature_buckets - 1
    counts: dict[int, int] = {}
    for gram in _ngrams(text, cfg):
        bucket = zlib.crc32(gram.encode("utf-8")) & mask
        counts[bucket] = counts.get(bucket, 0) + 1
    if not counts:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    idx = np.asarray(sorted(counts), dtype=np.int64)
    val = np.asarray([counts[i] for i in idx], dtype=np.float64)
    return idx, val


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def loss_and_grad(
    weights: np.ndarray,
    bias: float,
    features: np.ndarray,
    labels: np.ndarray,
    sample_weights: np.ndarray,
    l2: float = 0.0,
) -> tuple[float, np.ndarray, float]:
    """Weighted logistic loss and its analytic gradient on a dense batch.

    loss = sum_i w_i * crossentropy(sigmoid(x_i . weights + bias), y_i)
           + l2/2 * ||weights||^2

    Returns (loss, d_loss/d_weights, d_loss/d_bias). The trainer's per-example
    updates descend this same objective; tests compare this gradient against
    central finite differences.
    """
    z = features @ weights + bias
    p = 1.0 / (1.0 + np.exp(-z))
    eps = 1e-12
    ce = -(labels * np.log(p + eps) + (1 - labels) * np.log(1 - p + eps))
    loss = float(np.sum(sample_weights * ce) + 0.5 * l2 * np.dot(weights, weights))
    residual = sample_weights * (p - labels)
    grad_w = features.T @ residual + l2 * weights
    grad_b = float(np.sum(residual))
    return loss, grad_w, grad_b


def train(d: Dataset, cfg: BaselineConfig) -> BaselineModel:
    """Fit by per-example gradient descent over seeded-shuffled epochs.

    Positive examples carry cfg.positive_weight in the loss; training twice
    with the same inputs gives bit-identical weights.
    """
    if d.positive_count == 0 or d.negative_count == 0:
        raise ValueError("training data must contain both labels")
    feats = [hashed_features(r.text, cfg) for r in d.records]
    labels = [float(r.label) for r in d.records]
    sample_weights = [cfg.positive_weight if r.label == 1 else 1.0 for r in d.records]

    weights = np.zeros(cfg.feature_buckets, dtype=np.float64)
    bias = 0.0
    lr = cfg.learning_rate
    decay = 1.0 - lr * cfg.l2
    rng = random.Random(cfg.seed)
    order = list(range(len(d.records)))
    for _ in range(cfg.epochs):
        seeded_shuffle(order, rng)
        for i in order:
            idx, val = feats[i]
            z = float(weights[idx] @ val) + bias
            g = sample_weights[i] * (_sigmoid(z) - labels[i])
            if cfg.l2 > 0.0:
                weights *= decay
            if idx.size:
                weights[idx] -= lr * g * val
            bias -= lr * g
    return BaselineModel(weights=weights, bias=bias, config=cfg)


def predict_prob(m: BaselineModel, text: str) -> float:
    """Positive-class probability: sigmoid of the hashed-feature linear score."""
    idx, val = hashed_features(text, m.config)
    z = float(m.weights[idx] @ val) + m.bias if idx.size else m.bias
    return _sigmoid(z)


def save_model(m: BaselineModel, path: str | Path) -> None:
    """Dump weights, bias, and the config echo to a versioned .npz file."""
    cfg = dataclasses.asdict(m.config)
    cfg["ngram_range"] = list(cfg["ngram_range"])
    buf = io.BytesIO()
    np.savez(
        buf,
        format_version=np.int64(MODEL_FORMAT_VERSION),
        weights=m.weights,
        bias=np.float64(m.bias),
        config_json=np.bytes_(json.dumps(cfg).encode("utf-8")),
    )
    atomic_write_bytes(path, buf.getvalue())


def load_model(path: str | Path) -> BaselineModel:
    with np.load(path) as data:
        version = int(data["format_version"])
        if version != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {version}")
        cfg_dict = json.loads(bytes(data["config_json"]).decode("utf-8"))
        cfg_dict["ngram_range"] = tuple(cfg_dict["ngram_range"])
        cfg = BaselineConfig(**cfg_dict)
        return BaselineModel(weights=data["weights"], bias=float(data["bias"]), config=cfg)


def run_protocol(
    train_set: Dataset,
    eval_set: Dataset,
    model_specs: Sequence[tuple[str, BaselineConfig]],
    runs: int,
    out_path: str | Path,
) -> Path:
    """Train `runs` seeded models per spec and write one merged prediction file.

    Run k of a spec uses seed cfg.seed + k; run ids are r1..rN. The written
    file feeds straight into prediction ingestion, run averaging, ensembling,
    and evaluation.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    records = []
    for model_id, cfg in model_specs:
        eval_feats = [hashed_features(r.text, cfg) for r in eval_set.records]
        for k in range(runs):
            run_cfg = dataclasses.replace(cfg, seed=cfg.seed + k)
            model = train(train_set, run_cfg)
            run_id = f"r{k + 1}"
            for rec, (idx, val) in zip(eval_set.records, eval_feats):
                z = float(model.weights[idx] @ val) + model.bias if idx.size else model.bias
                records.append(PredictionRecord(model_id, run_id, rec.tweet_id, _sigmoid(z)))
    out_path = Path(out_path)
    write_predictions(records, out_path)
    return out_path
