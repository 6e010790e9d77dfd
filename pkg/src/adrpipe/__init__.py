"""adrpipe: preprocessing, subword analysis, prediction ensembling, and
recall-oriented evaluation for adverse-drug-reaction tweet classification."""

from .corpus import (
    Dataset,
    LabeledTweet,
    duplicate_positives,
    load_dataset,
    save_dataset,
    stratified_split,
)
from .preprocess import (
    DrugLexicon,
    PipelineConfig,
    anonymize,
    drug_normalize,
    load_lexicon,
    preprocess,
    remove_hashtags,
    replace_handles,
)
from .tokenize import (
    SubwordVocab,
    TokenizationReport,
    corpus_token_stats,
    load_vocab,
    overlap_report,
    wordpiece_tokenize,
)
from .predictions import (
    PredictionRecord,
    RunMatrix,
    average_runs,
    filter_runs,
    load_predictions,
    write_predictions,
)
from .ensemble import EnsembleConfig, EnsembleDecision, decide, single_model_decide
from .evaluate import (
    AttributionBreakdown,
    ConfusionCounts,
    Metrics,
    VariabilityReport,
    attribution,
    confusion,
    metrics,
    variability,
)
from .baseline import (
    BaselineConfig,
    BaselineModel,
    load_model,
    predict_prob,
    run_protocol,
    save_model,
    train,
)
from .synthetic import make_synthetic_dataset

__version__ = "0.1.0"
