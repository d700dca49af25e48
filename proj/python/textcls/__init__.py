"""TF-IDF features, one-vs-rest linear SVMs and F1 evaluation."""

from ._core import (
    ConfigError,
    ConvergenceReport,
    DataError,
    Error,
    LinearModel,
    Loss,
    NumericError,
    SparseMatrix,
    Strategy,
    TargetMetric,
    TaskKind,
    TokenizerConfig,
    Vocabulary,
    analyze,
    corpus_stats,
    duality_gap,
    english_stop_words,
    evaluate,
    f1_scores,
    fit_vocabulary,
    predict_file,
    tokenize,
    train,
    train_binary,
    train_model,
    transform_tfidf,
)

__all__ = [name for name in dir() if not name.startswith("_")]
