"""Topic mining for keyword-collected social media corpora.

The pipeline: clean and stem raw posts, weed out off-topic documents
with a linear relevance classifier, fit LDA by collapsed Gibbs
sampling, score topic coherence, and chart how topic prevalence moves
week by week against an event timeline. Every stage is deterministic
given the master seed.
"""

from .balance import knn_indices, smote
from .classify import (
    LabeledPoint, LinearModel, LogRegParams, Metrics, SplitSpec, SvmParams,
    compute_metrics, cross_validate, evaluate, predict, split, split_indices,
    train_logreg, train_svm,
)
from .config import RunConfig, load_config
from .corpus import (
    CleanDocument, PreprocessConfig, RawDocument, deduplicate, load_corpus,
    normalize, preprocess, remove_stopwords, stem_tokens, tokenize,
)
from .errors import ConfigError, DataError, NumericError, TopicflowError
from .features import (
    PcaModel, SparseVector, Vocabulary, build_vocabulary, load_embeddings,
    pca_fit, pca_transform, tfidf_matrix, tfidf_vector,
)
from .porter import stem
from .report import RunArtifacts, emit_run_report, intertopic_map, js_divergence
from .rng import Xoshiro256, derive_seed
from .topics import (
    DocTopics, LdaModel, LdaParams, coherence_sweep, lda_fit, lda_infer,
    npmi_coherence, top_words, topic_distribution, umass_coherence,
)
from .trends import TrendMatrix, align_events, assign_weeks, load_timeline, topic_trend

__version__ = "0.1.0"

__all__ = [
    "CleanDocument", "ConfigError", "DataError", "DocTopics", "LabeledPoint",
    "LdaModel", "LdaParams", "LinearModel", "LogRegParams", "Metrics",
    "NumericError", "PcaModel", "PreprocessConfig", "RawDocument",
    "RunArtifacts", "RunConfig", "SparseVector", "SplitSpec", "SvmParams",
    "TopicflowError", "TrendMatrix", "Vocabulary", "Xoshiro256",
    "align_events", "assign_weeks", "build_vocabulary", "coherence_sweep",
    "compute_metrics", "cross_validate", "deduplicate", "derive_seed",
    "emit_run_report", "evaluate", "intertopic_map", "js_divergence",
    "knn_indices", "lda_fit", "lda_infer", "load_config", "load_corpus",
    "load_embeddings", "load_timeline", "normalize", "npmi_coherence",
    "pca_fit", "pca_transform", "predict", "preprocess", "remove_stopwords",
    "smote", "split", "split_indices", "stem", "stem_tokens", "tfidf_matrix",
    "tfidf_vector", "top_words", "topic_distribution", "topic_trend",
    "tokenize", "train_logreg", "train_svm", "umass_coherence",
]
