"""Distribution-shift toolkit for source-code datasets.

Builds property-masked train/test splits of paired code corpora (complexity,
syntax, and semantics dimensions) and scores model prediction files against
them.
"""

__version__ = "0.1.0"

from .corpus import CodeSample, Corpus, TaskKind, basis_text, corpus_stats, load_corpus, save_corpus
from .distribution import (
    ComplexityRange,
    complexity_members,
    default_complexity_scenarios,
    element_coverage,
    suggest_syntax_scenarios,
)
from .elements import (
    SYNTAX_PRESETS,
    ElementHistogram,
    ElementKind,
    contains_element,
    element_histogram,
    extract_elements,
)
from .errors import LexError, ValidationError
from .evaluation import (
    EvalReport,
    PredictionSet,
    aggregate_reports,
    corpus_bleu,
    element_generation_frequency,
    evaluate_scenario,
    exact_match,
    load_predictions,
    nll_histogram,
    relative_em,
)
from .lexer import Token, TokenKind, token_size, tokenize
from .semantics import (
    ClusterModel,
    EmbeddingSet,
    PcaModel,
    cluster_members,
    elbow_select,
    fit_pca,
    kmeans_fit,
    load_embeddings,
    sample_cluster_examples,
)
from .splitter import ScenarioSpec, SplitManifest, build_split, emit_training_files, property_predicate

__all__ = [
    "CodeSample", "Corpus", "TaskKind", "basis_text", "corpus_stats", "load_corpus",
    "save_corpus", "ComplexityRange", "complexity_members", "default_complexity_scenarios",
    "element_coverage", "suggest_syntax_scenarios", "SYNTAX_PRESETS", "ElementHistogram",
    "ElementKind", "contains_element", "element_histogram", "extract_elements",
    "LexError", "ValidationError", "EvalReport", "PredictionSet", "aggregate_reports",
    "corpus_bleu", "element_generation_frequency", "evaluate_scenario", "exact_match",
    "load_predictions", "nll_histogram", "relative_em", "Token", "TokenKind",
    "token_size", "tokenize", "ClusterModel", "EmbeddingSet", "PcaModel",
    "cluster_members", "elbow_select", "fit_pca", "kmeans_fit", "load_embeddings",
    "sample_cluster_examples", "ScenarioSpec", "SplitManifest", "build_split",
    "emit_training_files", "property_predicate", "__version__",
]
