"""Topic segmentation, evaluation and titling toolkit for podcast-style transcripts."""

__version__ = "0.1.0"

from .corpus import AnnotatedEpisode, load_annotations, load_survey, load_transcript, synth_corpus
from .embeddings import EmbeddingStore, load_vectors, sentence_vector
from .segmetrics import (
    EvalReport,
    SurveyTable,
    WindowConfig,
    pearson,
    pk,
    random_baseline,
    relevancy,
    window_diff,
)
from .textmodel import Segmentation, Transcript, boundaries_of, masses_of, tokenize
from .textsplit import SplitParams, dynamic_split, greedy_split, penalty_from_length, split
from .texttiling import TilingParams, tile
from .tuning import GridSpec, TuneResult, select_best, tune_textsplit, tune_tiling

__all__ = [
    "__version__",
    "AnnotatedEpisode",
    "EmbeddingStore",
    "EvalReport",
    "GridSpec",
    "Segmentation",
    "SplitParams",
    "SurveyTable",
    "TilingParams",
    "Transcript",
    "TuneResult",
    "WindowConfig",
    "boundaries_of",
    "dynamic_split",
    "greedy_split",
    "load_annotations",
    "load_survey",
    "load_transcript",
    "load_vectors",
    "masses_of",
    "pearson",
    "penalty_from_length",
    "pk",
    "random_baseline",
    "relevancy",
    "select_best",
    "sentence_vector",
    "split",
    "synth_corpus",
    "tile",
    "tokenize",
    "tune_textsplit",
    "tune_tiling",
    "window_diff",
]
