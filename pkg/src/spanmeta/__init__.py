"""Span-level precision, recall and F-score for error-span annotations."""

from .aggregate import (
    CorpusScore,
    concatenate,
    macro_average,
    micro_em_mp,
    micro_mpp,
    micro_w,
    score_dataset,
)
from .core import AnnotatedSpan, Dataset, Segment, Span, overlap, span_length, union_length, validate_segment
from .matching import (
    Matching,
    brute_force_matching,
    candidate_pairs,
    optimal_matching_em,
    optimal_matching_mp,
    optimal_matching_mpp,
)
from .measures import (
    PRF,
    Kind,
    MeasureConfig,
    prf_from_counts,
    score,
    score_approx_w25,
    score_em,
    score_mp,
    score_mpp,
    score_w19,
    score_w23,
    score_w25,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotatedSpan", "CorpusScore", "Dataset", "Kind", "Matching", "MeasureConfig", "PRF", "Segment", "Span",
    "brute_force_matching", "candidate_pairs", "concatenate", "macro_average", "micro_em_mp", "micro_mpp",
    "micro_w", "optimal_matching_em", "optimal_matching_mp", "optimal_matching_mpp", "overlap",
    "prf_from_counts", "score", "score_approx_w25", "score_dataset", "score_em", "score_mp", "score_mpp",
    "score_w19", "score_w23", "score_w25", "span_length", "union_length", "validate_segment",
]
