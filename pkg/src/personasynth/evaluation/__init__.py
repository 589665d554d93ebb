"""Multi-producer solving, consensus filtering, answer equality and similarity-band experiments."""

from .answers import (
    EqualityChecker,
    check_answer_equality,
    extract_final_answer,
    fast_equal,
    judge_prompt,
    normalize_answer,
)
from .consensus import ConsensusDecision, ConsensusResult, answer_classes, consensus_filter, decide
from .similarity import (
    BandSpec,
    SimilarityExperimentResult,
    pair_cosine,
    run_similarity_experiment,
    sample_pairs_at_band,
)
from .solve import Producer, SolutionSet, Strategy, solution_prompt, solve_items

__all__ = [
    "BandSpec", "ConsensusDecision", "ConsensusResult", "EqualityChecker", "Producer",
    "SimilarityExperimentResult", "SolutionSet", "Strategy", "answer_classes", "check_answer_equality",
    "consensus_filter", "decide", "extract_final_answer", "fast_equal", "judge_prompt", "normalize_answer",
    "pair_cosine", "run_similarity_experiment", "sample_pairs_at_band", "solution_prompt", "solve_items",
]
