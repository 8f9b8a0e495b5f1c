"""Low-sum copies of spanning forests in +-1 edge-labeled complete graphs."""

__version__ = "0.1.0"

from .embedders import (
    EmbedResult,
    GreedyConfig,
    WalkResult,
    best_embed,
    greedy_embed,
    monotone_embed,
    prop2_embed,
    reorder_forest,
    transposition_walk,
)
from .expectation import (
    CandidateEvaluation,
    ExpectationState,
    evaluate_candidate,
    expectation,
    expectation_direct,
    init_state,
    place,
)
from .graphs import (
    EdgeLabeling,
    Embedding,
    SpanningForest,
    VertexOrdering,
    copy_sum,
    gen_forest,
    gen_zero_sum_labeling,
    validate_labeling,
)
from .local_search import SpanningSubgraph, boundary_set, descend, swap_delta, swap_roles
from .oracle import SumDistribution, conditional_expectation_bruteforce, enumerate_sums, min_abs_sum
