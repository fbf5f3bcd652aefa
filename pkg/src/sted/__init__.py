"""Semantic tree edit distance (STED) and consistency scoring for JSON documents."""

from __future__ import annotations

from .consistency import (
    ConsistencyReport,
    SimilaritySet,
    consistency_score,
    evaluate_consistency,
    mean_consistency,
    pairwise_similarities,
    sigma_max,
    summary_stats,
)
from .core import (
    Comparator,
    CostMatrix,
    Difference,
    MatchResult,
    SimilarityResult,
    StedConfig,
    compare_report,
    node_update_cost,
    optimal_children_matching,
    sted_score,
    sted_similarity,
)
from .embeddings import Embedder, EmbeddingCache, EmbeddingProviderSpec, embed_text
from .errors import InputError, ProviderError, StedError
from .hungarian import hungarian_solve
from .similarity import (
    ScalarComparisonPolicy,
    label_similarity,
    normalize_field_name,
    scalar_similarity,
    text_similarity,
)
from .ted import TedConfig, ted_report, ted_similarity
from .tree import DocumentTree, TreeNode, parse_document, tree_stats
from .variation import (
    BaseDocSpec,
    VariationSpec,
    apply_expression_variation,
    apply_field_rename,
    apply_semantic_variation,
    flatten_structure,
    gen_base_document,
    nest_structure,
)

__version__ = "0.1.0"

__all__ = [
    "BaseDocSpec", "Comparator", "ConsistencyReport", "CostMatrix", "Difference", "DocumentTree",
    "Embedder", "EmbeddingCache", "EmbeddingProviderSpec", "InputError", "MatchResult", "ProviderError",
    "ScalarComparisonPolicy", "SimilarityResult", "SimilaritySet", "StedConfig", "StedError", "TedConfig",
    "TreeNode", "VariationSpec", "apply_expression_variation", "apply_field_rename",
    "apply_semantic_variation", "compare_report", "consistency_score", "embed_text",
    "evaluate_consistency", "flatten_structure", "gen_base_document", "hungarian_solve",
    "label_similarity", "mean_consistency", "nest_structure", "node_update_cost",
    "normalize_field_name", "optimal_children_matching", "pairwise_similarities", "parse_document",
    "scalar_similarity", "sigma_max", "sted_score", "sted_similarity", "summary_stats",
    "ted_report", "ted_similarity", "text_similarity", "tree_stats",
]
