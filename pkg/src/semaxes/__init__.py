"""Reproducible semantic axes from word embeddings.

Repeated FastICA with Icasso reliability clustering finds the components of
an embedding matrix that reappear across random restarts; those are labelled
with their top words and matched across languages with significance-corrected
correlation tests.
"""

__version__ = "0.1.0"

from .axes import SemanticAxis, interpret_all, interpret_component
from .crosslang import (bh_fdr_select, bonferroni_policy, cluster_across_languages,
                        correlation_pvalue, cross_similarity, make_policy)
from .embeddings import (EmbeddingMatrix, build_vocabulary_plan, load_bilingual_dictionary,
                         materialize, parse_vec_file)
from .evalkappa import RatingTable, fleiss_kappa
from .ica import IcaConfig, IcaResult, center_and_whiten, fastica, run_many
from .icasso import (agglomerate, build_similarity_matrix, centrotype, component_similarity,
                     quality_index, run_icasso)

__all__ = [
    "EmbeddingMatrix",
    "IcaConfig",
    "IcaResult",
    "RatingTable",
    "SemanticAxis",
    "agglomerate",
    "bh_fdr_select",
    "bonferroni_policy",
    "build_similarity_matrix",
    "build_vocabulary_plan",
    "center_and_whiten",
    "centrotype",
    "cluster_across_languages",
    "component_similarity",
    "correlation_pvalue",
    "cross_similarity",
    "fastica",
    "fleiss_kappa",
    "interpret_all",
    "interpret_component",
    "load_bilingual_dictionary",
    "make_policy",
    "materialize",
    "parse_vec_file",
    "quality_index",
    "run_icasso",
    "run_many",
]
