"""NIC-pair network failure diagnosis for HPC clusters.

Thin Python surface over the C++ core: feature-vector similarity and
compression, the state-probability walk, log template mining, and the
ranked-result accuracy metrics.
"""

from nicdiag._core import (
    FAILURE_TYPES,
    STATES,
    ac_at_k,
    avg_at_k,
    build_transition_matrix,
    compress,
    culprit_mass,
    level_symbols,
    normalize_slice,
    parse_templates,
    random_walk,
    similarity,
)

__all__ = [
    "FAILURE_TYPES",
    "STATES",
    "ac_at_k",
    "avg_at_k",
    "build_transition_matrix",
    "compress",
    "culprit_mass",
    "level_symbols",
    "normalize_slice",
    "parse_templates",
    "random_walk",
    "similarity",
]
