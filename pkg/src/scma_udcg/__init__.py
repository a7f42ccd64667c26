"""SCMA codebook design from uniquely decomposable constellation groups.

The public entry points are re-exported here; see the submodules for the
building blocks.
"""

from .codebook import (CodebookSet, GenerationMatrix, allocate_generation_matrix,
                       build_codebook_set, interleave_codebook_set, interleave_permutation,
                       latin_property_holds, normalize_codebook_set)
from .factorgraph import FactorGraph, design_factor_graph
from .linksim import MessagePassingDetector, SimConfig, mpa_detect, simulate_ber
from .metrics import MetricsReport, evaluate_codebook_set, min_product_distance, union_bound
from .optimizer import SearchConfig, design_pipeline, optimize_step_size
from .udcg import (ConstellationGroup, DesignError, DesignParams, build_udcg,
                   check_uniquely_decodable, superimpose)

__all__ = [
    "CodebookSet", "ConstellationGroup", "DesignError", "DesignParams", "FactorGraph",
    "GenerationMatrix", "MessagePassingDetector", "MetricsReport", "SearchConfig", "SimConfig",
    "allocate_generation_matrix", "build_codebook_set", "build_udcg", "check_uniquely_decodable",
    "design_factor_graph", "design_pipeline", "evaluate_codebook_set", "interleave_codebook_set",
    "interleave_permutation", "latin_property_holds", "min_product_distance",
    "normalize_codebook_set", "optimize_step_size", "simulate_ber", "superimpose", "union_bound",
]
