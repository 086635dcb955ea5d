"""Evolutionary core: reference points, sorting, niching, and the main loop."""

from nsgafo.core.algorithm import (
    ALGORITHMS,
    AlgorithmConfig,
    EvaluationError,
    GenerationRecord,
    OptimizerState,
    RunTrace,
    evolve_generation,
    initialize,
    run,
)
from nsgafo.core.niching import associate, niching_select
from nsgafo.core.normalization import normalize, plane_distance
from nsgafo.core.operators import polynomial_mutation, sbx_crossover
from nsgafo.core.population import Individual, Population, pareto_set, update_archive
from nsgafo.core.reference import ReferenceSet, das_dennis, default_population_size, n_reference_points
from nsgafo.core.screening import RateState, adaptive_rates, screen_focused
from nsgafo.core.sorting import domination_matrix, fast_nondominated_sort

__all__ = [
    "ALGORITHMS",
    "AlgorithmConfig",
    "EvaluationError",
    "GenerationRecord",
    "Individual",
    "OptimizerState",
    "Population",
    "RateState",
    "ReferenceSet",
    "RunTrace",
    "adaptive_rates",
    "associate",
    "das_dennis",
    "default_population_size",
    "domination_matrix",
    "evolve_generation",
    "fast_nondominated_sort",
    "initialize",
    "n_reference_points",
    "niching_select",
    "normalize",
    "pareto_set",
    "plane_distance",
    "polynomial_mutation",
    "run",
    "sbx_crossover",
    "screen_focused",
    "update_archive",
]
