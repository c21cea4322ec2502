"""Expected-hitting-time lower bounds for (lambda+lambda) evolutionary
architecture search, with exact transition probabilities and a Monte-Carlo
validation harness."""

from .genotype import (
    DistanceProfile,
    Genotype,
    SearchSpaceParams,
    count_population_class,
    count_population_subspace,
    count_solutions_at_distance,
    derive_params,
    distance_profile,
    hamming,
    population_space_size,
    solution_space_size,
)
from .operators import MutationOp, Population, init_population, mutate1, mutate2, mutate3, mutate4, truncation_select
from .transition import (
    DistanceStepDistribution,
    exact_enumeration_oracle,
    min_tail_probability,
    p_binary_qbit,
    p_m1,
    p_m2,
    p_m3,
    p_m4,
)
from .drift import (
    ClassGammaWeights,
    DistanceDistribution,
    EhtBoundReport,
    case_study_bounds,
    class_gamma_weights,
    eht_lower_bound_m1,
    eht_lower_bound_m2,
    eht_lower_bound_m3,
    eht_lower_bound_m4,
    expected_initial_distance,
    gaussian_fit_distribution,
    uniform_initial_distribution,
)
from .benchio import (
    DistanceLandscape,
    FitnessLandscape,
    TabularBenchmark,
    distance_landscape,
    generate_synthetic_table,
    load_tabular_benchmark,
)
from .simulator import (
    HittingTimeRecord,
    HittingTimeStats,
    RunConfig,
    mc_transition_oracle,
    run_enas,
    run_trials,
    sample_distance_distribution,
)

__version__ = "0.1.0"
