"""Probability-possibility inference and hybrid multiple-model estimation.

The package couples two normalizations of uncertainty: additive
(probabilities, disjunction by summation) and maxitive (possibilities,
disjunction by maximization).  On top of a shared Kalman core it
provides the classic IMM filter and its hybrid counterpart in which the
discrete mode process is treated as fuzzy, plus sequential classifiers
in both forms and a seeded Monte Carlo radar-tracking benchmark.
"""

from .classify import (
    ClassifierModel,
    ClassifierState,
    classify_step,
    initial_state,
    map_decision,
    max_classify_step,
    sigma_classify_step,
)
from .discrete import (
    ConditionalTable,
    DegenerateEvidenceError,
    DiscretePossibility,
    DiscreteProbability,
    HybridJoint,
    OutcomeSet,
    compose_fuzzy,
    compose_hetero_to_poss,
    compose_hetero_to_prob,
    compose_stochastic,
    hybrid_from_marginal_conditional,
    induced_marginal,
    poss_to_prob,
    poss_update_with_prob_likelihood,
    possibility_update,
    prob_to_poss,
    prob_update_with_poss_likelihood,
)
from .gaussian import (
    InnovationRecord,
    LinearGaussianModel,
    StateEstimate,
    gaussian_possibility,
    kf_predict,
    kf_update,
    pdf_to_possibility_1d,
    poss_predict,
    poss_update,
)
from .motion import (
    ModelBank,
    TransitionPossibilityMatrix,
    TransitionProbabilityMatrix,
    build_bank,
    build_dwna,
    build_dwpa,
    embed_state,
    validate_transition,
)
from .multimodel import (
    CycleOutput,
    HimmState,
    ImmState,
    LikelihoodUnderflowWarning,
    himm_cycle,
    himm_interact,
    himm_mode_update,
    himm_output,
    imm_cycle,
    imm_interact,
    imm_mode_update,
    imm_output,
    initial_himm_state,
    initial_imm_state,
)
from .scenario import (
    ConvertedMeasurement,
    GroupSpec,
    MonteCarloReport,
    Phase,
    RadarMeasurement,
    ScenarioConfig,
    SensorSpec,
    TrackerSpec,
    convert_measurement,
    cross_time,
    experiment_group,
    generate_truth,
    initialize_filters,
    run_monte_carlo,
    scenario_1,
    scenario_2,
    simulate_radar,
    three_point_init,
    two_point_init,
)

__version__ = "0.1.0"
