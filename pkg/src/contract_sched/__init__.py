"""Learning-augmented contract scheduling.

Build 4-robust geometric schedules, evaluate their consistency under
distributional or multiple-prediction advice, construct the adversarial
advice that makes every schedule tight, measure advice error by transport
distance, and reproduce the experiment sweeps as CSVs.
"""

from .distributions import (
    AdviceDistribution,
    AdversarialContinuous,
    AdversarialDiscrete,
    PerturbedContinuous,
    PointSet,
    Shifted,
    TruncatedNormal,
    Uniform,
    adversarial_continuous,
    adversarial_discrete,
    shifted,
)
from .emd import (
    SmoothnessCheck,
    emd,
    perturb_boundary,
    perturb_split,
    rigid_shift,
    smoothness_bound,
    smoothness_check,
)
from .experiments import (
    ExperimentSpec,
    Range,
    UnknownExperimentError,
    describe_registry,
    run_experiment,
)
from .multi import (
    GapProfile,
    PredictionSet,
    average_consistency,
    best_schedule_by_gaps,
    best_schedule_exact,
    decompose_time,
    gap_profile,
    prediction_consistency_bound,
    schedule_through,
    worst_case_consistency,
)
from .schedule import (
    FiniteSchedule,
    GeometricSchedule,
    acceleration_ratio_finite,
    fragility_probe,
    robustness_probe,
    single_advice_schedule,
)
from .selection import (
    ConsistencyReport,
    best_for_accuracy,
    best_in_portfolio,
    consistency,
    expected_profit,
    monte_carlo_consistency,
    performance_under,
    portfolio_bound,
)

__all__ = [
    "AdviceDistribution",
    "AdversarialContinuous",
    "AdversarialDiscrete",
    "ConsistencyReport",
    "ExperimentSpec",
    "FiniteSchedule",
    "GapProfile",
    "GeometricSchedule",
    "PerturbedContinuous",
    "PointSet",
    "PredictionSet",
    "Range",
    "Shifted",
    "SmoothnessCheck",
    "TruncatedNormal",
    "Uniform",
    "UnknownExperimentError",
    "acceleration_ratio_finite",
    "adversarial_continuous",
    "adversarial_discrete",
    "average_consistency",
    "best_for_accuracy",
    "best_in_portfolio",
    "best_schedule_by_gaps",
    "best_schedule_exact",
    "consistency",
    "decompose_time",
    "describe_registry",
    "emd",
    "expected_profit",
    "fragility_probe",
    "gap_profile",
    "monte_carlo_consistency",
    "performance_under",
    "perturb_boundary",
    "perturb_split",
    "portfolio_bound",
    "prediction_consistency_bound",
    "rigid_shift",
    "robustness_probe",
    "run_experiment",
    "schedule_through",
    "shifted",
    "single_advice_schedule",
    "smoothness_bound",
    "smoothness_check",
    "worst_case_consistency",
]

__version__ = "0.1.0"
