"""Cohort-level modality acquisition: metrics, strategies and budget sweeps."""

from .cohort import Cohort, ScoreRecord
from .errors import (
    CamaError,
    ConfigurationError,
    DataFormatError,
    DegenerateTaskError,
    DomainError,
    NotFoundError,
    PreconditionError,
    UndefinedMetricError,
)
from .gains import (
    AcquisitionPlan,
    CohortState,
    auprc_marginal_gain,
    auroc_marginal_gain,
    greedy_oracle_select,
)
from .metrics import LabeledScores, auprc, auroc, bernoulli_kl, binary_entropy, sigmoid
from .rank_index import FenwickTree, ScoreIndex
from .runner import RunConfig, run_evaluation
from .simulation import (
    BudgetGrid,
    GainRow,
    PerformanceCurve,
    acquisition_counts,
    aggregate,
    filter_negative_gain,
    g_full,
    sweep,
)
from .strategies import ALL_STRATEGIES, StrategyKind, priority_scores, select_top
from .synth import SynthConfig, generate

__version__ = "0.1.0"

__all__ = [
    "ALL_STRATEGIES", "AcquisitionPlan", "BudgetGrid", "CamaError", "Cohort",
    "CohortState", "ConfigurationError", "DataFormatError", "DegenerateTaskError",
    "DomainError", "FenwickTree", "GainRow", "LabeledScores", "NotFoundError",
    "PerformanceCurve", "PreconditionError", "RunConfig", "ScoreIndex", "ScoreRecord",
    "StrategyKind", "SynthConfig", "UndefinedMetricError", "acquisition_counts",
    "aggregate", "auprc", "auprc_marginal_gain", "auroc", "auroc_marginal_gain",
    "bernoulli_kl", "binary_entropy", "filter_negative_gain", "g_full", "generate",
    "greedy_oracle_select", "priority_scores", "run_evaluation", "select_top",
    "sigmoid", "sweep",
]
