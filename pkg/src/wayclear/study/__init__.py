"""Timed wayfinding studies: crossover plans, trial capture, statistics."""

from .analysis import (
    StudyReport,
    StudySummary,
    compute_improvement,
    normalize_times,
    summarize_study,
)
from .model import (
    CONDITIONS,
    ImagePair,
    StudyPlan,
    TargetBox,
    TrialRecord,
    assign_condition,
    plan_from_dict,
    plan_to_dict,
    trial_order,
)
from .store import StudyStore

__all__ = [
    "CONDITIONS",
    "ImagePair",
    "StudyPlan",
    "StudyReport",
    "StudySummary",
    "StudyStore",
    "TargetBox",
    "TrialRecord",
    "assign_condition",
    "compute_improvement",
    "normalize_times",
    "plan_from_dict",
    "plan_to_dict",
    "summarize_study",
    "trial_order",
]
