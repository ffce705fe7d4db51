"""Search-time normalization and improvement statistics.

Aggregation order is fixed: each volunteer's durations are min-max
normalized to [0, 1] over all of their trials first (absorbing individual
speed differences), then normalized values are averaged per volunteer
within each dataset, then across volunteers per condition. Volunteers
whose durations cannot be normalized (fewer than two trials, or all
durations equal) are excluded and reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import NotNormalizableError, StudyError
from .model import StudyPlan, TrialRecord

__all__ = [
    "StudySummary",
    "StudyReport",
    "normalize_times",
    "compute_improvement",
    "summarize_study",
]


def normalize_times(durations: Sequence[float]) -> list[float]:
    """Min-max scale one volunteer's durations to [0, 1].

    Needs at least two trials with at least two distinct values;
    otherwise the scale is undefined and the volunteer must be excluded.
    """
    if len(durations) < 2:
        raise NotNormalizableError(f"need >= 2 trials, got {len(durations)}")
    lo = min(durations)
    hi = max(durations)
    if hi == lo:
        raise NotNormalizableError("all durations equal; min-max scale undefined")
    span = hi - lo
    return [(t - lo) / span for t in durations]


def compute_improvement(mean_original: float, mean_inpainted: float) -> float:
    """Percent search-time reduction relative to the original condition."""
    if mean_original <= 0:
        raise ValueError(f"mean_original must be positive, got {mean_original}")
    return (mean_original - mean_inpainted) / mean_original * 100.0


@dataclass(frozen=True)
class StudySummary:
    """Per-dataset outcome: mean normalized search time per condition."""

    dataset: str
    mean_original: float
    mean_inpainted: float
    improvement_pct: float
    volunteers_original: int
    volunteers_inpainted: int


@dataclass(frozen=True)
class StudyReport:
    summaries: tuple[StudySummary, ...]
    excluded_volunteers: tuple[str, ...]
    aggregation: str = "normalize per volunteer, then mean per volunteer per dataset, then mean across volunteers"

    def to_dict(self) -> dict:
        return {
            "aggregation": self.aggregation,
            "excluded_volunteers": list(self.excluded_volunteers),
            "datasets": [
                {
                    "dataset": s.dataset,
                    "mean_original": s.mean_original,
                    "mean_inpainted": s.mean_inpainted,
                    "improvement_pct": s.improvement_pct,
                    "volunteers_original": s.volunteers_original,
                    "volunteers_inpainted": s.volunteers_inpainted,
                }
                for s in self.summaries
            ],
        }


def summarize_study(
    plan: StudyPlan, trials: Iterable[TrialRecord], hits_only: bool = False
) -> StudyReport:
    """Aggregate trial records into per-dataset summaries.

    With hits_only, trials whose click missed the target box are dropped
    before normalization (default keeps everything).
    """
    pair_to_dataset = {
        pair.pair_id: dataset for dataset, pairs in plan.datasets.items() for pair in pairs
    }
    by_volunteer: dict[str, list[TrialRecord]] = {}
    for record in trials:
        if hits_only and not record.hit:
            continue
        if record.pair_id not in pair_to_dataset:
            raise StudyError(f"trial references unknown pair {record.pair_id!r}")
        by_volunteer.setdefault(record.volunteer_id, []).append(record)

    normalized: dict[str, dict[str, float]] = {}
    conditions: dict[tuple[str, str], str] = {}  # (volunteer, dataset) -> condition
    excluded: list[str] = []
    for volunteer in sorted(by_volunteer):
        records = by_volunteer[volunteer]
        try:
            values = normalize_times([r.duration_ms for r in records])
        except NotNormalizableError:
            excluded.append(volunteer)
            continue
        normalized[volunteer] = {r.pair_id: v for r, v in zip(records, values)}
        for r in records:
            conditions[(volunteer, pair_to_dataset[r.pair_id])] = r.condition

    summaries = []
    for dataset in sorted(plan.datasets):
        per_condition: dict[str, list[float]] = {"original": [], "inpainted": []}
        for volunteer, values in normalized.items():
            in_dataset = [
                v for pid, v in values.items() if pair_to_dataset[pid] == dataset
            ]
            if not in_dataset:
                continue
            condition = conditions[(volunteer, dataset)]
            per_condition[condition].append(sum(in_dataset) / len(in_dataset))
        if not per_condition["original"] or not per_condition["inpainted"]:
            raise StudyError(
                f"insufficient data for dataset {dataset!r}: need at least one "
                "normalizable volunteer per condition"
            )
        mean_o = sum(per_condition["original"]) / len(per_condition["original"])
        mean_i = sum(per_condition["inpainted"]) / len(per_condition["inpainted"])
        try:
            improvement = compute_improvement(mean_o, mean_i)
        except ValueError as exc:
            raise StudyError(f"dataset {dataset!r}: {exc}") from exc
        summaries.append(
            StudySummary(
                dataset=dataset,
                mean_original=mean_o,
                mean_inpainted=mean_i,
                improvement_pct=improvement,
                volunteers_original=len(per_condition["original"]),
                volunteers_inpainted=len(per_condition["inpainted"]),
            )
        )
    return StudyReport(summaries=tuple(summaries), excluded_volunteers=tuple(excluded))
