"""Study data model: crossover plans, image pairs, timed trial records.

A plan names two volunteer groups and any number of image-pair datasets;
the assignment table gives each (group, dataset) cell a viewing
condition, and validation enforces the crossover: within every dataset
the two groups see opposite conditions, so each scene is evaluated under
both conditions without any volunteer seeing the same scene twice.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping

from ..errors import StudyError

__all__ = [
    "CONDITIONS",
    "TargetBox",
    "ImagePair",
    "StudyPlan",
    "TrialRecord",
    "assign_condition",
    "trial_order",
    "plan_from_dict",
    "plan_to_dict",
]

CONDITIONS = ("original", "inpainted")


@dataclass(frozen=True)
class TargetBox:
    """Axis-aligned destination box in image pixels; right/bottom exclusive."""

    x: int
    y: int
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise StudyError(f"target box must be nonempty, got {self.width}x{self.height}")
        if self.x < 0 or self.y < 0:
            raise StudyError("target box origin must be non-negative")

    def contains(self, px: float, py: float) -> bool:
        return self.x <= px < self.x + self.width and self.y <= py < self.y + self.height


@dataclass(frozen=True)
class ImagePair:
    pair_id: str
    original_image: str
    inpainted_image: str
    image_width: int
    image_height: int
    target_name: str
    target_box: TargetBox

    def __post_init__(self) -> None:
        if self.image_width <= 0 or self.image_height <= 0:
            raise StudyError(f"pair {self.pair_id}: image dimensions must be positive")
        box = self.target_box
        if box.x + box.width > self.image_width or box.y + box.height > self.image_height:
            raise StudyError(f"pair {self.pair_id}: target box leaves the image bounds")

    def image_for(self, condition: str) -> str:
        return self.original_image if condition == "original" else self.inpainted_image


@dataclass(frozen=True)
class StudyPlan:
    groups: tuple[str, str]
    datasets: Mapping[str, tuple[ImagePair, ...]]
    assignment: Mapping[tuple[str, str], str]  # (group, dataset) -> condition
    seed: int = 0

    def __post_init__(self) -> None:
        if len(self.groups) != 2 or self.groups[0] == self.groups[1]:
            raise StudyError("a crossover plan needs exactly two distinct groups")
        if not self.datasets:
            raise StudyError("plan has no datasets")
        seen_pairs: set[str] = set()
        for name, pairs in self.datasets.items():
            if not pairs:
                raise StudyError(f"dataset {name!r} is empty")
            for pair in pairs:
                if pair.pair_id in seen_pairs:
                    raise StudyError(f"duplicate pair_id {pair.pair_id!r}")
                seen_pairs.add(pair.pair_id)
        for (group, dataset), condition in self.assignment.items():
            if group not in self.groups:
                raise StudyError(f"assignment names unknown group {group!r}")
            if dataset not in self.datasets:
                raise StudyError(f"assignment names unknown dataset {dataset!r}")
            if condition not in CONDITIONS:
                raise StudyError(f"unknown condition {condition!r}")
        for dataset in self.datasets:
            cell = [self.assignment.get((g, dataset)) for g in self.groups]
            if None in cell:
                raise StudyError(f"dataset {dataset!r} is not assigned for both groups")
            if cell[0] == cell[1]:
                raise StudyError(
                    f"crossover violated: both groups see {cell[0]!r} for dataset {dataset!r}"
                )

    def pair(self, pair_id: str) -> tuple[str, ImagePair]:
        for dataset, pairs in self.datasets.items():
            for p in pairs:
                if p.pair_id == pair_id:
                    return dataset, p
        raise StudyError(f"unknown pair {pair_id!r}")


def assign_condition(plan: StudyPlan, group: str, dataset: str) -> str:
    """Condition the plan's table assigns to (group, dataset)."""
    if group not in plan.groups:
        raise StudyError(f"unknown group {group!r}")
    if dataset not in plan.datasets:
        raise StudyError(f"unknown dataset {dataset!r}")
    return plan.assignment[(group, dataset)]


def trial_order(plan: StudyPlan, volunteer_id: str) -> list[tuple[str, str]]:
    """Deterministic per-volunteer ordering of all (dataset, pair_id) trials.

    A seeded shuffle interleaves the datasets; every volunteer sees each
    scene exactly once, under their group's condition for its dataset.
    """
    items = [
        (dataset, pair.pair_id)
        for dataset in sorted(plan.datasets)
        for pair in plan.datasets[dataset]
    ]
    random.Random(f"{plan.seed}:{volunteer_id}").shuffle(items)
    return items


@dataclass(frozen=True)
class TrialRecord:
    """One timed search: shown/found server timestamps in ms since epoch."""

    volunteer_id: str
    pair_id: str
    condition: str
    shown_at: int
    found_at: int
    duration_ms: int
    click: tuple[float, float]
    hit: bool
    client_duration_ms: int | None = None
    session_id: str = ""

    def __post_init__(self) -> None:
        if self.condition not in CONDITIONS:
            raise StudyError(f"unknown condition {self.condition!r}")
        if self.found_at < self.shown_at:
            raise StudyError(
                f"clock skew: found_at {self.found_at} precedes shown_at {self.shown_at}"
            )
        if self.duration_ms != self.found_at - self.shown_at:
            raise StudyError("duration must equal found_at - shown_at")


# --- JSON (de)serialization --------------------------------------------------

def plan_from_dict(doc: dict) -> StudyPlan:
    try:
        groups = tuple(doc["groups"])
        datasets = {
            name: tuple(
                ImagePair(
                    pair_id=p["pair_id"],
                    original_image=p["original_image"],
                    inpainted_image=p["inpainted_image"],
                    image_width=int(p["image_width"]),
                    image_height=int(p["image_height"]),
                    target_name=p["target_name"],
                    target_box=TargetBox(**p["target_box"]),
                )
                for p in pairs
            )
            for name, pairs in doc["datasets"].items()
        }
        assignment = {
            (group, dataset): condition
            for group, cells in doc["assignment"].items()
            for dataset, condition in cells.items()
        }
    except (KeyError, TypeError) as exc:
        raise StudyError(f"malformed study plan: {exc!r}") from exc
    return StudyPlan(
        groups=groups, datasets=datasets, assignment=assignment, seed=int(doc.get("seed", 0))
    )


def plan_to_dict(plan: StudyPlan) -> dict:
    assignment: dict[str, dict[str, str]] = {g: {} for g in plan.groups}
    for (group, dataset), condition in plan.assignment.items():
        assignment[group][dataset] = condition
    return {
        "groups": list(plan.groups),
        "datasets": {
            name: [
                {
                    "pair_id": p.pair_id,
                    "original_image": p.original_image,
                    "inpainted_image": p.inpainted_image,
                    "image_width": p.image_width,
                    "image_height": p.image_height,
                    "target_name": p.target_name,
                    "target_box": {
                        "x": p.target_box.x,
                        "y": p.target_box.y,
                        "width": p.target_box.width,
                        "height": p.target_box.height,
                    },
                }
                for p in pairs
            ]
            for name, pairs in plan.datasets.items()
        },
        "assignment": assignment,
        "seed": plan.seed,
    }
