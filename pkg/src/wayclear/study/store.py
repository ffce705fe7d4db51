"""Append-only study persistence: one JSONL event log per study.

Every state change (plan creation, session open, trial) is one JSON line,
flushed and fsynced before the call returns, so an acknowledged write
survives a hard kill. Start-up replays the logs; a torn final line (crash
mid-write) is skipped since it was never acknowledged.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import StudyError
from .analysis import StudyReport, summarize_study
from .model import (
    StudyPlan,
    TrialRecord,
    assign_condition,
    plan_from_dict,
    plan_to_dict,
    trial_order,
)

__all__ = ["StudyStore", "SessionState"]

SCHEMA_VERSION = 1


def now_ms() -> int:
    return time.time_ns() // 1_000_000


@dataclass
class SessionState:
    session_id: str
    study_id: str
    volunteer_id: str
    group: str
    order: list[tuple[str, str]] = field(default_factory=list)  # (dataset, pair_id)


@dataclass
class _StudyState:
    study_id: str
    plan: StudyPlan
    trials: list[TrialRecord] = field(default_factory=list)
    done: set[tuple[str, str]] = field(default_factory=set)  # (volunteer, pair)


class StudyStore:
    """Durable study state shared by the HTTP service and the CLI."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._studies: dict[str, _StudyState] = {}
        self._sessions: dict[str, SessionState] = {}
        self._files: dict[str, object] = {}
        for path in sorted(self.root.glob("*.jsonl")):
            self._replay(path)

    # -- persistence ---------------------------------------------------------

    def _replay(self, path: Path) -> None:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    event = json.loads(line)
                except json.JSONDecodeError:
                    break  # torn final line from a crash mid-write; never acked
                self._apply(event)

    def _apply(self, event: dict) -> None:
        kind = event.get("kind")
        if kind == "study":
            plan = plan_from_dict(event["plan"])
            study_id = event["study_id"]
            self._studies[study_id] = _StudyState(study_id=study_id, plan=plan)
        elif kind == "session":
            study = self._studies[event["study_id"]]
            session = SessionState(
                session_id=event["session_id"],
                study_id=event["study_id"],
                volunteer_id=event["volunteer_id"],
                group=event["group"],
                order=trial_order(study.plan, event["volunteer_id"]),
            )
            self._sessions[session.session_id] = session
        elif kind == "trial":
            study = self._studies[event["study_id"]]
            record = TrialRecord(
                volunteer_id=event["volunteer_id"],
                pair_id=event["pair_id"],
                condition=event["condition"],
                shown_at=event["shown_at"],
                found_at=event["found_at"],
                duration_ms=event["duration_ms"],
                click=(event["click"]["x"], event["click"]["y"]),
                hit=event["hit"],
                client_duration_ms=event.get("client_duration_ms"),
                session_id=event.get("session_id", ""),
            )
            study.trials.append(record)
            study.done.add((record.volunteer_id, record.pair_id))

    def _append(self, study_id: str, event: dict) -> None:
        # append -> flush -> fsync, all before the caller acknowledges
        fh = self._files.get(study_id)
        if fh is None:
            fh = open(self.root / f"{study_id}.jsonl", "a", encoding="utf-8")
            self._files[study_id] = fh
        fh.write(json.dumps(event, sort_keys=True) + "\n")
        fh.flush()
        os.fsync(fh.fileno())

    # -- API -----------------------------------------------------------------

    def create_study(self, plan: StudyPlan) -> str:
        with self._lock:
            study_id = uuid.uuid4().hex[:12]
            event = {
                "v": SCHEMA_VERSION,
                "kind": "study",
                "study_id": study_id,
                "plan": plan_to_dict(plan),
                "created_at": now_ms(),
            }
            self._append(study_id, event)
            self._apply(event)
            return study_id

    def study_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._studies)

    def plan(self, study_id: str) -> StudyPlan:
        return self._study(study_id).plan

    def _study(self, study_id: str) -> _StudyState:
        state = self._studies.get(study_id)
        if state is None:
            raise StudyError(f"unknown study {study_id!r}")
        return state

    def open_session(self, study_id: str, volunteer_id: str, group: str) -> SessionState:
        with self._lock:
            study = self._study(study_id)
            if group not in study.plan.groups:
                raise StudyError(f"unknown group {group!r}")
            session_id = uuid.uuid4().hex[:12]
            event = {
                "v": SCHEMA_VERSION,
                "kind": "session",
                "study_id": study_id,
                "session_id": session_id,
                "volunteer_id": volunteer_id,
                "group": group,
                "created_at": now_ms(),
            }
            self._append(study_id, event)
            self._apply(event)
            return self._sessions[session_id]

    def session(self, session_id: str) -> SessionState:
        state = self._sessions.get(session_id)
        if state is None:
            raise StudyError(f"unknown session {session_id!r}")
        return state

    def next_pair(self, session_id: str):
        """First unanswered (dataset, pair, condition) in the session order."""
        with self._lock:
            session = self.session(session_id)
            study = self._study(session.study_id)
            for dataset, pair_id in session.order:
                if (session.volunteer_id, pair_id) in study.done:
                    continue
                _, pair = study.plan.pair(pair_id)
                condition = assign_condition(study.plan, session.group, dataset)
                return dataset, pair, condition
            return None

    def record_trial(
        self,
        session_id: str,
        pair_id: str,
        shown_at: int,
        found_at: int,
        click: tuple[float, float],
        client_duration_ms: int | None = None,
    ) -> TrialRecord:
        """Validate, persist and acknowledge one trial (first submission wins)."""
        with self._lock:
            session = self.session(session_id)
            study = self._study(session.study_id)
            if pair_id not in {pid for _, pid in session.order}:
                raise StudyError(f"pair {pair_id!r} is not assigned to this session")
            if (session.volunteer_id, pair_id) in study.done:
                raise StudyError(
                    f"duplicate trial for volunteer {session.volunteer_id!r}, pair {pair_id!r}"
                )
            dataset, pair = study.plan.pair(pair_id)
            condition = assign_condition(study.plan, session.group, dataset)
            record = TrialRecord(
                volunteer_id=session.volunteer_id,
                pair_id=pair_id,
                condition=condition,
                shown_at=shown_at,
                found_at=found_at,
                duration_ms=found_at - shown_at,
                click=click,
                hit=pair.target_box.contains(click[0], click[1]),
                client_duration_ms=client_duration_ms,
                session_id=session_id,
            )
            event = {
                "v": SCHEMA_VERSION,
                "kind": "trial",
                "study_id": session.study_id,
                "session_id": session_id,
                "volunteer_id": record.volunteer_id,
                "pair_id": record.pair_id,
                "condition": record.condition,
                "shown_at": record.shown_at,
                "found_at": record.found_at,
                "duration_ms": record.duration_ms,
                "click": {"x": record.click[0], "y": record.click[1]},
                "hit": record.hit,
                "client_duration_ms": record.client_duration_ms,
            }
            self._append(session.study_id, event)
            self._apply(event)
            return record

    def trials(self, study_id: str) -> list[TrialRecord]:
        with self._lock:
            return list(self._study(study_id).trials)

    def summarize(self, study_id: str, hits_only: bool = False) -> StudyReport:
        with self._lock:
            study = self._study(study_id)
            return summarize_study(study.plan, study.trials, hits_only=hits_only)

    def close(self) -> None:
        with self._lock:
            for fh in self._files.values():
                fh.close()
            self._files.clear()
