"""HTTP JSON API for running wayfinding studies.

Serving flow per trial: GET /sessions/{id}/next issues a one-time token
and an image URL; the first delivery of that image stamps the server-side
shown_at; POST /sessions/{id}/trials with the token stamps found_at,
persists the record durably, and only then acknowledges. Timing is
therefore server-side from image delivery to the found-confirmation
submission; the client may report its own duration for skew diagnostics.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import FileResponse, JSONResponse

from ..errors import NotNormalizableError, StudyError
from .model import plan_from_dict
from .store import StudyStore, now_ms

__all__ = ["create_app", "TrialTicket"]


@dataclass
class TrialTicket:
    token: str
    session_id: str
    pair_id: str
    condition: str
    image_name: str
    issued_at: int
    shown_at: int | None = None


def create_app(store: StudyStore, images_root: str | Path) -> FastAPI:
    images_root = Path(images_root).resolve()
    app = FastAPI(title="wayclear study service")
    tickets: dict[str, TrialTicket] = {}

    def resolve_image(name: str) -> Path:
        path = (images_root / name).resolve()
        if not str(path).startswith(str(images_root)) or not path.is_file():
            raise HTTPException(status_code=404, detail=f"image {name!r} not found")
        return path

    @app.exception_handler(StudyError)
    async def study_error_handler(request: Request, exc: StudyError):
        status = 409 if "duplicate" in str(exc) else 400
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.post("/studies")
    async def create_study(body: dict):
        plan = plan_from_dict(body)
        study_id = store.create_study(plan)
        return {"study_id": study_id}

    @app.post("/studies/{study_id}/sessions")
    async def open_session(study_id: str, body: dict):
        volunteer_id = body.get("volunteer_id")
        group = body.get("group")
        if not volunteer_id or not group:
            raise HTTPException(status_code=400, detail="volunteer_id and group are required")
        session = store.open_session(study_id, volunteer_id, group)
        return {"session_id": session.session_id, "trials_total": len(session.order)}

    @app.get("/sessions/{session_id}/next")
    async def next_trial(session_id: str):
        pending = store.next_pair(session_id)
        if pending is None:
            return {"done": True}
        dataset, pair, condition = pending
        token = uuid.uuid4().hex
        tickets[token] = TrialTicket(
            token=token,
            session_id=session_id,
            pair_id=pair.pair_id,
            condition=condition,
            image_name=pair.image_for(condition),
            issued_at=now_ms(),
        )
        return {
            "done": False,
            "pair_id": pair.pair_id,
            "dataset": dataset,
            "target_name": pair.target_name,
            "image_width": pair.image_width,
            "image_height": pair.image_height,
            "image_url": f"/sessions/{session_id}/image/{token}",
            "started_token": token,
        }

    @app.get("/sessions/{session_id}/image/{token}")
    async def trial_image(session_id: str, token: str):
        ticket = tickets.get(token)
        if ticket is None or ticket.session_id != session_id:
            raise HTTPException(status_code=404, detail="unknown trial token")
        path = resolve_image(ticket.image_name)
        if ticket.shown_at is None:  # first delivery starts the clock
            ticket.shown_at = now_ms()
        return FileResponse(path, media_type="image/png",
                            headers={"Cache-Control": "no-store"})

    @app.post("/sessions/{session_id}/trials")
    async def submit_trial(session_id: str, body: dict):
        token = body.get("started_token")
        pair_id = body.get("pair_id")
        click = body.get("click") or {}
        ticket = tickets.get(token or "")
        if ticket is None or ticket.session_id != session_id or ticket.pair_id != pair_id:
            raise HTTPException(status_code=400, detail="unknown or mismatched trial token")
        if "x" not in click or "y" not in click:
            raise HTTPException(status_code=400, detail="click coordinates are required")
        found_at = now_ms()
        shown_at = ticket.shown_at if ticket.shown_at is not None else ticket.issued_at
        record = store.record_trial(
            session_id=session_id,
            pair_id=pair_id,
            shown_at=shown_at,
            found_at=found_at,
            click=(float(click["x"]), float(click["y"])),
            client_duration_ms=body.get("client_duration_ms"),
        )
        return {
            "recorded": True,
            "hit": record.hit,
            "duration_ms": record.duration_ms,
            "shown_at": record.shown_at,
            "found_at": record.found_at,
        }

    @app.get("/studies/{study_id}/report")
    async def report(study_id: str, hits_only: bool = Query(default=False)):
        try:
            return store.summarize(study_id, hits_only=hits_only).to_dict()
        except NotNormalizableError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc

    @app.get("/studies/{study_id}/images/{name}")
    async def static_image(study_id: str, name: str):
        store.plan(study_id)  # 400 on unknown study
        return FileResponse(resolve_image(name), media_type="image/png")

    return app
