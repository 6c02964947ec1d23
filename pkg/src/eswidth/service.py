"""HTTP service for MUSHRA-like width-rating sessions: serves stimuli and
references, persists ratings append-only, and exports results."""

from __future__ import annotations

import random
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from .experiment import SCORE_MAX, SCORE_MIN, ExperimentSession, RatingsLog, new_session
from .stimuli import StimulusSet, load_stimulus_set


def _error(status: int, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": detail})


def create_app(
    stimulus_dir,
    results_path,
    seed: int | None = None,
    static_dir=None,
    stimulus_set: StimulusSet | None = None,
) -> FastAPI:
    """Build the experiment service.

    Sessions live in memory; ratings go to the append-only log at
    results_path and survive restarts.  A fixed seed makes the per-session
    stimulus permutations deterministic.
    """
    stimulus_dir = Path(stimulus_dir)
    stimuli = stimulus_set if stimulus_set is not None else load_stimulus_set(stimulus_dir)
    log = RatingsLog(Path(results_path))
    rng = random.Random(seed)
    sessions: dict[str, ExperimentSession] = {}
    all_ids = {s.id for s in stimuli.stimuli}

    app = FastAPI(title="eswidth experiment service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.post("/api/session")
    async def create_session(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "malformed JSON body")
        if not isinstance(body, dict) or not isinstance(body.get("listener_id"), str):
            return _error(400, "body must be an object with a string listener_id")
        listener_id = body["listener_id"].strip()
        if not listener_id:
            return _error(400, "listener_id must be non-empty")
        session = new_session(listener_id, stimuli.test_ids, stimuli.references, rng)
        sessions[session.session_id] = session
        return JSONResponse(status_code=201, content=session.to_json())

    @app.get("/api/stimulus/{session_id}/{stimulus_id}")
    def get_stimulus(session_id: str, stimulus_id: str):
        if session_id not in sessions:
            return _error(404, "unknown session")
        if stimulus_id not in all_ids:
            return _error(404, "unknown stimulus")
        spec = stimuli.by_id(stimulus_id)
        return FileResponse(stimulus_dir / spec.path, media_type="audio/wav")

    @app.post("/api/rating")
    async def post_rating(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "malformed JSON body")
        if not isinstance(body, dict):
            return _error(400, "body must be a JSON object")
        session_id = body.get("session_id")
        stimulus_id = body.get("stimulus_id")
        score = body.get("score")
        if not isinstance(session_id, str) or not isinstance(stimulus_id, str):
            return _error(400, "session_id and stimulus_id must be strings")
        if isinstance(score, bool) or not isinstance(score, (int, float)):
            return _error(400, "score must be a number")
        if not SCORE_MIN <= float(score) <= SCORE_MAX:
            return _error(422, f"score must lie in [{SCORE_MIN:g}, {SCORE_MAX:g}]")
        session = sessions.get(session_id)
        if session is None:
            return _error(404, "unknown session")
        if stimulus_id not in all_ids:
            return _error(404, "unknown stimulus")
        log.append(
            {
                "session_id": session_id,
                "stimulus_id": stimulus_id,
                "score": float(score),
                "listener_id": session.listener_id,
                "submitted_at": datetime.now(timezone.utc).isoformat(),
            }
        )
        return Response(status_code=204)

    @app.get("/api/results")
    def get_results():
        return {"ratings": log.latest()}

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="panel")

    return app
