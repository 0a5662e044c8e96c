"""HTTP/JSON service for the web workspace and scripted clients.

Sessions live in memory (with an append-only event log on disk when a
data directory is configured). Pure endpoints (validate/execute/render)
have no hidden state: identical requests get identical responses.

Error statuses: 400 bad request body, 404 unknown id, 409 conflicting
action, 422 pipeline that fails engine validation, 500 upstream failure.
"""
from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from . import activity, engine
from .catalog import builtin_catalog, serialize_catalog
from .charts import ChartSpec, build_chart, TABLE_VIEW
from .datasets import DatasetRegistry, default_registry
from .errors import CardpipeError, NotFoundError
from .fetch import FetchError
from .svg import render_svg
from .table import Table

MAX_TRACE_ROWS = 100


def _error(status: int, code: str, message: str, *, step_index: int | None = None,
           report: dict | None = None) -> JSONResponse:
    body: dict = {"error": {"status": status, "code": code, "message": message}}
    if step_index is not None:
        body["error"]["step_index"] = step_index
    if report is not None:
        body["error"]["report"] = report
    return JSONResponse(status_code=status, content=body)


def _status_for(exc: CardpipeError) -> int:
    if isinstance(exc, NotFoundError):
        return 404
    if isinstance(exc, (activity.AlreadyAnsweredError,)):
        return 409
    if isinstance(exc, FetchError):
        return 500
    return 400


def create_app(*, policy: activity.ScoringPolicy | None = None,
               registry: DatasetRegistry | None = None,
               data_dir: Path | None = None,
               ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="cardpipe", version="1")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    catalog = builtin_catalog()
    registry = registry if registry is not None else default_registry()
    policy = policy or activity.ScoringPolicy()
    bank = activity.load_question_bank()
    sessions: dict[str, activity.Session] = {}
    app.state.registry = registry
    app.state.sessions = sessions

    def make_env() -> engine.Env:
        # server never reads the local filesystem on behalf of a pipeline
        return engine.Env(catalog=catalog, registry=registry, allow_filesystem=False)

    async def read_json(request: Request):
        try:
            return await request.json()
        except Exception:
            raise CardpipeError("request body is not valid JSON", code="BAD_REQUEST") from None

    @app.exception_handler(RequestValidationError)
    async def bad_body(request: Request, exc: RequestValidationError):
        return _error(400, "BAD_REQUEST", str(exc.errors()[:1]))

    @app.exception_handler(CardpipeError)
    async def domain_error(request: Request, exc: CardpipeError):
        return _error(_status_for(exc), exc.code, str(exc))

    # -- catalog and datasets -------------------------------------------------

    @app.get("/api/v1/cards")
    def get_cards():
        return serialize_catalog(catalog)

    @app.get("/api/v1/datasets")
    def get_datasets():
        return [m.to_json() for m in registry.list_datasets()]

    @app.get("/datasets/{dataset_id}.csv")
    def get_dataset_csv(dataset_id: str):
        data = registry.raw_bytes(dataset_id)  # 404 unknown, 500 fetch failure
        return Response(content=data, media_type="text/csv; charset=utf-8")

    @app.get("/api/v1/questions")
    def get_questions():
        return {"questions": [q.to_json() for q in bank]}

    # -- engine -----------------------------------------------------------------

    def _parse_pipeline(doc) -> engine.Pipeline:
        if not isinstance(doc, dict):
            raise CardpipeError("request body must be a pipeline document", code="BAD_DOCUMENT")
        return engine.Pipeline.from_json(doc)

    @app.post("/api/v1/pipelines/validate")
    async def post_validate(request: Request):
        pipeline = _parse_pipeline(await read_json(request))
        return engine.validate(pipeline, catalog, registry).to_json()

    @app.post("/api/v1/pipelines/execute")
    async def post_execute(request: Request):
        pipeline = _parse_pipeline(await read_json(request))
        report = engine.validate(pipeline, catalog, registry)
        if not report.ok:
            first = report.errors[0]
            return _error(422, first.code, first.message, step_index=first.step_index,
                          report=report.to_json())
        trace = engine.execute(pipeline, make_env())
        return trace.to_json(max_rows=MAX_TRACE_ROWS)

    @app.post("/api/v1/render")
    async def post_render(request: Request):
        body = await read_json(request)
        if not isinstance(body, dict) or ("pipeline" not in body and "chart" not in body):
            return _error(400, "BAD_REQUEST", "body needs a 'pipeline' or 'chart' field")
        width = body.get("width", 640)
        height = body.get("height", 400)
        if not isinstance(width, int) or not isinstance(height, int) or width <= 0 or height <= 0:
            return _error(400, "ZERO_SIZE", "width and height must be positive integers")
        if "chart" in body:
            spec = ChartSpec.from_json(body["chart"])
        else:
            pipeline = _parse_pipeline(body["pipeline"])
            report = engine.validate(pipeline, catalog, registry)
            if not report.ok:
                first = report.errors[0]
                return _error(422, first.code, first.message, step_index=first.step_index,
                              report=report.to_json())
            trace = engine.execute(pipeline, make_env())
            if not trace.ok:
                err = trace.error
                return _error(422, err.code, err.message, step_index=err.step_index)
            value = trace.final.value
            if isinstance(value, Table):
                value = build_chart(value, TABLE_VIEW, {})
            if not isinstance(value, ChartSpec):
                return _error(422, "NOT_RENDERABLE", "pipeline result is a single value")
            spec = value
        svg = render_svg(spec, width=width, height=height)
        return Response(content=svg.encode("utf-8"), media_type="image/svg+xml")

    # -- sessions ------------------------------------------------------------------

    def _session(session_id: str) -> activity.Session:
        if session_id not in sessions:
            raise NotFoundError("session", session_id)
        return sessions[session_id]

    def _session_state(session: activity.Session) -> dict:
        state = session.state_json()
        state["scoreboard"] = session.scoreboard()
        return state

    @app.post("/api/v1/sessions")
    async def post_sessions(request: Request):
        body = await read_json(request) if await request.body() else {}
        if not isinstance(body, dict):
            return _error(400, "BAD_REQUEST", "body must be an object")
        roster = body.get("roster", [])
        if not isinstance(roster, list) or not all(isinstance(p, str) for p in roster):
            return _error(400, "BAD_REQUEST", "'roster' must be a list of participant ids")
        session = activity.Session.create(
            bank, make_env(), policy, roster=roster,
            log_dir=(data_dir / "sessions") if data_dir else None,
        )
        sessions[session.id] = session
        return _session_state(session)

    @app.post("/api/v1/sessions/{session_id}/join")
    async def post_join(session_id: str, request: Request):
        session = _session(session_id)
        body = await read_json(request)
        participant = body.get("participant") if isinstance(body, dict) else None
        if not isinstance(participant, str) or not participant:
            return _error(400, "BAD_REQUEST", "'participant' must be a non-empty string")
        session.join(participant)
        return _session_state(session)

    @app.get("/api/v1/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_state(_session(session_id))

    @app.post("/api/v1/sessions/{session_id}/answer")
    async def post_answer(session_id: str, request: Request):
        session = _session(session_id)
        body = await read_json(request)
        if not isinstance(body, dict) or "participant" not in body or "question_id" not in body \
                or "payload" not in body:
            return _error(400, "BAD_REQUEST",
                          "body needs 'participant', 'question_id' and 'payload'")
        elapsed = body.get("elapsed_s")
        if elapsed is not None and not isinstance(elapsed, (int, float)):
            return _error(400, "BAD_REQUEST", "'elapsed_s' must be a number")
        result = session.submit_answer(body["participant"], body["question_id"],
                                       body["payload"], elapsed_s=elapsed)
        return {
            "grade": result.to_json(),
            "score": session.score_of(body["participant"]),
        }

    @app.post("/api/v1/sessions/{session_id}/hint")
    async def post_hint(session_id: str, request: Request):
        session = _session(session_id)
        body = await read_json(request)
        if not isinstance(body, dict) or "participant" not in body or "question_id" not in body:
            return _error(400, "BAD_REQUEST", "body needs 'participant' and 'question_id'")
        hint = session.request_hint(body["participant"], body["question_id"])
        doc = hint.to_json()
        doc["score"] = session.score_of(body["participant"])
        return doc

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
