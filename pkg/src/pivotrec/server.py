"""REST service: dataset upload, sessions, recommendation batches, feedback.

Endpoints (JSON bodies):

    POST /datasets                          -> {"dataset_id"}
    POST /sessions                          -> {"session_id"}
    GET  /sessions/{id}/recommendations     -> {"batch", "diversity", "exhausted"}
    POST /sessions/{id}/feedback            -> session summary
    GET  /health

Every non-2xx response carries one error object:
{"error": {"code", "message"}} with code in {bad_request, not_found,
infeasible, oracle_unavailable, internal}. Batch responses are serialized
with the same canonical writer as the CLI, so identical inputs and caches
produce byte-identical reports.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError

from ._util import canonical_json
from .dataset import Dataset, DatasetError, SchemaError, apply_type_overrides, load_table
from .embedding import BaselineEmbeddingProvider
from .pivot import PivotSpecError, spec_from_json
from .recommend import (
    FeedbackError,
    PoolTooLargeError,
    Session,
    apply_feedback,
    config_from_json,
    next_batch,
)
from .semantics import (
    CachingOracle,
    OracleCache,
    RemoteOracle,
    RemoteOracleConfig,
    RuleBasedOracle,
    SemanticOracle,
)

DEFAULT_POOL_CAP = 5000


class ApiException(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


def _error_response(status: int, code: str, message: str) -> Response:
    body = canonical_json({"error": {"code": code, "message": message}})
    return Response(content=body, status_code=status, media_type="application/json")


@dataclass
class AppState:
    oracle: SemanticOracle
    embedder: BaselineEmbeddingProvider
    pool_cap: int = DEFAULT_POOL_CAP
    datasets: dict[str, Dataset] = field(default_factory=dict)
    sessions: dict[str, Session] = field(default_factory=dict)
    locks: dict[str, threading.Lock] = field(default_factory=dict)
    store_lock: threading.Lock = field(default_factory=threading.Lock)

    def session_lock(self, session_id: str) -> threading.Lock:
        with self.store_lock:
            return self.locks.setdefault(session_id, threading.Lock())


def create_app(
    oracle: SemanticOracle | None = None,
    embedder: BaselineEmbeddingProvider | None = None,
    pool_cap: int = DEFAULT_POOL_CAP,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="pivotrec", docs_url=None, redoc_url=None)
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    state = AppState(
        oracle=oracle or RuleBasedOracle(),
        embedder=embedder or BaselineEmbeddingProvider(),
        pool_cap=pool_cap,
    )
    app.state.store = state

    @app.exception_handler(ApiException)
    async def _api_exc(_req: Request, exc: ApiException) -> Response:
        return _error_response(exc.status, exc.code, exc.message)

    @app.exception_handler(RequestValidationError)
    async def _validation_exc(_req: Request, exc: RequestValidationError) -> Response:
        return _error_response(400, "bad_request", str(exc))

    @app.exception_handler(Exception)
    async def _internal_exc(_req: Request, exc: Exception) -> Response:
        return _error_response(500, "internal", str(exc))

    @app.get("/health")
    async def health() -> dict:
        return {"status": "ok"}

    @app.post("/datasets", status_code=201)
    async def post_dataset(request: Request) -> Response:
        content_type = request.headers.get("content-type", "")
        raw = await request.body()
        overrides = None
        if "application/json" in content_type:
            try:
                payload = json.loads(raw)
                csv_text = payload["csv_text"]
                overrides = payload.get("type_overrides")
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ApiException(400, "bad_request", f"malformed body: {exc}")
        else:
            csv_text = raw.decode("utf-8-sig", errors="replace")
        try:
            dataset = load_table(csv_text)
            if overrides is not None:
                dataset = apply_type_overrides(dataset, overrides)
        except DatasetError as exc:
            raise ApiException(400, "bad_request", str(exc))
        dataset_id = uuid.uuid4().hex
        with state.store_lock:
            state.datasets[dataset_id] = dataset
        body = canonical_json({"dataset_id": dataset_id})
        return Response(content=body, status_code=201, media_type="application/json")

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request) -> Response:
        try:
            payload = json.loads(await request.body())
            dataset_id = payload["dataset_id"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ApiException(400, "bad_request", f"malformed body: {exc}")
        dataset = state.datasets.get(dataset_id)
        if dataset is None:
            raise ApiException(404, "not_found", f"unknown dataset {dataset_id!r}")
        config_payload = payload.get("config")
        if config_payload is None:
            config_payload = {
                k: v for k, v in payload.items() if k not in ("dataset_id",)
            }
        try:
            config = config_from_json(config_payload)
        except (ValueError, TypeError) as exc:
            raise ApiException(400, "bad_request", str(exc))
        if config.focus_attrs:
            known = set(dataset.attribute_names)
            unknown = [a for a in config.focus_attrs if a not in known]
            if unknown:
                raise ApiException(
                    400, "bad_request", f"unknown focus attributes: {unknown}"
                )
        session = Session(dataset=dataset, config=config)
        with state.store_lock:
            state.sessions[session.id] = session
        body = canonical_json({"session_id": session.id})
        return Response(content=body, status_code=201, media_type="application/json")

    def _get_session(session_id: str) -> Session:
        session = state.sessions.get(session_id)
        if session is None:
            raise ApiException(404, "not_found", f"unknown session {session_id!r}")
        return session

    @app.get("/sessions/{session_id}/recommendations")
    async def get_recommendations(session_id: str) -> Response:
        session = _get_session(session_id)
        with state.session_lock(session_id):
            try:
                result = next_batch(
                    session, state.oracle, state.embedder, pool_cap=state.pool_cap
                )
            except PoolTooLargeError as exc:
                raise ApiException(503, "infeasible", str(exc))
            except SchemaError as exc:
                raise ApiException(400, "bad_request", str(exc))
        body = canonical_json(result.to_json_dict())
        return Response(content=body, media_type="application/json")

    @app.post("/sessions/{session_id}/feedback")
    async def post_feedback(session_id: str, request: Request) -> Response:
        session = _get_session(session_id)
        try:
            payload = json.loads(await request.body())
            spec = spec_from_json(payload["spec"])
            verdict = payload["verdict"]
        except (json.JSONDecodeError, KeyError, TypeError, PivotSpecError) as exc:
            raise ApiException(400, "bad_request", f"malformed feedback: {exc}")
        with state.session_lock(session_id):
            try:
                apply_feedback(session, spec, verdict)
            except FeedbackError as exc:
                raise ApiException(409, "bad_request", str(exc))
            except ValueError as exc:
                raise ApiException(400, "bad_request", str(exc))
            summary = session.summary()
        return Response(content=canonical_json(summary), media_type="application/json")

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def app_from_env() -> FastAPI:
    """Build an app from environment configuration.

    PIVOTREC_ORACLE               rule | remote     (default rule)
    PIVOTREC_ORACLE_ENDPOINT      remote oracle URL
    PIVOTREC_ORACLE_TOKEN         bearer token
    PIVOTREC_ORACLE_TIMEOUT       seconds
    PIVOTREC_CACHE                oracle cache path (JSON lines)
    PIVOTREC_POOL_CAP             candidate pool cap
    PIVOTREC_STATIC_DIR           directory served at /ui
    """
    oracle: SemanticOracle = RuleBasedOracle()
    if os.environ.get("PIVOTREC_ORACLE", "rule") == "remote":
        endpoint = os.environ.get("PIVOTREC_ORACLE_ENDPOINT", "")
        if not endpoint:
            raise ValueError("PIVOTREC_ORACLE=remote requires PIVOTREC_ORACLE_ENDPOINT")
        oracle = RemoteOracle(
            RemoteOracleConfig(
                endpoint=endpoint,
                auth_token=os.environ.get("PIVOTREC_ORACLE_TOKEN", ""),
                timeout=float(os.environ.get("PIVOTREC_ORACLE_TIMEOUT", "10")),
            )
        )
    cache_path = os.environ.get("PIVOTREC_CACHE")
    if cache_path:
        oracle = CachingOracle(oracle, OracleCache(cache_path))
    return create_app(
        oracle=oracle,
        pool_cap=int(os.environ.get("PIVOTREC_POOL_CAP", str(DEFAULT_POOL_CAP))),
        static_dir=os.environ.get("PIVOTREC_STATIC_DIR"),
    )


def main() -> None:
    import uvicorn

    uvicorn.run(
        app_from_env(),
        host=os.environ.get("PIVOTREC_HOST", "127.0.0.1"),
        port=int(os.environ.get("PIVOTREC_PORT", "8008")),
        log_level=os.environ.get("PIVOTREC_LOG_LEVEL", "info"),
    )


if __name__ == "__main__":
    main()
