"""FastAPI application exposing lecture management and summarization."""

from __future__ import annotations

import logging
from contextlib import asynccontextmanager
from typing import Any

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from ..store import Store
from ..summarize import Engine
from .service import ApiError, LectureService, to_api_error
from .settings import Settings

log = logging.getLogger(__name__)


def _error_response(err: ApiError) -> JSONResponse:
    return JSONResponse(err.to_dict(), status_code=err.status)


def create_app(settings: Settings | None = None, store: Store | None = None, engine: Engine | None = None) -> FastAPI:
    settings = settings or Settings.load()
    store = store or Store(settings.storage_path)
    engine = engine or Engine(model_path=settings.model_path)
    service = LectureService(store, engine, settings)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        service.close()

    app = FastAPI(title="lectern", version="0.1.0", lifespan=lifespan)
    app.state.settings = settings
    app.state.store = store
    app.state.engine = engine
    app.state.service = service

    def respond(method: str, *args) -> JSONResponse:
        status, doc = service.call(method, *args)
        return JSONResponse(doc, status_code=status)

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return _error_response(ApiError(400, "invalid_request", "request body is not valid JSON"))

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException):
        # unknown routes and wrong methods both report as not_found
        return _error_response(ApiError(404, "not_found", f"no route for {request.method} {request.url.path}"))

    @app.exception_handler(Exception)
    async def _unhandled(request: Request, exc: Exception):
        return _error_response(to_api_error(exc))

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/lectures")
    def create_lecture(payload: Any = Body(None)):
        return respond("create_lecture", payload)

    @app.get("/lectures")
    def list_lectures():
        return respond("list_lectures")

    @app.post("/lectures/convert-srt")
    async def convert_srt(request: Request):
        return respond("convert_srt", await request.body())

    @app.get("/lectures/{lecture_id}")
    def get_lecture(lecture_id: str):
        return respond("get_lecture", lecture_id)

    @app.put("/lectures/{lecture_id}")
    def update_lecture(lecture_id: str, payload: Any = Body(None)):
        return respond("update_lecture", lecture_id, payload)

    @app.delete("/lectures/{lecture_id}")
    def delete_lecture(lecture_id: str):
        return respond("delete_lecture", lecture_id)

    @app.post("/lectures/{lecture_id}/summaries")
    def create_summary(lecture_id: str, payload: Any = Body(None)):
        return respond("create_summary", lecture_id, payload)

    @app.get("/lectures/{lecture_id}/summaries")
    def list_summaries(lecture_id: str):
        return respond("list_summaries", lecture_id)

    @app.get("/summaries/{summary_id}")
    def get_summary(summary_id: str):
        return respond("get_summary", summary_id)

    @app.delete("/summaries/{summary_id}")
    def delete_summary(summary_id: str):
        return respond("delete_summary", summary_id)

    return app


def serve(settings: Settings | None = None) -> None:
    import uvicorn

    settings = settings or Settings.load()
    uvicorn.run(create_app(settings), host=settings.host, port=settings.port)
