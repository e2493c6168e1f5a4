"""Request handling independent of the HTTP framework.

Every handler returns ``(status, document)`` or raises :class:`ApiError`.
The FastAPI app and the CLI's local mode both go through this layer, which
keeps their JSON output identical.
"""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout

from ..embed import ModelUnavailable
from ..errors import Conflict, InvalidParams, LecternError, NotFound
from ..srt import SrtError, srt_to_paragraph
from ..store import EmptyContent, Store, content_digest
from ..summarize import Engine, NoSentencesRetained, SummaryParams
from .settings import Settings

log = logging.getLogger(__name__)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message

    def to_dict(self) -> dict:
        return {"status": self.status, "code": self.code, "message": self.message}


def to_api_error(exc: Exception) -> ApiError:
    if isinstance(exc, ApiError):
        return exc
    if isinstance(exc, NotFound):
        return ApiError(404, "not_found", str(exc))
    if isinstance(exc, EmptyContent):
        return ApiError(400, "empty_content", str(exc))
    if isinstance(exc, InvalidParams):
        return ApiError(400, "invalid_params", str(exc))
    if isinstance(exc, SrtError):
        return ApiError(422, "malformed_srt", str(exc))
    if isinstance(exc, NoSentencesRetained):
        return ApiError(422, "no_sentences_retained", str(exc))
    if isinstance(exc, Conflict):
        return ApiError(409, "conflict", str(exc))
    if isinstance(exc, ModelUnavailable):
        return ApiError(503, "model_unavailable", str(exc))
    if isinstance(exc, LecternError):
        return ApiError(503, "engine_error", str(exc))
    log.exception("unhandled error", exc_info=exc)
    return ApiError(503, "internal_error", "internal error")


def parse_id(raw) -> int:
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise ApiError(404, "not_found", f"no resource with id {raw!r}") from None
    if value < 1:
        raise ApiError(404, "not_found", f"no resource with id {raw!r}")
    return value


def _lecture_body(body) -> tuple[str, str]:
    if not isinstance(body, dict):
        raise ApiError(400, "invalid_request", "expected a JSON object")
    name, content = body.get("name"), body.get("content")
    if not isinstance(name, str) or not isinstance(content, str):
        raise ApiError(400, "invalid_request", "'name' and 'content' must be strings")
    return name, content


def summary_document(record, cached: bool | None = None) -> dict:
    doc = record.to_dict()
    if cached is not None:
        doc["cached"] = cached
    return doc


class LectureService:
    def __init__(self, store: Store, engine: Engine, settings: Settings) -> None:
        self.store = store
        self.engine = engine
        self.settings = settings
        self._pool = ThreadPoolExecutor(max_workers=settings.workers, thread_name_prefix="lectern-infer")
        self._flights: dict[tuple[int, str], threading.Lock] = {}
        self._flights_lock = threading.Lock()

    def close(self) -> None:
        self._pool.shutdown(wait=False, cancel_futures=True)

    def _flight(self, key) -> threading.Lock:
        with self._flights_lock:
            return self._flights.setdefault(key, threading.Lock())

    # lectures

    def create_lecture(self, body):
        name, content = _lecture_body(body)
        return 201, self.store.put_lecture(name, content).to_dict()

    def list_lectures(self):
        return 200, [lec.to_dict() for lec in self.store.list_lectures()]

    def get_lecture(self, lecture_id):
        return 200, self.store.get_lecture(parse_id(lecture_id)).to_dict()

    def update_lecture(self, lecture_id, body):
        name, content = _lecture_body(body)
        return 200, self.store.update_lecture(parse_id(lecture_id), name, content).to_dict()

    def delete_lecture(self, lecture_id):
        ident = parse_id(lecture_id)
        self.store.delete_lecture(ident)
        return 200, {"id": ident, "deleted": True}

    def convert_srt(self, body: bytes):
        if not body or not body.strip():
            raise ApiError(400, "empty_body", "request body is empty")
        return 200, {"paragraph": srt_to_paragraph(body)}

    # summaries

    def parse_params(self, body) -> tuple[str, SummaryParams]:
        if not isinstance(body, dict):
            raise ApiError(400, "invalid_params", "expected a JSON object")
        body = dict(body)
        name = body.pop("name", "")
        if not isinstance(name, str):
            raise ApiError(400, "invalid_params", "'name' must be a string")
        return name, SummaryParams.from_dict(body, default_backend=self.settings.backend)

    def create_summary(self, lecture_id, body):
        ident = parse_id(lecture_id)
        lecture = self.store.get_lecture(ident)
        name, params = self.parse_params(body)
        with self._flight((ident, params.canonical_key())):
            cached = self.store.find_cached_summary(ident, params)
            if cached is not None:
                return 200, summary_document(cached, cached=True)
            lecture = self.store.get_lecture(ident)
            future = self._pool.submit(
                self.engine.summarize, lecture.content, params, lecture_id=ident, name=name
            )
            try:
                record = future.result(timeout=self.settings.inference_timeout)
            except FutureTimeout:
                raise ApiError(503, "inference_timeout", "summarization exceeded the time limit") from None
            stored = self.store.put_summary(record, content_sha=content_digest(lecture.content))
        return 201, summary_document(stored, cached=False)

    def list_summaries(self, lecture_id):
        ident = parse_id(lecture_id)
        self.store.get_lecture(ident)
        return 200, [summary_document(s) for s in self.store.list_summaries(ident)]

    def get_summary(self, summary_id):
        return 200, summary_document(self.store.get_summary(parse_id(summary_id)))

    def delete_summary(self, summary_id):
        ident = parse_id(summary_id)
        self.store.delete_summary(ident)
        return 200, {"id": ident, "deleted": True}

    def call(self, method: str, *args):
        """Run a handler, converting any failure into an :class:`ApiError`."""
        try:
            return getattr(self, method)(*args)
        except Exception as exc:
            raise to_api_error(exc) from None
