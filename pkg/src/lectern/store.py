"""SQLite persistence for lectures and summaries, plus the summary cache."""

from __future__ import annotations

import hashlib
import json
import os
import sqlite3
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from .errors import Conflict, LecternError, NotFound
from .summarize import SummaryParams, SummaryRecord, utcnow

SCHEMA_VERSION = 1

_SCHEMA_V1 = """
CREATE TABLE lectures (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    name TEXT NOT NULL,
    content TEXT NOT NULL,
    content_sha TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE TABLE summaries (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    lecture_id INTEGER NOT NULL REFERENCES lectures(id) ON DELETE CASCADE,
    name TEXT NOT NULL,
    params TEXT NOT NULL,
    content_sha TEXT NOT NULL,
    sentence_indices TEXT NOT NULL,
    text TEXT NOT NULL,
    created_at TEXT NOT NULL,
    UNIQUE (lecture_id, params, content_sha)
);
CREATE INDEX summaries_by_lecture ON summaries(lecture_id);
"""


class EmptyContent(LecternError, ValueError):
    pass


class SchemaError(LecternError):
    pass


def content_digest(content: str) -> str:
    return hashlib.sha256(content.encode("utf-8")).hexdigest()


@dataclass
class LectureTranscript:
    id: int
    name: str
    content: str
    created_at: str

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "content": self.content, "created_at": self.created_at}


def _lecture(row) -> LectureTranscript:
    return LectureTranscript(id=row["id"], name=row["name"], content=row["content"], created_at=row["created_at"])


def _summary(row) -> SummaryRecord:
    return SummaryRecord(
        id=row["id"],
        lecture_id=row["lecture_id"],
        name=row["name"],
        params=SummaryParams.from_dict(json.loads(row["params"])),
        sentence_indices=json.loads(row["sentence_indices"]),
        text=row["text"],
        created_at=row["created_at"],
    )


class Store:
    """Lecture and summary repository backed by one SQLite file.

    Each thread gets its own connection; writes are serialized with a lock.
    Summaries are keyed for caching by their canonical params and a digest
    of the lecture content they were computed from, so editing a lecture
    silently retires its cached summaries.
    """

    def __init__(self, path: str | os.PathLike) -> None:
        self.path = str(path)
        if self.path != ":memory:":
            Path(self.path).expanduser().parent.mkdir(parents=True, exist_ok=True)
        self._local = threading.local()
        self._write_lock = threading.Lock()
        self._connections: list[sqlite3.Connection] = []
        self._migrate()

    def _conn(self) -> sqlite3.Connection:
        conn = getattr(self._local, "conn", None)
        if conn is None:
            conn = sqlite3.connect(self.path, timeout=30, check_same_thread=False)
            conn.row_factory = sqlite3.Row
            conn.execute("PRAGMA foreign_keys = ON")
            if self.path != ":memory:":
                conn.execute("PRAGMA journal_mode = WAL")
            self._local.conn = conn
            self._connections.append(conn)
        return conn

    @contextmanager
    def _write(self):
        with self._write_lock:
            conn = self._conn()
            with conn:
                yield conn

    def _migrate(self) -> None:
        with self._write() as conn:
            conn.execute("CREATE TABLE IF NOT EXISTS schema_version (version INTEGER NOT NULL)")
            row = conn.execute("SELECT version FROM schema_version").fetchone()
            version = row["version"] if row else 0
            if version > SCHEMA_VERSION:
                raise SchemaError(f"store schema v{version} is newer than supported v{SCHEMA_VERSION}")
            if version < 1:
                conn.executescript("BEGIN;" + _SCHEMA_V1 + "INSERT INTO schema_version VALUES (1); COMMIT;")

    def close(self) -> None:
        for conn in self._connections:
            conn.close()
        self._connections.clear()
        self._local = threading.local()

    # lectures

    def put_lecture(self, name: str, content: str, id: int | None = None) -> LectureTranscript:
        """Create a lecture, or replace name and content of lecture ``id``."""
        if not content or not content.strip():
            raise EmptyContent("lecture content is empty")
        digest = content_digest(content)
        with self._write() as conn:
            if id is None:
                cur = conn.execute(
                    "INSERT INTO lectures (name, content, content_sha, created_at) VALUES (?, ?, ?, ?)",
                    (name, content, digest, utcnow()),
                )
                id = cur.lastrowid
            else:
                cur = conn.execute(
                    "UPDATE lectures SET name = ?, content = ?, content_sha = ? WHERE id = ?",
                    (name, content, digest, id),
                )
                if cur.rowcount == 0:
                    raise NotFound("lecture", id)
            row = conn.execute("SELECT * FROM lectures WHERE id = ?", (id,)).fetchone()
        return _lecture(row)

    def update_lecture(self, id: int, name: str, content: str) -> LectureTranscript:
        return self.put_lecture(name, content, id=id)

    def get_lecture(self, id: int) -> LectureTranscript:
        row = self._conn().execute("SELECT * FROM lectures WHERE id = ?", (id,)).fetchone()
        if row is None:
            raise NotFound("lecture", id)
        return _lecture(row)

    def list_lectures(self) -> list[LectureTranscript]:
        rows = self._conn().execute("SELECT * FROM lectures ORDER BY created_at, id").fetchall()
        return [_lecture(r) for r in rows]

    def delete_lecture(self, id: int) -> None:
        with self._write() as conn:
            if conn.execute("DELETE FROM lectures WHERE id = ?", (id,)).rowcount == 0:
                raise NotFound("lecture", id)

    # summaries

    def put_summary(self, record: SummaryRecord, content_sha: str | None = None) -> SummaryRecord:
        """Persist ``record`` and return it with its new id.

        ``content_sha`` is the digest of the text that was summarized; it
        defaults to the lecture's current content.
        """
        with self._write() as conn:
            lecture = conn.execute(
                "SELECT content_sha FROM lectures WHERE id = ?", (record.lecture_id,)
            ).fetchone()
            if lecture is None:
                raise NotFound("lecture", record.lecture_id)
            try:
                cur = conn.execute(
                    "INSERT INTO summaries (lecture_id, name, params, content_sha, sentence_indices, text, created_at)"
                    " VALUES (?, ?, ?, ?, ?, ?, ?)",
                    (
                        record.lecture_id,
                        record.name,
                        record.params.canonical_key(),
                        content_sha or lecture["content_sha"],
                        json.dumps(list(record.sentence_indices)),
                        record.text,
                        record.created_at,
                    ),
                )
            except sqlite3.IntegrityError:
                raise Conflict("an identical summary is already stored for this lecture") from None
            row = conn.execute("SELECT * FROM summaries WHERE id = ?", (cur.lastrowid,)).fetchone()
        return _summary(row)

    def get_summary(self, id: int) -> SummaryRecord:
        row = self._conn().execute("SELECT * FROM summaries WHERE id = ?", (id,)).fetchone()
        if row is None:
            raise NotFound("summary", id)
        return _summary(row)

    def list_summaries(self, lecture_id: int | None = None) -> list[SummaryRecord]:
        if lecture_id is None:
            rows = self._conn().execute("SELECT * FROM summaries ORDER BY created_at, id").fetchall()
        else:
            rows = self._conn().execute(
                "SELECT * FROM summaries WHERE lecture_id = ? ORDER BY created_at, id", (lecture_id,)
            ).fetchall()
        return [_summary(r) for r in rows]

    def delete_summary(self, id: int) -> None:
        with self._write() as conn:
            if conn.execute("DELETE FROM summaries WHERE id = ?", (id,)).rowcount == 0:
                raise NotFound("summary", id)

    def find_cached_summary(self, lecture_id: int, params: SummaryParams) -> SummaryRecord | None:
        row = self._conn().execute(
            "SELECT s.* FROM summaries s JOIN lectures l ON l.id = s.lecture_id"
            " WHERE s.lecture_id = ? AND s.params = ? AND s.content_sha = l.content_sha"
            " ORDER BY s.id LIMIT 1",
            (lecture_id, params.canonical_key()),
        ).fetchone()
        return _summary(row) if row else None
