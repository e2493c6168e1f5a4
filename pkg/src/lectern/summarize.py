"""End-to-end extractive summarization pipeline."""

from __future__ import annotations

import json
import logging
import math
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .cluster import DEFAULT_SEED, kmeans_fit, select_centroid_sentences
from .embed import EmbedderConfig, embed_sentences, pca_project
from .errors import InvalidParams, LecternError
from .textproc import FilterConfig, Sentence, retained_sentences
from .textrank import textrank_summarize

log = logging.getLogger(__name__)

METHODS = ("cluster", "textrank")
_PARAM_FIELDS = {"count", "ratio", "method", "embedder", "filter", "seed"}


class NoSentencesRetained(LecternError, ValueError):
    pass


def utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds").replace("+00:00", "Z")


@dataclass(frozen=True)
class SummaryParams:
    """Summary request parameters; exactly one of ``count``/``ratio`` is set."""

    count: int | None = None
    ratio: float | None = None
    method: str = "cluster"
    embedder: EmbedderConfig = field(default_factory=EmbedderConfig)
    filter: FilterConfig = field(default_factory=FilterConfig)
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if (self.count is None) == (self.ratio is None):
            raise InvalidParams("exactly one of count or ratio must be given")
        if self.count is not None and (type(self.count) is not int or self.count < 1):
            raise InvalidParams("count must be a positive integer")
        if self.ratio is not None:
            if isinstance(self.ratio, bool) or not isinstance(self.ratio, (int, float)):
                raise InvalidParams("ratio must be a number")
            if not 0 < self.ratio <= 1:
                raise InvalidParams("ratio must lie in (0, 1]")
            object.__setattr__(self, "ratio", float(self.ratio))
        if self.method not in METHODS:
            raise InvalidParams(f"method must be one of {METHODS}")
        if type(self.seed) is not int:
            raise InvalidParams("seed must be an integer")

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "ratio": self.ratio,
            "method": self.method,
            "embedder": self.embedder.to_dict(),
            "filter": self.filter.to_dict(),
            "seed": self.seed,
        }

    def canonical_key(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict, default_backend: str = "transformer") -> SummaryParams:
        if not isinstance(data, dict):
            raise InvalidParams("summary parameters must be an object")
        unknown = set(data) - _PARAM_FIELDS
        if unknown:
            raise InvalidParams(f"unknown parameters: {sorted(unknown)}")
        kwargs = {k: v for k, v in data.items() if k in ("count", "ratio", "method", "seed") and v is not None}
        kwargs["embedder"] = EmbedderConfig.from_dict(data.get("embedder"), default_backend)
        kwargs["filter"] = FilterConfig.from_dict(data.get("filter"))
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise InvalidParams(str(exc)) from None


@dataclass
class SummaryRecord:
    id: int | None
    lecture_id: int | None
    name: str
    params: SummaryParams
    sentence_indices: list[int]
    text: str
    created_at: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "lecture_id": self.lecture_id,
            "name": self.name,
            "params": self.params.to_dict(),
            "sentence_indices": list(self.sentence_indices),
            "text": self.text,
            "created_at": self.created_at,
        }


def resolve_k(params: SummaryParams, n_retained: int) -> int:
    """Number of summary sentences for ``n_retained`` candidates."""
    if n_retained < 1:
        raise InvalidParams("need at least one retained sentence")
    if params.count is not None:
        if params.count < 1:
            raise InvalidParams("count must be positive")
        return min(params.count, n_retained)
    ratio = params.ratio
    if ratio is None or not 0 < ratio <= 1:
        raise InvalidParams("ratio must lie in (0, 1]")
    k = math.floor(ratio * n_retained + 0.5)
    return max(1, min(k, n_retained))


class Engine:
    """Pipeline runner sharing one embedder configuration per process.

    ``embed_calls`` counts embedder invocations so callers can verify that
    cached requests skip inference.
    """

    def __init__(self, model_path=None) -> None:
        self.model_path = model_path
        self.embed_calls = 0
        self._lock = threading.Lock()

    def embed(self, sentences: list[Sentence], config: EmbedderConfig) -> np.ndarray:
        with self._lock:
            self.embed_calls += 1
        return embed_sentences(sentences, config, model_path=self.model_path)

    def retained(self, content: str, params: SummaryParams) -> list[Sentence]:
        sentences = retained_sentences(content, params.filter)
        if not sentences:
            raise NoSentencesRetained("filtering removed every sentence")
        return sentences

    def select(self, sentences: list[Sentence], params: SummaryParams) -> list[int]:
        k = resolve_k(params, len(sentences))
        if params.method == "textrank":
            return textrank_summarize(sentences, k)
        matrix = self.embed(sentences, params.embedder)
        result = kmeans_fit(matrix, k, seed=params.seed)
        return select_centroid_sentences(result, matrix)

    def summarize(self, content: str, params: SummaryParams, *, lecture_id=None, name: str = "") -> SummaryRecord:
        if not content or not content.strip():
            raise InvalidParams("transcript content is empty")
        sentences = self.retained(content, params)
        indices = self.select(sentences, params)
        log.debug("selected %d of %d retained sentences", len(indices), len(sentences))
        return SummaryRecord(
            id=None,
            lecture_id=lecture_id,
            name=name,
            params=params,
            sentence_indices=indices,
            text=" ".join(sentences[i].text for i in indices),
            created_at=utcnow(),
        )

    def cluster_projection(self, content: str, params: SummaryParams) -> list[dict]:
        """Per-sentence 2D PCA coordinates and cluster ids for plotting."""
        sentences = self.retained(content, params)
        matrix = self.embed(sentences, params.embedder)
        result = kmeans_fit(matrix, resolve_k(params, len(sentences)), seed=params.seed)
        coords = pca_project(matrix, 2)
        return [
            {
                "original_index": s.original_index,
                "x": float(coords[i, 0]),
                "y": float(coords[i, 1]),
                "cluster": int(result.assignments[i]),
                "text": s.text,
            }
            for i, s in enumerate(sentences)
        ]


_default_engine = Engine()


def summarize_lecture(transcript, params: SummaryParams, engine: Engine | None = None, name: str = "") -> SummaryRecord:
    """Summarize a stored or ad-hoc transcript (anything with ``content``)."""
    engine = engine or _default_engine
    return engine.summarize(
        transcript.content, params, lecture_id=getattr(transcript, "id", None), name=name
    )
