"""Extractive lecture summarization with sentence embeddings and K-Means."""

from .cluster import ClusterResult, kmeans_fit, select_centroid_sentences
from .embed import EmbedderConfig, embed_sentences, pca_project
from .srt import SrtCue, cues_to_paragraph, parse_srt
from .store import LectureTranscript, Store
from .summarize import Engine, SummaryParams, SummaryRecord, resolve_k, summarize_lecture
from .textproc import FilterConfig, Sentence, filter_sentences, segment_sentences
from .textrank import pagerank, textrank_summarize

__version__ = "0.1.0"

__all__ = [
    "ClusterResult",
    "EmbedderConfig",
    "Engine",
    "FilterConfig",
    "LectureTranscript",
    "Sentence",
    "SrtCue",
    "Store",
    "SummaryParams",
    "SummaryRecord",
    "cues_to_paragraph",
    "embed_sentences",
    "filter_sentences",
    "kmeans_fit",
    "pagerank",
    "parse_srt",
    "pca_project",
    "resolve_k",
    "segment_sentences",
    "select_centroid_sentences",
    "summarize_lecture",
    "textrank_summarize",
]
