"""TextRank baseline: PageRank over a word-overlap sentence graph."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cluster import KTooLarge
from .embed.hashed import tokenize
from .errors import LecternError


class EmptyGraph(LecternError, ValueError):
    pass


@dataclass
class SimilarityGraph:
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.weights.shape[0]


def _token_set(sentence, stopwords) -> set[str]:
    text = getattr(sentence, "text", sentence)
    return {t for t in tokenize(text) if t not in stopwords}


def sentence_similarity(a, b, stopwords: frozenset[str] = frozenset()) -> float:
    """Shared distinct tokens over ln(1+|a|) + ln(1+|b|), in distinct-token counts."""
    ta, tb = _token_set(a, stopwords), _token_set(b, stopwords)
    if not ta or not tb:
        return 0.0
    return len(ta & tb) / (math.log1p(len(ta)) + math.log1p(len(tb)))


def build_graph(sentences, stopwords: frozenset[str] = frozenset()) -> SimilarityGraph:
    n = len(sentences)
    weights = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            weights[i, j] = weights[j, i] = sentence_similarity(sentences[i], sentences[j], stopwords)
    return SimilarityGraph(weights)


def pagerank(graph: SimilarityGraph, damping: float = 0.85, tol: float = 1e-6, max_iter: int = 200) -> np.ndarray:
    """Weighted PageRank by power iteration from the uniform vector.

    Nodes without outgoing weight spread their score uniformly over all
    nodes, so the scores always form a probability vector.
    """
    w = np.asarray(graph.weights, dtype=np.float64)
    n = w.shape[0]
    if n == 0:
        raise EmptyGraph("pagerank needs at least one node")
    if not 0 < damping < 1:
        raise ValueError("damping must lie in (0, 1)")
    out_weight = w.sum(axis=1)
    dangling = out_weight == 0
    transition = np.divide(w, out_weight[:, None], out=np.zeros_like(w), where=~dangling[:, None])
    scores = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        spread = scores[dangling].sum() / n
        updated = (1 - damping) / n + damping * (transition.T @ scores + spread)
        change = np.abs(updated - scores).sum()
        scores = updated
        if change <= tol:
            break
    return scores / scores.sum()


def textrank_summarize(sentences, k: int, stopwords: frozenset[str] = frozenset()) -> list[int]:
    """Indices of the k top-scoring sentences, returned in original order."""
    n = len(sentences)
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n:
        raise KTooLarge(f"k={k} exceeds the {n} sentences")
    scores = pagerank(build_graph(sentences, stopwords))
    # rounding absorbs float noise so exact ties fall to the lower index
    ranked = np.argsort(-np.round(scores, 12), kind="stable")[:k]
    return sorted(int(i) for i in ranked)
