"""Sentence embedding backends and the 2D projection used for cluster plots."""

from __future__ import annotations

import numpy as np

from .base import (
    BACKENDS,
    POOLINGS,
    DegenerateInput,
    EmbedderConfig,
    EmbeddingError,
    EmptyInput,
    LayerOutOfRange,
    ModelUnavailable,
    TokenEmbeddings,
    normalize_rows,
    pool_tokens,
)
from .hashed import hashed_embed
from .pca import pca_project, principal_directions
from .transformer import load_transformer

__all__ = [
    "BACKENDS",
    "POOLINGS",
    "DegenerateInput",
    "EmbedderConfig",
    "EmbeddingError",
    "EmptyInput",
    "LayerOutOfRange",
    "ModelUnavailable",
    "TokenEmbeddings",
    "embed_sentences",
    "ensemble_embed",
    "hashed_embed",
    "load_transformer",
    "normalize_rows",
    "pca_project",
    "pool_tokens",
    "principal_directions",
]


def _texts(sentences) -> list[str]:
    return [getattr(s, "text", s) for s in sentences]


def embed_sentences(sentences, config: EmbedderConfig, *, model_path=None) -> np.ndarray:
    """Embed sentences into an N x E float64 matrix, one row per sentence."""
    texts = _texts(sentences)
    if not texts:
        raise EmptyInput("cannot embed an empty sentence list")
    if config.backend == "hashed":
        matrix = hashed_embed(texts, config.hashed_dim)
    elif config.backend == "ensemble":
        matrix = ensemble_embed(texts, config.ensemble_members, model_path=model_path)
    else:
        matrix = load_transformer(model_path).embed(texts, config)
    if not np.isfinite(matrix).all():
        raise EmbeddingError("embedding produced non-finite values")
    return matrix


def ensemble_embed(sentences, members, *, model_path=None) -> np.ndarray:
    """Concatenate two backends' row-normalized embeddings side by side."""
    members = tuple(members)
    if len(members) != 2 or any(m.backend == "ensemble" for m in members):
        raise ValueError("ensemble needs exactly two non-ensemble members")
    blocks = [
        normalize_rows(embed_sentences(sentences, member, model_path=model_path))
        for member in members
    ]
    return np.hstack(blocks)
