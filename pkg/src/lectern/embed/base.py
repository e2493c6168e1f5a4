from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from ..errors import InvalidParams, LecternError

BACKENDS = ("transformer", "hashed", "ensemble")
POOLINGS = ("mean", "max", "cls")


class EmbeddingError(LecternError):
    pass


class ModelUnavailable(EmbeddingError):
    """The transformer backend was requested but no model artifact is loadable."""


class EmptyInput(EmbeddingError, ValueError):
    pass


class LayerOutOfRange(EmbeddingError, IndexError):
    pass


class DegenerateInput(EmbeddingError, ValueError):
    pass


@dataclass(frozen=True)
class EmbedderConfig:
    backend: str = "transformer"
    layer_offset: int = -2
    pooling: str = "mean"
    hashed_dim: int = 256
    include_special_tokens: bool = True
    ensemble_members: tuple[EmbedderConfig, ...] = ()

    def __post_init__(self) -> None:
        if self.backend not in BACKENDS:
            raise InvalidParams(f"backend must be one of {BACKENDS}")
        if self.pooling not in POOLINGS:
            raise InvalidParams(f"pooling must be one of {POOLINGS}")
        if type(self.layer_offset) is not int or self.layer_offset > -1:
            raise InvalidParams("layer_offset must be an integer <= -1")
        if type(self.hashed_dim) is not int or self.hashed_dim < 8:
            raise InvalidParams("hashed_dim must be an integer >= 8")
        members = tuple(self.ensemble_members)
        object.__setattr__(self, "ensemble_members", members)
        if self.backend == "ensemble":
            if len(members) != 2:
                raise InvalidParams("an ensemble needs exactly two members")
            if any(m.backend == "ensemble" for m in members):
                raise InvalidParams("ensemble members cannot be ensembles")
        elif members:
            raise InvalidParams("ensemble_members is only valid for the ensemble backend")

    def to_dict(self) -> dict:
        return {
            "backend": self.backend,
            "layer_offset": self.layer_offset,
            "pooling": self.pooling,
            "hashed_dim": self.hashed_dim,
            "include_special_tokens": self.include_special_tokens,
            "ensemble_members": [m.to_dict() for m in self.ensemble_members],
        }

    @classmethod
    def from_dict(cls, data: dict | None, default_backend: str = "transformer") -> EmbedderConfig:
        if data is None:
            return cls(backend=default_backend)
        if not isinstance(data, dict):
            raise InvalidParams("embedder must be an object")
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise InvalidParams(f"unknown embedder fields: {sorted(unknown)}")
        kwargs = dict(data)
        kwargs.setdefault("backend", default_backend)
        if "include_special_tokens" in kwargs and not isinstance(kwargs["include_special_tokens"], bool):
            raise InvalidParams("include_special_tokens must be a boolean")
        members = kwargs.pop("ensemble_members", None) or []
        if not isinstance(members, (list, tuple)):
            raise InvalidParams("ensemble_members must be a list")
        kwargs["ensemble_members"] = tuple(
            cls.from_dict(m, default_backend=default_backend) for m in members
        )
        return cls(**kwargs)


@dataclass
class TokenEmbeddings:
    """Token-level states of one sentence, padding already removed.

    ``layers`` holds one W x E matrix per hidden layer (bottom to top),
    ``pooled`` the model's classification vector and ``special_mask`` flags
    tokens such as [CLS]/[SEP].
    """

    layers: list[np.ndarray]
    pooled: np.ndarray
    special_mask: np.ndarray | None = None

    @property
    def tokens(self) -> int:
        return self.layers[0].shape[0]


def pool_tokens(token_embeddings: TokenEmbeddings, config: EmbedderConfig) -> np.ndarray:
    """Reduce one sentence's token states to a single length-E vector."""
    if config.pooling == "cls":
        return np.asarray(token_embeddings.pooled, dtype=np.float64)
    layers = token_embeddings.layers
    offset = config.layer_offset
    if offset > -1 or -offset > len(layers):
        raise LayerOutOfRange(f"layer_offset {offset} outside 1..{len(layers)} layers")
    states = np.asarray(layers[offset], dtype=np.float64)
    mask = token_embeddings.special_mask
    if not config.include_special_tokens and mask is not None:
        keep = ~np.asarray(mask, dtype=bool)
        if keep.any():
            states = states[keep]
    if config.pooling == "mean":
        return states.mean(axis=0)
    return states.max(axis=0)


def normalize_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    safe = np.where(norms > 0, norms, 1.0)
    return matrix / safe
