"""Pretrained transformer encoder backend.

A model artifact is a directory holding Hugging Face style weights and
tokenizer files plus a ``lectern-model.json`` manifest::

    {"hidden_size": 1024, "num_layers": 24, "max_length": 512}

``torch`` and ``transformers`` are imported lazily so the rest of the
package works without them.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .base import EmbedderConfig, ModelUnavailable, TokenEmbeddings, pool_tokens

log = logging.getLogger(__name__)

MANIFEST_NAME = "lectern-model.json"
MODEL_PATH_ENV = "LECTERN_MODEL_PATH"

_load_lock = threading.Lock()
_loaded: dict[Path, TransformerEmbedder] = {}


@dataclass(frozen=True)
class ModelManifest:
    hidden_size: int
    num_layers: int
    max_length: int

    @classmethod
    def read(cls, model_dir: Path) -> ModelManifest:
        path = model_dir / MANIFEST_NAME
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            return cls(
                hidden_size=int(data["hidden_size"]),
                num_layers=int(data["num_layers"]),
                max_length=int(data["max_length"]),
            )
        except FileNotFoundError:
            raise ModelUnavailable(f"no model manifest at {path}") from None
        except (ValueError, KeyError, TypeError) as exc:
            raise ModelUnavailable(f"unreadable model manifest {path}: {exc}") from None


def write_manifest(model_dir: Path, hidden_size: int, num_layers: int, max_length: int) -> None:
    payload = {"hidden_size": hidden_size, "num_layers": num_layers, "max_length": max_length}
    (Path(model_dir) / MANIFEST_NAME).write_text(json.dumps(payload, indent=2), encoding="utf-8")


class TransformerEmbedder:
    """Immutable wrapper around one loaded encoder; shareable across threads."""

    batch_size = 16

    def __init__(self, model_dir: str | os.PathLike) -> None:
        self.model_dir = Path(model_dir)
        if not self.model_dir.is_dir():
            raise ModelUnavailable(f"model directory {self.model_dir} does not exist")
        self.manifest = ModelManifest.read(self.model_dir)
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise ModelUnavailable(f"transformer backend needs torch and transformers: {exc}") from None
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(self.model_dir, local_files_only=True)
            model = AutoModel.from_pretrained(self.model_dir, local_files_only=True)
        except (OSError, ValueError) as exc:
            raise ModelUnavailable(f"cannot load model from {self.model_dir}: {exc}") from None
        model.eval()
        if model.config.hidden_size != self.manifest.hidden_size:
            raise ModelUnavailable(
                f"manifest hidden_size {self.manifest.hidden_size} != model {model.config.hidden_size}"
            )
        self._model = model
        self._torch = torch
        # fast tokenizers are not safe to call from several threads at once
        self._tok_lock = threading.Lock()

    @property
    def hidden_size(self) -> int:
        return self.manifest.hidden_size

    def _encode(self, texts: list[str]):
        limit = self.manifest.max_length
        with self._tok_lock:
            lengths = [len(ids) for ids in self._tokenizer(texts)["input_ids"]]
            batch = self._tokenizer(
                texts,
                padding=True,
                truncation=True,
                max_length=limit,
                return_special_tokens_mask=True,
                return_tensors="pt",
            )
        for text, length in zip(texts, lengths):
            if length > limit:
                log.info("truncated sentence from %d to %d tokens: %.60s", length, limit, text)
        return batch

    def iter_token_embeddings(self, texts: list[str]) -> Iterator[TokenEmbeddings]:
        torch = self._torch
        for lo in range(0, len(texts), self.batch_size):
            batch = self._encode(texts[lo : lo + self.batch_size])
            special = batch.pop("special_tokens_mask")
            with torch.no_grad():
                out = self._model(**batch, output_hidden_states=True)
            hidden = out.hidden_states
            pooled = getattr(out, "pooler_output", None)
            mask = batch["attention_mask"].bool()
            for i in range(mask.shape[0]):
                keep = mask[i]
                layers = [h[i][keep].double().numpy() for h in hidden]
                cls_vec = pooled[i] if pooled is not None else hidden[-1][i][0]
                yield TokenEmbeddings(
                    layers=layers,
                    pooled=cls_vec.double().numpy(),
                    special_mask=special[i][keep].bool().numpy(),
                )

    def embed(self, texts: list[str], config: EmbedderConfig) -> np.ndarray:
        rows = [pool_tokens(tokens, config) for tokens in self.iter_token_embeddings(texts)]
        return np.vstack(rows)


def resolve_model_path(model_path: str | os.PathLike | None) -> Path:
    raw = model_path if model_path is not None else os.environ.get(MODEL_PATH_ENV)
    if not raw:
        raise ModelUnavailable(f"no model artifact configured (set {MODEL_PATH_ENV})")
    return Path(raw).expanduser().resolve()


def load_transformer(model_path: str | os.PathLike | None = None) -> TransformerEmbedder:
    """Return the shared embedder for ``model_path``, loading it once."""
    path = resolve_model_path(model_path)
    with _load_lock:
        embedder = _loaded.get(path)
        if embedder is None:
            embedder = TransformerEmbedder(path)
            _loaded[path] = embedder
        return embedder
