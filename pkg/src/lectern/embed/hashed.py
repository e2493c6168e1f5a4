"""Model-free bag-of-words embedding via feature hashing."""

from __future__ import annotations

import hashlib
import re

import numpy as np

_TOKEN_RE = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def bucket(token: str, dim: int) -> int:
    # blake2b, not hash(): str hashing is salted per process
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % dim


def hashed_embed(sentences, hashed_dim: int = 256) -> np.ndarray:
    """Embed sentences as L2-normalized hashed term counts.

    ``sentences`` may be :class:`~lectern.textproc.Sentence` objects or
    plain strings. Sentences without alphanumeric tokens map to a zero row.
    """
    if hashed_dim < 8:
        raise ValueError("hashed_dim must be >= 8")
    out = np.zeros((len(sentences), hashed_dim), dtype=np.float64)
    for i, sentence in enumerate(sentences):
        text = getattr(sentence, "text", sentence)
        for token in tokenize(text):
            out[i, bucket(token, hashed_dim)] += 1.0
        norm = np.sqrt(np.dot(out[i], out[i]))
        if norm > 0:
            out[i] /= norm
    return out
