"""Sentence segmentation and candidate-sentence filtering."""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, fields

from .errors import InvalidParams

ABBREVIATIONS = frozenset(
    {"dr.", "mr.", "mrs.", "ms.", "prof.", "sr.", "jr.", "st.", "vs.",
     "u.s.", "u.k.", "e.g.", "i.e.", "etc.", "cf.", "approx."}
)
DEFAULT_CONJUNCTIONS = frozenset(
    {"and", "but", "or", "so", "yet", "nor", "for", "because", "although", "though"}
)

# terminal punctuation, optional closing quotes/brackets, then whitespace or end
_BOUNDARY_RE = re.compile(r"[.!?]+[\"'”’)\]]*(?=\s|$)")
_OPENERS = "\"'“‘"
_INITIAL_RE = re.compile(r"^[A-Z]\.$")
_LAST_WORD_RE = re.compile(r"\S+$")
_STRIP = string.punctuation + "\u201c\u201d\u2018\u2019\u00ab\u00bb\u2014\u2013\u2026"


@dataclass(frozen=True)
class Sentence:
    original_index: int
    text: str


@dataclass(frozen=True)
class FilterConfig:
    min_tokens: int = 5
    max_tokens: int = 90
    leading_conjunctions: frozenset[str] = DEFAULT_CONJUNCTIONS
    banned_patterns: tuple[str, ...] = ("quiz",)

    def __post_init__(self) -> None:
        if self.min_tokens < 1 or self.max_tokens < 1:
            raise InvalidParams("token thresholds must be positive")
        if self.min_tokens >= self.max_tokens:
            raise InvalidParams("min_tokens must be smaller than max_tokens")
        object.__setattr__(
            self, "leading_conjunctions", frozenset(w.lower() for w in self.leading_conjunctions)
        )
        object.__setattr__(self, "banned_patterns", tuple(self.banned_patterns))

    def to_dict(self) -> dict:
        return {
            "min_tokens": self.min_tokens,
            "max_tokens": self.max_tokens,
            "leading_conjunctions": sorted(self.leading_conjunctions),
            "banned_patterns": list(self.banned_patterns),
        }

    @classmethod
    def from_dict(cls, data: dict | None) -> FilterConfig:
        if data is None:
            return cls()
        if not isinstance(data, dict):
            raise InvalidParams("filter must be an object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidParams(f"unknown filter fields: {sorted(unknown)}")
        kwargs = dict(data)
        for key in ("min_tokens", "max_tokens"):
            if key in kwargs and (type(kwargs[key]) is not int):
                raise InvalidParams(f"{key} must be an integer")
        for key in ("leading_conjunctions", "banned_patterns"):
            if key in kwargs:
                value = kwargs[key]
                if not isinstance(value, (list, tuple, set, frozenset)) or not all(
                    isinstance(v, str) for v in value
                ):
                    raise InvalidParams(f"{key} must be a list of strings")
        if "leading_conjunctions" in kwargs:
            kwargs["leading_conjunctions"] = frozenset(kwargs["leading_conjunctions"])
        if "banned_patterns" in kwargs:
            kwargs["banned_patterns"] = tuple(kwargs["banned_patterns"])
        return cls(**kwargs)


def _protected(text: str, end: int) -> bool:
    """True when the period ending at ``end`` belongs to an abbreviation."""
    match = _LAST_WORD_RE.search(text, 0, end)
    word = match.group().lstrip("(\"'“‘[") if match else ""
    return word.lower() in ABBREVIATIONS or bool(_INITIAL_RE.match(word))


def segment_sentences(text: str) -> list[Sentence]:
    """Split paragraph text into sentences.

    A boundary is terminal punctuation followed by whitespace and then an
    uppercase letter, an opening quote, or the end of the text. Known
    abbreviations and single-letter initials never end a sentence.
    """
    pieces: list[str] = []
    start = 0
    n = len(text)
    for match in _BOUNDARY_RE.finditer(text):
        end = match.end()
        nxt = end
        while nxt < n and text[nxt].isspace():
            nxt += 1
        if nxt < n and not (text[nxt].isupper() or text[nxt] in _OPENERS):
            continue
        punct_end = match.start() + len(match.group().rstrip("\"'”’)]"))
        if text[punct_end - 1] == "." and _protected(text, punct_end):
            continue
        pieces.append(text[start:end])
        start = end
    pieces.append(text[start:])
    out: list[Sentence] = []
    for piece in pieces:
        piece = piece.strip()
        if piece:
            out.append(Sentence(original_index=len(out), text=piece))
    return out


def _first_word(text: str) -> str:
    tokens = text.split()
    return tokens[0].strip(_STRIP).lower() if tokens else ""


def keep_sentence(sentence: Sentence, config: FilterConfig) -> bool:
    tokens = sentence.text.split()
    if not config.min_tokens <= len(tokens) <= config.max_tokens:
        return False
    if _first_word(sentence.text) in config.leading_conjunctions:
        return False
    lowered = sentence.text.lower()
    return not any(p.lower() in lowered for p in config.banned_patterns)


def filter_sentences(sentences: list[Sentence], config: FilterConfig | None = None) -> list[Sentence]:
    """Drop sentences that would need outside context in a summary.

    Removes sentences opening with a conjunction, sentences outside the
    token-count window, and sentences mentioning a banned pattern.
    """
    config = config or FilterConfig()
    return [s for s in sentences if keep_sentence(s, config)]


def retained_sentences(text: str, config: FilterConfig | None = None) -> list[Sentence]:
    return filter_sentences(segment_sentences(text), config)
