"""SubRip (``.srt``) parsing and conversion to paragraph text."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .errors import LecternError

log = logging.getLogger(__name__)

_STAMP = r"(\d{2,}):([0-5]\d):([0-5]\d)[,.](\d{3})"
TIMESTAMP_RE = re.compile(rf"^{_STAMP}\s*-->\s*{_STAMP}(?:\s+.*)?$", re.ASCII)
_TAG_RE = re.compile(r"<[^>]*>|\{[^}]*\}")
_WS_RE = re.compile(r"\s+")
_CANONICAL = "HH:MM:SS,mmm --> HH:MM:SS,mmm"


class SrtError(LecternError, ValueError):
    """Base class for SubRip parse failures."""

    block_index: int | None = None


class DecodeError(SrtError):
    """Input bytes are not valid UTF-8."""


class MalformedTimestamp(SrtError):
    def __init__(self, block_index: int, line: str) -> None:
        super().__init__(f"block {block_index}: expected '{_CANONICAL}', got {line!r}")
        self.block_index = block_index
        self.line = line


class MalformedBlock(SrtError):
    def __init__(self, block_index: int, reason: str) -> None:
        super().__init__(f"block {block_index}: {reason}")
        self.block_index = block_index


@dataclass(frozen=True)
class SrtCue:
    sequence: int
    start: int  # milliseconds
    end: int  # milliseconds
    text: str


class CueList(list):
    """List of cues carrying parse warnings.

    ``non_monotonic`` is set when sequence numbers do not strictly increase;
    that is tolerated rather than treated as an error.
    """

    non_monotonic: bool = False


def _to_ms(h: str, m: str, s: str, ms: str) -> int:
    return ((int(h) * 60 + int(m)) * 60 + int(s)) * 1000 + int(ms)


def _decode(data: bytes | str) -> str:
    if isinstance(data, str):
        text = data
    else:
        try:
            text = bytes(data).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DecodeError(f"input is not valid UTF-8 (byte {exc.start})") from None
    return text.removeprefix("\ufeff")


def _blocks(text: str) -> list[list[str]]:
    blocks: list[list[str]] = []
    current: list[str] = []
    for line in text.splitlines():
        if line.strip():
            current.append(line.strip())
        elif current:
            blocks.append(current)
            current = []
    if current:
        blocks.append(current)
    return blocks


def clean_payload(lines: list[str]) -> str:
    """Join payload lines with spaces and strip ``<...>``/``{...}`` styling."""
    joined = " ".join(lines)
    return _WS_RE.sub(" ", _TAG_RE.sub("", joined)).strip()


def parse_srt(data: bytes | str) -> CueList:
    """Parse SubRip content into cues in file order.

    Cues whose payload is empty after tag removal are dropped. Raises a
    subclass of :class:`SrtError` on any structural problem.
    """
    text = _decode(data)
    cues = CueList()
    last_seq = 0
    for index, lines in enumerate(_blocks(text)):
        if len(lines) < 2:
            raise MalformedBlock(index, "block lacks a timestamp line")
        head = lines[0]
        if not head.isascii() or not head.isdigit() or int(head) < 1:
            if TIMESTAMP_RE.match(head):
                raise MalformedBlock(index, "block lacks a sequence number")
            raise MalformedBlock(index, f"expected a cue number, got {head!r}")
        match = TIMESTAMP_RE.match(lines[1])
        if match is None:
            raise MalformedTimestamp(index, lines[1])
        groups = match.groups()
        start, end = _to_ms(*groups[:4]), _to_ms(*groups[4:])
        if start > end:
            raise MalformedTimestamp(index, lines[1])
        seq = int(head)
        if seq <= last_seq:
            cues.non_monotonic = True
        last_seq = seq
        payload = clean_payload(lines[2:])
        if payload:
            cues.append(SrtCue(sequence=seq, start=start, end=end, text=payload))
    if cues.non_monotonic:
        log.warning("SRT sequence numbers are not strictly increasing")
    return cues


def cues_to_paragraph(cues: list[SrtCue]) -> str:
    return _WS_RE.sub(" ", " ".join(cue.text for cue in cues)).strip()


def srt_to_paragraph(data: bytes | str) -> str:
    return cues_to_paragraph(parse_srt(data))


def format_timestamp(ms: int) -> str:
    h, rem = divmod(ms, 3_600_000)
    m, rem = divmod(rem, 60_000)
    s, ms = divmod(rem, 1000)
    return f"{h:02d}:{m:02d}:{s:02d},{ms:03d}"


def write_srt(cues: list[SrtCue]) -> str:
    """Render cues back to SubRip text (used to build fixtures)."""
    parts = [
        f"{c.sequence}\n{format_timestamp(c.start)} --> {format_timestamp(c.end)}\n{c.text}\n"
        for c in cues
    ]
    return "\n".join(parts)
