"""Exception hierarchy shared across the package."""

from __future__ import annotations


class LecternError(Exception):
    """Base class for every error raised deliberately by lectern."""


class InvalidParams(LecternError, ValueError):
    """Summary parameters failed validation."""


class NotFound(LecternError, LookupError):
    """A lecture or summary id does not exist."""

    def __init__(self, kind: str, ident: object) -> None:
        super().__init__(f"{kind} {ident!r} not found")
        self.kind = kind
        self.ident = ident


class Conflict(LecternError):
    """A write collided with an existing record."""
