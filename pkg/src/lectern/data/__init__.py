"""Bundled lecture fixtures: ``ihie`` (34 retained sentences) and ``td0`` (40)."""

from __future__ import annotations

from importlib import resources


def read_text(name: str) -> str:
    return resources.files(__name__).joinpath(name).read_text(encoding="utf-8")


def read_bytes(name: str) -> bytes:
    return resources.files(__name__).joinpath(name).read_bytes()


def lecture(name: str) -> str:
    """Paragraph text of a bundled lecture, e.g. ``lecture("ihie")``."""
    return read_text(f"{name}.txt")
