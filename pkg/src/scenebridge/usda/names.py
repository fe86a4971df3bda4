"""Prim-name sanitization.

Prim identifiers are restricted to ``[A-Za-z_][A-Za-z0-9_]*``; source formats
allow nearly anything.  Sanitization is deterministic, and a sanitizer
instance keeps the raw→name map injective for the session by suffixing
collisions.
"""
from __future__ import annotations

import re

_ILLEGAL = re.compile(r"[^A-Za-z0-9_]")


def sanitize_name(raw: str) -> str:
    """Deterministic legal-identifier form of ``raw`` (not collision-free)."""
    out = _ILLEGAL.sub("_", raw)
    if not out:
        return "_"
    if out[0].isdigit():
        out = "_" + out
    return out


class NameSanitizer:
    """Sanitizes names injectively: equal raws map to equal names, distinct
    raws never collide within one sanitizer's lifetime."""

    def __init__(self):
        self._by_raw: dict[str, str] = {}
        self._used: set[str] = set()

    def sanitize(self, raw: str) -> str:
        if raw in self._by_raw:
            return self._by_raw[raw]
        base = sanitize_name(raw)
        name = base
        n = 1
        while name in self._used:
            name = f"{base}_{n}"
            n += 1
        self._by_raw[raw] = name
        self._used.add(name)
        return name

    def reserve(self, name: str):
        """Mark a name as taken so future sanitizations avoid it."""
        self._used.add(name)
