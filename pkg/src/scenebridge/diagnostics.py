"""Diagnostics are data: importers, exporters, and refinement report issues
through a shared collector instead of raising, and the CLI serializes the
collected entries as JSON lines on stderr.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field


@dataclass
class Diagnostic:
    severity: str  # "error" | "warning" | "info"
    code: str
    message: str
    context: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {"severity": self.severity, "code": self.code, "message": self.message}
        if self.context:
            payload["context"] = self.context
        return json.dumps(payload, sort_keys=True)


class Diagnostics:
    """Ordered collection of diagnostics; append-only."""

    def __init__(self):
        self.entries: list[Diagnostic] = []

    def error(self, code: str, message: str, **context):
        self.entries.append(Diagnostic("error", code, message, context))

    def warning(self, code: str, message: str, **context):
        self.entries.append(Diagnostic("warning", code, message, context))

    def info(self, code: str, message: str, **context):
        self.entries.append(Diagnostic("info", code, message, context))

    def extend(self, other: "Diagnostics"):
        self.entries.extend(other.entries)

    def by_code(self, code: str) -> list[Diagnostic]:
        return [d for d in self.entries if d.code == code]

    @property
    def has_errors(self) -> bool:
        return any(d.severity == "error" for d in self.entries)

    def write_json_lines(self, stream=None):
        stream = stream if stream is not None else sys.stderr
        for entry in self.entries:
            stream.write(entry.to_json() + "\n")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __repr__(self):
        return f"Diagnostics({self.entries!r})"
