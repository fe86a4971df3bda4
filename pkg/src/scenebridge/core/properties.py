"""Open-ended, kind-checked property storage.

Every scene element carries a :class:`PropertySet`: an ordered name→value map
where each name has a fixed value kind.  Kinds are frozen in a registry at
first use, so a name can never silently change type between two documents of
the same session — that keeps format round-trips lossless.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..errors import PropertyKindError
from ..math3d import quat_normalize


class PropertyKind(Enum):
    BOOLEAN = "boolean"
    INTEGER = "integer"
    REAL = "real"
    STRING = "string"
    VEC3 = "vec3"
    QUATERNION = "quaternion"
    MATRIX = "matrix"
    REFERENCE = "reference"
    TRIPLES = "triples"


@dataclass(frozen=True)
class FileReference:
    """A path to an external resource (mesh, texture), kept distinct from
    plain strings so exporters can rewrite or resolve it."""

    path: str

    def __str__(self):
        return self.path


def infer_kind(value) -> PropertyKind:
    if isinstance(value, bool):
        return PropertyKind.BOOLEAN
    if isinstance(value, (int, np.integer)):
        return PropertyKind.INTEGER
    if isinstance(value, (float, np.floating)):
        return PropertyKind.REAL
    if isinstance(value, str):
        return PropertyKind.STRING
    if isinstance(value, FileReference):
        return PropertyKind.REFERENCE
    if isinstance(value, (list, tuple)) and value and isinstance(value[0], tuple):
        return PropertyKind.TRIPLES
    arr = np.asarray(value)
    if arr.shape == (3,):
        return PropertyKind.VEC3
    if arr.shape == (4,):
        return PropertyKind.QUATERNION
    if arr.ndim == 2:
        return PropertyKind.MATRIX
    raise PropertyKindError(f"cannot infer property kind for value {value!r}")


def coerce_value(name: str, kind: PropertyKind, value):
    try:
        if kind is PropertyKind.BOOLEAN:
            if not isinstance(value, (bool, np.bool_)):
                raise PropertyKindError("")
            return bool(value)
        if kind is PropertyKind.INTEGER:
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise PropertyKindError("")
            return int(value)
        if kind is PropertyKind.REAL:
            if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
                raise PropertyKindError("")
            return float(value)
        if kind is PropertyKind.STRING:
            if not isinstance(value, str):
                raise PropertyKindError("")
            return value
        if kind is PropertyKind.VEC3:
            arr = np.asarray(value, dtype=float)
            if arr.shape != (3,):
                raise PropertyKindError("")
            return arr
        if kind is PropertyKind.QUATERNION:
            arr = np.asarray(value, dtype=float)
            if arr.shape != (4,):
                raise PropertyKindError("")
            # Rotations are re-normalized on ingest.
            return quat_normalize(arr)
        if kind is PropertyKind.MATRIX:
            arr = np.asarray(value, dtype=float)
            if arr.ndim != 2:
                raise PropertyKindError("")
            return arr
        if kind is PropertyKind.REFERENCE:
            if isinstance(value, str):
                return FileReference(value)
            if not isinstance(value, FileReference):
                raise PropertyKindError("")
            return value
        if kind is PropertyKind.TRIPLES:
            out = []
            for entry in value:
                pname, pkind, pvalue = entry
                if isinstance(pkind, str):
                    pkind = PropertyKind(pkind)
                if pkind is PropertyKind.TRIPLES:
                    raise PropertyKindError(f"property {name!r}: triples cannot nest")
                out.append((pname, pkind, coerce_value(pname, pkind, pvalue)))
            return out
    except PropertyKindError:
        pass
    except (TypeError, ValueError):
        pass
    raise PropertyKindError(f"property {name!r} expects kind {kind.value}, got {value!r}")


class PropertyRegistry:
    """Maps property names to their fixed value kind.

    Unknown names are frozen to the kind of the first value stored under them;
    later writes with a different kind are rejected.
    """

    #: Names whose kind is fixed up front, independent of first use.
    BUILTIN = {
        "gravity": PropertyKind.VEC3,
        "axis": PropertyKind.VEC3,
        "limit:lower": PropertyKind.REAL,
        "limit:upper": PropertyKind.REAL,
        "limits:unbounded": PropertyKind.BOOLEAN,
        "source:name": PropertyKind.STRING,
        "source:format": PropertyKind.STRING,
        "source:assetId": PropertyKind.STRING,
        "source:autoName": PropertyKind.BOOLEAN,
    }

    def __init__(self):
        self._kinds: dict[str, PropertyKind] = dict(self.BUILTIN)

    def kind_of(self, name: str) -> PropertyKind | None:
        return self._kinds.get(name)

    def register(self, name: str, kind: PropertyKind) -> PropertyKind:
        existing = self._kinds.get(name)
        if existing is not None:
            if existing is not kind:
                raise PropertyKindError(
                    f"property {name!r} already registered with kind {existing.value}, "
                    f"cannot re-register as {kind.value}"
                )
            return existing
        self._kinds[name] = kind
        return kind


#: Shared default registry; importers contribute names at module import time.
DEFAULT_REGISTRY = PropertyRegistry()


class PropertySet:
    """Ordered, kind-checked name→value map."""

    def __init__(self, registry: PropertyRegistry | None = None):
        self.registry = registry if registry is not None else DEFAULT_REGISTRY
        self._entries: dict[str, tuple[PropertyKind, object]] = {}

    def set(self, name: str, value, kind: PropertyKind | None = None):
        if kind is None:
            kind = self.registry.kind_of(name) or infer_kind(value)
        kind = self.registry.register(name, kind)
        self._entries[name] = (kind, coerce_value(name, kind, value))

    def get(self, name: str, default=None):
        entry = self._entries.get(name)
        return default if entry is None else entry[1]

    def kind(self, name: str) -> PropertyKind:
        return self._entries[name][0]

    def remove(self, name: str):
        self._entries.pop(name, None)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __len__(self):
        return len(self._entries)

    def items(self):
        for name, (kind, value) in self._entries.items():
            yield name, kind, value

    def names(self):
        return list(self._entries)

    def copy(self) -> "PropertySet":
        dup = PropertySet(self.registry)
        for name, (kind, value) in self._entries.items():
            if isinstance(value, np.ndarray):
                value = value.copy()
            elif isinstance(value, list):
                value = list(value)
            dup._entries[name] = (kind, value)
        return dup

    def approx_equal(self, other: "PropertySet", tol: float = 1e-9) -> bool:
        if set(self._entries) != set(other._entries):
            return False
        for name, (kind, value) in self._entries.items():
            okind, ovalue = other._entries[name]
            if kind is not okind:
                return False
            if isinstance(value, np.ndarray):
                if not np.allclose(value, ovalue, rtol=0.0, atol=tol):
                    return False
            elif value != ovalue:
                return False
        return True

    def __repr__(self):
        return f"PropertySet({dict((n, v) for n, _, v in self.items())!r})"
