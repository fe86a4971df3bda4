"""Stage model for the supported USDA text subset.

A stage is layer metadata plus a prim tree.  Attributes keep their text-level
type token so foreign values survive a parse/emit cycle; relationships are
attributes with type token "rel" and :class:`UsdaPath` values.  Supported
specifiers are ``def`` and ``over``; composition arcs beyond sublayers
(references, payloads, variants, time samples) are out of scope.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import SceneBridgeError
from ..core.model import is_legal_identifier


@dataclass(frozen=True)
class UsdaPath:
    """A prim or property path used as a relationship target."""

    path: str

    def __str__(self):
        return self.path

    @property
    def prim_path(self) -> str:
        return self.path.split(".", 1)[0]

    @property
    def property_name(self) -> str | None:
        if "." in self.path:
            return self.path.split(".", 1)[1]
        return None


@dataclass
class UsdaAttr:
    """One attribute: text type token, value, and layout qualifiers."""

    type_token: str
    value: object
    custom: bool = False
    uniform: bool = False


class UsdaPrim:
    def __init__(self, name: str, type_name: str | None = None, specifier: str = "def"):
        if specifier not in ("def", "over"):
            raise SceneBridgeError(f"unsupported specifier {specifier!r}")
        if not is_legal_identifier(name):
            raise SceneBridgeError(f"illegal prim name {name!r}")
        self.name = name
        self.type_name = type_name
        self.specifier = specifier
        self.api_schemas: list[str] = []
        self.attributes: dict[str, UsdaAttr] = {}
        self.children: list[UsdaPrim] = []
        self.path: str = "/" + name

    def set(self, name: str, type_token: str, value, custom: bool = False, uniform: bool = False):
        self.attributes[name] = UsdaAttr(type_token, value, custom, uniform)

    def get(self, name: str, default=None):
        attr = self.attributes.get(name)
        return default if attr is None else attr.value

    def add_child(self, child: "UsdaPrim") -> "UsdaPrim":
        if any(c.name == child.name for c in self.children):
            raise SceneBridgeError(
                f"prim {self.path!r} already has a child named {child.name!r}"
            )
        self.children.append(child)
        child._reroot(self.path)
        return child

    def _reroot(self, parent_path: str):
        self.path = parent_path + "/" + self.name
        for child in self.children:
            child._reroot(self.path)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def find(self, path: str) -> "UsdaPrim | None":
        for prim in self.walk():
            if prim.path == path:
                return prim
        return None

    def __repr__(self):
        return f"UsdaPrim({self.specifier} {self.type_name or ''} {self.path!r})"


class UsdaStage:
    """Layer metadata, sublayer references, and root prims."""

    def __init__(self):
        self.metadata: dict[str, object] = {}
        self.sublayers: list[str] = []
        self.prims: list[UsdaPrim] = []

    def add_prim(self, prim: UsdaPrim) -> UsdaPrim:
        if any(p.name == prim.name for p in self.prims):
            raise SceneBridgeError(f"stage already has a root prim named {prim.name!r}")
        self.prims.append(prim)
        prim._reroot("")
        return prim

    def default_prim(self) -> UsdaPrim | None:
        name = self.metadata.get("defaultPrim")
        for prim in self.prims:
            if name is None or prim.name == name:
                return prim
        return None

    def find(self, path: str) -> UsdaPrim | None:
        for root in self.prims:
            hit = root.find(path)
            if hit is not None:
                return hit
        return None

    def walk(self):
        for root in self.prims:
            yield from root.walk()

    def __repr__(self):
        return f"UsdaStage({len(self.prims)} roots, {sum(1 for _ in self.walk())} prims)"
