"""Shared importer/exporter options and source-format provenance.

Anything a source document says that has no slot in the scene model is kept
as a property on the element it was found on, named

    <format>:<element path>:<attribute>

with the raw string value, e.g. ``urdf:dynamics:damping = "0.7"``.  The path
part is the dot-joined element chain below the element that produced the
body/joint/geometry and is empty for attributes on that element itself.
Exporters put these back character for character.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..core.model import SceneWorld
from ..core.properties import PropertyKind, PropertySet
from ..errors import SceneExportError

SOURCE_FORMATS = ("urdf", "mjcf", "sdf", "procthor")

STRIP_ELEMENTS = (
    "visual_meshes",
    "materials",
    "textures",
    "non_collidable_geometry",
    "physics_properties",
)

LOOP_STRATEGIES = ("weld", "connect", "fail")


@dataclass
class ImportOptions:
    """Controls shared by all importers.

    fix_missing_inertials runs dynamics refinement after import, which needs
    mesh data: set mesh_root so file references resolve.  default_density is
    the kg/m^3 used for bodies whose mass must be estimated.  tessellation
    sets the segment count of generated emulation meshes (capsules).
    """

    fix_missing_inertials: bool = False
    default_density: float = 1000.0
    mesh_root: str | Path | None = None
    tessellation: int = 24

    def __post_init__(self):
        if self.default_density <= 0:
            raise ValueError("default_density must be positive")


@dataclass
class ExportOptions:
    """Controls shared by the URDF and MJCF exporters.

    loop_strategy picks the replacement for loop-closing joints in targets
    without native loop support; None applies a per-joint-type default
    (fixed loop joints weld, everything else connects), "fail" refuses.
    """

    target: str = "urdf"
    strip: frozenset = frozenset()
    loop_strategy: str | None = None
    mesh_root: str | Path | None = None

    def __post_init__(self):
        if self.target not in ("urdf", "mjcf"):
            raise ValueError(f"unknown export target {self.target!r}")
        self.strip = frozenset(self.strip)
        unknown = self.strip - set(STRIP_ELEMENTS)
        if unknown:
            raise ValueError(f"unknown strip elements: {sorted(unknown)}")
        if self.loop_strategy is not None and self.loop_strategy not in LOOP_STRATEGIES:
            raise ValueError(f"unknown loop strategy {self.loop_strategy!r}")


@dataclass
class FormatProvenance:
    """Unmapped source attributes collected from a world, for inspection."""

    source_format: str
    unmapped_attributes: list = field(default_factory=list)  # (element path, attr, raw value)


def provenance_key(fmt: str, path: str, attribute: str) -> str:
    return f"{fmt}:{path}:{attribute}"


def record_unmapped(properties: PropertySet, fmt: str, path: str, attribute: str, value: str):
    properties.set(provenance_key(fmt, path, attribute), str(value), PropertyKind.STRING)


def unmapped_entries(properties: PropertySet, fmt: str):
    """Yield (element path, attribute, raw value) stored under ``fmt``."""
    prefix = fmt + ":"
    for name, kind, value in properties.items():
        if not name.startswith(prefix) or kind is not PropertyKind.STRING:
            continue
        rest = name[len(prefix):]
        if ":" not in rest:
            continue  # source:assetId-style single fields are not attribute records
        path, _, attribute = rest.rpartition(":")
        yield path, attribute, value


def collect_provenance(world: SceneWorld, fmt: str) -> FormatProvenance:
    """Assemble the provenance report for one source format."""
    if fmt not in SOURCE_FORMATS:
        raise SceneExportError(f"unknown source format {fmt!r}")
    out = FormatProvenance(fmt)

    def scan(owner: str, properties: PropertySet):
        for path, attribute, value in unmapped_entries(properties, fmt):
            element = f"{owner}/{path}" if path else owner
            out.unmapped_attributes.append((element, attribute, value))

    scan("world", world.world_properties)
    for body in world.iter_bodies():
        scan(body.name, body.properties)
        for geom in body.geometries:
            scan(geom.name, geom.properties)
        for joint in body.joints:
            scan(joint.name, joint.properties)
    return out
