"""Importers and exporters for robot/scene description formats.

Four importers (URDF, MJCF, SDF, ProcTHOR JSON) produce a SceneWorld; two
exporters (URDF, MJCF) write one back out.  Anything a source document says
that the scene model has no slot for travels along as provenance properties
and is restored character for character when exporting to the same format.
"""
from .mjcf import export_mjcf, import_mjcf
from .options import (
    STRIP_ELEMENTS,
    ExportOptions,
    FormatProvenance,
    ImportOptions,
    collect_provenance,
)
from .procthor import import_procthor
from .sdformat import import_sdf
from .strip import strip_elements
from .urdf import export_urdf, import_urdf

__all__ = [
    "ExportOptions",
    "FormatProvenance",
    "ImportOptions",
    "STRIP_ELEMENTS",
    "collect_provenance",
    "export_mjcf",
    "export_urdf",
    "import_mjcf",
    "import_procthor",
    "import_sdf",
    "import_urdf",
    "strip_elements",
]
