"""Scene-description toolchain: robot scene formats in and out of a unified
scene graph stored as text USD, with dynamics refinement, semantic tagging,
and a queryable knowledge graph on top."""

__version__ = "0.1.0"

from .errors import (
    MeshError,
    OntologyError,
    PropertyKindError,
    QueryError,
    SceneBridgeError,
    SceneExportError,
    SceneImportError,
    UsdaSyntaxError,
)
from .math3d import Pose
from .core.model import (
    InertialProperties,
    MeshData,
    SceneBody,
    SceneGeometry,
    SceneJoint,
    SceneWorld,
)
from .core.properties import FileReference, PropertyKind, PropertySet
from .core.validation import ValidationReport, kinematic_classification, validate_world

__all__ = [
    "FileReference",
    "InertialProperties",
    "MeshData",
    "MeshError",
    "OntologyError",
    "Pose",
    "PropertyKind",
    "PropertyKindError",
    "PropertySet",
    "QueryError",
    "SceneBody",
    "SceneBridgeError",
    "SceneExportError",
    "SceneGeometry",
    "SceneImportError",
    "SceneJoint",
    "SceneWorld",
    "UsdaSyntaxError",
    "ValidationReport",
    "__version__",
    "kinematic_classification",
    "validate_world",
]
