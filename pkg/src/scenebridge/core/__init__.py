from .properties import FileReference, PropertyKind, PropertyRegistry, PropertySet
from .model import (
    InertialProperties,
    MeshData,
    SceneBody,
    SceneGeometry,
    SceneJoint,
    SceneWorld,
    WORLD_BODY_NAME,
)
from .validation import ValidationIssue, ValidationReport, kinematic_classification, validate_world

__all__ = [
    "FileReference",
    "PropertyKind",
    "PropertyRegistry",
    "PropertySet",
    "InertialProperties",
    "MeshData",
    "SceneBody",
    "SceneGeometry",
    "SceneJoint",
    "SceneWorld",
    "WORLD_BODY_NAME",
    "ValidationIssue",
    "ValidationReport",
    "kinematic_classification",
    "validate_world",
]
