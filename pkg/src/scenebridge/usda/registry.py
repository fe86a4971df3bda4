"""Schema registry: typed prim schemas and applied API schemas.

Typed schemas name the prim types the bridge understands; API schemas declare
namespaced attribute families (semantic tags, per-format provenance).  The
declarations drive two things: which attributes are structural rather than
pass-through, and how declared attributes map between text types and property
kinds.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..core.properties import PropertyKind
from ..errors import SceneBridgeError


@dataclass(frozen=True)
class AttrDecl:
    """Declared attribute: its text type token and property kind."""

    type_token: str
    kind: PropertyKind
    default: object = None


@dataclass
class ApiSchema:
    """An applied schema contributing attributes under one namespace prefix."""

    name: str
    prefix: str
    attrs: dict[str, AttrDecl] = field(default_factory=dict)
    #: Open schemas accept any attribute under their prefix (provenance).
    open_namespace: bool = False


JOINT_TYPE_TO_PRIM = {
    "fixed": "PhysicsFixedJoint",
    "revolute": "PhysicsRevoluteJoint",
    "prismatic": "PhysicsPrismaticJoint",
    "spherical": "PhysicsSphericalJoint",
}
PRIM_TO_JOINT_TYPE = {v: k for k, v in JOINT_TYPE_TO_PRIM.items()}

GEOM_TYPE_TO_PRIM = {
    "cube": "Cube",
    "sphere": "Sphere",
    "cylinder": "Cylinder",
    "mesh": "Mesh",
}
PRIM_TO_GEOM_TYPE = {v: k for k, v in GEOM_TYPE_TO_PRIM.items()}

#: Prim type for the file-path table kept under the root prim.
FILE_REFERENCES_PRIM = "FileReferences"

#: Attribute namespaces owned by typed-prim conventions rather than an
#: applied API schema.
STRUCTURAL_PREFIXES = ("xformOp", "physics", "primvars", "fileRef", "material")


class SchemaRegistry:
    def __init__(self):
        self.typed_schemas: dict[str, dict[str, AttrDecl]] = {
            "Xform": {},
            "Scope": {},
            FILE_REFERENCES_PRIM: {},
            "Cube": {"halfExtents": AttrDecl("double3", PropertyKind.VEC3)},
            "Sphere": {"radius": AttrDecl("double", PropertyKind.REAL)},
            "Cylinder": {
                "radius": AttrDecl("double", PropertyKind.REAL),
                "height": AttrDecl("double", PropertyKind.REAL),
            },
            "Mesh": {},
        }
        for prim_name in JOINT_TYPE_TO_PRIM.values():
            self.typed_schemas[prim_name] = {}
        self.api_schemas: dict[str, ApiSchema] = {}
        self._by_prefix: dict[str, ApiSchema] = {}

        self.register_api_schema(
            ApiSchema(
                "SemanticTagAPI",
                "semanticTag",
                {
                    "semanticTag:semanticLabels": AttrDecl("string[]", PropertyKind.TRIPLES),
                    "semanticTag:semanticReports": AttrDecl("string", PropertyKind.STRING),
                },
            )
        )
        # Marker schemas with no namespaced attributes of their own; the
        # physics: namespace is structural.
        self.register_api_schema(ApiSchema("PhysicsMassAPI", "physics"))
        self.register_api_schema(ApiSchema("PhysicsCollisionAPI", "physics"))
        # Provenance namespaces are open: importers stash arbitrary
        # format-native values under them.
        self.register_api_schema(ApiSchema("UrdfAPI", "urdf", open_namespace=True))
        self.register_api_schema(ApiSchema("MjcfAPI", "mjcf", open_namespace=True))
        self.register_api_schema(ApiSchema("SdformatAPI", "sdf", open_namespace=True))
        self.register_api_schema(ApiSchema("ProcthorAPI", "procthor", open_namespace=True))
        self.register_api_schema(ApiSchema("SourceAPI", "source", open_namespace=True))

    def register_api_schema(self, schema: ApiSchema):
        if schema.name in self.api_schemas:
            raise SceneBridgeError(f"API schema {schema.name!r} already registered")
        self.api_schemas[schema.name] = schema
        self._by_prefix.setdefault(schema.prefix, schema)

    def register_typed_schema(self, name: str, attrs: dict[str, AttrDecl] | None = None):
        if name in self.typed_schemas:
            raise SceneBridgeError(f"typed schema {name!r} already registered")
        self.typed_schemas[name] = attrs or {}

    def schema_for_prefix(self, prefix: str) -> ApiSchema | None:
        return self._by_prefix.get(prefix)

    def schema_for_attr(self, name: str) -> ApiSchema | None:
        """The API schema owning a namespaced attribute, if any."""
        if ":" not in name:
            return None
        prefix = name.split(":", 1)[0]
        schema = self._by_prefix.get(prefix)
        if schema is None:
            return None
        if schema.open_namespace or name in schema.attrs:
            return schema
        return None

    def declared(self, name: str) -> AttrDecl | None:
        schema = self.schema_for_attr(name)
        if schema is None:
            return None
        return schema.attrs.get(name)


def default_registry() -> SchemaRegistry:
    return SchemaRegistry()
