"""Scene graph <-> stage conversion.

The emitted layout is fixed: one root Xform holding body prims, geometry and
joint prims under their bodies, and an optional FileReferences table prim for
external asset paths.  Joint prims live under the parent body's prim (under
the root when the parent is the world anchor); on parse the joint is owned by
that parent, or by the child body for world-anchored joints.

Inertia tensors are stored in principal-axes form: eigenvalues ascending in
``physics:diagonalInertia`` plus a ``physics:principalAxes`` rotation.  Parse
recomposes R diag(d) R^T, so the tensor survives a cycle to within
eigensolver accuracy rather than bit-exactly.
"""
from __future__ import annotations

import json

import numpy as np

from ..core.model import (
    WORLD_BODY_NAME,
    InertialProperties,
    MeshData,
    SceneBody,
    SceneGeometry,
    SceneJoint,
    SceneWorld,
)
from ..core.properties import FileReference, PropertyKind, PropertySet
from ..errors import SceneExportError, SceneImportError
from ..math3d import Pose, quat_from_matrix, quat_to_matrix
from .model import UsdaAttr, UsdaPath, UsdaPrim, UsdaStage
from .names import NameSanitizer
from .reader import read_usda
from .registry import (
    FILE_REFERENCES_PRIM,
    GEOM_TYPE_TO_PRIM,
    JOINT_TYPE_TO_PRIM,
    PRIM_TO_GEOM_TYPE,
    PRIM_TO_JOINT_TYPE,
    STRUCTURAL_PREFIXES,
    SchemaRegistry,
    default_registry,
)
from .writer import write_usda

ROOT_PRIM_NAME = "World"

_KIND_TO_TYPE = {
    PropertyKind.BOOLEAN: "bool",
    PropertyKind.INTEGER: "int",
    PropertyKind.REAL: "double",
    PropertyKind.STRING: "string",
    PropertyKind.VEC3: "double3",
    PropertyKind.QUATERNION: "quatd",
}

_TYPE_TO_KIND = {
    "bool": PropertyKind.BOOLEAN,
    "int": PropertyKind.INTEGER,
    "double": PropertyKind.REAL,
    "float": PropertyKind.REAL,
    "string": PropertyKind.STRING,
    "token": PropertyKind.STRING,
    "double3": PropertyKind.VEC3,
    "float3": PropertyKind.VEC3,
    "point3f": PropertyKind.VEC3,
    "normal3f": PropertyKind.VEC3,
    "color3f": PropertyKind.VEC3,
    "quatd": PropertyKind.QUATERNION,
    "quatf": PropertyKind.QUATERNION,
    "matrix2d": PropertyKind.MATRIX,
    "matrix3d": PropertyKind.MATRIX,
    "matrix4d": PropertyKind.MATRIX,
    "asset": PropertyKind.REFERENCE,
}

_TRIPLE_KIND_VALUES = {k.value for k in PropertyKind if k is not PropertyKind.TRIPLES}


def _is_structural(name: str) -> bool:
    if name in ("xformOpOrder", "visibility"):
        return True
    return name.split(":", 1)[0] in STRUCTURAL_PREFIXES


# -- triples encoding ---------------------------------------------------------


def _triples_to_strings(entries) -> list[str]:
    """Encode triples as string rows: bare strings when every entry is a
    plain ("item", string) one, JSON [name, kind, value] rows otherwise."""
    bare = all(
        name == "item"
        and kind is PropertyKind.STRING
        and isinstance(value, str)
        and not value.startswith("[")
        for name, kind, value in entries
    )
    if bare:
        return [value for _, _, value in entries]
    rows = []
    for name, kind, value in entries:
        rows.append(json.dumps([name, kind.value, _triple_value_to_json(kind, value)]))
    return rows


def _triple_value_to_json(kind: PropertyKind, value):
    if kind in (PropertyKind.VEC3, PropertyKind.QUATERNION):
        return [float(v) for v in value]
    if kind is PropertyKind.MATRIX:
        return [[float(v) for v in row] for row in np.asarray(value)]
    if kind is PropertyKind.REFERENCE:
        return value.path
    return value


def _strings_to_triples(strings) -> list[tuple]:
    decoded = []
    for s in strings:
        try:
            row = json.loads(s)
        except json.JSONDecodeError:
            row = None
        if (
            not isinstance(row, list)
            or len(row) != 3
            or not isinstance(row[0], str)
            or row[1] not in _TRIPLE_KIND_VALUES
        ):
            # Not the JSON encoding; the whole array is bare label strings.
            return [("item", PropertyKind.STRING, str(v)) for v in strings]
        decoded.append(row)
    entries = []
    for name, kind_value, value in decoded:
        kind = PropertyKind(kind_value)
        if kind is PropertyKind.REFERENCE:
            value = FileReference(str(value))
        entries.append((name, kind, value))
    return entries


# -- file reference table -----------------------------------------------------


class _FileTable:
    """Deduplicated external paths, indexed file_0.. in first-seen order."""

    def __init__(self):
        self.keys: dict[str, str] = {}
        self.refs: list[FileReference] = []

    def add(self, ref: FileReference) -> str:
        key = self.keys.get(ref.path)
        if key is None:
            key = f"file_{len(self.refs)}"
            self.keys[ref.path] = key
            self.refs.append(ref)
        return key

    def target(self, ref: FileReference) -> UsdaPath:
        return UsdaPath(f"/{ROOT_PRIM_NAME}/{FILE_REFERENCES_PRIM}.{self.add(ref)}")

    def __len__(self):
        return len(self.refs)


def _collect_refs_from_properties(table: _FileTable, properties: PropertySet):
    for name in sorted(properties.names()):
        kind = properties.kind(name)
        if kind is PropertyKind.REFERENCE:
            table.add(properties.get(name))


def _collect_file_references(world: SceneWorld) -> _FileTable:
    table = _FileTable()
    _collect_refs_from_properties(table, world.world_properties)
    for body in world.iter_bodies():
        _collect_refs_from_properties(table, body.properties)
        for geom in body.geometries:
            if geom.mesh_file is not None:
                table.add(geom.mesh_file)
            _collect_refs_from_properties(table, geom.properties)
    for joint in world.iter_joints():
        _collect_refs_from_properties(table, joint.properties)
    return table


# -- world -> stage -----------------------------------------------------------


def _add_schema(prim: UsdaPrim, schema_name: str):
    if schema_name not in prim.api_schemas:
        prim.api_schemas.append(schema_name)


def _attach_properties(
    prim: UsdaPrim,
    properties: PropertySet,
    registry: SchemaRegistry,
    table: _FileTable,
    skip: tuple[str, ...] = (),
):
    for name, kind, value in properties.items():
        if name in skip:
            continue
        schema = registry.schema_for_attr(name)
        decl = registry.declared(name)
        if decl is not None and decl.kind is not kind:
            raise SceneExportError(
                f"property {name!r} has kind {kind.value}, schema declares {decl.kind.value}"
            )
        custom = schema is None
        if schema is not None:
            _add_schema(prim, schema.name)
        if kind is PropertyKind.REFERENCE:
            prim.set(name, "rel", table.target(value), custom=custom)
        elif kind is PropertyKind.TRIPLES:
            prim.set(name, "string[]", _triples_to_strings(value), custom=custom)
        elif kind is PropertyKind.MATRIX:
            arr = np.asarray(value, dtype=float)
            if arr.shape in ((2, 2), (3, 3), (4, 4)):
                prim.set(name, f"matrix{arr.shape[0]}d", arr, custom=custom)
            elif arr.ndim == 2 and arr.shape[0] == 1:
                prim.set(name, "double[]", arr[0], custom=custom)
            else:
                raise SceneExportError(
                    f"property {name!r}: matrix shape {arr.shape} has no text form"
                )
        else:
            prim.set(name, _KIND_TO_TYPE[kind], value, custom=custom)


def _principal_frame(inertia: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues ascending plus the rotation into the principal frame,
    sign-canonicalized so emission is deterministic."""
    sym = 0.5 * (inertia + inertia.T)
    eigvals, eigvecs = np.linalg.eigh(sym)
    if np.linalg.det(eigvecs) < 0:
        eigvecs = eigvecs.copy()
        eigvecs[:, 2] = -eigvecs[:, 2]
    quat = quat_from_matrix(eigvecs)
    for component in quat:
        if component > 0:
            break
        if component < 0:
            quat = -quat
            break
    return eigvals, quat


def _attach_inertial(prim: UsdaPrim, inertial: InertialProperties):
    diag, quat = _principal_frame(inertial.inertia)
    _add_schema(prim, "PhysicsMassAPI")
    prim.set("physics:mass", "double", inertial.mass)
    prim.set("physics:centerOfMass", "double3", inertial.center_of_mass)
    prim.set("physics:diagonalInertia", "double3", diag)
    prim.set("physics:principalAxes", "quatd", quat)


def _attach_xform(prim: UsdaPrim, pose: Pose, scale=None):
    prim.set("xformOp:translate", "double3", pose.translation)
    prim.set("xformOp:orient", "quatd", pose.rotation)
    order = ["xformOp:translate", "xformOp:orient"]
    if scale is not None and not np.array_equal(scale, np.ones(3)):
        prim.set("xformOp:scale", "double3", scale)
        order.append("xformOp:scale")
    prim.set("xformOpOrder", "token[]", order, uniform=True)


def _geometry_prim(
    geom: SceneGeometry,
    names: NameSanitizer,
    registry: SchemaRegistry,
    table: _FileTable,
) -> UsdaPrim:
    prim = UsdaPrim(names.sanitize(geom.name), GEOM_TYPE_TO_PRIM[geom.geom_type])
    _attach_xform(prim, geom.pose, geom.scale)
    if geom.geom_type == "cube":
        if geom.half_extents is None:
            raise SceneExportError(f"cube geometry {geom.name!r} has no half extents")
        prim.set("halfExtents", "double3", geom.half_extents)
    elif geom.geom_type == "sphere":
        if geom.radius is None:
            raise SceneExportError(f"sphere geometry {geom.name!r} has no radius")
        prim.set("radius", "double", geom.radius)
    elif geom.geom_type == "cylinder":
        if geom.radius is None or geom.half_length is None:
            raise SceneExportError(f"cylinder geometry {geom.name!r} needs radius and length")
        prim.set("radius", "double", geom.radius)
        prim.set("height", "double", 2.0 * geom.half_length)
        prim.set("axis", "token", "Z", uniform=True)
    else:
        if geom.mesh_file is not None:
            prim.set("fileRef:mesh", "rel", table.target(geom.mesh_file))
        if geom.mesh_data is not None:
            mesh = geom.mesh_data
            prim.set("points", "double3[]", mesh.vertices)
            prim.set("faceVertexIndices", "int[]", mesh.triangles.reshape(-1))
            prim.set("faceVertexCounts", "int[]", np.full(len(mesh.triangles), 3))
    if not geom.visible:
        prim.set("visibility", "token", "invisible")
    if geom.collidable:
        _add_schema(prim, "PhysicsCollisionAPI")
    if geom.rgba is not None:
        prim.set("primvars:displayColor", "color3f[]", geom.rgba[None, :3])
        prim.set("primvars:displayOpacity", "float[]", geom.rgba[3:4])
    if geom.material:
        materials = [geom.material] if isinstance(geom.material, str) else list(geom.material)
        prim.set("material:source", "string[]", materials)
    _attach_properties(prim, geom.properties, registry, table)
    return prim


def _body_prim(
    body: SceneBody,
    names: NameSanitizer,
    registry: SchemaRegistry,
    table: _FileTable,
    body_prims: dict[str, UsdaPrim],
) -> UsdaPrim:
    type_name = body.properties.get("source:primType", "Xform")
    prim = UsdaPrim(names.sanitize(body.name), type_name)
    body_prims[body.name] = prim
    _attach_xform(prim, body.pose)
    if body.inertial is not None:
        _attach_inertial(prim, body.inertial)
    _attach_properties(prim, body.properties, registry, table, skip=("source:primType",))
    for child in body.children:
        prim.add_child(_body_prim(child, names, registry, table, body_prims))
    for geom in body.geometries:
        prim.add_child(_geometry_prim(geom, names, registry, table))
    return prim


def _joint_prim(
    joint: SceneJoint,
    names: NameSanitizer,
    registry: SchemaRegistry,
    table: _FileTable,
    body_prims: dict[str, UsdaPrim],
) -> UsdaPrim:
    prim = UsdaPrim(names.sanitize(joint.name), JOINT_TYPE_TO_PRIM[joint.joint_type])
    for side, body_name in (("physics:body0", joint.parent_body), ("physics:body1", joint.child_body)):
        if body_name == WORLD_BODY_NAME:
            continue
        anchor = body_prims.get(body_name)
        if anchor is None:
            raise SceneExportError(f"joint {joint.name!r} references unknown body {body_name!r}")
        prim.set(side, "rel", UsdaPath(anchor.path))
    if joint.axis is not None:
        prim.set("physics:axis", "double3", joint.axis)
    if joint.limit_lower is not None:
        prim.set("physics:lowerLimit", "double", joint.limit_lower)
    if joint.limit_upper is not None:
        prim.set("physics:upperLimit", "double", joint.limit_upper)
    if not joint.offset.is_identity():
        prim.set("physics:localPos1", "double3", joint.offset.translation)
        prim.set("physics:localRot1", "quatd", joint.offset.rotation)
    _attach_properties(prim, joint.properties, registry, table)
    return prim


def world_to_stage(world: SceneWorld, registry: SchemaRegistry | None = None) -> UsdaStage:
    registry = registry or default_registry()
    table = _collect_file_references(world)
    names = NameSanitizer()
    names.reserve(ROOT_PRIM_NAME)
    names.reserve(FILE_REFERENCES_PRIM)

    stage = UsdaStage()
    stage.metadata["defaultPrim"] = ROOT_PRIM_NAME
    stage.metadata["metersPerUnit"] = 1
    stage.metadata["upAxis"] = "Z"

    root = UsdaPrim(ROOT_PRIM_NAME, "Xform")
    stage.add_prim(root)
    _attach_properties(root, world.world_properties, registry, table)

    body_prims: dict[str, UsdaPrim] = {}
    for body in world.root_bodies:
        root.add_child(_body_prim(body, names, registry, table, body_prims))

    if len(table):
        refs = UsdaPrim(FILE_REFERENCES_PRIM, FILE_REFERENCES_PRIM)
        for k, ref in enumerate(table.refs):
            refs.set(f"file_{k}", "asset", ref)
        root.add_child(refs)

    for joint in world.iter_joints():
        prim = _joint_prim(joint, names, registry, table, body_prims)
        if joint.parent_body == WORLD_BODY_NAME:
            root.add_child(prim)
        else:
            body_prims[joint.parent_body].add_child(prim)
    return stage


# -- stage -> world -----------------------------------------------------------


class _RefResolver:
    """Resolves relationship targets against the file table prim."""

    def __init__(self, root: UsdaPrim):
        self.table_path = None
        self.entries: dict[str, FileReference] = {}
        for child in root.children:
            if child.type_name == FILE_REFERENCES_PRIM:
                self.table_path = child.path
                for attr_name, attr in child.attributes.items():
                    if attr.type_token == "asset" and isinstance(attr.value, FileReference):
                        self.entries[attr_name] = attr.value
                break

    def resolve(self, target: UsdaPath) -> FileReference:
        key = target.property_name
        if (
            key is None
            or target.prim_path != self.table_path
            or key not in self.entries
        ):
            raise SceneImportError(f"unresolved file reference <{target}>")
        return self.entries[key]


def _pop_pose(attrs: dict[str, UsdaAttr]) -> Pose:
    translate = attrs.pop("xformOp:translate", None)
    orient = attrs.pop("xformOp:orient", None)
    attrs.pop("xformOpOrder", None)
    return Pose(
        translate.value if translate is not None else np.zeros(3),
        orient.value if orient is not None else np.array([1.0, 0.0, 0.0, 0.0]),
    )


def _pop_inertial(attrs: dict[str, UsdaAttr]) -> InertialProperties | None:
    mass = attrs.pop("physics:mass", None)
    com = attrs.pop("physics:centerOfMass", None)
    diag = attrs.pop("physics:diagonalInertia", None)
    axes = attrs.pop("physics:principalAxes", None)
    if mass is None:
        return None
    rotation = quat_to_matrix(axes.value) if axes is not None else np.eye(3)
    diagonal = diag.value if diag is not None else np.zeros(3)
    inertia = rotation @ np.diag(diagonal) @ rotation.T
    return InertialProperties(
        mass.value,
        com.value if com is not None else np.zeros(3),
        inertia,
    )


def _parse_properties(
    attrs: dict[str, UsdaAttr],
    registry: SchemaRegistry,
    refs: _RefResolver,
    properties: PropertySet,
    context: str,
):
    for name in sorted(attrs):
        attr = attrs[name]
        if _is_structural(name):
            continue
        decl = registry.declared(name)
        kind = decl.kind if decl is not None else None
        if attr.type_token == "rel":
            if not isinstance(attr.value, UsdaPath):
                raise SceneImportError(
                    f"{context}: relationship {name!r} must have a single target"
                )
            properties.set(name, refs.resolve(attr.value), PropertyKind.REFERENCE)
            continue
        if kind is None:
            if attr.type_token in ("string[]", "token[]"):
                kind = PropertyKind.TRIPLES
            elif attr.type_token in ("double[]", "float[]", "int[]"):
                kind = PropertyKind.MATRIX
            else:
                kind = _TYPE_TO_KIND.get(attr.type_token)
            if kind is None:
                raise SceneImportError(
                    f"{context}: attribute {name!r} of type {attr.type_token!r} "
                    "has no property mapping"
                )
        value = attr.value
        if kind is PropertyKind.TRIPLES:
            value = _strings_to_triples(list(value))
        elif kind is PropertyKind.MATRIX and np.asarray(value).ndim == 1:
            value = np.asarray(value, dtype=float)[None, :]
        elif kind is PropertyKind.STRING:
            value = str(value)
        properties.set(name, value, kind)


def _parse_geometry(
    prim: UsdaPrim,
    registry: SchemaRegistry,
    refs: _RefResolver,
    world: SceneWorld,
    owner: SceneBody,
):
    if prim.children:
        raise SceneImportError(f"geometry prim {prim.path!r} cannot have children")
    attrs = dict(prim.attributes)
    pose = _pop_pose(attrs)
    scale_attr = attrs.pop("xformOp:scale", None)
    scale = scale_attr.value if scale_attr is not None else None
    visibility = attrs.pop("visibility", None)
    visible = visibility is None or visibility.value != "invisible"
    collidable = "PhysicsCollisionAPI" in prim.api_schemas

    rgba = None
    color = attrs.pop("primvars:displayColor", None)
    opacity = attrs.pop("primvars:displayOpacity", None)
    if color is not None and len(color.value):
        alpha = opacity.value[0] if opacity is not None and len(opacity.value) else 1.0
        rgba = np.array([*color.value[0], alpha])

    material = None
    material_attr = attrs.pop("material:source", None)
    if material_attr is not None:
        material = [str(m) for m in material_attr.value]

    geom_type = PRIM_TO_GEOM_TYPE[prim.type_name]
    kwargs = {}
    if geom_type == "cube":
        half = attrs.pop("halfExtents", None)
        size = attrs.pop("size", None)
        if half is not None:
            kwargs["half_extents"] = half.value
        elif size is not None:
            kwargs["half_extents"] = np.full(3, float(size.value) / 2.0)
        else:
            kwargs["half_extents"] = np.ones(3)
    elif geom_type == "sphere":
        radius = attrs.pop("radius", None)
        kwargs["radius"] = radius.value if radius is not None else 1.0
    elif geom_type == "cylinder":
        radius = attrs.pop("radius", None)
        height = attrs.pop("height", None)
        axis = attrs.pop("axis", None)
        if axis is not None and axis.value != "Z":
            raise SceneImportError(
                f"cylinder prim {prim.path!r}: only Z-axis cylinders are supported"
            )
        kwargs["radius"] = radius.value if radius is not None else 1.0
        kwargs["half_length"] = (height.value if height is not None else 2.0) / 2.0
    else:
        mesh_rel = attrs.pop("fileRef:mesh", None)
        if mesh_rel is not None:
            if not isinstance(mesh_rel.value, UsdaPath):
                raise SceneImportError(f"mesh prim {prim.path!r}: bad fileRef:mesh target")
            kwargs["mesh_file"] = refs.resolve(mesh_rel.value)
        points = attrs.pop("points", None)
        indices = attrs.pop("faceVertexIndices", None)
        counts = attrs.pop("faceVertexCounts", None)
        if points is not None and indices is not None:
            if counts is not None and np.any(counts.value != 3):
                raise SceneImportError(
                    f"mesh prim {prim.path!r}: only triangle meshes are supported"
                )
            flat = np.asarray(indices.value)
            if flat.size % 3 != 0:
                raise SceneImportError(
                    f"mesh prim {prim.path!r}: face index count is not a multiple of 3"
                )
            kwargs["mesh_data"] = MeshData(points.value, flat.reshape(-1, 3))

    geom = SceneGeometry(
        world.unique_name(prim.name),
        geom_type,
        pose=pose,
        visible=visible,
        collidable=collidable,
        rgba=rgba,
        scale=scale,
        material=material,
        **kwargs,
    )
    _parse_properties(attrs, registry, refs, geom.properties, f"geometry {prim.path!r}")
    world.add_geometry(geom, owner)


def _parse_body(
    prim: UsdaPrim,
    registry: SchemaRegistry,
    refs: _RefResolver,
    world: SceneWorld,
    parent: SceneBody | None,
    path_to_body: dict[str, SceneBody],
    joint_prims: list[UsdaPrim],
):
    attrs = dict(prim.attributes)
    body = SceneBody(world.unique_name(prim.name), _pop_pose(attrs), _pop_inertial(attrs))
    if prim.type_name is not None and prim.type_name != "Xform":
        body.properties.set("source:primType", prim.type_name, PropertyKind.STRING)
    _parse_properties(attrs, registry, refs, body.properties, f"body {prim.path!r}")
    world.add_body(body, parent)
    path_to_body[prim.path] = body
    for child in prim.children:
        _dispatch_prim(child, registry, refs, world, body, path_to_body, joint_prims)


def _dispatch_prim(
    prim: UsdaPrim,
    registry: SchemaRegistry,
    refs: _RefResolver,
    world: SceneWorld,
    parent: SceneBody | None,
    path_to_body: dict[str, SceneBody],
    joint_prims: list[UsdaPrim],
):
    if prim.specifier != "def":
        raise SceneImportError(f"cannot build a scene from override prim {prim.path!r}")
    if prim.type_name in PRIM_TO_JOINT_TYPE:
        joint_prims.append(prim)
        if prim.children:
            raise SceneImportError(f"joint prim {prim.path!r} cannot have children")
        return
    if prim.type_name in PRIM_TO_GEOM_TYPE:
        if parent is None:
            raise SceneImportError(f"geometry prim {prim.path!r} needs an enclosing body")
        _parse_geometry(prim, registry, refs, world, parent)
        return
    if prim.type_name == FILE_REFERENCES_PRIM:
        if parent is not None:
            raise SceneImportError(
                f"file table prim {prim.path!r} must sit directly under the root"
            )
        return
    _parse_body(prim, registry, refs, world, parent, path_to_body, joint_prims)


def _parse_joint(
    prim: UsdaPrim,
    registry: SchemaRegistry,
    refs: _RefResolver,
    world: SceneWorld,
    path_to_body: dict[str, SceneBody],
):
    attrs = dict(prim.attributes)

    def body_ref(attr_name: str) -> str:
        attr = attrs.pop(attr_name, None)
        if attr is None:
            return WORLD_BODY_NAME
        if not isinstance(attr.value, UsdaPath):
            raise SceneImportError(f"joint {prim.path!r}: {attr_name} must have one target")
        body = path_to_body.get(attr.value.prim_path)
        if body is None:
            raise SceneImportError(
                f"joint {prim.path!r}: {attr_name} targets unknown prim <{attr.value}>"
            )
        return body.name

    parent_name = body_ref("physics:body0")
    child_name = body_ref("physics:body1")
    if child_name == WORLD_BODY_NAME and parent_name == WORLD_BODY_NAME:
        raise SceneImportError(f"joint {prim.path!r} attaches to no body")

    axis = attrs.pop("physics:axis", None)
    lower = attrs.pop("physics:lowerLimit", None)
    upper = attrs.pop("physics:upperLimit", None)
    local_pos = attrs.pop("physics:localPos1", None)
    local_rot = attrs.pop("physics:localRot1", None)
    offset = Pose(
        local_pos.value if local_pos is not None else np.zeros(3),
        local_rot.value if local_rot is not None else np.array([1.0, 0.0, 0.0, 0.0]),
    )

    joint = SceneJoint(
        world.unique_name(prim.name),
        PRIM_TO_JOINT_TYPE[prim.type_name],
        parent_body=parent_name,
        child_body=child_name,
        axis=axis.value if axis is not None else None,
        limit_lower=lower.value if lower is not None else None,
        limit_upper=upper.value if upper is not None else None,
        offset=offset,
    )
    _parse_properties(attrs, registry, refs, joint.properties, f"joint {prim.path!r}")
    owner_name = parent_name if parent_name != WORLD_BODY_NAME else child_name
    owner = world.find_by_name(owner_name)
    world.add_joint(joint, owner)


def _check_stage_metadata(stage: UsdaStage):
    up_axis = stage.metadata.get("upAxis", "Z")
    if up_axis != "Z":
        raise SceneImportError(f"unsupported up axis {up_axis!r}; scenes are Z-up")
    scale = stage.metadata.get("metersPerUnit", 1)
    if scale not in (1, 1.0):
        raise SceneImportError(f"unsupported metersPerUnit {scale!r}; scenes are in meters")
    if len(stage.prims) != 1:
        raise SceneImportError(f"expected one root prim, found {len(stage.prims)}")
    declared_default = stage.metadata.get("defaultPrim")
    if declared_default is not None and declared_default != stage.prims[0].name:
        raise SceneImportError(
            f"defaultPrim {declared_default!r} does not name the root prim"
        )


def stage_to_world(stage: UsdaStage, registry: SchemaRegistry | None = None) -> SceneWorld:
    registry = registry or default_registry()
    _check_stage_metadata(stage)
    root = stage.prims[0]
    if root.specifier != "def":
        raise SceneImportError("root prim must be a def prim")
    if root.type_name not in (None, "Xform"):
        raise SceneImportError(f"root prim must be an Xform, got {root.type_name!r}")

    refs = _RefResolver(root)
    world = SceneWorld()
    root_attrs = dict(root.attributes)
    _parse_properties(root_attrs, registry, refs, world.world_properties, "world root")

    path_to_body: dict[str, SceneBody] = {}
    joint_prims: list[UsdaPrim] = []
    for child in root.children:
        _dispatch_prim(child, registry, refs, world, None, path_to_body, joint_prims)
    for prim in joint_prims:
        _parse_joint(prim, registry, refs, world, path_to_body)
    return world


# -- text entry points --------------------------------------------------------


def emit_usda(world: SceneWorld, registry: SchemaRegistry | None = None) -> str:
    return write_usda(world_to_stage(world, registry))


def parse_usda(text: str, registry: SchemaRegistry | None = None) -> SceneWorld:
    return stage_to_world(read_usda(text), registry)
