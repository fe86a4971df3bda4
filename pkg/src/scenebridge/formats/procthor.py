"""ProcTHOR house JSON import.

Source scenes are Unity flavored: Y up, left handed, rotations as Euler
degrees applied z, then x, then y about fixed axes.  The importer maps
everything into the Z-up right-handed scene frame by swapping the y and z
axes, which for quaternions means (w, qx, qy, qz) -> (w, -qx, -qz, -qy).

Only a small slice of the format is interpreted: room floor polygons and
the id/assetId/position/rotation/children fields of objects.  Rooms
become a floor body and a walls body with generated prism meshes; objects
become bodies with a mesh geometry named after their asset.  Every other
key rides along as a raw JSON property.  Object positions are world
coordinates even for nested children, so nesting recomputes the relative
pose.  An object flagged "openable" gets a revolute hinge (about the
vertical axis, quarter-turn range) instead of a rigid attachment.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from ..core.meshes import polygon_prism
from ..core.model import SceneBody, SceneGeometry, SceneJoint, SceneWorld, WORLD_BODY_NAME
from ..core.properties import FileReference, PropertyKind
from ..diagnostics import Diagnostics
from ..dynamics.refine import RefineOptions, refine_dynamics
from ..errors import SceneImportError
from ..math3d import Pose, quat_from_euler, quat_normalize
from .objio import directory_mesh_loader, resolve_mesh_path
from .options import ImportOptions
from .xmlcommon import imported_name, note_source_name

WALL_HEIGHT = 2.5
WALL_THICKNESS = 0.1
FLOOR_THICKNESS = 0.1

_OBJECT_KEYS = ("id", "assetId", "position", "rotation", "children", "openable")
_HINGE_RANGE = (0.0, math.pi / 2.0)


def import_procthor(document: str, options: ImportOptions | None = None,
                    diagnostics: Diagnostics | None = None) -> SceneWorld:
    options = options or ImportOptions()
    diags = diagnostics if diagnostics is not None else Diagnostics()
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SceneImportError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SceneImportError("expected a JSON object at the top level")
    for key in ("rooms", "objects"):
        if key not in data or not isinstance(data[key], list):
            raise SceneImportError(f"missing required array {key!r}")

    world = SceneWorld()
    props = world.world_properties
    props.set("source:format", "procthor", PropertyKind.STRING)
    for key, value in data.items():
        if key not in ("rooms", "objects"):
            props.set(f"procthor:{key}", json.dumps(value, separators=(",", ":")),
                      PropertyKind.STRING)

    for index, room in enumerate(data["rooms"]):
        _import_room(world, room, index)
    for obj in data["objects"]:
        _import_object(world, obj, None, options, diags)

    if options.fix_missing_inertials:
        refine_dynamics(
            world,
            RefineOptions(default_density=options.default_density,
                          mesh_loader=directory_mesh_loader(options.mesh_root)),
            diags,
        )
    return world


def _finite(values, what: str) -> list[float]:
    out = []
    for v in values:
        f = float(v)
        if not math.isfinite(f):
            raise SceneImportError(f"{what} has a non-finite coordinate")
        out.append(f)
    return out


def _vector(entry: dict, what: str) -> np.ndarray:
    if not isinstance(entry, dict) or any(k not in entry for k in ("x", "y", "z")):
        raise SceneImportError(f"{what} needs x, y and z")
    x, y, z = _finite((entry["x"], entry["y"], entry["z"]), what)
    return np.array([x, z, y])  # Unity Y-up -> scene Z-up


def _rotation(entry, what: str) -> np.ndarray:
    if entry is None:
        return np.array([1.0, 0.0, 0.0, 0.0])
    if not isinstance(entry, dict):
        raise SceneImportError(f"{what} must be an object")
    if "w" in entry:
        w, qx, qy, qz = _finite((entry["w"], entry.get("x", 0), entry.get("y", 0),
                                 entry.get("z", 0)), what)
        return quat_normalize((w, -qx, -qz, -qy))
    rx, ry, rz = [math.radians(v) for v in
                  _finite((entry.get("x", 0), entry.get("y", 0), entry.get("z", 0)), what)]
    w, qx, qy, qz = quat_from_euler((rz, rx, ry), "zxy", intrinsic=False)
    return quat_normalize((w, -qx, -qz, -qy))


def _room_polygon(room: dict, label: str) -> np.ndarray:
    polygon = room.get("floorPolygon")
    if not isinstance(polygon, list) or len(polygon) < 3:
        raise SceneImportError(f"room {label} needs a floorPolygon with 3+ points")
    points = []
    for corner in polygon:
        if not isinstance(corner, dict) or "x" not in corner or "z" not in corner:
            raise SceneImportError(f"room {label} corner needs x and z")
        points.append(_finite((corner["x"], corner["z"]), f"room {label} corner"))
    points = np.array(points)
    # Unity ground plane (x, z) is the scene's (x, y); enforce CCW winding
    area2 = np.sum(points[:, 0] * np.roll(points[:, 1], -1)
                   - np.roll(points[:, 0], -1) * points[:, 1])
    if area2 < 0:
        points = points[::-1]
    return points


def _import_room(world: SceneWorld, room: dict, index: int):
    if not isinstance(room, dict):
        raise SceneImportError(f"room {index} is not an object")
    label = str(room.get("id", f"room_{index}"))
    points = _room_polygon(room, label)

    floor = SceneBody(imported_name(world, f"{label}_floor"))
    note_source_name(floor, f"{label}_floor")
    world.add_body(floor, None)
    world.add_geometry(SceneGeometry(
        world.unique_name(f"{floor.name}_mesh"), "mesh",
        mesh_data=polygon_prism(points, -FLOOR_THICKNESS, 0.0)), floor)

    walls = SceneBody(imported_name(world, f"{label}_walls"))
    note_source_name(walls, f"{label}_walls")
    world.add_body(walls, None)
    for i in range(len(points)):
        a, b = points[i], points[(i + 1) % len(points)]
        edge = b - a
        normal = np.array([-edge[1], edge[0]])
        normal = normal / np.linalg.norm(normal) * WALL_THICKNESS  # inward
        quad = np.array([a, b, b + normal, a + normal])
        world.add_geometry(SceneGeometry(
            world.unique_name(f"{walls.name}_{i}"), "mesh",
            mesh_data=polygon_prism(quad, 0.0, WALL_HEIGHT)), walls)

    for key, value in room.items():
        if key not in ("floorPolygon", "id"):
            floor.properties.set(f"procthor:{key}",
                                 json.dumps(value, separators=(",", ":")),
                                 PropertyKind.STRING)


def _import_object(world: SceneWorld, obj: dict, parent: SceneBody | None,
                   options: ImportOptions, diags: Diagnostics):
    if not isinstance(obj, dict):
        raise SceneImportError("object entries must be JSON objects")
    for key in ("id", "assetId", "position"):
        if key not in obj:
            raise SceneImportError(f"object is missing required key {key!r}")

    raw = str(obj["id"])
    world_pose = Pose(translation=_vector(obj["position"], f"object {raw} position"),
                      rotation=_rotation(obj.get("rotation"), f"object {raw} rotation"))
    # positions are world frame even for children; nesting keeps placement
    pose = world_pose
    if parent is not None:
        pose = _parent_frame(world, parent).inverse().compose(world_pose)

    body = SceneBody(imported_name(world, raw), pose=pose)
    note_source_name(body, raw)
    body.properties.set("source:assetId", str(obj["assetId"]), PropertyKind.STRING)
    world.add_body(body, parent)

    mesh_path = f"{obj['assetId']}.obj"
    if options.mesh_root is not None:
        resolved = resolve_mesh_path(mesh_path, options.mesh_root)
        if not Path(resolved).is_file():
            raise SceneImportError(f"unresolvable mesh path {mesh_path!r} -> {resolved}")
    geom = SceneGeometry(world.unique_name(f"{body.name}_geom"), "mesh",
                         mesh_file=FileReference(mesh_path))
    geom.properties.set("source:autoName", True, PropertyKind.BOOLEAN)
    world.add_geometry(geom, body)

    if obj.get("openable"):
        body.properties.set("procthor:openable", True, PropertyKind.BOOLEAN)
        anchor = parent.name if parent is not None else WORLD_BODY_NAME
        joint = SceneJoint(world.unique_name(f"{body.name}_hinge"), "revolute",
                           anchor, body.name, axis=(0.0, 0.0, 1.0),
                           limit_lower=_HINGE_RANGE[0], limit_upper=_HINGE_RANGE[1])
        world.add_joint(joint, parent if parent is not None else body)

    for key, value in obj.items():
        if key not in _OBJECT_KEYS:
            body.properties.set(f"procthor:{key}",
                                json.dumps(value, separators=(",", ":")),
                                PropertyKind.STRING)

    children = obj.get("children", [])
    if not isinstance(children, list):
        raise SceneImportError(f"object {raw} children must be a list")
    for child in children:
        _import_object(world, child, body, options, diags)


def _parent_frame(world: SceneWorld, body: SceneBody) -> Pose:
    """World pose of a body, walking up the nesting chain."""
    parents = world.body_parents()
    chain = []
    name = body.name
    while name is not None:
        chain.append(world.find_by_name(name))
        name = parents.get(name)
    pose = Pose.identity()
    for ancestor in reversed(chain):
        pose = pose.compose(ancestor.pose)
    return pose
