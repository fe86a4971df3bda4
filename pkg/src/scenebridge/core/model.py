"""In-memory scene-graph model.

A world is a forest of bodies; bodies own joints and geometries; joints may
additionally connect arbitrary bodies, which is how loop kinematics arise.
Names are globally unique and serve as identifiers, so the world keeps a flat
name index over every element.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from ..errors import SceneBridgeError
from ..math3d import Pose
from .properties import FileReference, PropertySet

#: Reserved body name a joint may use to attach a body to the world itself.
WORLD_BODY_NAME = "world"

JOINT_TYPES = ("fixed", "revolute", "prismatic", "spherical")
GEOM_TYPES = ("cube", "sphere", "cylinder", "mesh")

_IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass
class InertialProperties:
    """Mass (kg), center of mass (m, body frame), inertia about the center of
    mass (kg·m², body frame axes)."""

    mass: float
    center_of_mass: np.ndarray = field(default_factory=lambda: np.zeros(3))
    inertia: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))

    def __post_init__(self):
        self.mass = float(self.mass)
        self.center_of_mass = np.asarray(self.center_of_mass, dtype=float).reshape(3)
        self.inertia = np.asarray(self.inertia, dtype=float).reshape(3, 3)

    def copy(self) -> "InertialProperties":
        return InertialProperties(self.mass, self.center_of_mass.copy(), self.inertia.copy())

    def approx_equal(self, other: "InertialProperties", rel: float = 1e-9) -> bool:
        scale = max(abs(self.mass), 1e-30)
        if abs(self.mass - other.mass) > rel * scale:
            return False
        if not np.allclose(self.center_of_mass, other.center_of_mass, rtol=rel, atol=rel * 1e-3):
            return False
        inertia_scale = max(float(np.max(np.abs(self.inertia))), 1e-30)
        return bool(np.all(np.abs(self.inertia - other.inertia) <= rel * inertia_scale + 1e-30))


class MeshData:
    """Triangle mesh: float64 vertices (N,3) and int32 triangle indices (M,3).

    ``provenance`` records where the data came from as ``(path, format)``;
    generated meshes leave it as None.
    """

    def __init__(self, vertices, triangles, provenance: tuple[str, str] | None = None):
        self.vertices = np.asarray(vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.asarray(triangles, dtype=np.int32).reshape(-1, 3)
        self.provenance = provenance
        self._closed: bool | None = None

    def validate(self) -> list[str]:
        issues = []
        if self.triangles.size and (
            self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices)
        ):
            issues.append("triangle index out of range")
            return issues
        areas = self.triangle_areas()
        degenerate = int(np.count_nonzero(areas <= 0.0))
        if degenerate:
            issues.append(f"{degenerate} degenerate (zero-area) triangles")
        return issues

    def triangle_areas(self) -> np.ndarray:
        v = self.vertices
        t = self.triangles
        if not len(t):
            return np.zeros(0)
        cross = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
        return 0.5 * np.linalg.norm(cross, axis=1)

    def boundary_edge_count(self) -> int:
        """Edges not shared by exactly two triangles."""
        t = self.triangles
        edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        edges = np.sort(edges, axis=1)
        _, counts = np.unique(edges, axis=0, return_counts=True)
        return int(np.count_nonzero(counts != 2))

    @property
    def is_closed_manifold(self) -> bool:
        if self._closed is None:
            self._closed = len(self.triangles) > 0 and self.boundary_edge_count() == 0
        return self._closed

    def transformed(self, pose: Pose | None = None, scale=None) -> "MeshData":
        verts = self.vertices
        if scale is not None:
            verts = verts * np.asarray(scale, dtype=float).reshape(3)
        if pose is not None and not pose.is_identity():
            rot = pose.matrix()[:3, :3]
            verts = verts @ rot.T + pose.translation
        return MeshData(verts, self.triangles.copy(), self.provenance)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def copy(self) -> "MeshData":
        return MeshData(self.vertices.copy(), self.triangles.copy(), self.provenance)

    def __repr__(self):
        return f"MeshData({len(self.vertices)} vertices, {len(self.triangles)} triangles)"


class SceneGeometry:
    """A visual and/or collidable shape attached to a body."""

    def __init__(
        self,
        name: str,
        geom_type: str,
        pose: Pose | None = None,
        visible: bool = True,
        collidable: bool = True,
        rgba=None,
        half_extents=None,
        radius: float | None = None,
        half_length: float | None = None,
        scale=None,
        mesh_file: FileReference | str | None = None,
        mesh_data: MeshData | None = None,
        material: list | None = None,
        properties: PropertySet | None = None,
    ):
        if geom_type not in GEOM_TYPES:
            raise SceneBridgeError(f"unknown geometry type {geom_type!r}")
        self.name = name
        self.geom_type = geom_type
        self.pose = pose if pose is not None else Pose.identity()
        self.visible = visible
        self.collidable = collidable
        self.rgba = None if rgba is None else np.asarray(rgba, dtype=float).reshape(4)
        self.half_extents = None if half_extents is None else np.asarray(half_extents, dtype=float).reshape(3)
        self.radius = None if radius is None else float(radius)
        self.half_length = None if half_length is None else float(half_length)
        self.scale = np.ones(3) if scale is None else np.asarray(scale, dtype=float).reshape(3)
        self.mesh_file = FileReference(mesh_file) if isinstance(mesh_file, str) else mesh_file
        self.mesh_data = mesh_data
        self.material = material
        self.properties = properties if properties is not None else PropertySet()

    def copy(self) -> "SceneGeometry":
        return SceneGeometry(
            self.name,
            self.geom_type,
            self.pose.copy(),
            self.visible,
            self.collidable,
            None if self.rgba is None else self.rgba.copy(),
            None if self.half_extents is None else self.half_extents.copy(),
            self.radius,
            self.half_length,
            self.scale.copy(),
            self.mesh_file,
            self.mesh_data.copy() if self.mesh_data is not None else None,
            list(self.material) if self.material is not None else None,
            self.properties.copy(),
        )

    def __repr__(self):
        return f"SceneGeometry({self.name!r}, {self.geom_type})"


class SceneJoint:
    """Connects a parent body to a child body.

    ``offset`` places the joint frame relative to the child body frame.
    Revolute limits are radians, prismatic limits meters.
    """

    def __init__(
        self,
        name: str,
        joint_type: str,
        parent_body: str,
        child_body: str,
        axis=None,
        limit_lower: float | None = None,
        limit_upper: float | None = None,
        offset: Pose | None = None,
        properties: PropertySet | None = None,
    ):
        if joint_type not in JOINT_TYPES:
            raise SceneBridgeError(f"unknown joint type {joint_type!r}")
        self.name = name
        self.joint_type = joint_type
        self.parent_body = parent_body
        self.child_body = child_body
        self.axis = None if axis is None else np.asarray(axis, dtype=float).reshape(3)
        self.limit_lower = None if limit_lower is None else float(limit_lower)
        self.limit_upper = None if limit_upper is None else float(limit_upper)
        self.offset = offset if offset is not None else Pose.identity()
        self.properties = properties if properties is not None else PropertySet()

    def copy(self) -> "SceneJoint":
        return SceneJoint(
            self.name,
            self.joint_type,
            self.parent_body,
            self.child_body,
            None if self.axis is None else self.axis.copy(),
            self.limit_lower,
            self.limit_upper,
            self.offset.copy(),
            self.properties.copy(),
        )

    def __repr__(self):
        return f"SceneJoint({self.name!r}, {self.joint_type}, {self.parent_body}->{self.child_body})"


class SceneBody:
    """A rigid body: child bodies, joints, geometries, pose, optional inertial."""

    def __init__(
        self,
        name: str,
        pose: Pose | None = None,
        inertial: InertialProperties | None = None,
        properties: PropertySet | None = None,
    ):
        self.name = name
        self.pose = pose if pose is not None else Pose.identity()
        self.inertial = inertial
        self.children: list[SceneBody] = []
        self.joints: list[SceneJoint] = []
        self.geometries: list[SceneGeometry] = []
        self.properties = properties if properties is not None else PropertySet()

    def copy(self) -> "SceneBody":
        dup = SceneBody(
            self.name,
            self.pose.copy(),
            self.inertial.copy() if self.inertial is not None else None,
            self.properties.copy(),
        )
        dup.children = [c.copy() for c in self.children]
        dup.joints = [j.copy() for j in self.joints]
        dup.geometries = [g.copy() for g in self.geometries]
        return dup

    def __repr__(self):
        return f"SceneBody({self.name!r}, {len(self.children)} children)"


class SceneWorld:
    """A composite of bodies and global properties, with a flat name index."""

    def __init__(self, world_properties: PropertySet | None = None):
        self.root_bodies: list[SceneBody] = []
        self.world_properties = world_properties if world_properties is not None else PropertySet()
        self.name_index: dict[str, object] = {}

    # -- construction ------------------------------------------------------

    def unique_name(self, raw: str) -> str:
        """Resolve a name collision by suffixing _1, _2, ..."""
        if raw not in self.name_index and raw != WORLD_BODY_NAME:
            return raw
        n = 1
        while f"{raw}_{n}" in self.name_index:
            n += 1
        return f"{raw}_{n}"

    def _register(self, element):
        name = element.name
        if name in self.name_index:
            raise SceneBridgeError(f"duplicate element name {name!r}")
        self.name_index[name] = element

    def add_body(self, body: SceneBody, parent: SceneBody | None = None) -> SceneBody:
        self._register(body)
        if parent is None:
            self.root_bodies.append(body)
        else:
            parent.children.append(body)
        return body

    def add_joint(self, joint: SceneJoint, owner: SceneBody) -> SceneJoint:
        self._register(joint)
        owner.joints.append(joint)
        return joint

    def add_geometry(self, geometry: SceneGeometry, owner: SceneBody) -> SceneGeometry:
        self._register(geometry)
        owner.geometries.append(geometry)
        return geometry

    def rename(self, old: str, new: str):
        element = self.name_index.get(old)
        if element is None:
            raise SceneBridgeError(f"no element named {old!r}")
        if new in self.name_index:
            raise SceneBridgeError(f"duplicate element name {new!r}")
        del self.name_index[old]
        element.name = new
        self.name_index[new] = element
        if isinstance(element, SceneBody):
            for joint in self.iter_joints():
                if joint.parent_body == old:
                    joint.parent_body = new
                if joint.child_body == old:
                    joint.child_body = new

    # -- traversal ---------------------------------------------------------

    def find_by_name(self, name: str):
        return self.name_index.get(name)

    def iter_bodies(self):
        stack = list(reversed(self.root_bodies))
        while stack:
            body = stack.pop()
            yield body
            stack.extend(reversed(body.children))

    def iter_joints(self):
        for body in self.iter_bodies():
            yield from body.joints

    def iter_geometries(self):
        for body in self.iter_bodies():
            yield from body.geometries

    def body_parents(self) -> dict[str, str | None]:
        parents: dict[str, str | None] = {b.name: None for b in self.root_bodies}
        for body in self.iter_bodies():
            for child in body.children:
                parents[child.name] = body.name
        return parents

    def rebuild_index(self):
        self.name_index.clear()
        for body in self.iter_bodies():
            self.name_index[body.name] = body
            for joint in body.joints:
                self.name_index[joint.name] = joint
            for geom in body.geometries:
                self.name_index[geom.name] = geom

    def copy(self) -> "SceneWorld":
        dup = SceneWorld(self.world_properties.copy())
        for body in self.root_bodies:
            dup.root_bodies.append(body.copy())
        dup.rebuild_index()
        return dup

    def __repr__(self):
        bodies = sum(1 for _ in self.iter_bodies())
        joints = sum(1 for _ in self.iter_joints())
        return f"SceneWorld({bodies} bodies, {joints} joints)"


def is_legal_identifier(name: str) -> bool:
    return bool(_IDENTIFIER_RE.match(name))
