"""World validation and kinematic classification.

Validation produces data, not exceptions: a report listing every invariant
violation with the element name and a stable rule id.  A world is well-formed
iff the report carries no error-severity entries (informational notes, e.g.
joints attached to the reserved "world" body, do not count).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SceneBridgeError
from ..math3d import quat_identity
from .model import InertialProperties, SceneWorld, WORLD_BODY_NAME

AXIS_NORM_TOL = 1e-9
QUAT_NORM_TOL = 1e-9
SYMMETRY_TOL = 1e-12
TRIANGLE_TOL = 1e-9


@dataclass
class ValidationIssue:
    rule: str
    element: str
    message: str
    severity: str = "error"

    def __str__(self):
        return f"[{self.rule}] {self.element}: {self.message}"


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    def add(self, rule: str, element: str, message: str, severity: str = "error"):
        self.issues.append(ValidationIssue(rule, element, message, severity))

    @property
    def violations(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def notes(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.severity != "error"]

    @property
    def ok(self) -> bool:
        return not self.violations

    def by_rule(self, rule: str) -> list[ValidationIssue]:
        return [i for i in self.issues if i.rule == rule]

    def __len__(self):
        return len(self.issues)

    def __str__(self):
        return "\n".join(str(i) for i in self.issues) or "(no issues)"


def check_inertial(inertial: InertialProperties, element: str, report: ValidationReport):
    if inertial.mass <= 0.0:
        report.add("inertial-mass", element, f"mass must be positive, got {inertial.mass}")
    inertia = inertial.inertia
    scale = max(1.0, float(np.max(np.abs(inertia))))
    asym = float(np.max(np.abs(inertia - inertia.T)))
    if asym > SYMMETRY_TOL * scale:
        report.add("inertial-symmetry", element, f"inertia asymmetry {asym:.3e} exceeds tolerance")
        return
    eigenvalues = np.linalg.eigvalsh(0.5 * (inertia + inertia.T))
    lam1, lam2, lam3 = sorted(float(v) for v in eigenvalues)
    if lam1 < -TRIANGLE_TOL * max(1.0, abs(lam3)):
        report.add(
            "inertial-psd",
            element,
            f"inertia not positive semi-definite, eigenvalues ({lam1:.6g}, {lam2:.6g}, {lam3:.6g})",
        )
    if lam1 + lam2 < lam3 - TRIANGLE_TOL * abs(lam3):
        report.add(
            "inertial-triangle",
            element,
            f"principal moments violate triangle inequality, eigenvalues "
            f"({lam1:.6g}, {lam2:.6g}, {lam3:.6g})",
        )


def _check_pose(pose, element: str, report: ValidationReport):
    norm = float(np.linalg.norm(pose.rotation))
    if abs(norm - 1.0) > QUAT_NORM_TOL:
        report.add("quat-norm", element, f"rotation norm {norm} is not 1")


def validate_world(world: SceneWorld) -> ValidationReport:
    report = ValidationReport()

    seen: dict[str, str] = {}
    body_names = set()
    for body in world.iter_bodies():
        elements = [("body", body)] + [("joint", j) for j in body.joints] + [
            ("geometry", g) for g in body.geometries
        ]
        for kind, element in elements:
            if element.name in seen:
                report.add(
                    "duplicate-name",
                    element.name,
                    f"{kind} name collides with a {seen[element.name]}",
                )
            else:
                seen[element.name] = kind
        body_names.add(body.name)
        if body.name == WORLD_BODY_NAME:
            report.add("reserved-name", body.name, f"{WORLD_BODY_NAME!r} is reserved")

    for body in world.iter_bodies():
        _check_pose(body.pose, body.name, report)
        if body.inertial is not None:
            check_inertial(body.inertial, body.name, report)
        for geom in body.geometries:
            _check_geometry(geom, report)
        for joint in body.joints:
            _check_joint(joint, body_names, report)

    return report


def _check_geometry(geom, report: ValidationReport):
    name = geom.name
    _check_pose(geom.pose, name, report)
    if geom.geom_type == "cube":
        if geom.half_extents is None or np.any(geom.half_extents <= 0.0):
            report.add("geometry-size", name, f"cube needs positive half extents, got {geom.half_extents}")
    elif geom.geom_type == "sphere":
        if geom.radius is None or geom.radius <= 0.0:
            report.add("geometry-size", name, f"sphere needs positive radius, got {geom.radius}")
    elif geom.geom_type == "cylinder":
        if geom.radius is None or geom.radius <= 0.0 or geom.half_length is None or geom.half_length <= 0.0:
            report.add(
                "geometry-size",
                name,
                f"cylinder needs positive radius and half length, got {geom.radius}, {geom.half_length}",
            )
    elif geom.geom_type == "mesh":
        if geom.mesh_file is None and geom.mesh_data is None:
            report.add("geometry-mesh-missing", name, "mesh geometry without file reference or embedded data")
    if geom.rgba is not None and (np.any(geom.rgba < 0.0) or np.any(geom.rgba > 1.0)):
        report.add("geometry-rgba", name, f"rgba components outside [0, 1]: {geom.rgba}")
    if np.any(geom.scale <= 0.0):
        report.add("geometry-size", name, f"scale must be strictly positive, got {geom.scale}")
    elif geom.geom_type in ("cube", "cylinder"):
        spread = float(geom.scale.max() - geom.scale.min())
        if spread > 1e-12 * max(1.0, float(geom.scale.max())):
            report.add(
                "geometry-scale",
                name,
                f"non-uniform scale only permitted on sphere and mesh, got {geom.scale}",
            )
    if geom.mesh_data is not None:
        for issue in geom.mesh_data.validate():
            report.add("mesh-invalid", name, issue)


def _check_joint(joint, body_names: set, report: ValidationReport):
    name = joint.name
    for label, ref in (("parent", joint.parent_body), ("child", joint.child_body)):
        if ref == WORLD_BODY_NAME:
            report.add(
                "joint-to-world",
                name,
                f"{label} attaches to the reserved world body",
                severity="info",
            )
        elif ref not in body_names:
            report.add("dangling-joint-ref", name, f"{label} body {ref!r} does not exist")
    if joint.parent_body == joint.child_body:
        report.add("joint-self-loop", name, "parent and child are the same body")
    _check_pose(joint.offset, name, report)

    if joint.joint_type in ("revolute", "prismatic"):
        if joint.axis is None:
            report.add("joint-axis-norm", name, f"{joint.joint_type} joint needs an axis")
        else:
            norm = float(np.linalg.norm(joint.axis))
            if abs(norm - 1.0) > AXIS_NORM_TOL:
                report.add("joint-axis-norm", name, f"axis norm {norm} is not 1")
    else:
        if joint.axis is not None:
            report.add("joint-axis-forbidden", name, f"{joint.joint_type} joint must not have an axis")
        if joint.limit_lower is not None or joint.limit_upper is not None:
            report.add("joint-limits-forbidden", name, f"{joint.joint_type} joint must not have limits")
    if joint.limit_lower is not None and joint.limit_upper is not None:
        if joint.limit_lower > joint.limit_upper:
            report.add(
                "joint-limits-order",
                name,
                f"lower limit {joint.limit_lower} exceeds upper limit {joint.limit_upper}",
            )


def kinematic_classification(world: SceneWorld) -> tuple[str, list[str]]:
    """Classify the body graph as "tree" or "loop".

    The graph has one edge per connected body pair, whether the connection
    comes from parent-child nesting, a joint, or both: a joint that mirrors
    its child's nesting edge (the URDF/MJCF import pattern) is the same
    physical connection, and several joints between one pair compose degrees
    of freedom serially rather than closing a loop.  Returns the
    classification and the names of all joints lying on a cycle.
    """
    report = validate_world(world)
    if not report.ok:
        raise SceneBridgeError(f"world does not validate:\n{report}")

    nodes: list[str] = [WORLD_BODY_NAME] + [b.name for b in world.iter_bodies()]
    index = {name: i for i, name in enumerate(nodes)}

    # edge key: unordered node pair -> joint names on that connection
    edge_joints: dict[tuple[int, int], list[str]] = {}
    for body in world.iter_bodies():
        for child in body.children:
            key = tuple(sorted((index[body.name], index[child.name])))
            edge_joints.setdefault(key, [])
    for joint in world.iter_joints():
        key = tuple(sorted((index[joint.parent_body], index[joint.child_body])))
        edge_joints.setdefault(key, []).append(joint.name)

    edges = list(edge_joints)
    adjacency: dict[int, list[tuple[int, int]]] = {i: [] for i in range(len(nodes))}
    for edge_id, (u, v) in enumerate(edges):
        adjacency[u].append((v, edge_id))
        adjacency[v].append((u, edge_id))

    # Iterative bridge finding; non-bridge edges lie on cycles.
    visited = [False] * len(nodes)
    disc = [0] * len(nodes)
    low = [0] * len(nodes)
    bridges: set[int] = set()
    counter = [0]
    for start in range(len(nodes)):
        if visited[start]:
            continue
        stack = [(start, -1, iter(adjacency[start]))]
        visited[start] = True
        counter[0] += 1
        disc[start] = low[start] = counter[0]
        while stack:
            node, via_edge, neighbors = stack[-1]
            advanced = False
            for neighbor, edge_id in neighbors:
                if edge_id == via_edge:
                    continue
                if not visited[neighbor]:
                    visited[neighbor] = True
                    counter[0] += 1
                    disc[neighbor] = low[neighbor] = counter[0]
                    stack.append((neighbor, edge_id, iter(adjacency[neighbor])))
                    advanced = True
                    break
                low[node] = min(low[node], disc[neighbor])
            if advanced:
                continue
            stack.pop()
            if stack:
                parent = stack[-1][0]
                low[parent] = min(low[parent], low[node])
                if low[node] > disc[parent]:
                    bridges.add(via_edge)

    cycle_joint_names: list[str] = []
    for edge_id, key in enumerate(edges):
        if edge_id not in bridges:
            cycle_joint_names.extend(edge_joints[key])

    classification = "loop" if len(bridges) < len(edges) else "tree"
    order = {j.name: i for i, j in enumerate(world.iter_joints())}
    cycle_joint_names.sort(key=lambda n: order.get(n, 0))
    return classification, cycle_joint_names
