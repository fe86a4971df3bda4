"""Scene-level refinement of rigid-body dynamics.

Fills in inertials that importers left empty, repairs ones that are not
physically realizable, and optionally folds chains of fixed joints into a
single consolidated inertial on the chain root (member bodies and their
geometry stay in place so the scene still round-trips).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core.model import SceneBody, SceneWorld
from ..diagnostics import Diagnostics
from ..errors import MeshError
from ..math3d import Pose
from .consolidate import consolidate_inertia, repair_inertial, validate_inertial
from .massprops import MassPropertiesResult, geometry_mass_properties


@dataclass
class RefineOptions:
    default_density: float = 1000.0
    fill_missing: bool = True
    repair_invalid: bool = True
    consolidate_fixed_chains: bool = False
    flag_convex_decomposition: bool = True
    mesh_loader: object = None


@dataclass
class RefineReport:
    filled: list[str] = field(default_factory=list)
    repaired: list[str] = field(default_factory=list)
    consolidated: list[str] = field(default_factory=list)
    flagged_meshes: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)


def body_mass_properties(body: SceneBody, density: float, mesh_loader=None) -> MassPropertiesResult | None:
    """Combined mass properties of a body's collidable geometry, body frame."""
    results = []
    for geom in body.geometries:
        if not geom.collidable:
            continue
        results.append(geometry_mass_properties(geom, density, mesh_loader))
    if not results:
        return None
    if len(results) == 1:
        return results[0]
    inertial = consolidate_inertia([(r.to_inertial(), Pose.identity()) for r in results])
    volume = sum(r.volume for r in results)
    return MassPropertiesResult(inertial.mass, inertial.center_of_mass, inertial.inertia, volume)


def mesh_is_convex(mesh, tol_scale: float = 1e-8) -> bool:
    """True when every vertex lies on or behind every face plane.

    The tolerance scales with the bounding-box diagonal so the test is
    insensitive to model units.
    """
    lo, hi = mesh.bounds()
    tol = tol_scale * float(np.linalg.norm(hi - lo))
    v = mesh.vertices
    for tri in mesh.triangles:
        a, b, c = v[tri[0]], v[tri[1]], v[tri[2]]
        n = np.cross(b - a, c - a)
        norm = np.linalg.norm(n)
        if norm == 0.0:
            continue
        n = n / norm
        if np.max(v @ n) > float(a @ n) + tol:
            return False
    return True


CONVEX_DECOMPOSITION_FACE_LIMIT = 200


def refine_dynamics(world: SceneWorld, options: RefineOptions | None = None,
                    diagnostics: Diagnostics | None = None) -> RefineReport:
    """Refine inertials in place and report what changed."""
    options = options or RefineOptions()
    diagnostics = diagnostics or Diagnostics()
    report = RefineReport()

    for body in world.iter_bodies():
        if options.flag_convex_decomposition:
            _flag_geometry(body, report)
        if body.inertial is None:
            if not options.fill_missing:
                continue
            try:
                props = body_mass_properties(body, options.default_density, options.mesh_loader)
            except MeshError as exc:
                diagnostics.warning("refine-mesh", f"body {body.name!r}: {exc}")
                report.skipped.append(body.name)
                continue
            if props is None:
                report.skipped.append(body.name)
                continue
            body.inertial = props.to_inertial()
            report.filled.append(body.name)
        elif options.repair_invalid and validate_inertial(body.inertial):
            body.inertial = repair_inertial(body.inertial)
            report.repaired.append(body.name)

    if options.consolidate_fixed_chains:
        _consolidate_chains(world, report)
    return report


def _flag_geometry(body: SceneBody, report: RefineReport) -> None:
    for geom in body.geometries:
        if geom.geom_type != "mesh" or geom.mesh_data is None:
            continue
        mesh = geom.mesh_data
        if len(mesh.triangles) > CONVEX_DECOMPOSITION_FACE_LIMIT and not mesh_is_convex(mesh):
            geom.properties.set("needs_convex_decomposition", True)
            report.flagged_meshes.append(geom.name)


def _fixed_group(world: SceneWorld, root: SceneBody, parents) -> list[tuple[SceneBody, Pose]]:
    """Bodies welded to ``root`` through fixed joints, with poses in its frame."""
    fixed_child = {}
    for joint in world.iter_joints():
        if joint.joint_type == "fixed":
            fixed_child.setdefault(joint.parent_body, []).append(joint.child_body)
    group = [(root, Pose.identity())]
    stack = [(root.name, Pose.identity())]
    seen = {root.name}
    while stack:
        name, pose = stack.pop()
        for child_name in fixed_child.get(name, ()):
            if child_name in seen or child_name == "world":
                continue
            child = world.find_by_name(child_name)
            if not isinstance(child, SceneBody):
                continue
            # Joint offsets are identity for welds coming out of the importers;
            # the child pose is its placement relative to the nesting parent.
            child_pose = pose.compose(child.pose) if parents.get(child_name) == name else pose
            seen.add(child_name)
            group.append((child, child_pose))
            stack.append((child_name, child_pose))
    return group


def _consolidate_chains(world: SceneWorld, report: RefineReport) -> None:
    parents = world.body_parents()
    fixed_children = set()
    for joint in world.iter_joints():
        if joint.joint_type == "fixed" and joint.child_body != "world":
            fixed_children.add(joint.child_body)

    for body in world.iter_bodies():
        if body.name in fixed_children:
            continue
        group = _fixed_group(world, body, parents)
        if len(group) < 2:
            continue
        members = [(m.inertial, pose) for m, pose in group if m.inertial is not None]
        if not members:
            continue
        body.inertial = consolidate_inertia(members)
        for member, _ in group[1:]:
            member.inertial = None
            member.properties.set("inertial_consolidated_into", body.name)
        report.consolidated.append(body.name)
