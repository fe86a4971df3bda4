"""Structural world comparison with numeric tolerances.

Bodies and geometries compare in traversal order; joints compare sorted by
name, since which body's list a joint sits in is a storage detail rather
than scene structure.
"""
from __future__ import annotations

import numpy as np

from .model import SceneGeometry, SceneJoint, SceneWorld

#: Default tolerances: positions in meters, rotations as quaternion distance.
LIN_TOL = 1e-6
ANG_TOL = 1e-9
REL_TOL = 1e-9


def _approx(a, b, tol) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return bool(np.all(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) <= tol))


def _scalar_approx(a, b, tol) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return abs(a - b) <= tol


def _diff_geometry(a: SceneGeometry, b: SceneGeometry, where: str, out: list[str]):
    if a.geom_type != b.geom_type:
        out.append(f"{where}: geometry type {a.geom_type} != {b.geom_type}")
        return
    if not a.pose.approx_equal(b.pose, LIN_TOL, ANG_TOL):
        out.append(f"{where}: pose differs")
    if a.visible != b.visible:
        out.append(f"{where}: visibility differs")
    if a.collidable != b.collidable:
        out.append(f"{where}: collidability differs")
    if not _approx(a.rgba, b.rgba, REL_TOL):
        out.append(f"{where}: color differs")
    if not _approx(a.half_extents, b.half_extents, LIN_TOL):
        out.append(f"{where}: half extents differ")
    if not _scalar_approx(a.radius, b.radius, LIN_TOL):
        out.append(f"{where}: radius differs")
    if not _scalar_approx(a.half_length, b.half_length, LIN_TOL):
        out.append(f"{where}: length differs")
    if not _approx(a.scale, b.scale, REL_TOL):
        out.append(f"{where}: scale differs")
    path_a = None if a.mesh_file is None else a.mesh_file.path
    path_b = None if b.mesh_file is None else b.mesh_file.path
    if path_a != path_b:
        out.append(f"{where}: mesh file {path_a!r} != {path_b!r}")
    if (a.mesh_data is None) != (b.mesh_data is None):
        out.append(f"{where}: embedded mesh presence differs")
    elif a.mesh_data is not None:
        same = a.mesh_data.vertices.shape == b.mesh_data.vertices.shape and np.allclose(
            a.mesh_data.vertices, b.mesh_data.vertices, atol=LIN_TOL
        )
        if not same or not np.array_equal(a.mesh_data.triangles, b.mesh_data.triangles):
            out.append(f"{where}: embedded mesh differs")
    if (a.material or None) != (b.material or None):
        out.append(f"{where}: material differs")
    if not a.properties.approx_equal(b.properties, REL_TOL):
        out.append(f"{where}: properties differ")


def _diff_joint(a: SceneJoint, b: SceneJoint, where: str, out: list[str]):
    if a.joint_type != b.joint_type:
        out.append(f"{where}: joint type {a.joint_type} != {b.joint_type}")
    if a.parent_body != b.parent_body or a.child_body != b.child_body:
        out.append(
            f"{where}: attaches {a.parent_body}->{a.child_body}"
            f" != {b.parent_body}->{b.child_body}"
        )
    if not _approx(a.axis, b.axis, REL_TOL):
        out.append(f"{where}: axis differs")
    if not _scalar_approx(a.limit_lower, b.limit_lower, REL_TOL):
        out.append(f"{where}: lower limit differs")
    if not _scalar_approx(a.limit_upper, b.limit_upper, REL_TOL):
        out.append(f"{where}: upper limit differs")
    if not a.offset.approx_equal(b.offset, LIN_TOL, ANG_TOL):
        out.append(f"{where}: offset differs")
    if not a.properties.approx_equal(b.properties, REL_TOL):
        out.append(f"{where}: properties differ")


def worlds_diff(a: SceneWorld, b: SceneWorld) -> list[str]:
    """Human-readable differences between two worlds; empty when equal."""
    out: list[str] = []
    if not a.world_properties.approx_equal(b.world_properties, REL_TOL):
        out.append("world properties differ")

    bodies_a = list(a.iter_bodies())
    bodies_b = list(b.iter_bodies())
    names_a = [body.name for body in bodies_a]
    names_b = [body.name for body in bodies_b]
    if names_a != names_b:
        out.append(f"body tree differs: {names_a} != {names_b}")
        return out

    for body_a, body_b in zip(bodies_a, bodies_b):
        where = f"body {body_a.name!r}"
        if not body_a.pose.approx_equal(body_b.pose, LIN_TOL, ANG_TOL):
            out.append(f"{where}: pose differs")
        if (body_a.inertial is None) != (body_b.inertial is None):
            out.append(f"{where}: inertial presence differs")
        elif body_a.inertial is not None and not body_a.inertial.approx_equal(
            body_b.inertial, REL_TOL
        ):
            out.append(f"{where}: inertial differs")
        if not body_a.properties.approx_equal(body_b.properties, REL_TOL):
            out.append(f"{where}: properties differ")
        geoms_a = body_a.geometries
        geoms_b = body_b.geometries
        if [g.name for g in geoms_a] != [g.name for g in geoms_b]:
            out.append(
                f"{where}: geometries {[g.name for g in geoms_a]}"
                f" != {[g.name for g in geoms_b]}"
            )
            continue
        for geom_a, geom_b in zip(geoms_a, geoms_b):
            _diff_geometry(geom_a, geom_b, f"geometry {geom_a.name!r}", out)

    joints_a = sorted(a.iter_joints(), key=lambda j: j.name)
    joints_b = sorted(b.iter_joints(), key=lambda j: j.name)
    if [j.name for j in joints_a] != [j.name for j in joints_b]:
        out.append(
            f"joints differ: {[j.name for j in joints_a]} != {[j.name for j in joints_b]}"
        )
        return out
    for joint_a, joint_b in zip(joints_a, joints_b):
        _diff_joint(joint_a, joint_b, f"joint {joint_a.name!r}", out)
    return out


def worlds_equal(a: SceneWorld, b: SceneWorld) -> bool:
    return not worlds_diff(a, b)
