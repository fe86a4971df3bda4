"""Joint-graph analysis shared by the exporters.

Target formats express kinematics as a tree, so exporters need to know which
joints span the body graph and which close loops, plus world-frame poses to
recompute relative transforms after restructuring.
"""
from __future__ import annotations

from ..core.model import WORLD_BODY_NAME, SceneJoint, SceneWorld
from ..math3d import Pose, quat_to_matrix


def absolute_poses(world: SceneWorld) -> dict[str, Pose]:
    """World-frame pose of every body; the world root is identity."""
    poses = {WORLD_BODY_NAME: Pose.identity()}
    stack = [(body, Pose.identity()) for body in world.root_bodies]
    while stack:
        body, parent_pose = stack.pop()
        pose = parent_pose.compose(body.pose)
        poses[body.name] = pose
        stack.extend((child, pose) for child in body.children)
    return poses


def partition_joints(world: SceneWorld) -> tuple[list[SceneJoint], list[SceneJoint]]:
    """Split iter_joints() into (tree joints, loop-closing joints).

    Nesting edges are structural and seeded first.  A joint on a pair that
    already has a connection between exactly those two bodies is serial or
    mirrors the nesting, not a loop; a joint whose endpoints are connected
    only through other bodies closes a cycle.
    """
    leader: dict[str, str] = {}

    def find(name: str) -> str:
        root = name
        while leader.get(root, root) != root:
            root = leader[root]
        while leader.get(name, name) != name:
            leader[name], name = root, leader[name]
        return root

    def union(a: str, b: str) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        leader[ra] = rb
        return True

    direct_pairs = set()
    for body in world.iter_bodies():
        for child in body.children:
            union(body.name, child.name)
            direct_pairs.add(frozenset((body.name, child.name)))

    tree: list[SceneJoint] = []
    loop: list[SceneJoint] = []
    for joint in world.iter_joints():
        pair = frozenset((joint.parent_body, joint.child_body))
        if len(pair) == 2 and (pair in direct_pairs or union(joint.parent_body, joint.child_body)):
            direct_pairs.add(pair)
            tree.append(joint)
        else:
            loop.append(joint)
    return tree, loop


def restructure_by_joints(world: SceneWorld, diagnostics=None) -> tuple[list[SceneJoint], list[SceneJoint]]:
    """Re-nest bodies in place so every tree joint's child sits under its
    parent, as formats with joint-implies-nesting semantics require.

    Bodies keep their world-frame poses.  Joints that cannot be honored by
    nesting (a second parent for an already claimed child, or a child that
    contains its own parent) are demoted to the loop list.  Returns
    (tree joints, loop joints).
    """
    poses = absolute_poses(world)
    tree, loop = partition_joints(world)
    parents = world.body_parents()
    claimed: dict[str, str] = {}
    kept: list[SceneJoint] = []

    def contains(ancestor: str, name: str) -> bool:
        while name is not None:
            if name == ancestor:
                return True
            name = parents.get(name)
        return False

    for joint in tree:
        child_name, parent_name = joint.child_body, joint.parent_body
        if claimed.get(child_name, parent_name) != parent_name:
            loop.append(joint)  # child already nested under a different parent
            continue
        if child_name in claimed:
            kept.append(joint)  # serial joint on the same pair
            continue
        target = None if parent_name == WORLD_BODY_NAME else parent_name
        current = parents.get(child_name)
        movable = current is None and not (target is not None and contains(child_name, target))
        if current != target and not movable:
            # honoring this joint would tear the child out of a rigid nesting
            # edge (or nest a body inside its own subtree); constrain instead
            if diagnostics is not None:
                diagnostics.info(
                    "joint-against-nesting",
                    f"joint {joint.name!r} disagrees with the body tree; kept as a constraint",
                    joint=joint.name)
            loop.append(joint)
            continue
        claimed[child_name] = parent_name
        kept.append(joint)
        if current == target:
            continue
        child = world.find_by_name(child_name)
        world.root_bodies.remove(child)
        world.find_by_name(target).children.append(child)
        child.pose = poses[target].inverse().compose(poses[child_name])
        parents[child_name] = target
    return kept, loop


def fold_offset_into_child(world: SceneWorld, joint: SceneJoint) -> None:
    """Move the child body frame onto the joint frame.

    Formats without a joint-frame transform require the child frame and the
    joint frame to coincide.  The child pose absorbs the offset and all
    content expressed in the child frame shifts the opposite way, so nothing
    moves in the world.
    """
    offset = joint.offset
    if offset.is_identity(1e-12):
        return
    child = world.find_by_name(joint.child_body)
    shift = offset.inverse()
    child.pose = child.pose.compose(offset)
    for geom in child.geometries:
        geom.pose = shift.compose(geom.pose)
    for nested in child.children:
        nested.pose = shift.compose(nested.pose)
    if child.inertial is not None:
        rot = quat_to_matrix(shift.rotation)
        child.inertial.center_of_mass = shift.transform_point(child.inertial.center_of_mass)
        child.inertial.inertia = rot @ child.inertial.inertia @ rot.T
    for other in world.iter_joints():
        # axes live in their joint frames, which have not moved, so only the
        # frame-relative offsets of sibling joints on this child need shifting
        if other is not joint and other.child_body == child.name:
            other.offset = shift.compose(other.offset)
    joint.offset = Pose.identity()
