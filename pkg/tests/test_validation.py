import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scenebridge import (
    InertialProperties,
    SceneBody,
    SceneBridgeError,
    SceneGeometry,
    SceneJoint,
    SceneWorld,
    kinematic_classification,
    validate_world,
)


def make_chain(n=3, joint_type="revolute"):
    world = SceneWorld()
    prev = world.add_body(SceneBody("link0"))
    for i in range(1, n):
        body = world.add_body(SceneBody(f"link{i}"), parent=prev)
        world.add_joint(
            SceneJoint(
                f"joint{i}",
                joint_type,
                prev.name,
                body.name,
                axis=None if joint_type in ("fixed", "spherical") else [0, 0, 1],
            ),
            owner=prev,
        )
        prev = body
    return world


class TestValidateWorld:
    def test_clean_world(self):
        assert validate_world(make_chain()).ok

    def test_reserved_name(self):
        world = SceneWorld()
        world.root_bodies.append(SceneBody("world"))
        report = validate_world(world)
        assert report.by_rule("reserved-name")

    def test_bad_quaternion(self):
        world = make_chain(2)
        world.find_by_name("link1").pose.rotation = np.array([1.0, 0, 0, 1.0])
        assert validate_world(world).by_rule("quat-norm")

    def test_bad_inertial_psd(self):
        world = make_chain(2)
        world.find_by_name("link0").inertial = InertialProperties(
            1.0, np.zeros(3), np.diag([-1.0, 1.0, 1.0])
        )
        assert validate_world(world).by_rule("inertial-psd")

    def test_bad_inertial_triangle(self):
        world = make_chain(2)
        world.find_by_name("link0").inertial = InertialProperties(
            1.0, np.zeros(3), np.diag([1.0, 1.0, 9.0])
        )
        assert validate_world(world).by_rule("inertial-triangle")

    def test_zero_mass(self):
        world = make_chain(2)
        world.find_by_name("link0").inertial = InertialProperties(0.0, np.zeros(3), np.eye(3))
        assert validate_world(world).by_rule("inertial-mass")

    def test_geometry_sizes(self):
        world = SceneWorld()
        body = world.add_body(SceneBody("b"))
        world.add_geometry(SceneGeometry("bad_sphere", "sphere", radius=-1.0), owner=body)
        world.add_geometry(SceneGeometry("bad_cube", "cube", half_extents=[1, 0, 1]), owner=body)
        report = validate_world(world)
        assert len(report.by_rule("geometry-size")) == 2

    def test_mesh_without_source(self):
        world = SceneWorld()
        body = world.add_body(SceneBody("b"))
        world.add_geometry(SceneGeometry("m", "mesh"), owner=body)
        assert validate_world(world).by_rule("geometry-mesh-missing")

    def test_nonuniform_scale_on_cube(self):
        world = SceneWorld()
        body = world.add_body(SceneBody("b"))
        world.add_geometry(
            SceneGeometry("c", "cube", half_extents=[1, 1, 1], scale=[1, 2, 1]), owner=body
        )
        assert validate_world(world).by_rule("geometry-scale")

    def test_nonuniform_scale_on_sphere_ok(self):
        world = SceneWorld()
        body = world.add_body(SceneBody("b"))
        world.add_geometry(SceneGeometry("s", "sphere", radius=1.0, scale=[1, 2, 1]), owner=body)
        assert validate_world(world).ok

    def test_dangling_joint(self):
        world = make_chain(2)
        world.find_by_name("joint1").child_body = "ghost"
        assert validate_world(world).by_rule("dangling-joint-ref")

    def test_joint_to_world_is_note_not_violation(self):
        world = SceneWorld()
        body = world.add_body(SceneBody("b"))
        world.add_joint(SceneJoint("anchor", "fixed", "world", "b"), owner=body)
        report = validate_world(world)
        assert report.ok
        assert report.notes

    def test_axis_rules(self):
        world = make_chain(2)
        world.find_by_name("joint1").axis = np.array([0.0, 0.0, 2.0])
        assert validate_world(world).by_rule("joint-axis-norm")

        world2 = make_chain(2, joint_type="spherical")
        world2.find_by_name("joint1").axis = np.array([0.0, 0.0, 1.0])
        assert validate_world(world2).by_rule("joint-axis-forbidden")

    def test_limits_rules(self):
        world = make_chain(2)
        j = world.find_by_name("joint1")
        j.limit_lower, j.limit_upper = 1.0, -1.0
        assert validate_world(world).by_rule("joint-limits-order")

        world2 = make_chain(2, joint_type="fixed")
        world2.find_by_name("joint1").limit_lower = 0.0
        assert validate_world(world2).by_rule("joint-limits-forbidden")


# -- classification oracle ----------------------------------------------------


def classification_oracle(world):
    """Loop detection by edge removal + union-find connectivity.

    An edge lies on a cycle exactly when its endpoints stay connected after
    removing it.  Completely independent of the bridge-based implementation.
    """
    nodes = ["world"] + [b.name for b in world.iter_bodies()]
    index = {n: i for i, n in enumerate(nodes)}
    pair_joints = {}
    for body in world.iter_bodies():
        for child in body.children:
            key = frozenset((index[body.name], index[child.name]))
            pair_joints.setdefault(key, [])
    for joint in world.iter_joints():
        key = frozenset((index[joint.parent_body], index[joint.child_body]))
        pair_joints.setdefault(key, []).append(joint.name)
    edges = list(pair_joints)

    def connected(skip, a, b):
        parent = list(range(len(nodes)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, edge in enumerate(edges):
            if i == skip:
                continue
            u, v = tuple(edge)
            parent[find(u)] = find(v)
        return find(a) == find(b)

    cycle_joints = []
    any_cycle = False
    for i, edge in enumerate(edges):
        u, v = tuple(edge)
        if connected(i, u, v):
            any_cycle = True
            cycle_joints.extend(pair_joints[edge])
    return ("loop" if any_cycle else "tree"), sorted(cycle_joints)


class TestKinematicClassification:
    def test_chain_is_tree(self):
        kind, cycles = kinematic_classification(make_chain(5))
        assert kind == "tree"
        assert cycles == []

    def test_joint_mirroring_nesting_is_not_a_loop(self):
        # The standard import pattern: every child body nested under its
        # parent with a joint on the same pair.
        world = make_chain(4)
        kind, cycles = kinematic_classification(world)
        assert kind == "tree"
        assert cycles == []

    def test_two_joints_same_pair_is_serial_not_loop(self):
        world = SceneWorld()
        a = world.add_body(SceneBody("a"))
        b = world.add_body(SceneBody("b"), parent=a)
        world.add_joint(SceneJoint("jx", "revolute", "a", "b", axis=[1, 0, 0]), owner=a)
        world.add_joint(SceneJoint("jy", "revolute", "a", "b", axis=[0, 1, 0]), owner=a)
        kind, cycles = kinematic_classification(world)
        assert kind == "tree"
        assert cycles == []

    def test_four_bar_linkage(self):
        world = SceneWorld()
        base = world.add_body(SceneBody("base"))
        crank = world.add_body(SceneBody("crank"), parent=base)
        coupler = world.add_body(SceneBody("coupler"), parent=crank)
        rocker = world.add_body(SceneBody("rocker"), parent=coupler)
        for name, parent, child, owner in (
            ("j1", "base", "crank", base),
            ("j2", "crank", "coupler", crank),
            ("j3", "coupler", "rocker", coupler),
            ("j4", "rocker", "base", rocker),
        ):
            world.add_joint(SceneJoint(name, "revolute", parent, child, axis=[0, 0, 1]), owner=owner)
        kind, cycles = kinematic_classification(world)
        assert kind == "loop"
        assert set(cycles) == {"j1", "j2", "j3", "j4"}

    def test_loop_through_world(self):
        # Two chains anchored to the world and joined at the tip close a loop
        # through the world node.
        world = SceneWorld()
        left = world.add_body(SceneBody("left"))
        right = world.add_body(SceneBody("right"))
        world.add_joint(SceneJoint("anchor_l", "fixed", "world", "left"), owner=left)
        world.add_joint(SceneJoint("anchor_r", "fixed", "world", "right"), owner=right)
        world.add_joint(
            SceneJoint("tip", "revolute", "left", "right", axis=[0, 0, 1]), owner=left
        )
        kind, cycles = kinematic_classification(world)
        assert kind == "loop"
        assert set(cycles) == {"anchor_l", "anchor_r", "tip"}

    def test_branching_stays_tree(self):
        world = SceneWorld()
        trunk = world.add_body(SceneBody("trunk"))
        for i in range(4):
            leaf = world.add_body(SceneBody(f"leaf{i}"), parent=trunk)
            world.add_joint(
                SceneJoint(f"j{i}", "revolute", "trunk", leaf.name, axis=[0, 0, 1]),
                owner=trunk,
            )
        kind, _ = kinematic_classification(world)
        assert kind == "tree"

    def test_invalid_world_raises(self):
        world = make_chain(2)
        world.find_by_name("joint1").child_body = "ghost"
        with pytest.raises(SceneBridgeError):
            kinematic_classification(world)

    @given(st.integers(0, 100_000))
    @settings(max_examples=60, deadline=None)
    def test_random_graphs_match_oracle(self, seed):
        rng = np.random.default_rng(seed)
        world = SceneWorld()
        n_bodies = int(rng.integers(1, 9))
        bodies = []
        for i in range(n_bodies):
            parent = None
            if bodies and rng.random() < 0.7:
                parent = bodies[int(rng.integers(0, len(bodies)))]
            bodies.append(world.add_body(SceneBody(f"b{i}"), parent=parent))
        names = ["world"] + [b.name for b in bodies]
        n_joints = int(rng.integers(0, n_bodies + 3))
        for k in range(n_joints):
            pa, ch = rng.choice(len(names), size=2, replace=False)
            world.add_joint(
                SceneJoint(f"j{k}", "fixed", names[pa], names[ch]),
                owner=bodies[int(rng.integers(0, len(bodies)))],
            )
        kind, cycles = kinematic_classification(world)
        oracle_kind, oracle_cycles = classification_oracle(world)
        assert kind == oracle_kind
        assert sorted(cycles) == oracle_cycles
