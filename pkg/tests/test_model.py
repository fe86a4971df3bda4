import numpy as np
import pytest

from scenebridge import (
    InertialProperties,
    MeshData,
    Pose,
    PropertyKind,
    PropertyKindError,
    PropertySet,
    SceneBody,
    SceneBridgeError,
    SceneGeometry,
    SceneJoint,
    SceneWorld,
)
from scenebridge.core.model import is_legal_identifier
from scenebridge.core.meshes import box_mesh, icosphere
from scenebridge.core.properties import FileReference, PropertyRegistry


class TestPropertySet:
    def test_kind_inferred_and_frozen(self):
        reg = PropertyRegistry()
        props = PropertySet(reg)
        props.set("temperature", 20.5)
        assert props.kind("temperature") is PropertyKind.REAL
        with pytest.raises(PropertyKindError):
            props.set("temperature", "hot")

    def test_bool_before_int(self):
        reg = PropertyRegistry()
        props = PropertySet(reg)
        props.set("flag", True)
        assert props.kind("flag") is PropertyKind.BOOLEAN
        with pytest.raises(PropertyKindError):
            props.set("flag", 1)

    def test_builtin_kinds(self):
        props = PropertySet(PropertyRegistry())
        props.set("gravity", [0.0, 0.0, -9.81])
        assert props.kind("gravity") is PropertyKind.VEC3
        with pytest.raises(PropertyKindError):
            props.set("limit:lower", "nope")

    def test_quaternion_renormalized(self):
        props = PropertySet(PropertyRegistry())
        props.set("orient", [2.0, 0.0, 0.0, 0.0], kind=PropertyKind.QUATERNION)
        assert np.allclose(props.get("orient"), [1, 0, 0, 0])

    def test_reference_from_string(self):
        props = PropertySet(PropertyRegistry())
        props.set("meshref", "meshes/a.obj", kind=PropertyKind.REFERENCE)
        assert props.get("meshref") == FileReference("meshes/a.obj")

    def test_triples_no_nesting(self):
        props = PropertySet(PropertyRegistry())
        props.set("nested_ok", [("a", PropertyKind.REAL, 1.0), ("b", PropertyKind.STRING, "x")])
        assert props.kind("nested_ok") is PropertyKind.TRIPLES
        with pytest.raises(PropertyKindError):
            props.set(
                "nested_bad",
                [("inner", PropertyKind.TRIPLES, [("c", PropertyKind.REAL, 2.0)])],
            )

    def test_shared_registry_across_sets(self):
        reg = PropertyRegistry()
        first = PropertySet(reg)
        second = PropertySet(reg)
        first.set("speed", 1.0)
        with pytest.raises(PropertyKindError):
            second.set("speed", "fast")

    def test_copy_is_deep_for_arrays(self):
        props = PropertySet(PropertyRegistry())
        props.set("dir", np.array([1.0, 0.0, 0.0]))
        dup = props.copy()
        dup.get("dir")[0] = 9.0
        assert props.get("dir")[0] == 1.0

    def test_approx_equal(self):
        reg = PropertyRegistry()
        a, b = PropertySet(reg), PropertySet(reg)
        a.set("dir", np.array([1.0, 0.0, 0.0]))
        b.set("dir", np.array([1.0, 0.0, 1e-12]))
        assert a.approx_equal(b)
        b.set("dir", np.array([1.0, 0.0, 0.5]))
        assert not a.approx_equal(b)


class TestNames:
    def test_identifiers(self):
        assert is_legal_identifier("base_link")
        assert is_legal_identifier("_hidden2")
        assert not is_legal_identifier("2abc")
        assert not is_legal_identifier("a-b")
        assert not is_legal_identifier("")

    def test_duplicate_rejected(self):
        world = SceneWorld()
        world.add_body(SceneBody("base"))
        with pytest.raises(SceneBridgeError):
            world.add_body(SceneBody("base"))

    def test_unique_name_suffixing(self):
        world = SceneWorld()
        world.add_body(SceneBody("box"))
        assert world.unique_name("box") == "box_1"
        world.add_body(SceneBody("box_1"))
        assert world.unique_name("box") == "box_2"
        assert world.unique_name("world") == "world_1"

    def test_rename_updates_joint_refs(self):
        world = SceneWorld()
        base = world.add_body(SceneBody("base"))
        arm = world.add_body(SceneBody("arm"), parent=base)
        world.add_joint(
            SceneJoint("j1", "revolute", "base", "arm", axis=[0, 0, 1]), owner=base
        )
        world.rename("arm", "forearm")
        joint = world.find_by_name("j1")
        assert joint.child_body == "forearm"
        assert world.find_by_name("forearm") is arm
        assert world.find_by_name("arm") is None


class TestTraversal:
    def build(self):
        world = SceneWorld()
        a = world.add_body(SceneBody("a"))
        b = world.add_body(SceneBody("b"), parent=a)
        c = world.add_body(SceneBody("c"), parent=a)
        d = world.add_body(SceneBody("d"), parent=b)
        return world

    def test_preorder(self):
        world = self.build()
        assert [b.name for b in world.iter_bodies()] == ["a", "b", "d", "c"]

    def test_body_parents(self):
        world = self.build()
        parents = world.body_parents()
        assert parents == {"a": None, "b": "a", "c": "a", "d": "b"}

    def test_copy_independent(self):
        world = self.build()
        world.find_by_name("b").properties.set("note", "x")
        dup = world.copy()
        dup.find_by_name("b").properties.set("note", "y")
        assert world.find_by_name("b").properties.get("note") == "x"
        assert [b.name for b in dup.iter_bodies()] == [b.name for b in world.iter_bodies()]

    def test_find_joint_and_geometry(self):
        world = self.build()
        a = world.find_by_name("a")
        g = world.add_geometry(SceneGeometry("g0", "sphere", radius=0.1), owner=a)
        j = world.add_joint(SceneJoint("j0", "fixed", "a", "b"), owner=a)
        assert world.find_by_name("g0") is g
        assert world.find_by_name("j0") is j


class TestMeshData:
    def test_closed_manifold(self):
        mesh = box_mesh(np.array([1.0, 1.0, 1.0]))
        assert mesh.is_closed_manifold
        assert mesh.boundary_edge_count() == 0

    def test_open_mesh_detected(self):
        mesh = box_mesh(np.array([1.0, 1.0, 1.0]))
        open_mesh = MeshData(mesh.vertices, mesh.triangles[:-1])
        assert not open_mesh.is_closed_manifold
        assert open_mesh.boundary_edge_count() == 3

    def test_validate_flags_bad_index(self):
        mesh = MeshData(np.zeros((3, 3)), [[0, 1, 5]])
        assert any("index" in i for i in mesh.validate())

    def test_validate_flags_degenerate(self):
        mesh = MeshData([[0, 0, 0], [1, 0, 0], [2, 0, 0]], [[0, 1, 2]])
        assert any("degenerate" in i for i in mesh.validate())

    def test_transformed(self):
        mesh = box_mesh(np.array([0.5, 0.5, 0.5]))
        moved = mesh.transformed(Pose(np.array([1.0, 2.0, 3.0]), np.array([1.0, 0, 0, 0])))
        lo, hi = moved.bounds()
        assert np.allclose(lo, [0.5, 1.5, 2.5])
        assert np.allclose(hi, [1.5, 2.5, 3.5])

    def test_scaled(self):
        mesh = icosphere(1.0, 1)
        fat = mesh.transformed(scale=np.array([2.0, 1.0, 1.0]))
        lo, hi = fat.bounds()
        assert hi[0] == pytest.approx(2.0, abs=1e-9)
        assert hi[1] == pytest.approx(1.0, abs=1e-9)


class TestElementConstruction:
    def test_unknown_types_rejected(self):
        with pytest.raises(SceneBridgeError):
            SceneGeometry("g", "pyramid")
        with pytest.raises(SceneBridgeError):
            SceneJoint("j", "helical", "a", "b")

    def test_inertial_coercion(self):
        inertial = InertialProperties(2, [0, 0, 1], np.eye(3).tolist())
        assert isinstance(inertial.mass, float)
        assert inertial.center_of_mass.shape == (3,)
        assert inertial.inertia.shape == (3, 3)

    def test_inertial_approx_equal(self):
        a = InertialProperties(1.0, [0, 0, 0], np.eye(3) / 6)
        b = InertialProperties(1.0 + 1e-12, [0, 0, 0], np.eye(3) / 6)
        c = InertialProperties(1.1, [0, 0, 0], np.eye(3) / 6)
        assert a.approx_equal(b)
        assert not a.approx_equal(c)
