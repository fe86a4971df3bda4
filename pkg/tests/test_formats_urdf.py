import pathlib

import numpy as np
import pytest

from scenebridge import SceneImportError
from scenebridge.diagnostics import Diagnostics
from scenebridge.formats import ExportOptions, export_urdf, import_urdf

from oracles.worlddiff import assert_worlds_equal
from oracles.xmldiff import assert_same_structure

DATA = pathlib.Path(__file__).parent / "data"


def load(name):
    return (DATA / name).read_text()


class TestTwoLink:
    def setup_method(self):
        self.world = import_urdf(load("two_link.urdf"))

    def test_structure(self):
        assert [b.name for b in self.world.iter_bodies()] == ["base", "arm"]
        joints = list(self.world.iter_joints())
        assert len(joints) == 1
        joint = joints[0]
        assert joint.joint_type == "revolute"
        assert (joint.parent_body, joint.child_body) == ("base", "arm")

    def test_joint_placement_becomes_child_pose(self):
        arm = self.world.find_by_name("arm")
        assert np.allclose(arm.pose.translation, [0, 0, 0.1])
        # rpy (0, pi/2, 0) is a quarter turn about y
        assert arm.pose.rotation[0] == pytest.approx(np.cos(np.pi / 4), abs=1e-7)
        assert arm.pose.rotation[2] == pytest.approx(np.sin(np.pi / 4), abs=1e-7)

    def test_limits_and_axis(self):
        joint = next(self.world.iter_joints())
        assert joint.limit_lower == -1.57
        assert joint.limit_upper == 1.57
        assert np.allclose(joint.axis, [0, 1, 0])

    def test_inertial(self):
        arm = self.world.find_by_name("arm")
        assert arm.inertial.mass == 1.2
        assert np.allclose(arm.inertial.center_of_mass, [0, 0, 0.25])
        assert arm.inertial.inertia[2, 2] == 0.0015

    def test_geometry(self):
        arm = self.world.find_by_name("arm")
        cylinders = [g for g in arm.geometries if g.geom_type == "cylinder"]
        assert cylinders and cylinders[0].radius == 0.05
        assert cylinders[0].half_length == 0.25
        visual = [g for g in arm.geometries if g.visible][0]
        assert np.allclose(visual.rgba, [0.8, 0.2, 0.2, 1.0])
        assert visual.material == ["arm_paint"]

    def test_dynamics_kept_as_provenance(self):
        joint = next(self.world.iter_joints())
        assert joint.properties.get("urdf:dynamics:damping") == "0.7"
        assert joint.properties.get("urdf:dynamics:friction") == "0.1"

    def test_named_material_resolved_from_table(self):
        base = self.world.find_by_name("base")
        visual = [g for g in base.geometries if g.visible][0]
        assert np.allclose(visual.rgba, [0.6, 0.6, 0.65, 1.0])
        assert visual.material == ["steel"]


class TestArm7:
    # element counts frozen from the document itself (plain ElementTree):
    # 8 <link>, 7 <joint> (6 revolute + 1 continuous), 4 <mesh>, 8 <collision>
    def setup_method(self):
        self.world = import_urdf(load("arm7.urdf"))

    def test_counts(self):
        assert sum(1 for _ in self.world.iter_bodies()) == 8
        assert sum(1 for _ in self.world.iter_joints()) == 7

    def test_continuous_maps_to_unbounded_revolute(self):
        types = [j.joint_type for j in self.world.iter_joints()]
        assert types.count("revolute") == 7
        joint7 = self.world.find_by_name("joint7")
        assert joint7.properties.get("limits:unbounded") is True
        assert joint7.limit_lower is None and joint7.limit_upper is None

    def test_package_uris_preserved(self):
        meshes = [g for b in self.world.iter_bodies() for g in b.geometries
                  if g.geom_type == "mesh"]
        assert len(meshes) == 4
        files = {str(g.mesh_file) for g in meshes}
        assert "package://arm7_description/meshes/base.obj" in files

    def test_chain_is_serial(self):
        parents = self.world.body_parents()
        depth, name = 0, "flange"
        while parents[name] is not None:
            name, depth = parents[name], depth + 1
        assert name == "base_link" and depth == 7


class TestGripper:
    def setup_method(self):
        self.world = import_urdf(load("gripper.urdf"))

    def test_world_link_is_not_a_body(self):
        assert [b.name for b in self.world.iter_bodies()] == [
            "palm", "finger_left", "finger_right"]

    def test_fixed_mount_hangs_off_world(self):
        mount = self.world.find_by_name("mount")
        assert mount.joint_type == "fixed"
        assert mount.parent_body == "world"
        assert np.allclose(self.world.find_by_name("palm").pose.translation, [0, 0, 0.5])

    def test_prismatic_fingers(self):
        right = self.world.find_by_name("slide_right")
        assert right.joint_type == "prismatic"
        assert np.allclose(right.axis, [0, -1, 0])
        assert right.limit_upper == 0.035

    def test_mimic_rides_along(self):
        right = self.world.find_by_name("slide_right")
        assert right.properties.get("urdf:mimic:joint") == "slide_left"
        assert right.properties.get("urdf:mimic:multiplier") == "1.0"


class TestExport:
    @pytest.mark.parametrize("fixture", ["two_link.urdf", "arm7.urdf", "gripper.urdf"])
    def test_round_trip_preserves_world(self, fixture):
        first = import_urdf(load(fixture))
        second = import_urdf(export_urdf(first))
        assert_worlds_equal(first, second)

    def test_two_link_export_is_structurally_the_input(self):
        source = load("two_link.urdf")
        assert_same_structure(source, export_urdf(import_urdf(source)))

    @pytest.mark.parametrize("fixture", ["two_link.urdf", "arm7.urdf", "gripper.urdf"])
    def test_export_is_deterministic(self, fixture):
        world = import_urdf(load(fixture))
        assert export_urdf(world) == export_urdf(world)

    def test_reexport_is_byte_stable(self):
        out = export_urdf(import_urdf(load("two_link.urdf")))
        assert export_urdf(import_urdf(out)) == out

    def test_provenance_restored_character_exact(self):
        out = export_urdf(import_urdf(load("two_link.urdf")))
        assert 'damping="0.7"' in out
        assert 'friction="0.1"' in out

    def test_mimic_restored(self):
        out = export_urdf(import_urdf(load("gripper.urdf")))
        assert '<mimic joint="slide_left" multiplier="1.0"' in out

    def test_world_anchored_chain_regrows_world_link(self):
        out = export_urdf(import_urdf(load("gripper.urdf")))
        assert '<link name="world"' in out

    def test_strip_materials(self):
        world = import_urdf(load("two_link.urdf"))
        out = export_urdf(world, ExportOptions(target="urdf", strip={"materials"}))
        assert "<material" not in out


class TestImportErrors:
    def test_not_xml(self):
        with pytest.raises(SceneImportError):
            import_urdf("not xml at all")

    def test_wrong_root(self):
        with pytest.raises(SceneImportError):
            import_urdf("<sdf version='1.6'/>")

    def test_joint_referencing_unknown_link(self):
        doc = """<robot name="r"><link name="a"/>
          <joint name="j" type="fixed"><parent link="a"/><child link="ghost"/></joint>
        </robot>"""
        with pytest.raises(SceneImportError):
            import_urdf(doc)
