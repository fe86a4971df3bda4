import math
import pathlib

import numpy as np
import pytest

from scenebridge import SceneImportError
from scenebridge.diagnostics import Diagnostics
from scenebridge.formats import ExportOptions, export_mjcf, import_mjcf, ImportOptions

from oracles.worlddiff import assert_worlds_equal

DATA = pathlib.Path(__file__).parent / "data"


def load(name):
    return (DATA / name).read_text()


class TestBall:
    def setup_method(self):
        self.diags = Diagnostics()
        self.world = import_mjcf(load("ball.mjcf"), diagnostics=self.diags)

    def test_free_body_keeps_marker_not_joint(self):
        ball = self.world.find_by_name("ball")
        assert ball.properties.get("mjcf:freejoint") is True
        assert list(self.world.iter_joints()) == []

    def test_sphere(self):
        shell = self.world.find_by_name("shell")
        assert shell.geom_type == "sphere"
        assert shell.radius == 0.11
        assert np.allclose(shell.rgba, [0.9, 0.4, 0.1, 1.0])

    def test_plane_rides_along_with_warning(self):
        codes = [e.code for e in self.diags.entries]
        assert "mjcf-geom-unsupported" in codes
        assert self.world.find_by_name("ground") is None

    def test_geom_mass_is_provenance(self):
        shell = self.world.find_by_name("shell")
        assert shell.properties.get("mjcf::mass") == "0.62"
        assert 'mass="0.62"' in export_mjcf(self.world)

    def test_plane_and_option_restored(self):
        out = export_mjcf(self.world)
        assert '<geom name="ground" type="plane" size="5 5 0.1"' in out
        assert 'timestep="0.002"' in out


class TestFourbar:
    def setup_method(self):
        self.world = import_mjcf(load("fourbar.mjcf"))

    def test_three_tree_joints_plus_one_loop(self):
        joints = list(self.world.iter_joints())
        assert [j.joint_type for j in joints].count("revolute") == 3
        loops = [j for j in joints if j.name == "closure"]
        assert len(loops) == 1
        assert loops[0].joint_type == "spherical"
        assert loops[0].parent_body == "world"
        assert loops[0].child_body == "rocker"
        assert np.allclose(loops[0].offset.translation, [0, 0, -0.3])

    def test_degree_ranges_converted(self):
        drive = self.world.find_by_name("drive")
        assert drive.limit_lower == pytest.approx(-math.pi)
        assert drive.limit_upper == pytest.approx(math.pi)

    def test_fromto_capsule_reconstructed(self):
        # fromto (0,0,0)-(0.2,0,0): midpoint x=0.1, half length 0.1
        rod = self.world.find_by_name("crank_rod")
        assert rod.geom_type == "mesh"
        assert rod.properties.get("mjcf:geomType") == "capsule"
        assert rod.properties.get("mjcf:capsuleRadius") == 0.02
        assert rod.properties.get("mjcf:capsuleHalfLength") == pytest.approx(0.1)
        assert np.allclose(rod.pose.translation, [0.1, 0, 0])

    def test_connect_survives_round_trip(self):
        out = export_mjcf(self.world)
        assert '<connect name="closure" body1="rocker" anchor="0 0 -0.3"' in out
        assert_worlds_equal(self.world, import_mjcf(out))


class TestArmDefaults:
    # rgba expectations resolved by hand from the default tree:
    #   main:      rgba 0.5 0.5 0.5 1, friction 1 0.005 0.0001
    #   viz:       contype/conaffinity 0, rgba 0.9 0.9 0.2 0.5
    #   arm_link:  rgba 0.2 0.4 0.9 1
    def setup_method(self):
        self.world = import_mjcf(load("arm.mjcf"))
        self.geoms = {g.name: g for b in self.world.iter_bodies() for g in b.geometries}

    def test_class_rgba_beats_main(self):
        assert np.allclose(self.geoms["shoulder_col"].rgba, [0.2, 0.4, 0.9, 1.0])
        assert np.allclose(self.geoms["upper_rod"].rgba, [0.2, 0.4, 0.9, 1.0])

    def test_main_rgba_used_when_class_silent(self):
        assert np.allclose(self.geoms["palm_box"].rgba, [0.5, 0.5, 0.5, 1.0])
        assert np.allclose(self.geoms["sensor_bump"].rgba, [0.5, 0.5, 0.5, 1.0])

    def test_viz_class_disables_collision(self):
        viz = self.geoms["shoulder_viz"]
        assert np.allclose(viz.rgba, [0.9, 0.9, 0.2, 0.5])
        assert not viz.collidable
        assert viz.visible

    def test_inherited_friction_rides_along(self):
        assert self.geoms["palm_box"].properties.get("mjcf::friction") == "1 0.005 0.0001"

    def test_joint_damping_rides_along(self):
        pan = self.world.find_by_name("pan")
        assert pan.properties.get("mjcf::damping") == "0.2"


class TestArmConversions:
    def setup_method(self):
        self.world = import_mjcf(load("arm.mjcf"))

    def test_degree_euler_to_quat(self):
        shoulder = self.world.find_by_name("shoulder")
        half = math.radians(45.0) / 2
        assert np.allclose(shoulder.pose.rotation, [math.cos(half), 0, 0, math.sin(half)])

    def test_degree_axisangle(self):
        palm = self.world.find_by_name("palm")
        half = math.radians(90.0) / 2
        assert np.allclose(palm.pose.rotation, [math.cos(half), math.sin(half), 0, 0])

    def test_degree_joint_range(self):
        pan = self.world.find_by_name("pan")
        assert pan.limit_lower == pytest.approx(-math.radians(170))
        assert pan.limit_upper == pytest.approx(math.radians(170))

    def test_inertial_quat_rotates_diag(self):
        # diag (0.02, 0.02, 0.004) turned 90 deg about y swaps x and z
        upper = self.world.find_by_name("upper")
        assert np.allclose(np.diag(upper.inertial.inertia), [0.004, 0.02, 0.02])

    def test_ball_joint_is_spherical(self):
        assert self.world.find_by_name("roll").joint_type == "spherical"

    def test_ellipsoid_marker(self):
        bump = {g.name: g for b in self.world.iter_bodies() for g in b.geometries}["sensor_bump"]
        assert bump.geom_type == "sphere"
        assert bump.properties.get("mjcf:geomType") == "ellipsoid"
        assert np.allclose(bump.scale, [0.02, 0.03, 0.01])

    def test_material_name_kept(self):
        box = {g.name: g for b in self.world.iter_bodies() for g in b.geometries}["palm_box"]
        assert box.material == ["metal"]


class TestArmExport:
    def setup_method(self):
        self.world = import_mjcf(load("arm.mjcf"))
        self.out = export_mjcf(self.world)

    def test_round_trip(self):
        assert_worlds_equal(self.world, import_mjcf(self.out))

    def test_asset_and_actuator_sections_verbatim(self):
        assert '<texture name="grid" type="2d" builtin="checker"' in self.out
        assert '<material name="metal" rgba="0.75 0.75 0.8 1" shininess="0.8"' in self.out
        assert '<motor name="pan_motor" joint="pan" gear="40"' in self.out

    def test_capsule_emitted_natively(self):
        assert 'type="capsule" size="0.035 0.15"' in self.out

    def test_ellipsoid_emitted_natively(self):
        assert 'type="ellipsoid" size="0.02 0.03 0.01"' in self.out

    def test_angles_emitted_in_radians(self):
        assert '<compiler angle="radian"' in self.out
        assert f'range="-{math.radians(170)!r} {math.radians(170)!r}"' in self.out

    def test_byte_stable(self):
        assert export_mjcf(import_mjcf(self.out)) == self.out

    @pytest.mark.parametrize("fixture", ["ball.mjcf", "fourbar.mjcf", "arm.mjcf"])
    def test_deterministic(self, fixture):
        world = import_mjcf(load(fixture))
        assert export_mjcf(world) == export_mjcf(world)


class TestIncludes:
    def test_include_spliced(self, tmp_path):
        (tmp_path / "chunk.xml").write_text(
            '<mujocoinclude><body name="extra"><geom type="sphere" size="0.1"/>'
            "</body></mujocoinclude>")
        doc = """<mujoco model="m"><worldbody>
            <include file="chunk.xml"/>
        </worldbody></mujoco>"""
        world = import_mjcf(doc, ImportOptions(mesh_root=tmp_path))
        assert world.find_by_name("extra") is not None

    def test_include_without_root_fails(self):
        doc = '<mujoco><worldbody><include file="x.xml"/></worldbody></mujoco>'
        with pytest.raises(SceneImportError):
            import_mjcf(doc)

    def test_include_cycle_fails(self, tmp_path):
        (tmp_path / "self.xml").write_text(
            '<mujocoinclude><include file="self.xml"/></mujocoinclude>')
        doc = '<mujoco><worldbody><include file="self.xml"/></worldbody></mujoco>'
        with pytest.raises(SceneImportError):
            import_mjcf(doc, ImportOptions(mesh_root=tmp_path))


class TestImportErrors:
    def test_global_coordinates_rejected(self):
        doc = '<mujoco><compiler coordinate="global"/><worldbody/></mujoco>'
        with pytest.raises(SceneImportError):
            import_mjcf(doc)

    def test_unknown_mesh_asset(self):
        doc = """<mujoco><worldbody>
            <body name="b"><geom type="mesh" mesh="ghost"/></body>
        </worldbody></mujoco>"""
        with pytest.raises(SceneImportError):
            import_mjcf(doc)

    def test_zero_joint_axis(self):
        doc = """<mujoco><worldbody>
            <body name="b"><joint type="hinge" axis="0 0 0"/>
            <geom type="sphere" size="0.1"/></body>
        </worldbody></mujoco>"""
        with pytest.raises(SceneImportError):
            import_mjcf(doc)

    def test_mixed_case_eulerseq_rejected(self):
        doc = '<mujoco><compiler eulerseq="xYz"/><worldbody/></mujoco>'
        with pytest.raises(SceneImportError):
            import_mjcf(doc)


class TestLoopStrategies:
    def test_fail_strategy_refuses_loops(self):
        world = import_mjcf(load("fourbar.mjcf"))
        from scenebridge.errors import SceneExportError
        with pytest.raises(SceneExportError):
            export_mjcf(world, ExportOptions(target="mjcf", loop_strategy="fail"))

    def test_fixed_tree_joint_becomes_weld(self):
        doc = """<robot name="r">
          <link name="a"/><link name="b"/>
          <joint name="j" type="fixed">
            <origin xyz="0 0 1"/><parent link="a"/><child link="b"/>
          </joint>
        </robot>"""
        from scenebridge.formats import import_urdf
        out = export_mjcf(import_urdf(doc))
        assert "<weld" in out
        assert 'body1="b"' in out
