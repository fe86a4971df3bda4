"""Cross-cutting importer/exporter guarantees.

What must hold for every format: a same-format round trip reproduces the
world, unmapped source attributes are kept and restored character for
character, stripping never grows a document, and crossing formats conserves
bodies and joints except where a diagnostic says otherwise.
"""
import pathlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scenebridge import Pose, SceneBody, SceneGeometry, SceneJoint, SceneWorld
from scenebridge.formats import (
    STRIP_ELEMENTS,
    ExportOptions,
    collect_provenance,
    export_mjcf,
    export_urdf,
    import_mjcf,
    import_sdf,
    import_urdf,
    strip_elements,
)
from scenebridge.math3d import quat_from_axis_angle

from oracles.worlddiff import assert_worlds_equal

DATA = pathlib.Path(__file__).parent / "data"

URDF_FIXTURES = ["two_link.urdf", "arm7.urdf", "gripper.urdf"]
MJCF_FIXTURES = ["ball.mjcf", "fourbar.mjcf", "arm.mjcf"]
SDF_FIXTURES = ["gravity_world.sdf", "two_models.sdf", "ball_joint.sdf"]


def load(name):
    return (DATA / name).read_text()


def import_fixture(name):
    text = load(name)
    if name.endswith(".urdf"):
        return import_urdf(text)
    if name.endswith(".mjcf"):
        return import_mjcf(text)
    return import_sdf(text)


def counts(world):
    return (sum(1 for _ in world.iter_bodies()), sum(1 for _ in world.iter_joints()))


def random_world(seed):
    """Small random joint tree with boxes; poses stay away from gimbal trouble."""
    rng = np.random.default_rng(seed)
    world = SceneWorld()
    bodies = []
    for i in range(rng.integers(1, 6)):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        pose = Pose(rng.uniform(-2, 2, 3), quat_from_axis_angle(axis, rng.uniform(0, np.pi)))
        parent = bodies[rng.integers(0, len(bodies))] if bodies and rng.random() < 0.7 else None
        body = world.add_body(SceneBody(f"body{i}", pose=pose), parent=parent)
        world.add_geometry(
            SceneGeometry(f"geom{i}", "cube", half_extents=rng.uniform(0.05, 0.5, 3)),
            owner=body)
        if parent is not None:
            kind = ("revolute", "prismatic", "fixed")[rng.integers(0, 3)]
            joint = SceneJoint(f"joint{i}", kind, parent.name, body.name)
            if kind != "fixed":
                jaxis = rng.normal(size=3)
                joint.axis = jaxis / np.linalg.norm(jaxis)
                joint.limit_lower, joint.limit_upper = sorted(rng.uniform(-2, 2, 2))
            world.add_joint(joint, owner=parent)
        bodies.append(body)
    return world


class TestSameFormatRoundTrip:
    @pytest.mark.parametrize("fixture", URDF_FIXTURES)
    def test_urdf(self, fixture):
        world = import_fixture(fixture)
        assert_worlds_equal(world, import_urdf(export_urdf(world)))

    @pytest.mark.parametrize("fixture", MJCF_FIXTURES)
    def test_mjcf(self, fixture):
        world = import_fixture(fixture)
        assert_worlds_equal(world, import_mjcf(export_mjcf(world)))

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_random_world_through_urdf(self, seed):
        world = random_world(seed)
        assert_worlds_equal(world, import_urdf(export_urdf(world)),
                            check_inertials=False, allow_synthesized_anchors=True)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_random_world_through_mjcf(self, seed):
        world = random_world(seed)
        assert_worlds_equal(world, import_mjcf(export_mjcf(world)),
                            check_inertials=False, absolute=True)


class TestProvenance:
    def test_urdf_records_unconsumed_attributes(self):
        report = collect_provenance(import_fixture("two_link.urdf"), "urdf")
        attrs = {(element, attr) for element, attr, _ in report.unmapped_attributes}
        assert ("shoulder/dynamics", "damping") in attrs
        assert ("shoulder/dynamics", "friction") in attrs

    def test_mjcf_records_unconsumed_attributes(self):
        report = collect_provenance(import_fixture("arm.mjcf"), "mjcf")
        by_attr = {attr: value for _, attr, value in report.unmapped_attributes}
        assert by_attr.get("friction") == "1 0.005 0.0001"
        assert by_attr.get("damping") == "0.2"

    def test_wrong_format_yields_nothing(self):
        report = collect_provenance(import_fixture("two_link.urdf"), "mjcf")
        assert report.unmapped_attributes == []

    @pytest.mark.parametrize("fixture,needle", [
        ("two_link.urdf", 'damping="0.7"'),
        ("gripper.urdf", 'multiplier="1.0"'),
        ("arm.mjcf", 'friction="1 0.005 0.0001"'),
        ("ball.mjcf", 'mass="0.62"'),
    ])
    def test_restored_character_exact(self, fixture, needle):
        world = import_fixture(fixture)
        out = export_urdf(world) if fixture.endswith(".urdf") else export_mjcf(world)
        assert needle in out


class TestStrip:
    @pytest.mark.parametrize("fixture", URDF_FIXTURES + MJCF_FIXTURES + SDF_FIXTURES)
    @pytest.mark.parametrize("element", sorted(STRIP_ELEMENTS))
    def test_stripping_never_grows_output(self, fixture, element):
        world = import_fixture(fixture)
        baseline = export_mjcf(world)
        stripped = export_mjcf(strip_elements(world, {element}),
                               ExportOptions(target="mjcf", strip={element}))
        assert len(stripped) <= len(baseline)

    def test_strip_is_nondestructive(self):
        world = import_fixture("arm.mjcf")
        before = export_mjcf(world)
        strip_elements(world, set(STRIP_ELEMENTS))
        assert export_mjcf(world) == before

    def test_materials_strip_removes_them(self):
        # raw passthrough blocks stay verbatim; everything structured loses
        # its material and texture definitions and references
        world = import_fixture("arm.mjcf")
        out = export_mjcf(strip_elements(world, {"materials", "textures"}),
                          ExportOptions(target="mjcf", strip={"materials", "textures"}))
        assert "<texture" not in out
        assert "<material" not in out
        assert 'material="metal"' not in out


class TestCrossFormat:
    @pytest.mark.parametrize("fixture", URDF_FIXTURES)
    def test_urdf_to_mjcf_conserves_counts(self, fixture):
        world = import_fixture(fixture)
        back = import_mjcf(export_mjcf(world))
        assert counts(back) == counts(world)

    @pytest.mark.parametrize("fixture", SDF_FIXTURES)
    def test_sdf_to_mjcf_conserves_counts(self, fixture):
        world = import_fixture(fixture)
        back = import_mjcf(export_mjcf(world))
        assert counts(back) == counts(world)

    def test_mjcf_loop_to_urdf_drops_with_diagnostic(self):
        from scenebridge.diagnostics import Diagnostics
        world = import_fixture("fourbar.mjcf")
        diags = Diagnostics()
        back = import_urdf(export_urdf(world, diagnostics=diags))
        body_count, joint_count = counts(back)
        assert body_count == counts(world)[0]
        assert joint_count == counts(world)[1] - 1  # the loop closure
        dropped = [e for e in diags.entries if e.code == "urdf-loop-joint-dropped"]
        assert len(dropped) == 1

    def test_colliding_source_names_disambiguated(self):
        doc = """<sdf version="1.6"><world name="w">
          <model name="m1"><link name="part"/></model>
          <model name="m2"><link name="part"/></model>
        </sdf-close></world></sdf>""".replace("</sdf-close>", "")
        world = import_sdf(doc)
        out = export_mjcf(world)
        back = import_mjcf(out)
        assert counts(back)[0] == 2
        names = [b.name for b in back.iter_bodies()]
        assert len(set(names)) == 2
