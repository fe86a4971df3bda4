import json
import math
import pathlib

import numpy as np
import pytest

from scenebridge import SceneImportError
from scenebridge.formats import ImportOptions, import_procthor
from scenebridge.math3d import quat_to_matrix

DATA = pathlib.Path(__file__).parent / "data"

# swapping the y and z axes maps Unity's left-handed y-up frame to z-up
# right-handed; conjugating a rotation by the swap keeps it a rotation
SWAP = np.array([[1.0, 0, 0], [0, 0, 1.0], [0, 1.0, 0]])


def unity_euler_matrix(rx, ry, rz):
    """Unity applies z, then x, then y about fixed axes (degrees)."""
    rx, ry, rz = map(math.radians, (rx, ry, rz))
    cx, sx, cy, sy, cz, sz = (math.cos(rx), math.sin(rx), math.cos(ry),
                              math.sin(ry), math.cos(rz), math.sin(rz))
    Rx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]])
    Ry = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]])
    Rz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
    return Ry @ Rx @ Rz


def unity_quat_matrix(w, x, y, z):
    n = math.sqrt(w * w + x * x + y * y + z * z)
    w, x, y, z = w / n, x / n, y / n, z / n
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def house(objects, rooms=()):
    return json.dumps({"rooms": list(rooms), "objects": objects})


def one_object(**extra):
    obj = {"id": "Box|0", "assetId": "Box_1", "position": {"x": 0, "y": 0, "z": 0}}
    obj.update(extra)
    return house([obj])


class TestCoordinateMap:
    def test_position_swaps_height_axis(self):
        world = import_procthor(one_object(position={"x": 1.0, "y": 0.5, "z": 2.0}))
        body = world.find_by_name("Box_0")
        assert np.allclose(body.pose.translation, [1.0, 2.0, 0.5])

    @pytest.mark.parametrize("angles", [(0, 90, 0), (30, 0, 0), (0, 0, 45),
                                        (10, 20, 30), (-35, 120, 75)])
    def test_euler_rotation_matches_matrix_oracle(self, angles):
        rx, ry, rz = angles
        world = import_procthor(one_object(rotation={"x": rx, "y": ry, "z": rz}))
        got = quat_to_matrix(world.find_by_name("Box_0").pose.rotation)
        expected = SWAP @ unity_euler_matrix(rx, ry, rz) @ SWAP
        assert np.allclose(got, expected, atol=1e-12)

    @pytest.mark.parametrize("q", [(1, 0, 0, 0), (0.7071, 0, 0.7071, 0),
                                   (0.9, 0.1, -0.3, 0.2)])
    def test_quaternion_rotation_matches_matrix_oracle(self, q):
        w, x, y, z = q
        world = import_procthor(one_object(rotation={"w": w, "x": x, "y": y, "z": z}))
        got = quat_to_matrix(world.find_by_name("Box_0").pose.rotation)
        expected = SWAP @ unity_quat_matrix(w, x, y, z) @ SWAP
        assert np.allclose(got, expected, atol=1e-7)

    def test_missing_rotation_is_identity(self):
        world = import_procthor(one_object())
        assert np.allclose(world.find_by_name("Box_0").pose.rotation, [1, 0, 0, 0])


class TestSmallHouse:
    def setup_method(self):
        self.world = import_procthor((DATA / "procthor_small.json").read_text())

    def test_bodies(self):
        assert [b.name for b in self.world.iter_bodies()] == [
            "room_0_floor", "room_0_walls", "Sofa_0_0", "CoffeeTable_0_1"]
        assert list(self.world.iter_joints()) == []

    def test_floor_prism(self):
        floor = self.world.find_by_name("room_0_floor")
        mesh = floor.geometries[0].mesh_data
        assert mesh.vertices[:, 2].min() == pytest.approx(-0.1)
        assert mesh.vertices[:, 2].max() == pytest.approx(0.0)
        # footprint spans the polygon; Unity z becomes scene y
        assert mesh.vertices[:, 0].max() == pytest.approx(6.0)
        assert mesh.vertices[:, 1].max() == pytest.approx(4.0)

    def test_one_wall_per_edge(self):
        walls = self.world.find_by_name("room_0_walls")
        assert len(walls.geometries) == 4
        for geom in walls.geometries:
            assert geom.mesh_data.vertices[:, 2].max() == pytest.approx(2.5)

    def test_walls_thicken_inward(self):
        walls = self.world.find_by_name("room_0_walls")
        for geom in walls.geometries:
            v = geom.mesh_data.vertices
            assert v[:, 0].min() >= -1e-9 and v[:, 0].max() <= 6.0 + 1e-9
            assert v[:, 1].min() >= -1e-9 and v[:, 1].max() <= 4.0 + 1e-9

    def test_sofa_placement(self):
        sofa = self.world.find_by_name("Sofa_0_0")
        assert np.allclose(sofa.pose.translation, [3.0, 0.6, 0.42])
        got = quat_to_matrix(sofa.pose.rotation)
        assert np.allclose(got, SWAP @ unity_euler_matrix(0, 180, 0) @ SWAP, atol=1e-12)

    def test_asset_reference(self):
        sofa = self.world.find_by_name("Sofa_0_0")
        assert sofa.properties.get("source:assetId") == "Sofa_207"
        assert str(sofa.geometries[0].mesh_file) == "Sofa_207.obj"

    def test_unmapped_keys_ride_along_as_json(self):
        sofa = self.world.find_by_name("Sofa_0_0")
        assert sofa.properties.get("procthor:kinematic") == "true"
        floor = self.world.find_by_name("room_0_floor")
        assert json.loads(floor.properties.get("procthor:floorMaterial")) == {
            "name": "WoodGrain_Brown"}
        top = self.world.world_properties.get("procthor:proceduralParameters")
        assert json.loads(top) == {"ceilingMaterial": {"name": "PureWhite"}}


class TestApartment:
    def setup_method(self):
        self.doc = json.loads((DATA / "apartment.json").read_text())
        self.world = import_procthor(
            (DATA / "apartment.json").read_text(),
            ImportOptions(mesh_root=DATA / "procthor_assets"))

    def object_ids(self):
        def walk(objs):
            for obj in objs:
                yield obj["id"]
                yield from walk(obj.get("children", []))
        return list(walk(self.doc["objects"]))

    def test_every_listed_object_becomes_a_body(self):
        ids = self.object_ids()
        assert len(ids) == 25
        expected = {i.replace("|", "_") for i in ids}
        body_names = {b.name for b in self.world.iter_bodies()}
        assert expected <= body_names
        # plus a floor and a walls body per room
        assert len(body_names) == 25 + 2 * len(self.doc["rooms"])

    def test_children_nest_under_parent(self):
        parents = self.world.body_parents()
        assert parents["Milk_0_1"] == "Fridge_0_0"
        assert parents["Egg_0_2"] == "Fridge_0_0"
        assert parents["CerealBox_0_7"] == "Cabinet_0_6"
        assert parents["Television_1_2"] == "TVStand_1_3"

    def test_child_world_position_recovered_through_nesting(self):
        # child positions are world coordinates; nesting must not move them
        fridge = self.world.find_by_name("Fridge_0_0")
        milk = self.world.find_by_name("Milk_0_1")
        placed = fridge.pose.compose(milk.pose).translation
        assert np.allclose(placed, [0.45, 3.45, 1.2], atol=1e-12)

    def test_openable_objects_get_hinges(self):
        joints = {j.name: j for j in self.world.iter_joints()}
        assert set(joints) == {"Fridge_0_0_hinge", "Cabinet_0_6_hinge"}
        hinge = joints["Fridge_0_0_hinge"]
        assert hinge.joint_type == "revolute"
        assert hinge.parent_body == "world"
        assert np.allclose(hinge.axis, [0, 0, 1])
        assert hinge.limit_lower == 0.0
        assert hinge.limit_upper == pytest.approx(math.pi / 2)
        fridge = self.world.find_by_name("Fridge_0_0")
        assert fridge.properties.get("procthor:openable") is True

    def test_meshes_resolve_against_asset_directory(self):
        chair = self.world.find_by_name("Chair_1_4")
        assert str(chair.geometries[0].mesh_file) == "Chair_227.obj"

    def test_refinement_fills_inertials_from_assets(self):
        world = import_procthor(
            (DATA / "apartment.json").read_text(),
            ImportOptions(mesh_root=DATA / "procthor_assets",
                          fix_missing_inertials=True))
        fridge = world.find_by_name("Fridge_0_0")
        assert fridge.inertial is not None and fridge.inertial.mass > 0
        assert all(b.inertial is not None for b in world.iter_bodies())


class TestRoomGeometry:
    def test_clockwise_polygon_normalized(self):
        rooms = [{"id": "r", "floorPolygon": [
            {"x": 0, "z": 0}, {"x": 0, "z": 3}, {"x": 4, "z": 3}, {"x": 4, "z": 0}]}]
        world = import_procthor(house([], rooms))
        floor = world.find_by_name("r_floor")
        mesh = floor.geometries[0].mesh_data
        assert len(mesh.vertices) == 8
        walls = world.find_by_name("r_walls")
        for geom in walls.geometries:
            v = geom.mesh_data.vertices
            assert v[:, 0].min() >= -1e-9 and v[:, 0].max() <= 4 + 1e-9
            assert v[:, 1].min() >= -1e-9 and v[:, 1].max() <= 3 + 1e-9

    def test_l_shaped_room(self):
        rooms = [{"id": "L", "floorPolygon": [
            {"x": 0, "z": 0}, {"x": 6, "z": 0}, {"x": 6, "z": 2},
            {"x": 2, "z": 2}, {"x": 2, "z": 5}, {"x": 0, "z": 5}]}]
        world = import_procthor(house([], rooms))
        walls = world.find_by_name("L_walls")
        assert len(walls.geometries) == 6


class TestErrors:
    def test_invalid_json(self):
        with pytest.raises(SceneImportError):
            import_procthor("{nope")

    def test_rooms_and_objects_required(self):
        with pytest.raises(SceneImportError):
            import_procthor(json.dumps({"objects": []}))
        with pytest.raises(SceneImportError):
            import_procthor(json.dumps({"rooms": []}))

    def test_object_requires_id_asset_position(self):
        with pytest.raises(SceneImportError):
            import_procthor(house([{"assetId": "A", "position": {"x": 0, "y": 0, "z": 0}}]))
        with pytest.raises(SceneImportError):
            import_procthor(house([{"id": "a", "position": {"x": 0, "y": 0, "z": 0}}]))
        with pytest.raises(SceneImportError):
            import_procthor(house([{"id": "a", "assetId": "A"}]))

    def test_non_finite_coordinates(self):
        with pytest.raises(SceneImportError):
            import_procthor(one_object(position={"x": float("nan"), "y": 0, "z": 0}))

    def test_missing_asset_mesh(self, tmp_path):
        with pytest.raises(SceneImportError):
            import_procthor(one_object(), ImportOptions(mesh_root=tmp_path))

    def test_degenerate_polygon(self):
        rooms = [{"id": "r", "floorPolygon": [{"x": 0, "z": 0}, {"x": 1, "z": 0}]}]
        with pytest.raises(SceneImportError):
            import_procthor(house([], rooms))
