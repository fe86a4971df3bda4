"""URDF import and export.

URDF has no body poses of its own: link frames are placed by joint origins.
Import therefore nests each joint's child link under its parent with the
origin as the child body pose; export recomputes origins from world-frame
poses after restructuring around the joint tree.  URDF joint frames always
coincide with child link frames, so nonzero joint offsets are folded into
the child frame before export.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from ..core.model import (
    WORLD_BODY_NAME,
    InertialProperties,
    SceneBody,
    SceneGeometry,
    SceneJoint,
    SceneWorld,
)
from ..core.properties import FileReference, PropertyKind
from ..diagnostics import Diagnostics
from ..dynamics.refine import RefineOptions, refine_dynamics
from ..errors import SceneExportError, SceneImportError
from ..math3d import Pose, quat_to_matrix
from .joint_tree import absolute_poses, fold_offset_into_child, partition_joints
from .objio import directory_mesh_loader, resolve_mesh_path
from .options import ExportOptions, ImportOptions
from .strip import strip_elements
from .xmlcommon import (
    ExportNames,
    floats,
    fmt_float,
    fmt_floats,
    imported_name,
    mesh_reference,
    note_source_name,
    origin_attrs,
    parse_xml,
    pose_from_origin,
    record_extra_attrs,
    record_extra_elements,
    restore_extra_elements,
    restore_unmapped,
    serialize,
)

_JOINT_TYPE_MAP = {
    "fixed": "fixed",
    "revolute": "revolute",
    "prismatic": "prismatic",
    "continuous": "revolute",
}

_LINK_SECTIONS = ("inertial", "visual", "collision")
_JOINT_SECTIONS = ("origin", "parent", "child", "axis", "limit",
                   "dynamics", "calibration", "mimic", "safety_controller")


# ---------------------------------------------------------------------------
# import

def import_urdf(document: str, options: ImportOptions | None = None,
                diagnostics: Diagnostics | None = None) -> SceneWorld:
    options = options if options is not None else ImportOptions()
    diags = diagnostics if diagnostics is not None else Diagnostics()
    robot = parse_xml(document, "robot", "URDF")

    world = SceneWorld()
    props = world.world_properties
    props.set("source:format", "urdf", PropertyKind.STRING)
    if robot.get("name") is not None:
        props.set("urdf:robotName", robot.get("name"), PropertyKind.STRING)
    record_extra_attrs(props, "urdf", "", robot, {"name"})

    material_defs = _collect_material_defs(robot, props)
    record_extra_elements(
        props, "urdf:extraElements",
        [el for el in robot if el.tag not in ("link", "joint", "material")],
    )

    bodies: dict[str, SceneBody | None] = {}
    for link in robot.findall("link"):
        raw = link.get("name")
        if raw is None:
            raise SceneImportError("URDF link without a name")
        if raw == WORLD_BODY_NAME and len(link) == 0 and set(link.attrib) == {"name"}:
            bodies[raw] = None  # anchor only, not a body
            continue
        body = SceneBody(imported_name(world, raw))
        note_source_name(body, raw)
        world.add_body(body)
        if raw in bodies:
            diags.warning("urdf-duplicate-link", f"duplicate link name {raw!r}", link=raw)
        else:
            bodies[raw] = body
        record_extra_attrs(body.properties, "urdf", "", link, {"name"})
        body.inertial = _parse_inertial(link, body)
        for kind in ("visual", "collision"):
            for element in link.findall(kind):
                _import_geometry(world, body, element, kind, material_defs, options)
        record_extra_elements(
            body.properties, "urdf:extraElements",
            [el for el in link if el.tag not in _LINK_SECTIONS],
        )

    placed: set[str] = set()
    for joint_el in robot.findall("joint"):
        _import_joint(world, joint_el, bodies, placed, diags)

    if options.fix_missing_inertials:
        refine_dynamics(
            world,
            RefineOptions(default_density=options.default_density,
                          mesh_loader=directory_mesh_loader(options.mesh_root)),
            diags,
        )
    return world


def _collect_material_defs(robot: ET.Element, props) -> dict:
    defs = {}
    elements = robot.findall("material")
    for mat in elements:
        name = mat.get("name")
        color = mat.find("color")
        if name and color is not None and color.get("rgba"):
            defs[name] = floats(color.get("rgba"), 4, "material rgba")
    record_extra_elements(props, "urdf:materialDefs", elements)
    return defs


def _parse_inertial(link: ET.Element, body: SceneBody) -> InertialProperties | None:
    el = link.find("inertial")
    if el is None:
        return None
    origin = pose_from_origin(el.find("origin"))
    mass_el = el.find("mass")
    mass = float(mass_el.get("value", "0")) if mass_el is not None else 0.0
    tensor = np.zeros((3, 3))
    inertia_el = el.find("inertia")
    if inertia_el is not None:
        ixx = float(inertia_el.get("ixx", "0"))
        iyy = float(inertia_el.get("iyy", "0"))
        izz = float(inertia_el.get("izz", "0"))
        ixy = float(inertia_el.get("ixy", "0"))
        ixz = float(inertia_el.get("ixz", "0"))
        iyz = float(inertia_el.get("iyz", "0"))
        tensor = np.array([[ixx, ixy, ixz], [ixy, iyy, iyz], [ixz, iyz, izz]])
    # URDF expresses the tensor in the inertial frame; the model wants body axes
    rot = quat_to_matrix(origin.rotation)
    record_extra_attrs(body.properties, "urdf", "inertial", el, set())
    if mass_el is not None:
        record_extra_attrs(body.properties, "urdf", "inertial.mass", mass_el, {"value"})
    if inertia_el is not None:
        record_extra_attrs(body.properties, "urdf", "inertial.inertia", inertia_el,
                           {"ixx", "iyy", "izz", "ixy", "ixz", "iyz"})
    return InertialProperties(mass, origin.translation, rot @ tensor @ rot.T)


def _import_geometry(world: SceneWorld, body: SceneBody, element: ET.Element,
                     kind: str, material_defs: dict, options: ImportOptions):
    raw = element.get("name")
    auto = raw is None
    if auto:
        raw = f"{body.name}_{kind}"
    shape_el, shape_kwargs = _parse_shape(element, options)

    geometry = SceneGeometry(
        imported_name(world, raw),
        pose=pose_from_origin(element.find("origin")),
        visible=kind == "visual",
        collidable=kind == "collision",
        **shape_kwargs,
    )
    note_source_name(geometry, raw)
    if auto:
        geometry.properties.set("source:autoName", True, PropertyKind.BOOLEAN)
    world.add_geometry(geometry, body)

    if kind == "visual":
        _apply_material(geometry, element.find("material"), material_defs)
    record_extra_attrs(geometry.properties, "urdf", "", element, {"name"})
    consumed = {
        "box": {"size"}, "sphere": {"radius"},
        "cylinder": {"radius", "length"}, "mesh": {"filename", "scale"},
    }[shape_el.tag]
    record_extra_attrs(geometry.properties, "urdf", f"geometry.{shape_el.tag}", shape_el, consumed)
    origin_el = element.find("origin")
    if origin_el is not None:
        record_extra_attrs(geometry.properties, "urdf", "origin", origin_el, {"xyz", "rpy"})
    mat_el = element.find("material")
    if mat_el is not None:
        record_extra_attrs(geometry.properties, "urdf", "material", mat_el, {"name"})
        for tag, used in (("color", {"rgba"}), ("texture", {"filename"})):
            sub = mat_el.find(tag)
            if sub is not None:
                record_extra_attrs(geometry.properties, "urdf", f"material.{tag}", sub, used)
    record_extra_elements(
        geometry.properties, "urdf:extraElements",
        [el for el in element if el.tag not in ("origin", "geometry", "material")],
    )
    return geometry


def _parse_shape(element: ET.Element, options: ImportOptions) -> tuple[ET.Element, dict]:
    container = element.find("geometry")
    if container is None:
        raise SceneImportError("visual/collision without a geometry element")
    box = container.find("box")
    if box is not None:
        return box, {"geom_type": "cube",
                     "half_extents": floats(box.get("size"), 3, "box size") / 2.0}
    sphere = container.find("sphere")
    if sphere is not None:
        return sphere, {"geom_type": "sphere", "radius": float(sphere.get("radius"))}
    cylinder = container.find("cylinder")
    if cylinder is not None:
        return cylinder, {"geom_type": "cylinder",
                          "radius": float(cylinder.get("radius")),
                          "half_length": float(cylinder.get("length")) / 2.0}
    mesh = container.find("mesh")
    if mesh is not None:
        filename = mesh.get("filename")
        if not filename:
            raise SceneImportError("mesh without a filename")
        if options.mesh_root is not None:
            resolved = resolve_mesh_path(filename, Path(options.mesh_root))
            if not resolved.exists():
                raise SceneImportError(f"unresolvable mesh path {filename!r} -> {resolved}")
        kwargs = {"geom_type": "mesh", "mesh_file": FileReference(filename)}
        if mesh.get("scale"):
            kwargs["scale"] = floats(mesh.get("scale"), 3, "mesh scale")
        return mesh, kwargs
    raise SceneImportError(
        f"geometry must hold box, sphere, cylinder, or mesh, found {[c.tag for c in container]}"
    )


def _apply_material(geometry: SceneGeometry, mat: ET.Element | None, material_defs: dict):
    if mat is None:
        return
    name = mat.get("name")
    color = mat.find("color")
    if color is not None and color.get("rgba"):
        geometry.rgba = floats(color.get("rgba"), 4, "material rgba")
    elif name in material_defs:
        geometry.rgba = material_defs[name]
    if name:
        geometry.material = [name]
    texture = mat.find("texture")
    if texture is not None and texture.get("filename"):
        geometry.properties.set("urdf:texture", FileReference(texture.get("filename")),
                                PropertyKind.REFERENCE)


def _import_joint(world: SceneWorld, joint_el: ET.Element,
                  bodies: dict, placed: set, diags: Diagnostics):
    raw = joint_el.get("name")
    source_type = joint_el.get("type")
    if raw is None or source_type is None:
        raise SceneImportError("joint without a name or type")
    if source_type not in _JOINT_TYPE_MAP:
        raise SceneImportError(f"unknown joint type {source_type!r}")

    parent_el, child_el = joint_el.find("parent"), joint_el.find("child")
    if parent_el is None or child_el is None or not parent_el.get("link") or not child_el.get("link"):
        raise SceneImportError(f"joint {raw!r} is missing its parent or child link")
    parent_raw, child_raw = parent_el.get("link"), child_el.get("link")
    for link_name in (parent_raw, child_raw):
        if link_name not in bodies:
            raise SceneImportError(f"joint {raw!r} references undefined link {link_name!r}")
    if bodies[child_raw] is None:
        raise SceneImportError(f"joint {raw!r} uses the world anchor as its child")
    child = bodies[child_raw]
    parent = bodies[parent_raw]

    origin = pose_from_origin(joint_el.find("origin"))
    joint_type = _JOINT_TYPE_MAP[source_type]
    axis = None
    if source_type in ("revolute", "prismatic", "continuous"):
        axis_el = joint_el.find("axis")
        axis = floats(axis_el.get("xyz"), 3, "joint axis") if axis_el is not None else np.array([1.0, 0.0, 0.0])
        norm = np.linalg.norm(axis)
        if norm == 0.0:
            raise SceneImportError(f"joint {raw!r} has a zero axis")
        axis = axis / norm
    lower = upper = None
    limit_el = joint_el.find("limit")
    if limit_el is not None and source_type in ("revolute", "prismatic"):
        if limit_el.get("lower") is not None:
            lower = float(limit_el.get("lower"))
        if limit_el.get("upper") is not None:
            upper = float(limit_el.get("upper"))

    joint = SceneJoint(
        imported_name(world, raw), joint_type,
        parent_body=WORLD_BODY_NAME if parent is None else parent.name,
        child_body=child.name,
        axis=axis, limit_lower=lower, limit_upper=upper,
    )
    note_source_name(joint, raw)
    if source_type == "continuous":
        joint.properties.set("limits:unbounded", True, PropertyKind.BOOLEAN)

    record_extra_attrs(joint.properties, "urdf", "", joint_el, {"name", "type"})
    for tag in _JOINT_SECTIONS:
        el = joint_el.find(tag)
        if el is None:
            continue
        consumed = {
            "origin": {"xyz", "rpy"},
            "parent": {"link"},
            "child": {"link"},
            "axis": {"xyz"} if axis is not None else set(),
            "limit": {"lower", "upper"} if source_type in ("revolute", "prismatic") else set(),
        }.get(tag, set())
        record_extra_attrs(joint.properties, "urdf", tag, el, consumed)
    record_extra_elements(
        joint.properties, "urdf:extraElements",
        [el for el in joint_el if el.tag not in _JOINT_SECTIONS],
    )

    # the joint origin is the child link frame: nest the child under the parent
    if child.name in placed:
        diags.warning("urdf-multiple-parents",
                      f"link {child_raw!r} already has a parent; joint {raw!r} kept as a loop joint",
                      joint=raw)
    else:
        placed.add(child.name)
        child.pose = origin
        if parent is not None:
            world.root_bodies.remove(child)
            parent.children.append(child)
    world.add_joint(joint, child if parent is None else parent)


# ---------------------------------------------------------------------------
# export

def export_urdf(world: SceneWorld, options: ExportOptions | None = None,
                diagnostics: Diagnostics | None = None) -> str:
    options = options if options is not None else ExportOptions(target="urdf")
    diags = diagnostics if diagnostics is not None else Diagnostics()
    scene = strip_elements(world, options.strip)

    tree_joints, loop_joints = partition_joints(scene)
    if loop_joints:
        if options.loop_strategy == "fail":
            raise SceneExportError(
                "world has loop kinematics, which URDF cannot express: "
                + ", ".join(j.name for j in loop_joints)
            )
        for joint in loop_joints:
            diags.warning("urdf-loop-joint-dropped",
                          f"URDF cannot express loop joint {joint.name!r}", joint=joint.name)

    emitted: list[SceneJoint] = []
    claimed_children: set[str] = set()
    for joint in tree_joints:
        if joint.joint_type == "spherical":
            diags.warning("urdf-spherical-dropped",
                          f"URDF has no spherical joint, dropping {joint.name!r}", joint=joint.name)
            continue
        if joint.child_body in claimed_children:
            diags.warning("urdf-serial-joint-dropped",
                          f"link {joint.child_body!r} already has a parent joint, dropping {joint.name!r}",
                          joint=joint.name)
            continue
        claimed_children.add(joint.child_body)
        fold_offset_into_child(scene, joint)
        emitted.append(joint)

    poses = absolute_poses(scene)
    names = ExportNames(scene)
    robot = ET.Element("robot")
    robot.set("name", scene.world_properties.get("urdf:robotName", "scene"))
    restore_unmapped(scene.world_properties, "urdf", robot)
    if "materials" not in options.strip:
        restore_extra_elements(scene.world_properties, "urdf:materialDefs", robot)
    # colors the robot-level table already defines stay bare references
    material_table = {}
    for mat in robot.findall("material"):
        color = mat.find("color")
        if mat.get("name") and color is not None and color.get("rgba"):
            material_table[mat.get("name")] = floats(color.get("rgba"), 4, "material rgba")

    needs_world_link = any(j.parent_body == WORLD_BODY_NAME for j in emitted)
    synthesized: list[ET.Element] = []
    parents = scene.body_parents()
    for body in scene.iter_bodies():
        if body.name in claimed_children:
            continue
        # not placed by any joint: anchor it so its pose survives the format
        nesting_parent = parents.get(body.name)
        if nesting_parent is None and poses[body.name].is_identity(1e-12):
            continue  # a plain root link carries no pose
        anchor = nesting_parent if nesting_parent is not None else WORLD_BODY_NAME
        needs_world_link = needs_world_link or anchor == WORLD_BODY_NAME
        claimed_children.add(body.name)
        synthesized.append(_joint_element(
            scene, _synthesized_joint(scene, body.name, anchor), poses, names, options, diags))
        diags.info("urdf-joint-synthesized",
                   f"fixed joint added to place link {body.name!r}", link=body.name)

    if needs_world_link:
        ET.SubElement(robot, "link", {"name": WORLD_BODY_NAME})
    for body in scene.iter_bodies():
        robot.append(_link_element(scene, body, names, options, diags, material_table))
    for joint in emitted:
        robot.append(_joint_element(scene, joint, poses, names, options, diags))
    robot.extend(synthesized)
    restore_extra_elements(scene.world_properties, "urdf:extraElements", robot)
    return serialize(robot)


def _synthesized_joint(scene: SceneWorld, child: str, parent: str) -> SceneJoint:
    base = f"{child}_attachment"
    name, n = base, 1
    while name in scene.name_index:
        name, n = f"{base}_{n}", n + 1
    return SceneJoint(name, "fixed", parent_body=parent, child_body=child)


def _link_element(scene: SceneWorld, body: SceneBody, names: ExportNames,
                  options: ExportOptions, diags: Diagnostics,
                  material_table: dict | None = None) -> ET.Element:
    link = ET.Element("link", {"name": names.bodies[body.name]})
    if body.inertial is not None:
        inertial = ET.SubElement(link, "inertial")
        com = body.inertial.center_of_mass
        if np.any(com != 0.0):
            ET.SubElement(inertial, "origin", {"xyz": fmt_floats(com)})
        ET.SubElement(inertial, "mass", {"value": fmt_float(body.inertial.mass)})
        tensor = body.inertial.inertia
        ET.SubElement(inertial, "inertia", {
            "ixx": fmt_float(tensor[0, 0]), "ixy": fmt_float(tensor[0, 1]),
            "ixz": fmt_float(tensor[0, 2]), "iyy": fmt_float(tensor[1, 1]),
            "iyz": fmt_float(tensor[1, 2]), "izz": fmt_float(tensor[2, 2]),
        })
    for geom in body.geometries:
        roles = [role for role, wanted in (("visual", geom.visible), ("collision", geom.collidable)) if wanted]
        if not roles:
            diags.info("urdf-geometry-skipped",
                       f"geometry {geom.name!r} is neither visible nor collidable", geometry=geom.name)
        if len(roles) == 2:
            diags.info("urdf-geometry-split",
                       f"geometry {geom.name!r} emitted as both visual and collision", geometry=geom.name)
        for role in roles:
            link.append(_geometry_element(geom, role, names, options, diags, material_table))
    restore_unmapped(body.properties, "urdf", link)
    restore_extra_elements(body.properties, "urdf:extraElements", link)
    return link


def _geometry_element(geom: SceneGeometry, role: str, names: ExportNames,
                      options: ExportOptions, diags: Diagnostics,
                      material_table: dict | None = None) -> ET.Element:
    element = ET.Element(role)
    if not geom.properties.get("source:autoName", False):
        element.set("name", names.geoms[geom.name])
    if not geom.pose.is_identity(1e-12):
        ET.SubElement(element, "origin", origin_attrs(geom.pose))
    container = ET.SubElement(element, "geometry")
    if geom.geom_type == "cube":
        ET.SubElement(container, "box", {"size": fmt_floats(geom.half_extents * 2.0)})
    elif geom.geom_type == "sphere":
        ET.SubElement(container, "sphere", {"radius": fmt_float(geom.radius)})
    elif geom.geom_type == "cylinder":
        ET.SubElement(container, "cylinder", {"radius": fmt_float(geom.radius),
                                              "length": fmt_float(geom.half_length * 2.0)})
    else:
        attrs = {"filename": mesh_reference(geom, options, diags)}
        if not np.allclose(geom.scale, 1.0):
            attrs["scale"] = fmt_floats(geom.scale)
        ET.SubElement(container, "mesh", attrs)
    if role == "visual" and "materials" not in options.strip:
        _material_element(element, geom, names, material_table or {})
    restore_unmapped(geom.properties, "urdf", element)
    restore_extra_elements(geom.properties, "urdf:extraElements", element)
    return element


def _material_element(parent: ET.Element, geom: SceneGeometry, names: ExportNames,
                      material_table: dict):
    texture = geom.properties.get("urdf:texture")
    if geom.rgba is None and not geom.material and texture is None:
        return
    if (geom.material and texture is None and geom.rgba is not None
            and np.array_equal(material_table.get(geom.material[0], ()), geom.rgba)):
        ET.SubElement(parent, "material", {"name": geom.material[0]})
        return
    material = ET.SubElement(parent, "material")
    material.set("name", geom.material[0] if geom.material
                 else f"{names.geoms[geom.name]}_material")
    if geom.rgba is not None:
        ET.SubElement(material, "color", {"rgba": fmt_floats(geom.rgba)})
    if texture is not None:
        ET.SubElement(material, "texture", {"filename": str(texture)})


def _joint_element(scene: SceneWorld, joint: SceneJoint, poses: dict,
                   names: ExportNames, options: ExportOptions,
                   diags: Diagnostics) -> ET.Element:
    unbounded = bool(joint.properties.get("limits:unbounded", False))
    if joint.joint_type == "revolute" and unbounded:
        urdf_type = "continuous"
    else:
        urdf_type = joint.joint_type
    element = ET.Element("joint", {"name": names.joints.get(joint.name, joint.name),
                                   "type": urdf_type})

    parent_name = _link_reference(names, joint.parent_body)
    child_name = _link_reference(names, joint.child_body)
    origin = poses[joint.parent_body].inverse().compose(poses[joint.child_body])
    attrs = origin_attrs(origin)
    if attrs:
        ET.SubElement(element, "origin", attrs)
    ET.SubElement(element, "parent", {"link": parent_name})
    ET.SubElement(element, "child", {"link": child_name})
    if joint.axis is not None and urdf_type in ("revolute", "prismatic", "continuous"):
        ET.SubElement(element, "axis", {"xyz": fmt_floats(joint.axis)})
    if urdf_type in ("revolute", "prismatic"):
        limit = ET.SubElement(element, "limit")
        if joint.limit_lower is not None:
            limit.set("lower", fmt_float(joint.limit_lower))
        if joint.limit_upper is not None:
            limit.set("upper", fmt_float(joint.limit_upper))
    restore_unmapped(joint.properties, "urdf", element)
    restore_extra_elements(joint.properties, "urdf:extraElements", element)
    limit = element.find("limit")
    if urdf_type in ("revolute", "prismatic") and limit is not None:
        # the schema wants effort and velocity even when the source had none
        if limit.get("effort") is None:
            limit.set("effort", "0")
        if limit.get("velocity") is None:
            limit.set("velocity", "0")
    return element


def _link_reference(names: ExportNames, body_name: str) -> str:
    if body_name == WORLD_BODY_NAME:
        return WORLD_BODY_NAME
    return names.bodies[body_name]
