"""SDF import.

SDF models are containers with their own frames: links inside a model are
positioned in the model frame, not relative to one another, and joints
connect links without implying nesting.  Import flattens this honestly:
every link becomes a root body carrying the composed model-and-link pose,
tagged with the model path it came from via the ``sdf:model`` property,
and joints keep the connectivity.  Exporting such a scene to MJCF
rebuilds a body tree from the joints.  There is no SDF writer; scenes
leave as XML through the URDF or MJCF exporters.
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
from ..errors import SceneImportError
from ..math3d import Pose, quat_from_rpy, quat_to_matrix
from .objio import directory_mesh_loader, resolve_mesh_path
from .options import ImportOptions
from .xmlcommon import (
    floats,
    imported_name,
    note_source_name,
    parse_xml,
    record_attr_dict,
    record_extra_elements,
)

_JOINT_TYPE_MAP = {
    "fixed": "fixed",
    "revolute": "revolute",
    "prismatic": "prismatic",
    "ball": "spherical",
}

_MAX_MODEL_DEPTH = 8


def import_sdf(document: str, options: ImportOptions | None = None,
               diagnostics: Diagnostics | None = None) -> SceneWorld:
    options = options or ImportOptions()
    diags = diagnostics if diagnostics is not None else Diagnostics()
    root = parse_xml(document, "sdf", "SDF")

    world = SceneWorld()
    props = world.world_properties
    props.set("source:format", "sdf", PropertyKind.STRING)
    record_attr_dict(props, "sdf", "", root.attrib, set())

    ctx = _Context(world, options, diags)
    worlds = root.findall("world")
    if len(worlds) > 1:
        raise SceneImportError("SDF documents may hold at most one world")
    extras = []
    if worlds:
        world_el = worlds[0]
        if world_el.get("name"):
            props.set("sdf:worldName", world_el.get("name"), PropertyKind.STRING)
        record_attr_dict(props, "sdf", "world", world_el.attrib, {"name"})
        for child in world_el:
            if child.tag == "model":
                ctx.import_model(child, "", Pose.identity(), 0)
            elif child.tag == "gravity":
                props.set("gravity", floats(child.text, 3, "gravity"), PropertyKind.VEC3)
            else:
                extras.append(child)
        extras.extend(el for el in root if el is not world_el)
    else:
        for child in root:
            if child.tag == "model":
                ctx.import_model(child, "", Pose.identity(), 0)
            else:
                extras.append(child)
    record_extra_elements(props, "sdf:worldExtras", extras)
    ctx.finish_joints()

    if options.fix_missing_inertials:
        loader = directory_mesh_loader(options.mesh_root) if options.mesh_root else None
        refine_dynamics(world, RefineOptions(default_density=options.default_density,
                                             mesh_loader=loader), diags)
    return world


def _pose_of(el: ET.Element, what: str, diags: Diagnostics) -> Pose:
    pose_el = el.find("pose")
    if pose_el is None or not (pose_el.text or "").strip():
        return Pose.identity()
    if pose_el.get("relative_to"):
        diags.warning("sdf-pose-relative-to",
                      f"{what}: pose frames by reference are not resolved; "
                      "reading the pose as parent relative",
                      frame=pose_el.get("relative_to"))
    values = floats(pose_el.text, 6, f"{what} pose")
    return Pose(translation=values[:3], rotation=quat_from_rpy(*values[3:]))


def _text_float(el: ET.Element | None, default: float) -> float:
    if el is None or not (el.text or "").strip():
        return default
    return float(el.text)


class _Context:
    def __init__(self, world: SceneWorld, options: ImportOptions, diags: Diagnostics):
        self.world = world
        self.options = options
        self.diags = diags
        self.scoped: dict[str, str] = {}  # "model::link" -> body name
        self.pending: list[tuple[ET.Element, str, Pose]] = []
        self.model_extras: list[tuple[str, PropertyKind, str]] = []

    def import_model(self, el: ET.Element, prefix: str, parent_pose: Pose, depth: int):
        if depth >= _MAX_MODEL_DEPTH:
            raise SceneImportError(f"models nested deeper than {_MAX_MODEL_DEPTH} levels")
        raw = el.get("name")
        if not raw:
            raise SceneImportError("model element without a name")
        mpath = f"{prefix}::{raw}" if prefix else raw
        model_pose = parent_pose.compose(_pose_of(el, f"model {mpath}", self.diags))
        record_attr_dict(self.world.world_properties, "sdf",
                         "model." + mpath.replace("::", "."), el.attrib, {"name"})
        extras = []
        for child in el:
            if child.tag == "link":
                self.import_link(child, mpath, model_pose)
            elif child.tag == "joint":
                self.pending.append((child, mpath, model_pose))
            elif child.tag == "model":
                self.import_model(child, mpath, model_pose, depth + 1)
            elif child.tag == "pose":
                continue
            else:
                extras.append(child)
        self.model_extras.extend(
            (mpath, PropertyKind.STRING, ET.tostring(e, encoding="unicode").strip())
            for e in extras)
        if self.model_extras:
            self.world.world_properties.set("sdf:modelExtras", list(self.model_extras),
                                            PropertyKind.TRIPLES)

    def import_link(self, el: ET.Element, mpath: str, model_pose: Pose):
        raw = el.get("name")
        if not raw:
            raise SceneImportError(f"link in model {mpath!r} has no name")
        pose = model_pose.compose(_pose_of(el, f"link {raw}", self.diags))
        body = SceneBody(imported_name(self.world, raw), pose=pose)
        note_source_name(body, raw)
        body.properties.set("sdf:model", mpath, PropertyKind.STRING)
        record_attr_dict(body.properties, "sdf", "", el.attrib, {"name"})
        self.world.add_body(body, None)
        self.scoped[f"{mpath}::{raw}"] = body.name

        extras = []
        for child in el:
            if child.tag == "inertial":
                body.inertial = self._inertial(child, body)
            elif child.tag in ("visual", "collision"):
                self._geometry(child, body)
            elif child.tag == "pose":
                continue
            else:
                extras.append(child)
        record_extra_elements(body.properties, "sdf:extraElements", extras)

    def _inertial(self, el: ET.Element, body: SceneBody) -> InertialProperties:
        mass = _text_float(el.find("mass"), 1.0)
        com_pose = _pose_of(el, f"inertial of {body.name}", self.diags)
        inertia = el.find("inertia")
        ixx = _text_float(None if inertia is None else inertia.find("ixx"), 1.0)
        iyy = _text_float(None if inertia is None else inertia.find("iyy"), 1.0)
        izz = _text_float(None if inertia is None else inertia.find("izz"), 1.0)
        ixy = _text_float(None if inertia is None else inertia.find("ixy"), 0.0)
        ixz = _text_float(None if inertia is None else inertia.find("ixz"), 0.0)
        iyz = _text_float(None if inertia is None else inertia.find("iyz"), 0.0)
        tensor = np.array([[ixx, ixy, ixz], [ixy, iyy, iyz], [ixz, iyz, izz]])
        rot = quat_to_matrix(com_pose.rotation)
        return InertialProperties(mass, com_pose.translation, rot @ tensor @ rot.T)

    def _geometry(self, el: ET.Element, body: SceneBody):
        kind = el.tag
        raw = el.get("name") or f"{body.name}_{kind}"
        container = el.find("geometry")
        if container is None or len(container) == 0:
            raise SceneImportError(f"{kind} {raw!r} has no geometry element")
        shape = container[0]
        kwargs: dict = {}
        if shape.tag == "box":
            size = floats(shape.findtext("size"), 3, "box size")
            kwargs = {"geom_type": "cube", "half_extents": size / 2.0}
        elif shape.tag == "sphere":
            kwargs = {"geom_type": "sphere",
                      "radius": float(shape.findtext("radius", "1"))}
        elif shape.tag == "cylinder":
            kwargs = {"geom_type": "cylinder",
                      "radius": float(shape.findtext("radius", "1")),
                      "half_length": float(shape.findtext("length", "1")) / 2.0}
        elif shape.tag == "mesh":
            uri = (shape.findtext("uri") or "").strip()
            if not uri:
                raise SceneImportError(f"mesh in {raw!r} has no uri")
            if self.options.mesh_root is not None:
                resolved = resolve_mesh_path(uri, self.options.mesh_root)
                if not Path(resolved).is_file():
                    raise SceneImportError(f"unresolvable mesh path {uri!r} -> {resolved}")
            kwargs = {"geom_type": "mesh", "mesh_file": FileReference(uri)}
            if shape.findtext("scale"):
                kwargs["scale"] = floats(shape.findtext("scale"), 3, "mesh scale")
        else:
            self.diags.warning("sdf-geometry-unsupported",
                               f"{shape.tag!r} geometry has no scene shape; kept as raw text",
                               body=body.name, shape=shape.tag)
            prior = list(body.properties.get("sdf:extraElements", []))
            prior.append(("item", PropertyKind.STRING,
                          ET.tostring(el, encoding="unicode").strip()))
            body.properties.set("sdf:extraElements", prior, PropertyKind.TRIPLES)
            return

        geom = SceneGeometry(imported_name(self.world, raw),
                             pose=_pose_of(el, f"{kind} {raw}", self.diags),
                             visible=kind == "visual", collidable=kind == "collision",
                             **kwargs)
        note_source_name(geom, raw)
        if not el.get("name"):
            geom.properties.set("source:autoName", True, PropertyKind.BOOLEAN)
        record_attr_dict(geom.properties, "sdf", "", el.attrib, {"name"})

        extras = []
        for child in el:
            if child.tag in ("geometry", "pose"):
                continue
            if child.tag == "material" and kind == "visual":
                diffuse = child.findtext("diffuse")
                if diffuse:
                    geom.rgba = floats(diffuse, 4, "material diffuse")
                script = child.find("script")
                if script is not None and script.findtext("name"):
                    geom.material = [script.findtext("name").strip()]
                if any(grand.tag not in ("diffuse", "script") for grand in child):
                    extras.append(child)
            else:
                extras.append(child)
        record_extra_elements(geom.properties, "sdf:extraElements", extras)
        self.world.add_geometry(geom, body)

    def finish_joints(self):
        for el, mpath, model_pose in self.pending:
            self._joint(el, mpath, model_pose)

    def _resolve_link(self, text: str, mpath: str, what: str) -> str:
        name = self.scoped.get(f"{mpath}::{text}") or self.scoped.get(text)
        if name is None:
            raise SceneImportError(f"{what} references unknown link {text!r}")
        return name

    def _joint(self, el: ET.Element, mpath: str, model_pose: Pose):
        raw = el.get("name")
        if not raw:
            raise SceneImportError(f"joint in model {mpath!r} has no name")
        sdf_type = el.get("type", "")
        if sdf_type not in _JOINT_TYPE_MAP:
            raise SceneImportError(f"joint {raw!r} has unsupported type {sdf_type!r}")
        jtype = _JOINT_TYPE_MAP[sdf_type]

        parent_text = (el.findtext("parent") or "").strip()
        child_text = (el.findtext("child") or "").strip()
        if not parent_text or not child_text:
            raise SceneImportError(f"joint {raw!r} needs parent and child links")
        if child_text == "world":
            raise SceneImportError(f"joint {raw!r} cannot have the world as its child")
        child_name = self._resolve_link(child_text, mpath, f"joint {raw!r}")
        parent_name = WORLD_BODY_NAME if parent_text == "world" \
            else self._resolve_link(parent_text, mpath, f"joint {raw!r}")

        offset = _pose_of(el, f"joint {raw}", self.diags)
        axis = None
        lower = upper = None
        unbounded = False
        axis_el = el.find("axis")
        if jtype in ("revolute", "prismatic"):
            xyz = floats(axis_el.findtext("xyz"), 3, "joint axis") \
                if axis_el is not None and axis_el.findtext("xyz") else np.array([0.0, 0.0, 1.0])
            norm = np.linalg.norm(xyz)
            if norm == 0:
                raise SceneImportError(f"joint {raw!r} has a zero axis")
            axis = xyz / norm
            limit_el = axis_el.find("limit") if axis_el is not None else None
            if limit_el is not None:
                lower = _text_float(limit_el.find("lower"), -1e16)
                upper = _text_float(limit_el.find("upper"), 1e16)
            else:
                unbounded = True
            upf = axis_el.findtext("use_parent_model_frame") if axis_el is not None else None
            if upf and upf.strip() in ("1", "true"):
                child_body = self.world.find_by_name(child_name)
                in_model = model_pose.inverse().compose(child_body.pose)
                rot = quat_to_matrix(in_model.compose(offset).rotation)
                axis = rot.T @ axis

        joint = SceneJoint(imported_name(self.world, raw), jtype, parent_name,
                           child_name, axis=axis, limit_lower=lower,
                           limit_upper=upper, offset=offset)
        note_source_name(joint, raw)
        if unbounded:
            joint.properties.set("limits:unbounded", True, PropertyKind.BOOLEAN)
        record_attr_dict(joint.properties, "sdf", "", el.attrib, {"name", "type"})

        extras = []
        for child in el:
            if child.tag in ("parent", "child", "pose"):
                continue
            if child.tag == "axis":
                consumed = {"xyz", "limit", "use_parent_model_frame"}
                if any(grand.tag not in consumed for grand in child) or (
                        child.find("limit") is not None
                        and any(g.tag not in ("lower", "upper")
                                for g in child.find("limit"))):
                    extras.append(child)
                continue
            extras.append(child)
        record_extra_elements(joint.properties, "sdf:extraElements", extras)

        owner = self.world.find_by_name(parent_name) if parent_name != WORLD_BODY_NAME \
            else self.world.find_by_name(child_name)
        self.world.add_joint(joint, owner)
