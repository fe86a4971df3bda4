"""MJCF import and export.

MuJoCo resolves default classes, include files, and compiler settings
(angle units, euler conventions, mesh directories) at load time; this
importer does the same, so the scene model always holds radians and
class-resolved values.  Capsules and ellipsoids have no native shape in
the model and are emulated: capsules become tessellated meshes,
ellipsoids become scaled unit spheres, both tagged so the exporter can
reconstruct the original primitive.  Fixed attachments cannot be written
as MJCF joints, so the exporter keeps plain nesting and adds an equality
weld when the fixed joint must survive a reimport.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from ..core.meshes import capsule_mesh
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
from ..math3d import (
    Pose,
    quat_between_vectors,
    quat_distance,
    quat_from_axis_angle,
    quat_from_euler,
    quat_from_matrix,
    quat_identity,
    quat_normalize,
    quat_rotate,
    quat_to_matrix,
)
from .joint_tree import restructure_by_joints
from .objio import directory_mesh_loader, resolve_mesh_path
from .options import ExportOptions, ImportOptions, record_unmapped
from .strip import strip_elements
from .xmlcommon import (
    ExportNames,
    floats,
    fmt_floats,
    imported_name,
    mesh_reference,
    note_source_name,
    parse_xml,
    record_attr_dict,
    record_extra_elements,
    restore_extra_elements,
    restore_unmapped,
    serialize,
)

_MJCF_TO_JOINT = {"hinge": "revolute", "slide": "prismatic", "ball": "spherical"}
_JOINT_TO_MJCF = {"revolute": "hinge", "prismatic": "slide", "spherical": "ball"}

_MAX_INCLUDE_DEPTH = 8


def import_mjcf(document: str, options: ImportOptions | None = None,
                diagnostics: Diagnostics | None = None) -> SceneWorld:
    options = options or ImportOptions()
    diags = diagnostics if diagnostics is not None else Diagnostics()
    root = parse_xml(document, "mujoco", "MJCF")
    _splice_includes(root, options.mesh_root, 0)

    world = SceneWorld()
    props = world.world_properties
    props.set("source:format", "mjcf", PropertyKind.STRING)
    if root.get("model"):
        props.set("mjcf:modelName", root.get("model"), PropertyKind.STRING)
    record_attr_dict(props, "mjcf", "", root.attrib, {"model"})

    ctx = _Context(world, options, diags)
    # Settings sections first, wherever they sit in the document.
    for el in root.findall("compiler"):
        ctx.read_compiler(el)
    for el in root.findall("option"):
        ctx.read_option(el)
    for el in root.findall("asset"):
        ctx.read_asset(el)
    for el in root.findall("default"):
        ctx.defaults.absorb(el, top=True)

    worldbody = root.find("worldbody")
    if worldbody is None:
        raise SceneImportError("MJCF document has no worldbody")
    record_attr_dict(props, "mjcf", "worldbody", worldbody.attrib, set())
    world_extras: list[ET.Element] = []
    for el in worldbody:
        if el.tag == "body":
            _import_body(el, None, "main", ctx)
        elif el.tag == "geom":
            _import_world_geom(el, "main", ctx, world_extras)
        else:
            world_extras.append(el)
    record_extra_elements(props, "mjcf:worldbodyExtras", world_extras)

    for el in root.findall("equality"):
        ctx.read_equality(el)

    handled = ("compiler", "option", "asset", "default", "worldbody", "equality")
    record_extra_elements(props, "mjcf:sections",
                          [el for el in root if el.tag not in handled])

    if options.fix_missing_inertials:
        loader = directory_mesh_loader(options.mesh_root) if options.mesh_root else None
        refine_dynamics(world, RefineOptions(default_density=options.default_density,
                                             mesh_loader=loader), diags)
    return world


def _splice_includes(element: ET.Element, root_dir, depth: int):
    while True:
        includes = [(i, child) for i, child in enumerate(element) if child.tag == "include"]
        if not includes:
            break
        if depth >= _MAX_INCLUDE_DEPTH:
            raise SceneImportError("include files nested deeper than "
                                   f"{_MAX_INCLUDE_DEPTH} levels")
        for index, inc in reversed(includes):
            name = inc.get("file")
            if not name:
                raise SceneImportError("include element without a file attribute")
            if root_dir is None:
                raise SceneImportError(f"cannot resolve include {name!r}: no mesh root set")
            path = Path(root_dir) / name
            if not path.is_file():
                raise SceneImportError(f"include file not found: {path}")
            try:
                sub = ET.fromstring(path.read_text())
            except ET.ParseError as exc:
                raise SceneImportError(f"malformed include file {path}: {exc}") from exc
            if sub.tag not in ("mujoco", "mujocoinclude"):
                raise SceneImportError(f"include file {path} has root {sub.tag!r}")
            _splice_includes(sub, root_dir, depth + 1)
            element.remove(inc)
            for offset, child in enumerate(sub):
                element.insert(index + offset, child)
    for child in element:
        _splice_includes(child, root_dir, depth)


class _Defaults:
    """MJCF default class tree, flattened to class name -> tag -> attrs."""

    def __init__(self):
        self.classes: dict[str, dict[str, dict[str, str]]] = {}

    def absorb(self, el: ET.Element, top: bool = False, inherited=None):
        name = el.get("class") or ("main" if top else None)
        if name is None:
            raise SceneImportError("nested default element without a class name")
        merged = {tag: dict(attrs) for tag, attrs in (inherited or self.classes.get("main", {})).items()}
        for child in el:
            if child.tag == "default":
                continue
            merged.setdefault(child.tag, {}).update(child.attrib)
        self.classes[name] = merged
        for child in el.findall("default"):
            self.absorb(child, inherited=merged)

    def resolve(self, class_name: str, tag: str, element: ET.Element) -> dict:
        attrs = dict(self.classes.get(class_name, {}).get(tag, {}))
        attrs.update(element.attrib)
        attrs.pop("class", None)
        return attrs


class _Context:
    def __init__(self, world: SceneWorld, options: ImportOptions, diags: Diagnostics):
        self.world = world
        self.options = options
        self.diags = diags
        self.defaults = _Defaults()
        self.angle_factor = np.pi / 180.0  # MJCF compiles degrees by default
        self.eulerseq = "xyz"
        self.euler_intrinsic = True
        self.meshdir = ""
        self.meshes: dict[str, tuple[str, np.ndarray]] = {}
        self.body_by_raw: dict[str, str] = {}
        self.auto_bodies = 0

    def read_compiler(self, el: ET.Element):
        if el.get("coordinate") == "global":
            raise SceneImportError("global coordinates are not supported; "
                                   "recompile the model with local coordinates")
        angle = el.get("angle", "degree")
        if angle == "radian":
            self.angle_factor = 1.0
        elif angle == "degree":
            self.angle_factor = np.pi / 180.0
        else:
            raise SceneImportError(f"unknown compiler angle unit {angle!r}")
        seq = el.get("eulerseq", "xyz")
        if len(seq) != 3 or set(seq.lower()) - set("xyz"):
            raise SceneImportError(f"unsupported eulerseq {seq!r}")
        if seq.islower():
            self.eulerseq, self.euler_intrinsic = seq, True
        elif seq.isupper():
            self.eulerseq, self.euler_intrinsic = seq.lower(), False
        else:
            raise SceneImportError(f"mixed-case eulerseq {seq!r} is not supported")
        self.meshdir = el.get("meshdir", "")
        record_attr_dict(self.world.world_properties, "mjcf", "compiler", el.attrib,
                         {"angle", "eulerseq", "meshdir", "coordinate"})

    def read_option(self, el: ET.Element):
        if el.get("gravity"):
            self.world.world_properties.set(
                "gravity", floats(el.get("gravity"), 3, "gravity"), PropertyKind.VEC3)
        record_attr_dict(self.world.world_properties, "mjcf", "option", el.attrib, {"gravity"})
        record_extra_elements(self.world.world_properties, "mjcf:optionExtras", list(el))

    def read_asset(self, el: ET.Element):
        extras, mesh_raws = [], []
        for child in el:
            if child.tag == "mesh":
                file = child.get("file")
                if not file:
                    raise SceneImportError("mesh asset without a file attribute")
                name = child.get("name") or Path(file).stem
                scale = floats(child.get("scale", "1 1 1"), 3, "mesh scale")
                self.meshes[name] = (str(Path(self.meshdir) / file) if self.meshdir else file,
                                     scale)
                mesh_raws.append((name, child))
            else:
                extras.append(child)
        props = self.world.world_properties
        if mesh_raws:
            existing = list(props.get("mjcf:meshAssets", []))
            existing += [(name, PropertyKind.STRING,
                          ET.tostring(raw, encoding="unicode").strip())
                         for name, raw in mesh_raws]
            props.set("mjcf:meshAssets", existing, PropertyKind.TRIPLES)
        if extras:
            prior = list(props.get("mjcf:assetExtras", []))
            prior += [(child.get("name") or child.tag, PropertyKind.STRING,
                       ET.tostring(child, encoding="unicode").strip())
                      for child in extras]
            props.set("mjcf:assetExtras", prior, PropertyKind.TRIPLES)

    def read_equality(self, el: ET.Element):
        extras = []
        for child in el:
            if child.tag not in ("connect", "weld"):
                extras.append(child)
                continue
            raw1 = child.get("body1")
            if not raw1:
                raise SceneImportError(f"equality {child.tag} without body1")
            child_name = self.body_by_raw.get(raw1)
            if child_name is None:
                raise SceneImportError(f"equality {child.tag} references unknown body {raw1!r}")
            raw2 = child.get("body2")
            if raw2 in (None, "world"):
                parent_name = WORLD_BODY_NAME
            else:
                parent_name = self.body_by_raw.get(raw2)
                if parent_name is None:
                    raise SceneImportError(
                        f"equality {child.tag} references unknown body {raw2!r}")
            if child.tag == "connect":
                jtype = "spherical"
                anchor = floats(child.get("anchor", "0 0 0"), 3, "connect anchor")
                offset = Pose(translation=anchor)
                consumed = {"name", "body1", "body2", "anchor"}
            else:
                jtype = "fixed"
                offset = Pose.identity()
                consumed = {"name", "body1", "body2"}
            raw_name = child.get("name") or f"{child_name}_{child.tag}"
            joint = SceneJoint(imported_name(self.world, raw_name), jtype,
                               parent_name, child_name, offset=offset)
            note_source_name(joint, raw_name)
            if not child.get("name"):
                joint.properties.set("source:autoName", True, PropertyKind.BOOLEAN)
            record_attr_dict(joint.properties, "mjcf", "", child.attrib, consumed)
            owner = self.world.find_by_name(child_name)
            self.world.add_joint(joint, owner)
        record_extra_elements(self.world.world_properties, "mjcf:equalityExtras", extras)

    def orientation(self, attrs: dict, what: str) -> Pose:
        translation = floats(attrs.get("pos", "0 0 0"), 3, f"{what} pos")
        if "quat" in attrs:
            rotation = quat_normalize(floats(attrs["quat"], 4, f"{what} quat"))
        elif "euler" in attrs:
            angles = floats(attrs["euler"], 3, f"{what} euler") * self.angle_factor
            rotation = quat_from_euler(angles, self.eulerseq, intrinsic=self.euler_intrinsic)
        elif "axisangle" in attrs:
            values = floats(attrs["axisangle"], 4, f"{what} axisangle")
            rotation = quat_from_axis_angle(values[:3], values[3] * self.angle_factor)
        elif "xyaxes" in attrs:
            values = floats(attrs["xyaxes"], 6, f"{what} xyaxes")
            x = values[:3] / np.linalg.norm(values[:3])
            y = values[3:] - np.dot(values[3:], x) * x
            y = y / np.linalg.norm(y)
            rotation = quat_from_matrix(np.column_stack([x, y, np.cross(x, y)]))
        elif "zaxis" in attrs:
            rotation = quat_between_vectors((0.0, 0.0, 1.0),
                                            floats(attrs["zaxis"], 3, f"{what} zaxis"))
        else:
            return Pose(translation=translation)
        return Pose(translation=translation, rotation=rotation)


_ORIENTATION_ATTRS = {"pos", "quat", "euler", "axisangle", "xyaxes", "zaxis"}


def _import_body(el: ET.Element, parent: SceneBody | None, childclass: str, ctx: _Context):
    raw = el.get("name")
    if raw is None:
        raw = f"body_{ctx.auto_bodies}"
        ctx.auto_bodies += 1
    body = SceneBody(imported_name(ctx.world, raw), pose=ctx.orientation(el.attrib, "body"))
    note_source_name(body, raw)
    if el.get("name") is None:
        body.properties.set("source:autoName", True, PropertyKind.BOOLEAN)
    ctx.world.add_body(body, parent)
    ctx.body_by_raw[raw] = body.name
    childclass = el.get("childclass", childclass)
    record_attr_dict(body.properties, "mjcf", "", el.attrib,
                     _ORIENTATION_ATTRS | {"name", "childclass"})

    extras = []
    for child in el:
        if child.tag == "inertial":
            body.inertial = _import_inertial(child, body, ctx)
        elif child.tag == "joint":
            _import_joint(child, parent, body, childclass, ctx)
        elif child.tag == "freejoint":
            body.properties.set("mjcf:freejoint", True, PropertyKind.BOOLEAN)
            if child.get("name"):
                body.properties.set("mjcf:freejointName", child.get("name"),
                                    PropertyKind.STRING)
            ctx.diags.info("mjcf-freejoint",
                           f"body {body.name} is free floating; kept as a body flag",
                           body=body.name)
        elif child.tag == "geom":
            _import_geom(child, body, childclass, ctx, extras)
        elif child.tag == "body":
            _import_body(child, body, childclass, ctx)
        else:
            extras.append(child)
    record_extra_elements(body.properties, "mjcf:extraElements", extras)


_SUPPORTED_GEOM_TYPES = frozenset(
    ("sphere", "box", "cylinder", "capsule", "ellipsoid", "mesh"))


def _import_world_geom(el: ET.Element, childclass: str, ctx: _Context,
                       world_extras: list):
    """A geom directly under worldbody gets a wrapper body so it has a home."""
    attrs = ctx.defaults.resolve(el.get("class", childclass), "geom", el)
    gtype = attrs.get("type", "sphere")
    if gtype not in _SUPPORTED_GEOM_TYPES:
        ctx.diags.warning("mjcf-geom-unsupported",
                          f"geom type {gtype!r} has no scene shape; kept as raw text",
                          geom_type=gtype)
        world_extras.append(el)
        return
    raw = f"body_{ctx.auto_bodies}"
    ctx.auto_bodies += 1
    body = SceneBody(imported_name(ctx.world, raw))
    body.properties.set("source:autoName", True, PropertyKind.BOOLEAN)
    body.properties.set("mjcf:worldbody", True, PropertyKind.BOOLEAN)
    ctx.world.add_body(body, None)
    ctx.body_by_raw[raw] = body.name
    _import_geom(el, body, childclass, ctx, [])


def _import_inertial(el: ET.Element, body: SceneBody, ctx: _Context) -> InertialProperties:
    if el.get("mass") is None:
        raise SceneImportError(f"inertial on body {body.name} has no mass")
    mass = float(el.get("mass"))
    com = floats(el.get("pos", "0 0 0"), 3, "inertial pos")
    if el.get("fullinertia") is not None:
        ixx, iyy, izz, ixy, ixz, iyz = floats(el.get("fullinertia"), 6, "fullinertia")
        tensor = np.array([[ixx, ixy, ixz], [ixy, iyy, iyz], [ixz, iyz, izz]])
        if el.get("quat") is not None:
            ctx.diags.warning("mjcf-inertial-overdetermined",
                              f"body {body.name} has both quat and fullinertia; quat ignored",
                              body=body.name)
    elif el.get("diaginertia") is not None:
        diag = floats(el.get("diaginertia"), 3, "diaginertia")
        quat = quat_normalize(floats(el.get("quat"), 4, "inertial quat")) \
            if el.get("quat") else quat_identity()
        rot = quat_to_matrix(quat)
        tensor = rot @ np.diag(diag) @ rot.T
    else:
        raise SceneImportError(f"inertial on body {body.name} has no inertia tensor")
    record_attr_dict(body.properties, "mjcf", "inertial", el.attrib,
                     {"pos", "quat", "mass", "diaginertia", "fullinertia"})
    return InertialProperties(mass, com, tensor)


def _import_joint(el: ET.Element, parent: SceneBody | None, body: SceneBody,
                  childclass: str, ctx: _Context):
    attrs = ctx.defaults.resolve(el.get("class", childclass), "joint", el)
    mj_type = attrs.get("type", "hinge")
    if mj_type == "free":
        body.properties.set("mjcf:freejoint", True, PropertyKind.BOOLEAN)
        if attrs.get("name"):
            body.properties.set("mjcf:freejointName", attrs["name"], PropertyKind.STRING)
        ctx.diags.info("mjcf-freejoint",
                       f"body {body.name} is free floating; kept as a body flag",
                       body=body.name)
        return
    if mj_type not in _MJCF_TO_JOINT:
        raise SceneImportError(f"unknown joint type {mj_type!r} on body {body.name}")
    jtype = _MJCF_TO_JOINT[mj_type]

    raw = attrs.get("name") or f"{body.name}_joint"
    offset = Pose(translation=floats(attrs.get("pos", "0 0 0"), 3, "joint pos"))
    axis = None
    lower = upper = None
    consumed = {"type", "name", "pos"}
    if jtype in ("revolute", "prismatic"):
        axis = floats(attrs.get("axis", "0 0 1"), 3, "joint axis")
        norm = np.linalg.norm(axis)
        if norm == 0:
            raise SceneImportError(f"joint {raw!r} has a zero axis")
        axis = axis / norm
        consumed.add("axis")
        if attrs.get("range") is not None and attrs.get("limited") != "false":
            lower, upper = floats(attrs["range"], 2, "joint range")
            if jtype == "revolute":
                lower *= ctx.angle_factor
                upper *= ctx.angle_factor
            consumed |= {"range", "limited"}

    parent_name = parent.name if parent is not None else WORLD_BODY_NAME
    joint = SceneJoint(imported_name(ctx.world, raw), jtype, parent_name, body.name,
                       axis=axis, limit_lower=lower, limit_upper=upper, offset=offset)
    note_source_name(joint, raw)
    if not attrs.get("name"):
        joint.properties.set("source:autoName", True, PropertyKind.BOOLEAN)
    record_attr_dict(joint.properties, "mjcf", "", attrs, consumed)
    ctx.world.add_joint(joint, parent if parent is not None else body)


def _import_geom(el: ET.Element, body: SceneBody, childclass: str, ctx: _Context,
                 extras: list):
    attrs = ctx.defaults.resolve(el.get("class", childclass), "geom", el)
    gtype = attrs.get("type", "sphere")
    raw = attrs.get("name") or f"{body.name}_geom"
    size = floats(attrs["size"], None, "geom size") if attrs.get("size") else np.zeros(0)
    pose = ctx.orientation(attrs, "geom")
    half_length_override = None
    if attrs.get("fromto") is not None:
        span = floats(attrs["fromto"], 6, "geom fromto")
        start, end = span[:3], span[3:]
        direction = end - start
        length = np.linalg.norm(direction)
        if length == 0:
            raise SceneImportError(f"geom {raw!r} has a zero-length fromto")
        pose = Pose(translation=(start + end) / 2.0,
                    rotation=quat_between_vectors((0.0, 0.0, 1.0), direction))
        half_length_override = length / 2.0

    kwargs: dict = {}
    marker: tuple | None = None
    if gtype == "sphere":
        if size.size < 1:
            raise SceneImportError(f"sphere geom {raw!r} needs a size")
        kwargs = {"geom_type": "sphere", "radius": float(size[0])}
    elif gtype == "box":
        if size.size < 3:
            raise SceneImportError(f"box geom {raw!r} needs three size values")
        kwargs = {"geom_type": "cube", "half_extents": size[:3]}
    elif gtype == "cylinder":
        if size.size < (1 if half_length_override is not None else 2):
            raise SceneImportError(f"cylinder geom {raw!r} needs radius and half length")
        half = half_length_override if half_length_override is not None else float(size[1])
        kwargs = {"geom_type": "cylinder", "radius": float(size[0]), "half_length": half}
    elif gtype == "capsule":
        if size.size < (1 if half_length_override is not None else 2):
            raise SceneImportError(f"capsule geom {raw!r} needs radius and half length")
        radius = float(size[0])
        half = half_length_override if half_length_override is not None else float(size[1])
        segments = ctx.options.tessellation
        mesh = capsule_mesh(radius, half, segments=segments, rings=max(2, segments // 3))
        kwargs = {"geom_type": "mesh", "mesh_data": mesh}
        marker = ("capsule", radius, half)
    elif gtype == "ellipsoid":
        if size.size < 3:
            raise SceneImportError(f"ellipsoid geom {raw!r} needs three size values")
        kwargs = {"geom_type": "sphere", "radius": 1.0, "scale": size[:3]}
        marker = ("ellipsoid", None, None)
    elif gtype == "mesh":
        asset = attrs.get("mesh")
        if not asset or asset not in ctx.meshes:
            raise SceneImportError(f"geom {raw!r} references unknown mesh asset {asset!r}")
        file, scale = ctx.meshes[asset]
        if ctx.options.mesh_root is not None:
            resolved = resolve_mesh_path(file, ctx.options.mesh_root)
            if not Path(resolved).is_file():
                raise SceneImportError(f"unresolvable mesh path {file!r} -> {resolved}")
        kwargs = {"geom_type": "mesh", "mesh_file": FileReference(file), "scale": scale}
    else:
        ctx.diags.warning("mjcf-geom-unsupported",
                          f"geom type {gtype!r} has no scene shape; kept as raw text",
                          body=body.name, geom_type=gtype)
        extras.append(el)
        return

    rgba = floats(attrs["rgba"], 4, "geom rgba") if attrs.get("rgba") else None
    contype, conaffinity = attrs.get("contype"), attrs.get("conaffinity")
    collidable = not (contype == "0" and conaffinity == "0")
    consumed = _ORIENTATION_ATTRS | {"type", "name", "size", "fromto", "rgba",
                                     "material", "mesh"}
    if (contype, conaffinity) == ("0", "0") or (contype is None and conaffinity is None):
        consumed |= {"contype", "conaffinity"}

    geom = SceneGeometry(imported_name(ctx.world, raw), pose=pose,
                         visible=not (rgba is not None and rgba[3] == 0.0),
                         collidable=collidable, rgba=rgba,
                         material=[attrs["material"]] if attrs.get("material") else None,
                         **kwargs)
    note_source_name(geom, raw)
    if not attrs.get("name"):
        geom.properties.set("source:autoName", True, PropertyKind.BOOLEAN)
    if marker is not None:
        geom.properties.set("mjcf:geomType", marker[0], PropertyKind.STRING)
        if marker[0] == "capsule":
            geom.properties.set("mjcf:capsuleRadius", marker[1], PropertyKind.REAL)
            geom.properties.set("mjcf:capsuleHalfLength", marker[2], PropertyKind.REAL)
    if gtype == "mesh":
        geom.properties.set("mjcf:meshAsset", attrs["mesh"], PropertyKind.STRING)
    record_attr_dict(geom.properties, "mjcf", "", attrs, consumed)
    ctx.world.add_geometry(geom, body)


def export_mjcf(world: SceneWorld, options: ExportOptions | None = None,
                diagnostics: Diagnostics | None = None) -> str:
    options = options or ExportOptions(target="mjcf")
    diags = diagnostics if diagnostics is not None else Diagnostics()
    scene = strip_elements(world, options.strip)
    tree, loop = restructure_by_joints(scene, diags)
    if loop and options.loop_strategy == "fail":
        names = ", ".join(j.name for j in loop)
        raise SceneExportError(f"scene has loop-closing joints ({names}) "
                               "and the loop strategy is set to fail")

    names = ExportNames(scene)
    native = [j for j in tree if j.joint_type != "fixed"]
    welds = [j for j in tree if j.joint_type == "fixed"]
    for joint in welds:
        diags.info("mjcf-fixed-as-weld",
                   f"fixed joint {joint.name} becomes an equality weld", joint=joint.name)

    props = scene.world_properties
    root = ET.Element("mujoco")
    model = (props.get("mjcf:modelName") or props.get("urdf:robotName")
             or props.get("sdf:worldName") or "scene")
    root.set("model", str(model))
    ET.SubElement(root, "compiler", {"angle": "radian"})

    gravity = props.get("gravity")
    option_extras = props.get("mjcf:optionExtras", [])
    if gravity is not None or option_extras:
        option = ET.SubElement(root, "option")
        if gravity is not None:
            option.set("gravity", fmt_floats(gravity))
        restore_extra_elements(props, "mjcf:optionExtras", option)

    asset_el, mesh_names = _collect_assets(scene, options, diags)
    if len(asset_el):
        root.append(asset_el)

    referenced = set()
    for joint in welds + loop:
        referenced.add(joint.child_body)
        if joint.parent_body != WORLD_BODY_NAME:
            referenced.add(joint.parent_body)

    joints_by_child: dict[str, list[SceneJoint]] = {}
    for joint in native:
        joints_by_child.setdefault(joint.child_body, []).append(joint)
        referenced.add(joint.child_body)

    worldbody = ET.SubElement(root, "worldbody")
    for body in scene.root_bodies:
        _emit_body(worldbody, body, scene, joints_by_child, mesh_names,
                   referenced, names, options, diags)
    restore_extra_elements(props, "mjcf:worldbodyExtras", worldbody)

    equality_extras = props.get("mjcf:equalityExtras", [])
    if welds or loop or equality_extras:
        equality = ET.SubElement(root, "equality")
        for joint in welds:
            _emit_constraint(equality, joint, "weld", names)
        for joint in loop:
            kind = options.loop_strategy
            if kind is None:
                kind = "weld" if joint.joint_type == "fixed" else "connect"
            if joint.joint_type not in ("fixed", "spherical"):
                diags.warning("mjcf-loop-approximated",
                              f"loop joint {joint.name} ({joint.joint_type}) exported "
                              f"as a {kind} constraint; its axis is lost",
                              joint=joint.name)
            _emit_constraint(equality, joint, kind, names)
        restore_extra_elements(props, "mjcf:equalityExtras", equality)

    restore_extra_elements(props, "mjcf:sections", root)
    restore_unmapped(props, "mjcf", root)
    return serialize(root)


def _emit_constraint(equality: ET.Element, joint: SceneJoint, kind: str, names: ExportNames):
    el = ET.SubElement(equality, kind)
    if not joint.properties.get("source:autoName"):
        el.set("name", names.joints[joint.name])
    el.set("body1", names.bodies[joint.child_body])
    if joint.parent_body != WORLD_BODY_NAME:
        el.set("body2", names.bodies[joint.parent_body])
    if kind == "connect":
        el.set("anchor", fmt_floats(joint.offset.translation))
    restore_unmapped(joint.properties, "mjcf", el)


def _collect_assets(scene: SceneWorld, options: ExportOptions, diags: Diagnostics):
    """Build the asset section and the geometry -> mesh asset name map."""
    asset_el = ET.Element("asset")
    raw_assets = {name: text for name, _, text in scene.world_properties.get("mjcf:meshAssets", [])}
    emitted: dict[str, ET.Element] = {}
    mesh_names: dict[str, str] = {}
    for geom in scene.iter_geometries():
        # capsule emulation meshes are rebuilt as native capsules, not assets
        if geom.geom_type != "mesh" or geom.properties.get("mjcf:geomType") == "capsule":
            continue
        wanted = geom.properties.get("mjcf:meshAsset")
        if wanted in raw_assets:
            if wanted not in emitted:
                emitted[wanted] = ET.fromstring(raw_assets[wanted])
            mesh_names[geom.name] = wanted
            continue
        name = geom.name
        while name in emitted or name in raw_assets:
            name += "_mesh"
        entry = ET.Element("mesh", {"name": name,
                                    "file": mesh_reference(geom, options, diags)})
        if not np.allclose(geom.scale, 1.0):
            entry.set("scale", fmt_floats(geom.scale))
        emitted[name] = entry
        mesh_names[geom.name] = name
    for entry in emitted.values():
        asset_el.append(entry)
    for _, _, text in scene.world_properties.get("mjcf:assetExtras", []):
        try:
            asset_el.append(ET.fromstring(text))
        except ET.ParseError:
            continue
    return asset_el, mesh_names


def _emit_body(parent_el: ET.Element, body: SceneBody, scene: SceneWorld,
               joints_by_child: dict, mesh_names: dict, referenced: set,
               names: ExportNames, options: ExportOptions, diags: Diagnostics):
    hoistable = (body.properties.get("mjcf:worldbody")
                 and not body.children and not body.joints and body.inertial is None
                 and body.name not in referenced
                 and body.name not in joints_by_child
                 and body.pose.is_identity(1e-12))
    if hoistable:
        for geom in body.geometries:
            parent_el.append(_geom_element(geom, mesh_names, names, options))
        return

    el = ET.SubElement(parent_el, "body")
    if not body.properties.get("source:autoName") or body.name in referenced:
        el.set("name", names.bodies[body.name])
    if np.any(body.pose.translation != 0.0):
        el.set("pos", fmt_floats(body.pose.translation))
    if quat_distance(body.pose.rotation, quat_identity()) > 1e-12:
        el.set("quat", fmt_floats(body.pose.rotation))

    if body.properties.get("mjcf:freejoint"):
        free = ET.SubElement(el, "freejoint")
        free_name = body.properties.get("mjcf:freejointName")
        if free_name:
            free.set("name", str(free_name))

    if body.inertial is not None:
        inertial = ET.SubElement(el, "inertial")
        inertial.set("pos", fmt_floats(body.inertial.center_of_mass))
        inertial.set("mass", fmt_floats([body.inertial.mass]))
        t = body.inertial.inertia
        inertial.set("fullinertia", fmt_floats(
            [t[0, 0], t[1, 1], t[2, 2], t[0, 1], t[0, 2], t[1, 2]]))

    for joint in joints_by_child.get(body.name, []):
        el.append(_joint_element(joint, names))
    for geom in body.geometries:
        el.append(_geom_element(geom, mesh_names, names, options))
    for child in body.children:
        _emit_body(el, child, scene, joints_by_child, mesh_names,
                   referenced, names, options, diags)
    restore_unmapped(body.properties, "mjcf", el)
    restore_extra_elements(body.properties, "mjcf:extraElements", el)


def _joint_element(joint: SceneJoint, names: ExportNames) -> ET.Element:
    el = ET.Element("joint", {"type": _JOINT_TO_MJCF[joint.joint_type]})
    if not joint.properties.get("source:autoName"):
        el.set("name", names.joints[joint.name])
    if np.any(joint.offset.translation != 0.0):
        el.set("pos", fmt_floats(joint.offset.translation))
    if joint.axis is not None:
        # the model keeps axes in the joint frame; MJCF wants the child frame
        el.set("axis", fmt_floats(quat_rotate(joint.offset.rotation, joint.axis)))
    if joint.limit_lower is not None and joint.limit_upper is not None \
            and not joint.properties.get("limits:unbounded"):
        el.set("limited", "true")
        el.set("range", fmt_floats([joint.limit_lower, joint.limit_upper]))
    restore_unmapped(joint.properties, "mjcf", el)
    return el


def _geom_element(geom: SceneGeometry, mesh_names: dict, names: ExportNames,
                  options: ExportOptions) -> ET.Element:
    el = ET.Element("geom")
    if not geom.properties.get("source:autoName"):
        el.set("name", names.geoms[geom.name])

    emulated = geom.properties.get("mjcf:geomType")
    if emulated == "capsule":
        el.set("type", "capsule")
        el.set("size", fmt_floats([geom.properties.get("mjcf:capsuleRadius"),
                                   geom.properties.get("mjcf:capsuleHalfLength")]))
    elif geom.geom_type == "sphere":
        if emulated == "ellipsoid" or not np.allclose(geom.scale, geom.scale[0]):
            el.set("type", "ellipsoid")
            el.set("size", fmt_floats(geom.radius * geom.scale))
        else:
            el.set("type", "sphere")
            el.set("size", fmt_floats([geom.radius * geom.scale[0]]))
    elif geom.geom_type == "cube":
        el.set("type", "box")
        el.set("size", fmt_floats(geom.half_extents * geom.scale))
    elif geom.geom_type == "cylinder":
        el.set("type", "cylinder")
        el.set("size", fmt_floats([geom.radius * geom.scale[0],
                                   geom.half_length * geom.scale[2]]))
    elif geom.geom_type == "mesh":
        el.set("type", "mesh")
        el.set("mesh", mesh_names[geom.name])

    if np.any(geom.pose.translation != 0.0):
        el.set("pos", fmt_floats(geom.pose.translation))
    if quat_distance(geom.pose.rotation, quat_identity()) > 1e-12:
        el.set("quat", fmt_floats(geom.pose.rotation))
    if geom.rgba is not None:
        rgba = np.array(geom.rgba, dtype=float)
        if not geom.visible:
            rgba[3] = 0.0
        el.set("rgba", fmt_floats(rgba))
    elif not geom.visible:
        el.set("rgba", "0.5 0.5 0.5 0")
    if geom.material:
        el.set("material", geom.material[0])
    if not geom.collidable:
        el.set("contype", "0")
        el.set("conaffinity", "0")
    restore_unmapped(geom.properties, "mjcf", el)
    return el
