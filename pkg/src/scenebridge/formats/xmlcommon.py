"""Helpers shared by the XML scene-format importers and exporters."""
from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from ..core.model import SceneWorld
from ..core.properties import PropertyKind
from ..errors import SceneExportError, SceneImportError
from ..math3d import Pose, quat_from_rpy, quat_to_rpy
from ..usda.names import sanitize_name
from .objio import write_obj
from .options import record_unmapped


def parse_xml(document: str, expected_root: str, fmt: str) -> ET.Element:
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise SceneImportError(f"malformed {fmt} XML: {exc}") from exc
    if root.tag != expected_root:
        raise SceneImportError(f"{fmt} document root is <{root.tag}>, expected <{expected_root}>")
    return root


def floats(text: str | None, count: int | None, what: str) -> np.ndarray:
    if text is None:
        raise SceneImportError(f"{what}: missing value")
    try:
        values = np.array([float(tok) for tok in text.split()])
    except ValueError as exc:
        raise SceneImportError(f"{what}: {exc}") from exc
    if count is not None and len(values) != count:
        raise SceneImportError(f"{what}: expected {count} numbers, got {len(values)}")
    return values


def fmt_float(value: float) -> str:
    value = float(value)
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def fmt_floats(values) -> str:
    return " ".join(fmt_float(v) for v in np.asarray(values, dtype=float).ravel())


def pose_from_origin(element: ET.Element | None) -> Pose:
    """URDF/SDF <origin xyz rpy>; absent element or attributes mean identity."""
    if element is None:
        return Pose.identity()
    xyz = floats(element.get("xyz", "0 0 0"), 3, "origin xyz")
    rpy = floats(element.get("rpy", "0 0 0"), 3, "origin rpy")
    return Pose(xyz, quat_from_rpy(*rpy))


def origin_attrs(pose: Pose) -> dict[str, str]:
    attrs = {}
    if np.any(pose.translation != 0.0):
        attrs["xyz"] = fmt_floats(pose.translation)
    rpy = quat_to_rpy(pose.rotation)
    if any(abs(a) > 1e-12 for a in rpy):
        attrs["rpy"] = fmt_floats(rpy)
    return attrs


def serialize(root: ET.Element) -> str:
    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="unicode") + "\n"


def record_extra_attrs(properties, fmt: str, path: str, element: ET.Element, consumed: set):
    """Store every attribute of ``element`` not in ``consumed`` verbatim."""
    record_attr_dict(properties, fmt, path, element.attrib, consumed)


def record_attr_dict(properties, fmt: str, path: str, attrs: dict, consumed: set):
    for attr, value in attrs.items():
        if attr not in consumed:
            record_unmapped(properties, fmt, path, attr, value)


def restore_unmapped(properties, fmt: str, owner: ET.Element):
    """Re-emit recorded unmapped attributes below ``owner``, creating the
    sub-elements a record names when export did not produce them."""
    from .options import unmapped_entries

    for path, attr, value in unmapped_entries(properties, fmt):
        element = owner
        if path:
            for tag in path.split("."):
                child = element.find(tag)
                if child is None:
                    child = ET.SubElement(element, tag)
                element = child
        if attr not in element.attrib:
            element.set(attr, value)


def record_extra_elements(properties, key: str, elements):
    """Keep unrecognized child elements as raw XML, in document order."""
    raw = [ET.tostring(el, encoding="unicode").strip() for el in elements]
    if raw:
        properties.set(key, [("item", PropertyKind.STRING, text) for text in raw], PropertyKind.TRIPLES)


def restore_extra_elements(properties, key: str, parent: ET.Element):
    for _, _, text in properties.get(key, []):
        try:
            parent.append(ET.fromstring(text))
        except ET.ParseError:
            continue  # never let a damaged passthrough block an export


def imported_name(world: SceneWorld, raw: str) -> str:
    """Sanitized, collision-free identifier for a source element name."""
    return world.unique_name(sanitize_name(raw))


def note_source_name(element, raw: str):
    """Keep the original name when import had to change it."""
    if element.name != raw:
        element.properties.set("source:name", raw, PropertyKind.STRING)


def export_name(element) -> str:
    return element.properties.get("source:name", element.name)


def mesh_reference(geom, options, diags) -> str:
    """Path string for a mesh geometry, writing embedded data out as OBJ."""
    if geom.mesh_file is not None:
        return str(geom.mesh_file)
    filename = f"{geom.name}.obj"
    if geom.mesh_data is None:
        raise SceneExportError(f"mesh geometry {geom.name!r} has neither file nor data")
    if options.mesh_root is not None:
        target = Path(options.mesh_root) / filename
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(write_obj(geom.mesh_data, comment=geom.name))
    else:
        diags.warning("mesh-not-written",
                      f"no mesh directory set; {filename} referenced but not written", mesh=filename)
    return filename


class ExportNames:
    """Collision-free output names per namespace, preferring source names.

    Imports suffix colliding identifiers to keep the scene index unique and
    remember the original under source:name; merged scenes can therefore
    carry several elements that all want the same output name.  First come
    first served, everyone else falls back to their unique scene name.
    """

    def __init__(self, world: SceneWorld):
        self.bodies = _allocate(world.iter_bodies())
        self.joints = _allocate(world.iter_joints())
        self.geoms = _allocate(world.iter_geometries())


def _allocate(elements) -> dict[str, str]:
    taken, out = set(), {}
    for el in elements:
        want = export_name(el)
        if want in taken:
            want = el.name
        base, n = want, 2
        while want in taken:
            want = f"{base}_{n}"
            n += 1
        taken.add(want)
        out[el.name] = want
    return out
