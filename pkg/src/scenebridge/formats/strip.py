"""Element stripping: drop scene content a target does not need.

Operates on a copy of the world so the original stays intact; applying the
same strip set twice is a no-op on the second pass.
"""
from __future__ import annotations

from ..core.model import SceneWorld
from ..core.properties import FileReference, PropertyKind

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".tga", ".bmp", ".gif", ".exr", ".dds")

#: Joint property names describing dynamics rather than kinematics.
_JOINT_DYNAMICS_MARKERS = ("dynamics", "damping", "stiffness", "armature", "frictionloss")


def _references_image(value) -> bool:
    return isinstance(value, FileReference) and str(value).lower().endswith(IMAGE_SUFFIXES)


def _drop_triples(properties, name: str, predicate):
    entries = properties.get(name)
    if not entries:
        return
    kept = [entry for entry in entries if not predicate(entry[2])]
    if len(kept) != len(entries):
        if kept:
            properties.set(name, kept, PropertyKind.TRIPLES)
        else:
            properties.remove(name)


def strip_elements(world: SceneWorld, strip) -> SceneWorld:
    strip = frozenset(strip)
    out = world.copy()
    if not strip:
        return out

    if "materials" in strip:
        out.world_properties.remove("urdf:materialDefs")
        _drop_triples(out.world_properties, "mjcf:assetExtras",
                      lambda raw: raw.lstrip().startswith("<material"))
    if "textures" in strip:
        _drop_triples(out.world_properties, "mjcf:assetExtras",
                      lambda raw: raw.lstrip().startswith("<texture"))

    for body in out.iter_bodies():
        if "physics_properties" in strip:
            body.inertial = None
            # also drop inertial provenance so exporters cannot rebuild the element
            for name, _, _ in list(body.properties.items()):
                if ":inertial" in name:
                    body.properties.remove(name)
            for joint in body.joints:
                for name, kind, _ in list(joint.properties.items()):
                    if any(marker in name for marker in _JOINT_DYNAMICS_MARKERS):
                        joint.properties.remove(name)

        kept = []
        for geom in body.geometries:
            remove = (
                "non_collidable_geometry" in strip and not geom.collidable
            ) or (
                "visual_meshes" in strip and geom.geom_type == "mesh" and not geom.collidable
            )
            if remove:
                out.name_index.pop(geom.name, None)
                continue
            if "materials" in strip:
                geom.material = None
                geom.rgba = None
                for name, _, _ in list(geom.properties.items()):
                    if ":material" in name:
                        geom.properties.remove(name)
            if "textures" in strip:
                for name, kind, value in list(geom.properties.items()):
                    if kind is PropertyKind.REFERENCE and _references_image(value):
                        geom.properties.remove(name)
            kept.append(geom)
        body.geometries = kept
    return out
