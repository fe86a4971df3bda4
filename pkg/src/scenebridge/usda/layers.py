"""Two-file scene layout: geometry layer plus sparse semantic overlay.

The main file carries the scene; tags live in a sibling ``*.semantic.usda``
file holding only ``over`` prims that apply SemanticTagAPI and contribute
``semanticTag:*`` attributes.  The main file lists the overlay as a sublayer,
so the pair composes back into one stage on load.
"""
from __future__ import annotations

from pathlib import Path

from ..core.model import SceneWorld
from ..errors import SceneImportError
from .bridge import stage_to_world, world_to_stage
from .model import UsdaAttr, UsdaPrim, UsdaStage
from .reader import read_usda
from .registry import SchemaRegistry
from .writer import write_usda

SEMANTIC_SCHEMA = "SemanticTagAPI"
SEMANTIC_PREFIX = "semanticTag:"


def _clone_prim(prim: UsdaPrim) -> UsdaPrim:
    dup = UsdaPrim(prim.name, prim.type_name, prim.specifier)
    dup.api_schemas = list(prim.api_schemas)
    dup.attributes = {
        name: UsdaAttr(attr.type_token, attr.value, attr.custom, attr.uniform)
        for name, attr in prim.attributes.items()
    }
    for child in prim.children:
        dup.add_child(_clone_prim(child))
    return dup


def _clone_stage(stage: UsdaStage) -> UsdaStage:
    dup = UsdaStage()
    dup.metadata = dict(stage.metadata)
    dup.sublayers = list(stage.sublayers)
    for prim in stage.prims:
        dup.add_prim(_clone_prim(prim))
    return dup


def _apply_override(target_stage: UsdaStage, over: UsdaPrim):
    if over.specifier != "over":
        raise SceneImportError(
            f"semantic layer prim {over.path!r} must use the over specifier"
        )
    extra_schemas = [s for s in over.api_schemas if s != SEMANTIC_SCHEMA]
    if extra_schemas:
        raise SceneImportError(
            f"semantic layer prim {over.path!r} applies non-semantic schemas {extra_schemas}"
        )
    foreign = [n for n in over.attributes if not n.startswith(SEMANTIC_PREFIX)]
    if foreign:
        raise SceneImportError(
            f"semantic layer prim {over.path!r} contributes non-semantic attributes {foreign}"
        )
    target = target_stage.find(over.path)
    if target is None:
        raise SceneImportError(f"semantic layer overrides missing prim {over.path!r}")
    if over.attributes or over.api_schemas:
        if SEMANTIC_SCHEMA not in target.api_schemas:
            target.api_schemas.append(SEMANTIC_SCHEMA)
        for name, attr in over.attributes.items():
            target.attributes[name] = UsdaAttr(
                attr.type_token, attr.value, attr.custom, attr.uniform
            )
    for child in over.children:
        _apply_override(target_stage, child)


def merge_semantic_layer(main: UsdaStage, semantic: UsdaStage) -> UsdaStage:
    """Compose the overlay's tag contributions onto a copy of the main stage."""
    merged = _clone_stage(main)
    for over in semantic.prims:
        _apply_override(merged, over)
    return merged


def _overlay_chain(overlay: UsdaStage, path: str) -> UsdaPrim:
    """The over prim at path, creating parents as bare scaffolding."""
    parts = path.strip("/").split("/")
    node = None
    for i, part in enumerate(parts):
        siblings = overlay.prims if node is None else node.children
        found = next((p for p in siblings if p.name == part), None)
        if found is None:
            found = UsdaPrim(part, None, "over")
            if node is None:
                overlay.add_prim(found)
            else:
                node.add_child(found)
        node = found
    return node


def extract_semantic_layer(stage: UsdaStage) -> tuple[UsdaStage, UsdaStage]:
    """Split a composed stage into (scene without tags, tag overlay)."""
    clean = _clone_stage(stage)
    overlay = UsdaStage()
    for prim in clean.walk():
        semantic_names = [n for n in prim.attributes if n.startswith(SEMANTIC_PREFIX)]
        tagged = SEMANTIC_SCHEMA in prim.api_schemas
        if not semantic_names and not tagged:
            continue
        over = _overlay_chain(overlay, prim.path)
        if tagged:
            over.api_schemas = [SEMANTIC_SCHEMA]
            prim.api_schemas = [s for s in prim.api_schemas if s != SEMANTIC_SCHEMA]
        for name in sorted(semantic_names):
            over.attributes[name] = prim.attributes.pop(name)
    return clean, overlay


def semantic_layer_path(scene_path: str | Path) -> Path:
    scene_path = Path(scene_path)
    return scene_path.with_name(scene_path.stem + ".semantic" + scene_path.suffix)


def save_scene(stage: UsdaStage, scene_path: str | Path) -> list[Path]:
    """Write the two-file layout; returns the paths written."""
    scene_path = Path(scene_path)
    overlay_path = semantic_layer_path(scene_path)
    clean, overlay = extract_semantic_layer(stage)
    clean.sublayers = [overlay_path.name]
    scene_path.write_text(write_usda(clean), encoding="utf-8")
    overlay_path.write_text(write_usda(overlay), encoding="utf-8")
    return [scene_path, overlay_path]


def load_scene(scene_path: str | Path) -> UsdaStage:
    """Read a scene file and compose any sublayer overlays onto it."""
    scene_path = Path(scene_path)
    stage = read_usda(scene_path.read_text(encoding="utf-8"))
    for layer_name in stage.sublayers:
        layer_path = scene_path.parent / layer_name
        if not layer_path.exists():
            raise SceneImportError(f"missing sublayer file {str(layer_path)!r}")
        stage = merge_semantic_layer(
            stage, read_usda(layer_path.read_text(encoding="utf-8"))
        )
    return stage


def save_world(world: SceneWorld, scene_path: str | Path, registry: SchemaRegistry | None = None) -> list[Path]:
    return save_scene(world_to_stage(world, registry), scene_path)


def load_world(scene_path: str | Path, registry: SchemaRegistry | None = None) -> SceneWorld:
    return stage_to_world(load_scene(scene_path), registry)
