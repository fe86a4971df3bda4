"""Text USD (USDA) subset: stage model, deterministic writer, parser, and
the scene-graph bridge."""

from .bridge import emit_usda, parse_usda, stage_to_world, world_to_stage
from .layers import (
    extract_semantic_layer,
    load_scene,
    load_world,
    merge_semantic_layer,
    save_scene,
    save_world,
    semantic_layer_path,
)
from .model import UsdaAttr, UsdaPath, UsdaPrim, UsdaStage
from .names import NameSanitizer, sanitize_name
from .reader import read_usda
from .registry import (
    ApiSchema,
    AttrDecl,
    SchemaRegistry,
    default_registry,
)
from .writer import write_usda

__all__ = [
    "ApiSchema",
    "AttrDecl",
    "NameSanitizer",
    "SchemaRegistry",
    "UsdaAttr",
    "UsdaPath",
    "UsdaPrim",
    "UsdaStage",
    "default_registry",
    "emit_usda",
    "extract_semantic_layer",
    "load_scene",
    "load_world",
    "merge_semantic_layer",
    "parse_usda",
    "read_usda",
    "sanitize_name",
    "save_scene",
    "save_world",
    "semantic_layer_path",
    "stage_to_world",
    "world_to_stage",
]
