"""Deterministic USDA text emission.

Same stage in, byte-identical text out: layer metadata in a fixed key order,
attributes alphabetical within each prim, floats through repr (shortest
round-trip form), LF line endings.
"""
from __future__ import annotations

import json

import numpy as np

from ..core.properties import FileReference
from ..errors import SceneExportError
from .model import UsdaAttr, UsdaPath, UsdaPrim, UsdaStage

_INDENT = "    "

#: Layer metadata keys in emission order.
_METADATA_ORDER = ("defaultPrim", "metersPerUnit", "subLayers", "upAxis")


def _format_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise SceneExportError(f"non-finite number {x} cannot be serialized")
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


def _format_scalar(type_token: str, value) -> str:
    if type_token == "bool":
        return "true" if value else "false"
    if type_token == "int":
        return str(int(value))
    if type_token in ("double", "float"):
        return _format_float(float(value))
    if type_token in ("string", "token"):
        return json.dumps(str(value))
    if type_token == "asset":
        path = value.path if isinstance(value, FileReference) else str(value)
        if "@" in path:
            raise SceneExportError(f"asset path {path!r} contains '@'")
        return f"@{path}@"
    raise SceneExportError(f"unsupported attribute type {type_token!r}")


def _format_tuple(values) -> str:
    return "(" + ", ".join(_format_float(float(v)) for v in values) + ")"


def format_value(type_token: str, value) -> str:
    if type_token == "rel":
        if isinstance(value, (list, tuple)):
            return "[" + ", ".join(f"<{p}>" for p in value) + "]"
        return f"<{value}>"
    if type_token.endswith("[]"):
        base = type_token[:-2]
        if base in ("double3", "float3", "color3f", "point3f", "normal3f"):
            rows = np.asarray(value, dtype=float).reshape(-1, 3)
            return "[" + ", ".join(_format_tuple(row) for row in rows) + "]"
        if base in ("quatd", "quatf"):
            rows = np.asarray(value, dtype=float).reshape(-1, 4)
            return "[" + ", ".join(_format_tuple(row) for row in rows) + "]"
        items = value if isinstance(value, (list, tuple)) else np.asarray(value).tolist()
        return "[" + ", ".join(_format_scalar(base, v) for v in items) + "]"
    if type_token in ("double3", "float3", "color3f", "point3f", "normal3f"):
        return _format_tuple(np.asarray(value, dtype=float).reshape(3))
    if type_token in ("quatd", "quatf"):
        return _format_tuple(np.asarray(value, dtype=float).reshape(4))
    if type_token in ("matrix2d", "matrix3d", "matrix4d"):
        n = int(type_token[6])
        rows = np.asarray(value, dtype=float).reshape(n, n)
        return "( " + ", ".join(_format_tuple(row) for row in rows) + " )"
    return _format_scalar(type_token, value)


def _write_attr(lines: list[str], indent: str, name: str, attr: UsdaAttr):
    qualifiers = ""
    if attr.custom:
        qualifiers += "custom "
    if attr.uniform:
        qualifiers += "uniform "
    if attr.type_token == "rel":
        lines.append(f"{indent}{qualifiers}rel {name} = {format_value('rel', attr.value)}")
    else:
        lines.append(
            f"{indent}{qualifiers}{attr.type_token} {name} = "
            f"{format_value(attr.type_token, attr.value)}"
        )


def _write_prim(lines: list[str], prim: UsdaPrim, depth: int):
    indent = _INDENT * depth
    header = prim.specifier
    if prim.type_name:
        header += f" {prim.type_name}"
    header += f' "{prim.name}"'
    if prim.api_schemas:
        lines.append(f"{indent}{header} (")
        schemas = ", ".join(json.dumps(s) for s in sorted(prim.api_schemas))
        lines.append(f"{indent}{_INDENT}prepend apiSchemas = [{schemas}]")
        lines.append(f"{indent})")
    else:
        lines.append(f"{indent}{header}")
    lines.append(f"{indent}{{")

    inner = _INDENT * (depth + 1)
    for name in sorted(prim.attributes):
        _write_attr(lines, inner, name, prim.attributes[name])

    for child in prim.children:
        if prim.attributes or child is not prim.children[0]:
            lines.append("")
        _write_prim(lines, child, depth + 1)

    lines.append(f"{indent}}}")


def write_usda(stage: UsdaStage) -> str:
    lines = ["#usda 1.0"]
    metadata = dict(stage.metadata)
    if stage.sublayers:
        metadata["subLayers"] = list(stage.sublayers)
    if metadata:
        lines.append("(")
        for key in _METADATA_ORDER:
            if key not in metadata:
                continue
            value = metadata.pop(key)
            lines.append(f"{_INDENT}{_format_metadata(key, value)}")
        for key in sorted(metadata):
            lines.append(f"{_INDENT}{_format_metadata(key, metadata[key])}")
        lines.append(")")

    for prim in stage.prims:
        lines.append("")
        _write_prim(lines, prim, 0)
    return "\n".join(lines) + "\n"


def _format_metadata(key: str, value) -> str:
    if key == "subLayers":
        inner = ", ".join(f"@{layer}@" for layer in value)
        return f"subLayers = [{inner}]"
    if isinstance(value, str):
        return f"{key} = {json.dumps(value)}"
    if isinstance(value, bool):
        return f"{key} = {'true' if value else 'false'}"
    if isinstance(value, (int, np.integer)):
        return f"{key} = {int(value)}"
    if isinstance(value, (float, np.floating)):
        return f"{key} = {_format_float(float(value))}"
    raise SceneExportError(f"unsupported layer metadata value for {key!r}: {value!r}")
