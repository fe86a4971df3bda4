"""Wavefront OBJ and STL mesh file IO.

Only the geometry carried by the scene model is read: vertex positions and
faces (triangulated with a fan for higher-order polygons).  Normals, texture
coordinates, groups, and material statements are skipped on read and never
written.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..core.meshes import MeshData
from ..core.properties import FileReference
from ..errors import MeshError


def read_obj(text: str, source: str = "<string>") -> MeshData:
    vertices = []
    faces = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "v":
            if len(parts) < 4:
                raise MeshError(f"{source}:{lineno}: vertex needs 3 coordinates")
            vertices.append([float(parts[1]), float(parts[2]), float(parts[3])])
        elif parts[0] == "f":
            if len(parts) < 4:
                raise MeshError(f"{source}:{lineno}: face needs at least 3 vertices")
            corners = []
            for token in parts[1:]:
                # f v, f v/vt, f v/vt/vn, f v//vn all start with the vertex index
                index = int(token.split("/")[0])
                # negative indices count back from the current vertex list
                corners.append(index - 1 if index > 0 else len(vertices) + index)
            for i in range(1, len(corners) - 1):
                faces.append([corners[0], corners[i], corners[i + 1]])
        # vn/vt/usemtl/mtllib/o/g/s are irrelevant here
    if not vertices:
        raise MeshError(f"{source}: no vertices")
    mesh = MeshData(vertices, faces)
    if mesh.triangles.size and (mesh.triangles.min() < 0 or mesh.triangles.max() >= len(vertices)):
        raise MeshError(f"{source}: face index out of range")
    return mesh


def write_obj(mesh: MeshData, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.append(f"# {comment}")
    for x, y, z in mesh.vertices:
        lines.append(f"v {x:.9g} {y:.9g} {z:.9g}")
    for a, b, c in mesh.triangles:
        lines.append(f"f {a + 1} {b + 1} {c + 1}")
    return "\n".join(lines) + "\n"


def read_stl(data: bytes, source: str = "<bytes>") -> MeshData:
    """Binary or ASCII STL; vertices are deduplicated exactly."""
    if _looks_ascii_stl(data):
        return _read_stl_ascii(data.decode("ascii", errors="replace"), source)
    return _read_stl_binary(data, source)


def _looks_ascii_stl(data: bytes) -> bool:
    if not data.startswith(b"solid"):
        return False
    # A binary file may still start with "solid"; an ASCII one must mention
    # a facet within its text.
    return b"facet" in data[:512]


def _read_stl_binary(data: bytes, source: str) -> MeshData:
    if len(data) < 84:
        raise MeshError(f"{source}: binary STL shorter than its header")
    (count,) = struct.unpack_from("<I", data, 80)
    expected = 84 + count * 50
    if len(data) < expected:
        raise MeshError(f"{source}: binary STL truncated ({len(data)} < {expected} bytes)")
    raw = np.frombuffer(data, dtype=np.uint8, count=count * 50, offset=84)
    records = raw.reshape(count, 50)
    triangles = records[:, 12:48].copy().view("<f4").reshape(count, 3, 3).astype(float)
    return _dedup_triangles(triangles)


def _read_stl_ascii(text: str, source: str) -> MeshData:
    coords = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if parts[:1] == ["vertex"]:
            if len(parts) != 4:
                raise MeshError(f"{source}:{lineno}: vertex needs 3 coordinates")
            coords.append([float(parts[1]), float(parts[2]), float(parts[3])])
    if not coords or len(coords) % 3:
        raise MeshError(f"{source}: vertex count {len(coords)} is not a multiple of 3")
    return _dedup_triangles(np.asarray(coords).reshape(-1, 3, 3))


def _dedup_triangles(triangles: np.ndarray) -> MeshData:
    flat = triangles.reshape(-1, 3)
    vertices, inverse = np.unique(flat, axis=0, return_inverse=True)
    return MeshData(vertices, inverse.reshape(-1, 3))


def load_mesh_file(path: str | Path) -> MeshData:
    """Read an OBJ or STL file, recording provenance on the result."""
    path = Path(path)
    suffix = path.suffix.lower()
    try:
        if suffix == ".obj":
            mesh = read_obj(path.read_text(), source=str(path))
        elif suffix == ".stl":
            mesh = read_stl(path.read_bytes(), source=str(path))
        else:
            raise MeshError(f"unsupported mesh format {suffix!r}: {path}")
    except OSError as exc:
        raise MeshError(f"cannot read mesh file {path}: {exc}") from exc
    mesh.provenance = (str(path), suffix.lstrip("."))
    return mesh


def directory_mesh_loader(root: str | Path | None):
    """A mesh loader resolving file references against ``root``, with a cache.

    The cache maps resolved paths to loaded meshes; concurrent readers are
    fine because entries are only ever added, never mutated.
    """
    root = Path(root) if root is not None else None
    cache: dict[str, MeshData] = {}

    def load(ref: FileReference | str) -> MeshData:
        raw = str(ref)
        path = resolve_mesh_path(raw, root)
        key = str(path)
        if key not in cache:
            cache[key] = load_mesh_file(path)
        return cache[key]

    return load


def resolve_mesh_path(reference: str, root: str | Path | None) -> Path:
    """Map a document mesh reference to a filesystem path.

    package:// and model:// URIs drop their scheme and package name; what is
    left, like any relative reference, resolves under ``root``.
    """
    for scheme in ("package://", "model://"):
        if reference.startswith(scheme):
            remainder = reference[len(scheme):]
            reference = remainder.partition("/")[2] or remainder
            break
    path = Path(reference)
    if path.is_absolute() or root is None:
        return path
    return Path(root) / path
