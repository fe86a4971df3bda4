"""Generated triangle meshes: primitives, emulated shapes, extruded rooms.

All generators return closed, consistently outward-oriented manifolds so the
results feed straight into exact mass-property integration.
"""
from __future__ import annotations

import numpy as np

from ..errors import MeshError
from .model import MeshData


def box_mesh(half_extents) -> MeshData:
    hx, hy, hz = np.asarray(half_extents, dtype=float)
    vertices = np.array(
        [
            [-hx, -hy, -hz],
            [+hx, -hy, -hz],
            [+hx, +hy, -hz],
            [-hx, +hy, -hz],
            [-hx, -hy, +hz],
            [+hx, -hy, +hz],
            [+hx, +hy, +hz],
            [-hx, +hy, +hz],
        ]
    )
    triangles = np.array(
        [
            [0, 2, 1], [0, 3, 2],  # -z
            [4, 5, 6], [4, 6, 7],  # +z
            [0, 1, 5], [0, 5, 4],  # -y
            [2, 3, 7], [2, 7, 6],  # +y
            [1, 2, 6], [1, 6, 5],  # +x
            [3, 0, 4], [3, 4, 7],  # -x
        ],
        dtype=np.int32,
    )
    return MeshData(vertices, triangles)


def icosphere(radius: float = 1.0, subdivisions: int = 2) -> MeshData:
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    vertices = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=float,
    )
    triangles = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [v / np.linalg.norm(v) for v in vertices]

    for _ in range(subdivisions):
        midpoint_cache: dict[tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            cached = midpoint_cache.get(key)
            if cached is not None:
                return cached
            mid = verts[a] + verts[b]
            mid = mid / np.linalg.norm(mid)
            verts.append(mid)
            midpoint_cache[key] = len(verts) - 1
            return len(verts) - 1

        next_triangles = []
        for a, b, c in triangles:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            next_triangles.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        triangles = next_triangles

    return MeshData(np.asarray(verts) * radius, np.asarray(triangles, dtype=np.int32))


def cylinder_mesh(radius: float, half_length: float, segments: int = 24) -> MeshData:
    angles = np.linspace(0.0, 2.0 * np.pi, segments, endpoint=False)
    ring = np.stack([np.cos(angles), np.sin(angles)], axis=1) * radius
    bottom = np.column_stack([ring, np.full(segments, -half_length)])
    top = np.column_stack([ring, np.full(segments, +half_length)])
    vertices = np.vstack([bottom, top, [[0, 0, -half_length], [0, 0, +half_length]]])
    c_bot, c_top = 2 * segments, 2 * segments + 1

    triangles = []
    for i in range(segments):
        j = (i + 1) % segments
        triangles.append((i, j, segments + j))
        triangles.append((i, segments + j, segments + i))
        triangles.append((c_bot, j, i))
        triangles.append((c_top, segments + i, segments + j))
    return MeshData(vertices, np.asarray(triangles, dtype=np.int32))


def capsule_mesh(radius: float, half_length: float, segments: int = 24, rings: int = 8) -> MeshData:
    """Cylinder with hemispherical caps along +z/-z (MJCF capsule emulation)."""
    angles = np.linspace(0.0, 2.0 * np.pi, segments, endpoint=False)
    cos_a, sin_a = np.cos(angles), np.sin(angles)

    # Ring ladder from bottom apex to top apex; each entry is (z, ring radius).
    levels: list[tuple[float, float]] = []
    for i in range(rings, 0, -1):
        lat = (i / rings) * (np.pi / 2.0)
        levels.append((-half_length - radius * np.sin(lat), radius * np.cos(lat)))
    levels.append((-half_length, radius))
    levels.append((+half_length, radius))
    for i in range(1, rings + 1):
        lat = (i / rings) * (np.pi / 2.0)
        levels.append((+half_length + radius * np.sin(lat), radius * np.cos(lat)))

    verts = [np.array([0.0, 0.0, -half_length - radius])]
    ring_start: list[int] = []
    for z, ring_radius in levels:
        if ring_radius <= 1e-12:
            continue
        ring_start.append(len(verts))
        for c, s in zip(cos_a, sin_a):
            verts.append(np.array([ring_radius * c, ring_radius * s, z]))
    verts.append(np.array([0.0, 0.0, +half_length + radius]))
    apex_bottom, apex_top = 0, len(verts) - 1

    triangles = []
    first = ring_start[0]
    for i in range(segments):
        j = (i + 1) % segments
        triangles.append((apex_bottom, first + j, first + i))
    for lower, upper in zip(ring_start[:-1], ring_start[1:]):
        for i in range(segments):
            j = (i + 1) % segments
            triangles.append((lower + i, lower + j, upper + j))
            triangles.append((lower + i, upper + j, upper + i))
    last = ring_start[-1]
    for i in range(segments):
        j = (i + 1) % segments
        triangles.append((apex_top, last + i, last + j))

    return MeshData(np.asarray(verts), np.asarray(triangles, dtype=np.int32))


def _polygon_area(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def ear_clip(points: np.ndarray) -> list[tuple[int, int, int]]:
    """Triangulate a simple polygon (no holes).  Points are (N, 2), any winding."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    if n < 3:
        raise MeshError("polygon needs at least 3 vertices")
    order = list(range(n))
    if _polygon_area(points) < 0.0:
        order.reverse()

    def cross(o, a, b):
        return (points[a][0] - points[o][0]) * (points[b][1] - points[o][1]) - (
            points[a][1] - points[o][1]
        ) * (points[b][0] - points[o][0])

    def inside(p, a, b, c):
        d1 = cross(a, b, p)
        d2 = cross(b, c, p)
        d3 = cross(c, a, p)
        return d1 >= 0 and d2 >= 0 and d3 >= 0

    triangles: list[tuple[int, int, int]] = []
    remaining = list(order)
    guard = 0
    while len(remaining) > 3:
        guard += 1
        if guard > 2 * n * n:
            raise MeshError("polygon triangulation failed; polygon may self-intersect")
        clipped = False
        for idx in range(len(remaining)):
            prev_i = remaining[idx - 1]
            cur_i = remaining[idx]
            next_i = remaining[(idx + 1) % len(remaining)]
            if cross(prev_i, cur_i, next_i) <= 0.0:
                continue  # reflex corner
            if any(
                inside(other, prev_i, cur_i, next_i)
                for other in remaining
                if other not in (prev_i, cur_i, next_i)
            ):
                continue
            triangles.append((prev_i, cur_i, next_i))
            remaining.pop(idx)
            clipped = True
            break
        if not clipped:
            raise MeshError("polygon triangulation failed; polygon may self-intersect")
    triangles.append((remaining[0], remaining[1], remaining[2]))
    return triangles


def polygon_prism(points_2d, z_bottom: float, z_top: float) -> MeshData:
    """Extrude a simple polygon into a closed solid between two z planes."""
    points = np.asarray(points_2d, dtype=float).reshape(-1, 2)
    if z_top <= z_bottom:
        raise MeshError("prism top must lie above bottom")
    if _polygon_area(points) < 0.0:
        points = points[::-1].copy()
    n = len(points)
    caps = ear_clip(points)

    bottom = np.column_stack([points, np.full(n, z_bottom)])
    top = np.column_stack([points, np.full(n, z_top)])
    vertices = np.vstack([bottom, top])

    triangles: list[tuple[int, int, int]] = []
    for a, b, c in caps:
        triangles.append((a, c, b))              # bottom faces down
        triangles.append((n + a, n + b, n + c))  # top faces up
    for i in range(n):
        j = (i + 1) % n
        triangles.append((i, j, n + j))
        triangles.append((i, n + j, n + i))
    return MeshData(vertices, np.asarray(triangles, dtype=np.int32))
