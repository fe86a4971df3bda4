"""Exact mass properties of uniform-density solids.

Polyhedra are integrated exactly (to floating point) by reducing the mass
integrals to per-face volume terms over a closed, outward-oriented triangle
mesh.  The per-triangle accumulation is the hot loop, so it lives in a
compiled extension with a vectorized numpy fallback; the backend is picked
once at import and can be forced with ``SCENEBRIDGE_PURE_PYTHON=1``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..errors import MeshError, SceneBridgeError
from ..core.model import InertialProperties, MeshData
from ..math3d import Pose, quat_to_matrix
from . import _masskernel_py

if os.environ.get("SCENEBRIDGE_PURE_PYTHON"):
    _kernel = _masskernel_py
    KERNEL_BACKEND = "pure-python"
else:
    try:
        from . import _masskernel as _kernel  # type: ignore[attr-defined]

        KERNEL_BACKEND = "compiled"
    except ImportError:
        _kernel = _masskernel_py
        KERNEL_BACKEND = "pure-python"


def available_backends() -> dict[str, object]:
    backends: dict[str, object] = {"pure-python": _masskernel_py}
    try:
        from . import _masskernel  # type: ignore[attr-defined]

        backends["compiled"] = _masskernel
    except ImportError:
        pass
    return backends


def integrate_triangles(vertices, triangles, backend: str | None = None) -> np.ndarray:
    """Volume integrals [1, x, y, z, x2, y2, z2, xy, yz, zx] over the solid."""
    vertices = np.ascontiguousarray(vertices, dtype=np.float64).reshape(-1, 3)
    triangles = np.ascontiguousarray(triangles, dtype=np.int32).reshape(-1, 3)
    if backend is None:
        impl = _kernel
    else:
        impl = available_backends()[backend]
    return np.asarray(impl.integrate_triangles(vertices, triangles))


@dataclass
class MassPropertiesResult:
    mass: float
    center_of_mass: np.ndarray
    inertia_about_com: np.ndarray
    volume: float

    def to_inertial(self) -> InertialProperties:
        return InertialProperties(self.mass, self.center_of_mass.copy(), self.inertia_about_com.copy())


def compute_mass_properties(mesh: MeshData, density: float) -> MassPropertiesResult:
    """Exact mass, center of mass, and inertia (about the center of mass, mesh
    frame) of a uniform-density solid bounded by a closed triangle mesh."""
    if density <= 0.0:
        raise SceneBridgeError(f"density must be positive, got {density}")
    issues = mesh.validate()
    if issues:
        raise MeshError("degenerate mesh: " + "; ".join(issues))
    boundary = mesh.boundary_edge_count()
    if boundary:
        raise MeshError(f"open mesh: {boundary} boundary edges; close the mesh first")

    q = integrate_triangles(mesh.vertices, mesh.triangles)
    volume = float(q[0])
    if volume < 0.0:
        raise MeshError(
            f"negative volume {volume:.6g}: triangle orientation is inverted, flip the winding"
        )
    if volume == 0.0:
        raise MeshError("mesh encloses zero volume")

    com = q[1:4] / volume
    cx, cy, cz = com
    # Inertia about the origin, unit density, then transported to the COM.
    ixx = q[5] + q[6] - volume * (cy * cy + cz * cz)
    iyy = q[4] + q[6] - volume * (cx * cx + cz * cz)
    izz = q[4] + q[5] - volume * (cx * cx + cy * cy)
    ixy = -(q[7] - volume * cx * cy)
    iyz = -(q[8] - volume * cy * cz)
    ixz = -(q[9] - volume * cz * cx)
    inertia = density * np.array([[ixx, ixy, ixz], [ixy, iyy, iyz], [ixz, iyz, izz]])
    return MassPropertiesResult(density * volume, com, inertia, volume)


# -- analytic primitives (geometry frame, uniform density) -------------------


def box_mass_properties(half_extents, density: float) -> MassPropertiesResult:
    hx, hy, hz = (float(v) for v in half_extents)
    volume = 8.0 * hx * hy * hz
    mass = density * volume
    lx, ly, lz = 2.0 * hx, 2.0 * hy, 2.0 * hz
    inertia = mass / 12.0 * np.diag([ly * ly + lz * lz, lx * lx + lz * lz, lx * lx + ly * ly])
    return MassPropertiesResult(mass, np.zeros(3), inertia, volume)


def ellipsoid_mass_properties(semi_axes, density: float) -> MassPropertiesResult:
    a, b, c = (float(v) for v in semi_axes)
    volume = 4.0 / 3.0 * np.pi * a * b * c
    mass = density * volume
    inertia = mass / 5.0 * np.diag([b * b + c * c, a * a + c * c, a * a + b * b])
    return MassPropertiesResult(mass, np.zeros(3), inertia, volume)


def sphere_mass_properties(radius: float, density: float) -> MassPropertiesResult:
    return ellipsoid_mass_properties((radius, radius, radius), density)


def cylinder_mass_properties(radius: float, half_length: float, density: float) -> MassPropertiesResult:
    r, h = float(radius), 2.0 * float(half_length)
    volume = np.pi * r * r * h
    mass = density * volume
    ixx = mass * (3.0 * r * r + h * h) / 12.0
    inertia = np.diag([ixx, ixx, mass * r * r / 2.0])
    return MassPropertiesResult(mass, np.zeros(3), inertia, volume)


def transport_to_frame(result: MassPropertiesResult, pose: Pose) -> MassPropertiesResult:
    """Express a result computed in a local frame in the frame ``pose`` maps into."""
    rot = quat_to_matrix(pose.rotation)
    com = pose.transform_point(result.center_of_mass)
    inertia = rot @ result.inertia_about_com @ rot.T
    return MassPropertiesResult(result.mass, com, inertia, result.volume)


def geometry_mass_properties(geometry, density: float, mesh_loader=None) -> MassPropertiesResult:
    """Mass properties of one geometry, expressed in its body frame.

    ``mesh_loader`` resolves a file reference to MeshData; embedded mesh data
    is used directly.  Raises MeshError for open or unresolvable meshes.
    """
    scale = geometry.scale
    uniform = float(scale[0])
    if geometry.geom_type == "cube":
        local = box_mass_properties(geometry.half_extents * uniform, density)
    elif geometry.geom_type == "sphere":
        local = ellipsoid_mass_properties(geometry.radius * scale, density)
    elif geometry.geom_type == "cylinder":
        local = cylinder_mass_properties(geometry.radius * uniform, geometry.half_length * uniform, density)
    elif geometry.geom_type == "mesh":
        mesh = geometry.mesh_data
        if mesh is None:
            if geometry.mesh_file is None or mesh_loader is None:
                raise MeshError(f"geometry {geometry.name!r} has no usable mesh data")
            mesh = mesh_loader(geometry.mesh_file)
        if not np.allclose(scale, 1.0):
            mesh = mesh.transformed(scale=scale)
        local = compute_mass_properties(mesh, density)
    else:
        raise SceneBridgeError(f"unknown geometry type {geometry.geom_type!r}")
    return transport_to_frame(local, geometry.pose)
