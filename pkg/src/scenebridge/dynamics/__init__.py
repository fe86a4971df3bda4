from .massprops import (
    KERNEL_BACKEND,
    MassPropertiesResult,
    available_backends,
    box_mass_properties,
    compute_mass_properties,
    cylinder_mass_properties,
    ellipsoid_mass_properties,
    geometry_mass_properties,
    integrate_triangles,
    sphere_mass_properties,
    transport_to_frame,
)
from .consolidate import consolidate_inertia, repair_inertial, validate_inertial
from .refine import (
    RefineOptions,
    RefineReport,
    body_mass_properties,
    mesh_is_convex,
    refine_dynamics,
)

__all__ = [
    "KERNEL_BACKEND",
    "MassPropertiesResult",
    "RefineOptions",
    "RefineReport",
    "available_backends",
    "body_mass_properties",
    "box_mass_properties",
    "compute_mass_properties",
    "consolidate_inertia",
    "cylinder_mass_properties",
    "ellipsoid_mass_properties",
    "geometry_mass_properties",
    "integrate_triangles",
    "mesh_is_convex",
    "refine_dynamics",
    "repair_inertial",
    "sphere_mass_properties",
    "transport_to_frame",
    "validate_inertial",
]
