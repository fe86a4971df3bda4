"""Combining and repairing rigid-body inertial properties.

A set of bodies welded together behaves as one rigid body; its inertia is the
sum of the member inertias transported to the common center of mass.  The sum
runs in the order the members are given so repeated calls are bitwise
reproducible.
"""
from __future__ import annotations

import numpy as np

from ..core.model import InertialProperties
from ..core.validation import ValidationReport, check_inertial
from ..errors import SceneBridgeError
from ..math3d import Pose, quat_to_matrix


def consolidate_inertia(members: list[tuple[InertialProperties, Pose]]) -> InertialProperties:
    """Combine member inertials, each with the pose of its body frame in the
    target frame, into one inertial expressed in the target frame."""
    if not members:
        raise SceneBridgeError("cannot consolidate an empty member list")
    total_mass = 0.0
    for inertial, _ in members:
        total_mass += inertial.mass
    if total_mass <= 0.0:
        raise SceneBridgeError(f"combined mass must be positive, got {total_mass}")

    coms = []
    for inertial, pose in members:
        coms.append(pose.transform_point(inertial.center_of_mass))
    weighted = np.zeros(3)
    for (inertial, _), com in zip(members, coms):
        weighted += inertial.mass * com
    combined_com = weighted / total_mass

    inertia = np.zeros((3, 3))
    eye = np.eye(3)
    for (inertial, pose), com in zip(members, coms):
        rot = quat_to_matrix(pose.rotation)
        rotated = rot @ inertial.inertia @ rot.T
        d = com - combined_com
        inertia += rotated + inertial.mass * (float(d @ d) * eye - np.outer(d, d))
    return InertialProperties(total_mass, combined_com, inertia)


def validate_inertial(inertial: InertialProperties) -> list[str]:
    """Physical-consistency violations, empty when the inertial is realizable."""
    report = ValidationReport()
    check_inertial(inertial, "inertial", report)
    return [issue.message for issue in report.violations]


def repair_inertial(inertial: InertialProperties, max_rounds: int = 8) -> InertialProperties:
    """Nearest physically consistent inertial.

    Symmetrizes the tensor, clamps negative eigenvalues, and projects the
    principal moments onto the triangle-inequality halfspace (the closest
    point in the eigenvalue space).  Mass and center of mass are kept; a
    non-positive mass cannot be repaired and raises.
    """
    if inertial.mass <= 0.0:
        raise SceneBridgeError(f"mass {inertial.mass} is not repairable")
    sym = 0.5 * (inertial.inertia + inertial.inertia.T)
    eigvals, eigvecs = np.linalg.eigh(sym)
    eigvals = np.maximum(eigvals, 0.0)
    for _ in range(max_rounds):
        order = np.argsort(eigvals)
        l1, l2, l3 = eigvals[order]
        gap = l3 - (l1 + l2)
        if gap <= 1e-12 * max(1.0, l3):
            break
        # Euclidean projection onto the violated halfspace l1 + l2 >= l3.
        eigvals[order[0]] = l1 + gap / 3.0
        eigvals[order[1]] = l2 + gap / 3.0
        eigvals[order[2]] = l3 - gap / 3.0
        eigvals = np.maximum(eigvals, 0.0)
    repaired = eigvecs @ np.diag(eigvals) @ eigvecs.T
    repaired = 0.5 * (repaired + repaired.T)
    return InertialProperties(inertial.mass, inertial.center_of_mass.copy(), repaired)
