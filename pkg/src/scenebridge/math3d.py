"""Quaternion and rigid-transform helpers.

Quaternions are scalar-first ``(w, x, y, z)`` unit quaternions throughout.
Angles are radians, lengths are meters.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

QUAT_NORM_TOL = 1e-9


def vec3(x, y=None, z=None) -> np.ndarray:
    if y is None:
        arr = np.asarray(x, dtype=float).reshape(3)
    else:
        arr = np.array([x, y, z], dtype=float)
    return arr


def quat_identity() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 0.0])


def quat_normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float).reshape(4)
    norm = np.linalg.norm(q)
    if norm == 0.0:
        raise ValueError("zero quaternion cannot be normalized")
    q = q / norm
    # Canonical sign: first nonzero component positive keeps emit/parse stable.
    for comp in q:
        if comp != 0.0:
            if comp < 0.0:
                q = -q
            break
    return q


def quat_multiply(a, b) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_conjugate(q) -> np.ndarray:
    w, x, y, z = q
    return np.array([w, -x, -y, -z])


def quat_rotate(q, v) -> np.ndarray:
    """Rotate vector v by quaternion q."""
    w = q[0]
    u = np.asarray(q[1:], dtype=float)
    v = np.asarray(v, dtype=float)
    return v + 2.0 * np.cross(u, np.cross(u, v) + w * v)


def quat_from_axis_angle(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float).reshape(3)
    norm = np.linalg.norm(axis)
    if norm == 0.0:
        raise ValueError("zero rotation axis")
    axis = axis / norm
    half = 0.5 * angle
    return np.concatenate(([np.cos(half)], np.sin(half) * axis))


_AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


def quat_from_euler(angles, seq: str = "xyz", intrinsic: bool = False) -> np.ndarray:
    """Compose single-axis rotations.

    ``intrinsic=False`` rotates about fixed (parent) axes, so later rotations
    pre-multiply; ``intrinsic=True`` rotates about the moving frame and
    post-multiplies.  URDF/SDF rpy is extrinsic xyz; MJCF's default eulerseq
    "xyz" is the moving-axes (intrinsic) form.
    """
    if len(seq) != len(angles):
        raise ValueError("euler sequence length must match angle count")
    q = quat_identity()
    for axis_name, angle in zip(seq.lower(), angles):
        step = quat_from_axis_angle(_AXES[axis_name], float(angle))
        q = quat_multiply(q, step) if intrinsic else quat_multiply(step, q)
    return quat_normalize(q)


def quat_from_rpy(roll: float, pitch: float, yaw: float) -> np.ndarray:
    return quat_from_euler((roll, pitch, yaw), "xyz", intrinsic=False)


def quat_to_rpy(q) -> tuple[float, float, float]:
    """Inverse of quat_from_rpy (extrinsic xyz)."""
    w, x, y, z = quat_normalize(q)
    sinp = 2.0 * (w * y - z * x)
    sinp = min(1.0, max(-1.0, sinp))
    roll = np.arctan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y))
    pitch = np.arcsin(sinp)
    yaw = np.arctan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z))
    return float(roll), float(pitch), float(yaw)


def quat_to_matrix(q) -> np.ndarray:
    w, x, y, z = quat_normalize(q)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_from_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    trace = m[0, 0] + m[1, 1] + m[2, 2]
    if trace > 0.0:
        s = 0.5 / np.sqrt(trace + 1.0)
        q = np.array(
            [0.25 / s, (m[2, 1] - m[1, 2]) * s, (m[0, 2] - m[2, 0]) * s, (m[1, 0] - m[0, 1]) * s]
        )
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = 2.0 * np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2])
        q = np.array(
            [(m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s]
        )
    elif m[1, 1] > m[2, 2]:
        s = 2.0 * np.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2])
        q = np.array(
            [(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s]
        )
    else:
        s = 2.0 * np.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1])
        q = np.array(
            [(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s]
        )
    return quat_normalize(q)


def quat_between_vectors(a, b) -> np.ndarray:
    """Smallest rotation taking direction a to direction b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    dot = float(np.dot(a, b))
    if dot > 1.0 - 1e-12:
        return quat_identity()
    if dot < -1.0 + 1e-12:
        # 180 degrees: pick any axis orthogonal to a.
        axis = np.cross(a, [1.0, 0.0, 0.0])
        if np.linalg.norm(axis) < 1e-9:
            axis = np.cross(a, [0.0, 1.0, 0.0])
        return quat_from_axis_angle(axis, np.pi)
    axis = np.cross(a, b)
    return quat_normalize(np.concatenate(([1.0 + dot], axis)))


def quat_distance(a, b) -> float:
    """Sign-invariant euclidean distance between unit quaternions."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))


@dataclass
class Pose:
    """Rigid transform: maps local-frame coordinates into the parent frame."""

    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rotation: np.ndarray = field(default_factory=quat_identity)

    def __post_init__(self):
        self.translation = np.asarray(self.translation, dtype=float).reshape(3)
        self.rotation = quat_normalize(self.rotation)

    @classmethod
    def identity(cls) -> "Pose":
        return cls()

    def compose(self, other: "Pose") -> "Pose":
        """self ∘ other: apply other first, then self."""
        return Pose(
            self.translation + quat_rotate(self.rotation, other.translation),
            quat_multiply(self.rotation, other.rotation),
        )

    def inverse(self) -> "Pose":
        inv_q = quat_conjugate(self.rotation)
        return Pose(-quat_rotate(inv_q, self.translation), inv_q)

    def transform_point(self, point) -> np.ndarray:
        return self.translation + quat_rotate(self.rotation, point)

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = quat_to_matrix(self.rotation)
        m[:3, 3] = self.translation
        return m

    def copy(self) -> "Pose":
        return Pose(self.translation.copy(), self.rotation.copy())

    def is_identity(self, tol: float = 0.0) -> bool:
        return bool(
            np.all(np.abs(self.translation) <= tol)
            and quat_distance(self.rotation, quat_identity()) <= tol
        )

    def approx_equal(self, other: "Pose", lin_tol: float = 1e-6, ang_tol: float = 1e-9) -> bool:
        return (
            float(np.max(np.abs(self.translation - other.translation))) <= lin_tol
            and quat_distance(self.rotation, other.rotation) <= ang_tol
        )

    def __repr__(self):
        t = tuple(round(float(v), 9) for v in self.translation)
        q = tuple(round(float(v), 9) for v in self.rotation)
        return f"Pose(t={t}, q={q})"
