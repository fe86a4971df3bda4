"""Pure-python (vectorized numpy) triangle integration kernel.

Fallback for :mod:`scenebridge.dynamics._masskernel`; same contract, selected
at import time when the compiled extension is unavailable.
"""
from __future__ import annotations

import numpy as np

_COEFFS = np.array([1 / 6, 1 / 24, 1 / 24, 1 / 24, 1 / 60, 1 / 60, 1 / 60, 1 / 120, 1 / 120, 1 / 120])


def integrate_triangles(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Volume integrals of 1, x, y, z, x², y², z², xy, yz, zx over the solid
    bounded by an outward-oriented closed triangle mesh.

    The mass integrals reduce to signed per-face surface terms, accumulated
    exactly (to floating point) for every triangle.
    """
    v0 = vertices[triangles[:, 0]]
    v1 = vertices[triangles[:, 1]]
    v2 = vertices[triangles[:, 2]]
    d = np.cross(v1 - v0, v2 - v0)

    temp0 = v0 + v1
    f1 = temp0 + v2
    temp1 = v0 * v0
    temp2 = temp1 + v1 * temp0
    f2 = temp2 + v2 * f1
    f3 = v0 * temp1 + v1 * temp2 + v2 * f2
    g0 = f2 + v0 * (f1 + v0)
    g1 = f2 + v1 * (f1 + v1)
    g2 = f2 + v2 * (f1 + v2)

    intg = np.empty(10)
    intg[0] = float(np.sum(d[:, 0] * f1[:, 0]))
    intg[1:4] = np.sum(d * f2, axis=0)
    intg[4:7] = np.sum(d * f3, axis=0)
    intg[7] = float(np.sum(d[:, 0] * (v0[:, 1] * g0[:, 0] + v1[:, 1] * g1[:, 0] + v2[:, 1] * g2[:, 0])))
    intg[8] = float(np.sum(d[:, 1] * (v0[:, 2] * g0[:, 1] + v1[:, 2] * g1[:, 1] + v2[:, 2] * g2[:, 1])))
    intg[9] = float(np.sum(d[:, 2] * (v0[:, 0] * g0[:, 2] + v1[:, 0] * g1[:, 2] + v2[:, 0] * g2[:, 2])))
    return intg * _COEFFS
