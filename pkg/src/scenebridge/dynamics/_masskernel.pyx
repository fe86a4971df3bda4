# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled triangle integration kernel (hot loop of mass-property refinement).

Contract matches scenebridge.dynamics._masskernel_py.integrate_triangles.
"""

import numpy as np


def integrate_triangles(double[:, ::1] vertices, int[:, ::1] triangles):
    cdef Py_ssize_t m = triangles.shape[0]
    cdef Py_ssize_t t, k
    cdef double x0, y0, z0, x1, y1, z1, x2, y2, z2
    cdef double e1x, e1y, e1z, e2x, e2y, e2z, dx, dy, dz
    cdef double temp0, temp1, temp2
    cdef double f1x, f2x, f3x, f1y, f2y, f3y, f1z, f2z, f3z
    cdef double g0x, g1x, g2x, g0y, g1y, g2y, g0z, g1z, g2z
    cdef double intg[10]

    for k in range(10):
        intg[k] = 0.0

    for t in range(m):
        x0 = vertices[triangles[t, 0], 0]
        y0 = vertices[triangles[t, 0], 1]
        z0 = vertices[triangles[t, 0], 2]
        x1 = vertices[triangles[t, 1], 0]
        y1 = vertices[triangles[t, 1], 1]
        z1 = vertices[triangles[t, 1], 2]
        x2 = vertices[triangles[t, 2], 0]
        y2 = vertices[triangles[t, 2], 1]
        z2 = vertices[triangles[t, 2], 2]

        e1x = x1 - x0
        e1y = y1 - y0
        e1z = z1 - z0
        e2x = x2 - x0
        e2y = y2 - y0
        e2z = z2 - z0
        dx = e1y * e2z - e1z * e2y
        dy = e1z * e2x - e1x * e2z
        dz = e1x * e2y - e1y * e2x

        temp0 = x0 + x1
        f1x = temp0 + x2
        temp1 = x0 * x0
        temp2 = temp1 + x1 * temp0
        f2x = temp2 + x2 * f1x
        f3x = x0 * temp1 + x1 * temp2 + x2 * f2x
        g0x = f2x + x0 * (f1x + x0)
        g1x = f2x + x1 * (f1x + x1)
        g2x = f2x + x2 * (f1x + x2)

        temp0 = y0 + y1
        f1y = temp0 + y2
        temp1 = y0 * y0
        temp2 = temp1 + y1 * temp0
        f2y = temp2 + y2 * f1y
        f3y = y0 * temp1 + y1 * temp2 + y2 * f2y
        g0y = f2y + y0 * (f1y + y0)
        g1y = f2y + y1 * (f1y + y1)
        g2y = f2y + y2 * (f1y + y2)

        temp0 = z0 + z1
        f1z = temp0 + z2
        temp1 = z0 * z0
        temp2 = temp1 + z1 * temp0
        f2z = temp2 + z2 * f1z
        f3z = z0 * temp1 + z1 * temp2 + z2 * f2z
        g0z = f2z + z0 * (f1z + z0)
        g1z = f2z + z1 * (f1z + z1)
        g2z = f2z + z2 * (f1z + z2)

        intg[0] += dx * f1x
        intg[1] += dx * f2x
        intg[2] += dy * f2y
        intg[3] += dz * f2z
        intg[4] += dx * f3x
        intg[5] += dy * f3y
        intg[6] += dz * f3z
        intg[7] += dx * (y0 * g0x + y1 * g1x + y2 * g2x)
        intg[8] += dy * (z0 * g0y + z1 * g1y + z2 * g2y)
        intg[9] += dz * (x0 * g0z + x1 * g1z + x2 * g2z)

    out = np.empty(10)
    out[0] = intg[0] / 6.0
    for k in range(1, 4):
        out[k] = intg[k] / 24.0
    for k in range(4, 7):
        out[k] = intg[k] / 60.0
    for k in range(7, 10):
        out[k] = intg[k] / 120.0
    return out
