# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython implementation of the rectangle potential/field kernels.

Same contract as ``trapqa.kernels.rect_np``; see that module for the closed
forms. Tight C loops over points x rectangles x corners.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, sqrt

cnp.import_array()


def rect_potential_sum(rects, volts, points):
    """Summed potential of rectangles at ``volts`` over ``points``, shape (N,)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] R = np.ascontiguousarray(rects, dtype=np.float64).reshape(-1, 4)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] V = np.ascontiguousarray(volts, dtype=np.float64).reshape(-1)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] P = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
    cdef Py_ssize_t n = P.shape[0], m = R.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n, dtype=np.float64)
    cdef Py_ssize_t i, k
    cdef double x, y, z, acc, omega
    cdef double X1, X2, Y1, Y2
    cdef double two_pi = 6.283185307179586476925287

    for i in range(n):
        x = P[i, 0]; y = P[i, 1]; z = P[i, 2]
        acc = 0.0
        for k in range(m):
            X1 = R[k, 0] - x; X2 = R[k, 1] - x
            Y1 = R[k, 2] - y; Y2 = R[k, 3] - y
            omega = (
                atan2(X1 * Y1, z * sqrt(X1 * X1 + Y1 * Y1 + z * z))
                - atan2(X1 * Y2, z * sqrt(X1 * X1 + Y2 * Y2 + z * z))
                - atan2(X2 * Y1, z * sqrt(X2 * X2 + Y1 * Y1 + z * z))
                + atan2(X2 * Y2, z * sqrt(X2 * X2 + Y2 * Y2 + z * z))
            )
            acc += V[k] * omega
        out[i] = acc / two_pi
    return out


cdef inline void _corner_grad(double X, double Y, double z, double sign,
                              double volt, double* gx, double* gy, double* gz) nogil:
    cdef double r2 = X * X + Y * Y + z * z
    cdef double r = sqrt(r2)
    cdef double xz = X * X + z * z
    cdef double yz = Y * Y + z * z
    gx[0] += sign * volt * z * Y / (r * xz)
    gy[0] += sign * volt * z * X / (r * yz)
    gz[0] += sign * volt * (-X * Y * (r2 + z * z) / (r * xz * yz))


def rect_field_sum(rects, volts, points):
    """Summed field E = -grad(phi) of rectangles at ``volts``, shape (N, 3)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] R = np.ascontiguousarray(rects, dtype=np.float64).reshape(-1, 4)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] V = np.ascontiguousarray(volts, dtype=np.float64).reshape(-1)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] P = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
    cdef Py_ssize_t n = P.shape[0], m = R.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, 3), dtype=np.float64)
    cdef Py_ssize_t i, k
    cdef double x, y, z, gx, gy, gz
    cdef double X1, X2, Y1, Y2
    cdef double two_pi = 6.283185307179586476925287

    for i in range(n):
        x = P[i, 0]; y = P[i, 1]; z = P[i, 2]
        gx = 0.0; gy = 0.0; gz = 0.0
        for k in range(m):
            X1 = R[k, 0] - x; X2 = R[k, 1] - x
            Y1 = R[k, 2] - y; Y2 = R[k, 3] - y
            _corner_grad(X1, Y1, z, 1.0, V[k], &gx, &gy, &gz)
            _corner_grad(X1, Y2, z, -1.0, V[k], &gx, &gy, &gz)
            _corner_grad(X2, Y1, z, -1.0, V[k], &gx, &gy, &gz)
            _corner_grad(X2, Y2, z, 1.0, V[k], &gx, &gy, &gz)
        # d(phi)/dx carries a minus sign from d/dx = -d/dX, which cancels
        # against E = -grad(phi); the z component keeps its sign flip.
        out[i, 0] = gx / two_pi
        out[i, 1] = gy / two_pi
        out[i, 2] = -gz / two_pi
    return out
