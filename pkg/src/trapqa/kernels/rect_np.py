"""Numpy implementation of the rectangle potential/field kernels.

In the gapless-plane approximation a rectangle ``[x1, x2] x [y1, y2]`` held at
voltage ``V`` in the ``z = 0`` plane (everything else grounded) produces, in
the half space ``z > 0``, the potential

    phi(r) = V / (2 pi) * sum_{i,j in {1,2}} (-1)^(i+j)
             * atan2((x_i - x) (y_j - y), z * r_ij)

with ``r_ij = sqrt((x_i - x)^2 + (y_j - y)^2 + z^2)``: the solid angle the
rectangle subtends at the field point divided by ``2 pi``. The field follows
from the analytic gradient, with per-corner terms

    d(atan)/dX =  z Y / (r (X^2 + z^2))
    d(atan)/dY =  z X / (r (Y^2 + z^2))
    d(atan)/dz = -X Y (r^2 + z^2) / (r (X^2 + z^2) (Y^2 + z^2))

where ``X = x_i - x`` and ``Y = y_j - y``. Everything here broadcasts over
``(N points) x (M rectangles) x (4 corners)`` and sums over the last two axes.
"""

import numpy as np

__all__ = ["rect_potential_sum", "rect_field_sum"]

_TWO_PI = 2.0 * np.pi


def _corner_arrays(rects, points):
    """Broadcasted corner offsets X (N,M,2), Y (N,M,2) and z (N,1,1)."""
    rects = np.asarray(rects, dtype=np.float64).reshape(-1, 4)
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    x = points[:, 0][:, None, None]
    y = points[:, 1][:, None, None]
    z = points[:, 2][:, None, None]
    xs = rects[None, :, 0:2]  # (1, M, 2)
    ys = rects[None, :, 2:4]
    return xs - x, ys - y, z


def rect_potential_sum(rects, volts, points):
    """Summed potential of rectangles at ``volts`` over ``points``, shape (N,)."""
    X, Y, z = _corner_arrays(rects, points)
    volts = np.asarray(volts, dtype=np.float64).reshape(-1)
    # corner sign pattern (+1 for i == j, -1 otherwise)
    r = np.sqrt(X[:, :, :, None] ** 2 + Y[:, :, None, :] ** 2 + z[:, :, :, None] ** 2)
    num = X[:, :, :, None] * Y[:, :, None, :]
    den = z[:, :, :, None] * r
    terms = np.arctan2(num, den)
    signs = np.array([[1.0, -1.0], [-1.0, 1.0]])
    omega = np.einsum("nmij,ij->nm", terms, signs)
    return omega @ volts / _TWO_PI


def rect_field_sum(rects, volts, points):
    """Summed field E = -grad(phi) of rectangles at ``volts``, shape (N, 3)."""
    X, Y, z = _corner_arrays(rects, points)
    volts = np.asarray(volts, dtype=np.float64).reshape(-1)
    Xc = X[:, :, :, None]
    Yc = Y[:, :, None, :]
    zc = z[:, :, :, None]
    r2 = Xc**2 + Yc**2 + zc**2
    r = np.sqrt(r2)
    xz = Xc**2 + zc**2
    yz = Yc**2 + zc**2
    # derivative of the arctan term with respect to the corner offsets
    dX = zc * Yc / (r * xz)
    dY = zc * Xc / (r * yz)
    dz = -Xc * Yc * (r2 + zc**2) / (r * xz * yz)
    signs = np.array([[1.0, -1.0], [-1.0, 1.0]])
    # d(phi)/dx = -sum dX, and E = -grad(phi); z enters directly.
    ex = np.einsum("nmij,ij->nm", dX, signs) @ volts
    ey = np.einsum("nmij,ij->nm", dY, signs) @ volts
    ez = np.einsum("nmij,ij->nm", dz, signs) @ volts
    out = np.empty((ex.shape[0], 3))
    out[:, 0] = ex / _TWO_PI
    out[:, 1] = ey / _TWO_PI
    out[:, 2] = -ez / _TWO_PI
    return out
