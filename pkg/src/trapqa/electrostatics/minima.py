"""RF pseudopotential minima and secular mode frequencies."""

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ..core import DriveParams, IonSpecies
from .fields import field_at, pseudopotential, total_potential
from .geometry import TrapGeometry

__all__ = ["TrapMinimum", "SecularModes", "find_rf_minima", "secular_frequencies"]


@dataclass(frozen=True)
class TrapMinimum:
    """One pseudopotential minimum.

    ``position`` is (x, y, z) in meters, ``height`` its z coordinate,
    ``psi_min`` the pseudopotential there (J), and ``depth`` the barrier to
    escape along the vertical ray above the minimum (J), the standard
    shallow-direction estimate for surface traps.
    """

    position: tuple[float, float, float]
    height: float
    psi_min: float
    depth: float


def find_rf_minima(
    geometry: TrapGeometry,
    ion: IonSpecies,
    drive: DriveParams,
    window: tuple[tuple[float, float], tuple[float, float]],
    x: float = 0.0,
    grid: int = 11,
    dedup_tol: float = 1e-6,
) -> list[TrapMinimum]:
    """Locate RF nulls in the transverse (y, z) plane at fixed ``x``.

    Seeds an ``grid x grid`` lattice over ``window = ((y_lo, y_hi),
    (z_lo, z_hi))`` and root-finds the transverse RF field components from
    each seed. Converged roots inside the window with a positive-definite
    transverse curvature are kept, deduplicated within ``dedup_tol`` (1 um by
    default), and returned sorted by y.

    For an RF-only drive the pseudopotential is q^2 |E|^2 / (4 m Omega^2),
    so its minima with zero value are exactly the nulls of E; minima at
    nonzero pseudopotential (which a pure-RF surface layout does not produce
    in practice) are not searched for.
    """
    (y_lo, y_hi), (z_lo, z_hi) = window
    if not (y_hi > y_lo and z_hi > z_lo and z_lo > 0):
        raise ValueError("window must be (y_lo < y_hi, 0 < z_lo < z_hi)")

    rf_ids = geometry.ids(role="rf")
    if not rf_ids:
        raise ValueError("geometry has no RF electrodes")
    unit_volts = {i: 1.0 for i in rf_ids}

    def e_perp(yz):
        e = field_at(geometry, unit_volts, np.array([x, yz[0], yz[1]]))
        return [e[1], e[2]]

    found = []
    for ys in np.linspace(y_lo, y_hi, grid):
        for zs in np.linspace(z_lo, z_hi, grid):
            sol = optimize.root(e_perp, [ys, zs], method="hybr", tol=1e-14)
            if not sol.success:
                continue
            y0, z0 = sol.x
            if not (y_lo - dedup_tol <= y0 <= y_hi + dedup_tol):
                continue
            if not (z_lo - dedup_tol <= z0 <= z_hi + dedup_tol):
                continue
            if any(abs(y0 - fy) < dedup_tol and abs(z0 - fz) < dedup_tol for fy, fz in found):
                continue
            found.append((y0, z0))

    minima = []
    for y0, z0 in found:
        # confirm a transverse minimum (positive-definite curvature of psi)
        h = 0.5e-6
        pts = np.array(
            [
                [x, y0, z0],
                [x, y0 + h, z0],
                [x, y0 - h, z0],
                [x, y0, z0 + h],
                [x, y0, z0 - h],
                [x, y0 + h, z0 + h],
                [x, y0 + h, z0 - h],
                [x, y0 - h, z0 + h],
                [x, y0 - h, z0 - h],
            ]
        )
        p = pseudopotential(geometry, ion, drive, pts)
        dyy = (p[1] - 2 * p[0] + p[2]) / h**2
        dzz = (p[3] - 2 * p[0] + p[4]) / h**2
        dyz = (p[5] - p[6] - p[7] + p[8]) / (4 * h**2)
        eigvals = np.linalg.eigvalsh(np.array([[dyy, dyz], [dyz, dzz]]))
        if eigvals[0] <= 0:
            continue

        # escape barrier along the vertical ray above the null
        zs = np.linspace(z0, z_hi, 400)
        ray = np.column_stack([np.full_like(zs, x), np.full_like(zs, y0), zs])
        psi_ray = pseudopotential(geometry, ion, drive, ray)
        minima.append(
            TrapMinimum(
                position=(x, float(y0), float(z0)),
                height=float(z0),
                psi_min=float(p[0]),
                depth=float(np.max(psi_ray) - p[0]),
            )
        )

    minima.sort(key=lambda m: m.position[1])
    return minima


@dataclass(frozen=True)
class SecularModes:
    """Mode frequencies and principal axes at a potential minimum.

    ``omegas`` are signed angular frequencies (rad/s): the sign of each entry
    follows the sign of the corresponding curvature eigenvalue, so a negative
    entry marks an unstable (anti-trapping) direction and ``stable`` is True
    only when all three are positive. ``axes`` holds the unit eigenvectors as
    columns, matching the order of ``omegas`` (ascending curvature).
    """

    omegas: tuple[float, float, float]
    axes: np.ndarray
    stable: bool

    @property
    def frequencies_hz(self) -> tuple[float, float, float]:
        return tuple(w / (2.0 * np.pi) for w in self.omegas)


def _hessian(f, point: np.ndarray, h: float) -> np.ndarray:
    """3x3 Hessian by central differences with step ``h``."""
    H = np.empty((3, 3))
    f0 = f(point)
    for i in range(3):
        ei = np.zeros(3)
        ei[i] = h
        H[i, i] = (f(point + ei) - 2.0 * f0 + f(point - ei)) / h**2
        for j in range(i + 1, 3):
            ej = np.zeros(3)
            ej[j] = h
            H[i, j] = H[j, i] = (
                f(point + ei + ej) - f(point + ei - ej) - f(point - ei + ej) + f(point - ei - ej)
            ) / (4.0 * h**2)
    return H


def secular_frequencies(
    geometry: TrapGeometry,
    ion: IonSpecies,
    drive: DriveParams,
    dc_voltages: dict,
    point,
    step: float = 10e-9,
) -> SecularModes:
    """Secular modes from the curvature of the total potential at ``point``.

    The Hessian of ``pseudopotential + q * phi_dc`` is taken by central
    differences at steps ``step`` and ``step/2`` and Richardson-combined,
    then diagonalized; ``omega_i = sqrt(lambda_i / m)`` with the sign
    convention described on :class:`SecularModes`.
    """
    pt = np.asarray(point, dtype=float).reshape(3)

    def u(p):
        return total_potential(geometry, ion, drive, dc_voltages, p)

    coarse = _hessian(u, pt, step)
    fine = _hessian(u, pt, step / 2.0)
    H = (4.0 * fine - coarse) / 3.0

    lam, vec = np.linalg.eigh(H)
    omegas = tuple(np.sign(l) * np.sqrt(abs(l) / ion.mass) for l in lam)
    return SecularModes(omegas=omegas, axes=vec, stable=bool(np.all(lam > 0)))
