"""Gapless-plane electrostatics of surface-electrode traps.

Electrodes are unions of axis-aligned rectangles in the ``z = 0`` plane; the
region between them is treated as grounded plane (gapless approximation).
Analytic solid-angle potentials and fields come from :mod:`trapqa.kernels`.

Coordinates: ``x`` along the trap axis, ``y`` transverse in-plane, ``z``
normal to the chip (ion side is ``z > 0``).
"""

from .geometry import (
    Electrode,
    TrapGeometry,
    geometry_from_dict,
    load_geometry,
    paper_trap_geometry,
)
from .fields import (
    basis_field,
    basis_potential,
    field_at,
    potential_at,
    pseudopotential,
    rect_potential,
    total_potential,
)
from .minima import TrapMinimum, SecularModes, find_rf_minima, secular_frequencies
from .stray import MicromotionReport, micromotion_index, stray_field

__all__ = [
    "Electrode",
    "TrapGeometry",
    "geometry_from_dict",
    "load_geometry",
    "paper_trap_geometry",
    "rect_potential",
    "potential_at",
    "field_at",
    "basis_potential",
    "basis_field",
    "pseudopotential",
    "total_potential",
    "TrapMinimum",
    "SecularModes",
    "find_rf_minima",
    "secular_frequencies",
    "stray_field",
    "micromotion_index",
    "MicromotionReport",
]
