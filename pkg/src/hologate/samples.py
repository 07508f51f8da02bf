"""Illustrative geometry and material parameters for demos and tests.

These numbers are plausible for PTR-like glass and visible light, but
they are tool defaults chosen for demonstration only; supply your own
configuration files for any real design.
"""

from __future__ import annotations

from .compiler import MaterialSpec
from .modes import ConeGeometry


def sample_geometry(dimension: int = 8) -> ConeGeometry:
    return ConeGeometry(
        dimension=dimension,
        signal_half_angle=0.08,
        reference_half_angle=0.16,
        wavelength=6.33e-7,
        aperture_breadth=5e-3,
    )


def sample_material() -> MaterialSpec:
    return MaterialSpec(
        max_total_thickness=2.5e-2,
        max_index_modulation=1e-3,
        meters_per_recording=1e-3,
        name="ptr-like-sample",
    )
