"""Numerical tools for the Heisenberg group H^n.

Group law, Korányi gauge and contact form live in :mod:`heisenlab.core`; the
geodesic sphere H and its domain Ω in :mod:`heisenlab.geodesic`; the map
catalog in :mod:`heisenlab.maps`; Pansu quotients and contact checks in
:mod:`heisenlab.differential`; mapping degree in :mod:`heisenlab.degree`; and
distance-ratio scans in :mod:`heisenlab.lipschitz`.
"""

from .core import (
    DomainError,
    HeisenbergError,
    HomogeneousHom,
    NumericalError,
    Point,
    TangentVector,
    UsageError,
    contact_form,
    dilate,
    frame_vectors,
    gauge,
    group_inv,
    group_mul,
    koranyi_distance,
    random_homomorphism,
)
from .degree import DegreeResult, KoranyiBall, OmegaDomain, boundary_gap, degree_smooth, preimages
from .differential import contact_report, pansu_estimate, pansu_quotient, scaling_diagnostic
from .geodesic import GeodesicParam, SphereParam, geodesic_invert, geodesic_point, on_H, omega_contains
from .lipschitz import closed_form_same_height, lipschitz_scan
from .maps import MapHandle, map_eval

__version__ = "0.1.0"

__all__ = [
    "DegreeResult", "DomainError", "GeodesicParam", "HeisenbergError", "HomogeneousHom", "KoranyiBall",
    "MapHandle", "NumericalError", "OmegaDomain", "Point", "SphereParam", "TangentVector", "UsageError",
    "boundary_gap", "closed_form_same_height", "contact_form", "contact_report", "degree_smooth", "dilate",
    "frame_vectors", "gauge", "geodesic_invert", "geodesic_point", "group_inv", "group_mul",
    "koranyi_distance", "lipschitz_scan", "map_eval", "omega_contains", "on_H", "pansu_estimate",
    "pansu_quotient", "preimages", "random_homomorphism", "scaling_diagnostic",
]
