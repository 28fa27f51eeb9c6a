"""Exact cone membership, positive-operator certificates and order-theoretic
counterexamples in finite dimensions."""

from .cones import (
    APPROX,
    EXACT,
    PolyhedralH,
    PolyhedralV,
    Psd,
    SecondOrder,
    four_ray_cone,
    membership,
    recheck,
    recording,
    standard_cone,
)
from .kernels import BACKEND
from .operators import (
    LinearMap,
    congruence_map,
    find_violation,
    identity_map,
    is_positive,
    is_spectrum_singleton,
    jordan_profile,
    lift_two_sided,
    order_leq,
    spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "APPROX",
    "BACKEND",
    "EXACT",
    "LinearMap",
    "PolyhedralH",
    "PolyhedralV",
    "Psd",
    "SecondOrder",
    "congruence_map",
    "find_violation",
    "four_ray_cone",
    "identity_map",
    "is_positive",
    "is_spectrum_singleton",
    "jordan_profile",
    "lift_two_sided",
    "membership",
    "order_leq",
    "recheck",
    "recording",
    "spectrum",
    "standard_cone",
]
