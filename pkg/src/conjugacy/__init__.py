"""Differentiable conjugacies of one-dimensional maps.

Submodules: :mod:`.algebra` (exact rational functions and functional
identities), :mod:`.maps` (map types and the family catalog), :mod:`.orbits`
(fixed points, periodic orbits, multiplier law, invariant densities),
:mod:`.linearize` (Koenigs charts and conjugacy tables), :mod:`.normal_forms`
(multiplier-matching fits) and :mod:`.cli`.
"""

from .algebra import Poly, RationalFn, verify_functional_identity, verify_lemma_suite
from .linearize import (
    ConjugacyTable,
    LinearizationChart,
    SmoothnessReport,
    build_conjugacy,
    build_kink_conjugacy,
    extend_across_kink,
    extend_basin,
    koenigs,
    slope_ratio,
    smoothness_report,
)
from .maps import Interval, Mobius, PiecewiseMap1D, SmoothMap1D, catalog_make, map_from_spec, mobius_conjugate
from .normal_forms import MapFamily, bc_fit, bc_multipliers, pf_fit, sn_fit, sn_multipliers
from .orbits import (
    elliptic_k,
    empirical_density,
    find_fixed_points,
    find_periodic_orbits_unimodal,
    multiplier,
    verify_multiplier_law,
)

__all__ = [
    "Poly", "RationalFn", "verify_functional_identity", "verify_lemma_suite",
    "ConjugacyTable", "LinearizationChart", "SmoothnessReport", "build_conjugacy", "build_kink_conjugacy",
    "extend_across_kink", "extend_basin", "koenigs", "slope_ratio", "smoothness_report",
    "Interval", "Mobius", "PiecewiseMap1D", "SmoothMap1D", "catalog_make", "map_from_spec", "mobius_conjugate",
    "MapFamily", "bc_fit", "bc_multipliers", "pf_fit", "sn_fit", "sn_multipliers",
    "elliptic_k", "empirical_density", "find_fixed_points", "find_periodic_orbits_unimodal", "multiplier",
    "verify_multiplier_law",
]
