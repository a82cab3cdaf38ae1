"""schottkylab: Selberg zeta functions, resonances and length spectra of Schottky surfaces."""

__version__ = "0.1.0"

from .moebius import MoebiusMap, hyperbolic_distance, mobius_apply, mobius_classify
from .schottky import (
    GeometryError,
    SchottkyGroup,
    cylinder_group,
    group_from_matrices,
    load_group,
    save_group,
    symmetric_group,
    validate_schottky,
    width_for_translation_length,
)
from .words import length_spectrum, prime_classes
from .thermo import hausdorff_dimension, pressure
from .zeta import find_resonances, strip_census, theorem_strip, zeta_cycle, zeta_fredholm, zeta_product
from .trace_formula import TestFunction, mean_square_G, multiplicity_moments, resonance_check
from .lattice import orbit_count

__all__ = [
    "GeometryError",
    "MoebiusMap",
    "SchottkyGroup",
    "TestFunction",
    "cylinder_group",
    "find_resonances",
    "group_from_matrices",
    "hausdorff_dimension",
    "hyperbolic_distance",
    "length_spectrum",
    "load_group",
    "mean_square_G",
    "mobius_apply",
    "mobius_classify",
    "multiplicity_moments",
    "orbit_count",
    "pressure",
    "prime_classes",
    "resonance_check",
    "save_group",
    "strip_census",
    "symmetric_group",
    "theorem_strip",
    "validate_schottky",
    "width_for_translation_length",
    "zeta_cycle",
    "zeta_fredholm",
    "zeta_product",
]
