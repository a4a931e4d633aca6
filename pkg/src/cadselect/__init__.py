"""Cadlag selections of set-valued mappings with convex values.

Convex geometry kernels, piecewise set-valued mappings on a finite horizon,
regularity checks, selection constructions (projection, epsilon, Michael,
Castaing families) and integral functionals against Radon measures.
"""

from .errors import (
    CadselectError,
    EmptyValue,
    NonConvergence,
    ParseError,
    ProbeCatalogTooCoarse,
    SelectionInfeasible,
    Unsupported,
    ValidationError,
)
from .geometry import Ball, Box, HPolytope, intersect, project, distance, support_and_contains
from .integral import NormalIntegrand, RadonMeasure, eval_integral_functional, verify_interchange
from .io import emit_mapping, parse_integrand, parse_mapping
from .mappings import CadlagPath, SetValuedMapping, TimeGrid
from .regularity import ProbeCatalog, check_regularity
from .selection import (
    castaing_family,
    castaing_targets,
    backward_selection,
    epsilon_selection,
    michael_selection,
    projection_selection,
)

__version__ = "0.1.0"
