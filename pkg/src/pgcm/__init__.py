"""Classification of characteristic matrices for finite p-groups whose derived
subgroup is elementary abelian of rank three (three generators, class two).
"""

from .classifier import (
    Classification,
    FamilyLabel,
    LabelError,
    classify,
    classify_any,
    classify_tiny,
    crosscheck_isomorphism,
    enumerate_families,
    parse_label,
    representative,
    verify_tiny,
    verify_transversal,
)
from .finite_field import FieldError, PrimeContext
from .group_model import GroupError, GroupSpec, Presentation, brute_isomorphic
from .invariants import InvariantReport, Method, property_table
from .iso_action import ActionError, CapError, CaseTag, ExponentType, IsoTransform, same_orbit
from .matrices import MatrixParseError, format_matrix, parse_matrix

__version__ = "0.1.0"
