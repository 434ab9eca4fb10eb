"""FirstFit coloring of unit intervals with open and closed endpoints."""

from .analysis import CHECK_NAMES, CHECKS, LemmaReport, theorem2_bound, verify_lemma_suite
from .engine import (Coloring, EmptyInstanceError, RowDecomposition, brute_force_chromatic,
                     clique_number, first_fit, optimal_rows)
from .intervals import ContractViolation, Instance, Interval, Kind, intersects
from .io import ParseError, parse_instance, serialize_instance

__all__ = [
    "CHECKS", "CHECK_NAMES", "Coloring", "ContractViolation", "EmptyInstanceError", "Instance",
    "Interval", "Kind", "LemmaReport", "ParseError", "RowDecomposition", "brute_force_chromatic",
    "clique_number", "first_fit", "intersects", "optimal_rows", "parse_instance",
    "serialize_instance", "theorem2_bound", "verify_lemma_suite",
]
