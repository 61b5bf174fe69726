"""Conley complexes and connection matrices via graded discrete Morse theory."""

from .cells import CellComplex, ValidationReport
from .conley import Block, ConleyResult, connecting_block, connection_matrix, conley_morse_graph, homology
from .cubical import CubicalGrid, build_complex, coordinate_matching, grid_complex, interval_complex
from .field import GF, FieldElement
from .graded import FiberGraph, GradedComplex, fiber_graph, is_p_filtered, is_strict, is_strict_filtering
from .morse import Matching, Reduction, build_reduction, compose, gamma, identity_reduction, is_perfect, matching_coreduction, v_map
from .order import Poset, chain_poset, join_irreducibles, order_preserving
from .persistence import PersistenceDiagram, diagram_total_order, persistent_betti, verify_theorem_ph
from .polynomial import IntPolynomial, parse_polynomial

__version__ = "0.1.0"

__all__ = [
    "CellComplex",
    "ValidationReport",
    "Block",
    "ConleyResult",
    "connecting_block",
    "connection_matrix",
    "conley_morse_graph",
    "homology",
    "CubicalGrid",
    "build_complex",
    "coordinate_matching",
    "grid_complex",
    "interval_complex",
    "GF",
    "FieldElement",
    "FiberGraph",
    "GradedComplex",
    "fiber_graph",
    "is_p_filtered",
    "is_strict",
    "is_strict_filtering",
    "Matching",
    "Reduction",
    "build_reduction",
    "compose",
    "gamma",
    "identity_reduction",
    "is_perfect",
    "matching_coreduction",
    "v_map",
    "Poset",
    "chain_poset",
    "join_irreducibles",
    "order_preserving",
    "PersistenceDiagram",
    "diagram_total_order",
    "persistent_betti",
    "verify_theorem_ph",
    "IntPolynomial",
    "parse_polynomial",
]
