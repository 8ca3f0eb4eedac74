"""Executable combinatorics of countable colored linear orders and shuffled families."""
from .backforth import PartialIso, build_iso, decide_iso_spec
from .counting import ClassSummary, TheorySummary, count_models, enumerate_invariant_tuples, kappa
from .ordertype import OrderType, from_name, normalize, to_name
from .realize import ColoredOrderSpec, DenseShuffle, Point, realize_spec
from .shuffle import Cut, ShuffleFamily, canonical_family, check_family, cut_compare, limit_structure
from .workbench import InvariantTuple, build_model, check_axioms, extract_invariant_tuple

__all__ = [
    "ClassSummary", "ColoredOrderSpec", "Cut", "DenseShuffle", "InvariantTuple", "OrderType", "PartialIso",
    "Point", "ShuffleFamily", "TheorySummary", "build_iso", "build_model", "canonical_family", "check_axioms",
    "check_family", "count_models", "cut_compare", "decide_iso_spec", "enumerate_invariant_tuples",
    "extract_invariant_tuple", "from_name", "kappa", "limit_structure", "normalize", "realize_spec", "to_name",
]
