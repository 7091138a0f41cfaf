"""C-subfunction orders on finite operations: decisions, degrees, quotient posets."""

from .clones import B, J, CloneId, clone_membership, enumerate_clone
from .config import CapacityError, CloneLabError, InputError, InternalError
from .decomp import degree, range_degree
from .finops import Operation, compose, essential_variables, parse_operation, range_of, to_text
from .posets import quotient_poset
from .subfunc import Comparison, Decision, are_equivalent, compare, decide_subfunction

__all__ = [
    "B", "J", "CloneId", "clone_membership", "enumerate_clone",
    "CapacityError", "CloneLabError", "InputError", "InternalError",
    "degree", "range_degree",
    "Operation", "compose", "essential_variables", "parse_operation", "range_of", "to_text",
    "quotient_poset",
    "Comparison", "Decision", "are_equivalent", "compare", "decide_subfunction",
]

__version__ = "0.1.0"
