"""Modified Postnikov towers: relation tables, parsing, and variation analysis."""

from .analysis import check_implication, forced_vanishing, kernel_trivial, variation_matrix
from .model import MptError, MptModel
from .parser import format_model, parse_relations

__all__ = [
    "MptError",
    "MptModel",
    "check_implication",
    "forced_vanishing",
    "format_model",
    "kernel_trivial",
    "parse_relations",
    "variation_matrix",
]
