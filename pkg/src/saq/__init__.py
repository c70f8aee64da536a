"""Exact toolkit for quantitative real algebraic geometry at desk scale."""

from .arith import Polynomial, Rational, parse_polynomial, format_polynomial
from .errors import ParseError, PreconditionError, ResourceLimitError, SaqError
from .formula import Atom, And, Or, Not, conj, disj, parse_formula, eval_formula

__version__ = "0.1.0"

__all__ = [
    "Polynomial", "Rational", "parse_polynomial", "format_polynomial",
    "ParseError", "PreconditionError", "ResourceLimitError", "SaqError",
    "Atom", "And", "Or", "Not", "conj", "disj", "parse_formula", "eval_formula",
]
