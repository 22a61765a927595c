"""STL formulas: parsing, Boolean satisfaction and quantitative robustness."""

from .formula import (
    And,
    Atom,
    Eventually,
    Formula,
    Globally,
    Not,
    Or,
    Trajectory,
    TrueFormula,
    Until,
    horizon,
)
from .parser import ParseError, parse_formula
from .semantics import HorizonError, boolean_sat, robustness

__all__ = [
    "And",
    "Atom",
    "Eventually",
    "Formula",
    "Globally",
    "HorizonError",
    "Not",
    "Or",
    "ParseError",
    "Trajectory",
    "TrueFormula",
    "Until",
    "boolean_sat",
    "horizon",
    "parse_formula",
    "robustness",
]
