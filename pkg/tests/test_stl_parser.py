import math

import pytest

from stlmon.stl import (
    And,
    Atom,
    Eventually,
    Globally,
    Not,
    Or,
    ParseError,
    TrueFormula,
    Until,
    parse_formula,
)
from naive_stl import random_formula

import numpy as np


def test_globally_atom():
    phi = parse_formula("G[0,10](x0 <= 5)", ["x0"])
    assert isinstance(phi, Globally)
    assert (phi.a, phi.b) == (0, 10)
    atom = phi.child
    assert isinstance(atom, Atom)
    # x0 <= 5 normalizes to 5 - x0 > 0
    assert atom.coeffs == (-1.0,)
    assert atom.const == 5.0
    assert atom.value([3.0]) == 2.0


def test_and_of_temporal():
    phi = parse_formula("(F[0,5](x0 > 0)) and (G[0,5](x1 > 0))", ["x0", "x1"])
    assert isinstance(phi, And)
    assert isinstance(phi.left, Eventually)
    assert isinstance(phi.right, Globally)


def test_interval_a_greater_b_rejected():
    with pytest.raises(ParseError):
        parse_formula("G[3,1](x0 > 0)", ["x0"])


def test_unknown_identifier():
    with pytest.raises(ParseError, match="unknown identifier"):
        parse_formula("y3 > 0", ["x0"])


def test_syntax_error_reports_position():
    with pytest.raises(ParseError, match="position"):
        parse_formula("G[0,5](x0 >)", ["x0"])


def test_true_and_not():
    phi = parse_formula("not true", ["x0"])
    assert isinstance(phi, Not)
    assert isinstance(phi.child, TrueFormula)


def test_until_binds_tighter_than_and():
    phi = parse_formula("x0 > 0 U[0,3] x1 > 0 and x1 > 1", ["x0", "x1"])
    assert isinstance(phi, And)
    assert isinstance(phi.left, Until)


def test_precedence_and_over_or():
    phi = parse_formula("x0 > 0 or x0 > 1 and x0 > 2", ["x0"])
    assert isinstance(phi, Or)
    assert isinstance(phi.right, And)


def test_affine_atom():
    phi = parse_formula("2*x0 + 3*x1 - 1 <= 5", ["x0", "x1"])
    assert isinstance(phi, Atom)
    # normalizes to 6 - 2 x0 - 3 x1 > 0
    assert phi.coeffs == (-2.0, -3.0)
    assert phi.const == 6.0


def test_negative_rhs():
    phi = parse_formula("x0 >= -1.5", ["x0"])
    assert phi.coeffs == (1.0,)
    assert phi.const == 1.5


def test_strict_and_nonstrict_atoms_identical():
    a = parse_formula("x0 < 2", ["x0"])
    b = parse_formula("x0 <= 2", ["x0"])
    assert a == b


def test_named_function_atom():
    fns = {"norm2": lambda s: math.hypot(s[0], s[1])}
    phi = parse_formula("norm2 <= 1", ["x0", "x1"], functions=fns)
    assert isinstance(phi, Atom)
    assert phi.value([0.6, 0.8]) == 0.0
    assert phi.value([0.3, 0.4]) == pytest.approx(0.5)


@pytest.mark.parametrize(
    "text",
    [
        "G[0,10](x0 <= 5)",
        "(F[0,5](x0 > 0)) and (G[0,5](x1 > 0))",
        "x0 > 0 U[2,7] not x1 < 3",
        "true or 2*x0 - 0.5*x1 + 1 >= -2",
    ],
)
def test_round_trip(text):
    vars_ = ["x0", "x1"]
    phi = parse_formula(text, vars_)
    again = parse_formula(str(phi), vars_)
    assert phi == again


def test_round_trip_random_formulas():
    rng = np.random.default_rng(7)
    vars_ = ["x0", "x1", "x2"]
    for _ in range(100):
        phi = random_formula(rng, 3, int(rng.integers(1, 4)))
        # attach canonical text the way the parser would: print and reparse twice
        once = parse_formula(str(phi), vars_)
        twice = parse_formula(str(once), vars_)
        assert once == twice
