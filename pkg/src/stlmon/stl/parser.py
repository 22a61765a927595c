"""Text grammar for STL formulas.

::

    formula := "true" | atom | "not" formula | formula "and" formula
             | formula "or" formula | formula "U[" int "," int "]" formula
             | "F[" int "," int "]" formula | "G[" int "," int "]" formula
             | "(" formula ")"
    atom    := affine-expr cmp number ;  cmp in {"<", "<=", ">", ">="}

Precedence: not > U > and > or; parentheses override.  Atoms are affine
expressions over the declared variable names (``2*x0 + 3*x1 - 1 <= 5``) or
a registered nonlinear function name compared against a number.  Every
comparison is normalized to g(state) > 0; atoms are stored with a canonical
surface text so that printing and re-parsing is the identity.
"""

from __future__ import annotations

import re
from typing import Callable, Optional

from .formula import And, Atom, Eventually, Formula, Globally, Not, Or, TrueFormula, Until


class ParseError(ValueError):
    def __init__(self, message, pos):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><=|>=|<|>|\(|\)|\[|\]|,|\*|\+|-))"
)

_KEYWORDS = {"true", "not", "and", "or", "U", "F", "G"}


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos:].lstrip()[0]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _format_number(x: float) -> str:
    return repr(float(x))


def canonical_atom_text(coeffs, const, var_names) -> str:
    """Canonical g > 0 surface form for a normalized affine atom."""
    parts = [
        f"{_format_number(c)}*{var_names[i]}" for i, c in enumerate(coeffs) if c != 0.0
    ]
    parts.append(_format_number(const))
    return " + ".join(parts) + " > 0"


class _Parser:
    def __init__(self, tokens, var_names, functions):
        self.tokens = tokens
        self.i = 0
        self.var_names = list(var_names)
        self.var_index = {name: k for k, name in enumerate(self.var_names)}
        self.functions = functions or {}

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.next()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)
        return val

    def fail(self, message):
        raise ParseError(message, self.peek()[2])

    # --- formula levels, lowest precedence first ---

    def parse_formula(self):
        phi = self.parse_or()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {val!r}", pos)
        return phi

    def parse_or(self):
        phi = self.parse_and()
        while self.peek()[1] == "or":
            self.next()
            phi = Or(phi, self.parse_and())
        return phi

    def parse_and(self):
        phi = self.parse_until()
        while self.peek()[1] == "and":
            self.next()
            phi = And(phi, self.parse_until())
        return phi

    def parse_until(self):
        phi = self.parse_unary()
        if self.peek()[1] == "U":
            self.next()
            a, b = self.parse_interval()
            # right-associative: p U q U r == p U (q U r)
            return Until(phi, self.parse_until(), a, b)
        return phi

    def parse_interval(self):
        self.expect("[")
        a = self.parse_int()
        self.expect(",")
        b = self.parse_int()
        self.expect("]")
        if a > b:
            self.fail(f"interval with a > b: [{a},{b}]")
        return a, b

    def parse_int(self):
        kind, val, pos = self.next()
        if kind != "num" or not val.isdigit():
            raise ParseError(f"expected nonnegative integer, found {val!r}", pos)
        return int(val)

    def parse_unary(self):
        kind, val, pos = self.peek()
        if val == "not":
            self.next()
            return Not(self.parse_unary())
        if val == "F":
            self.next()
            a, b = self.parse_interval()
            return Eventually(self.parse_unary(), a, b)
        if val == "G":
            self.next()
            a, b = self.parse_interval()
            return Globally(self.parse_unary(), a, b)
        if val == "(":
            self.next()
            phi = self.parse_or()
            self.expect(")")
            return phi
        if val == "true":
            self.next()
            return TrueFormula()
        return self.parse_atom()

    # --- atoms ---

    def parse_atom(self):
        kind, val, pos = self.peek()
        if kind == "ident" and val in self.functions:
            return self.parse_function_atom()
        coeffs, const = self.parse_affine()
        cmp_ = self.parse_cmp()
        rhs = self.parse_number()
        coeffs, const = _normalize(coeffs, const, cmp_, rhs)
        return Atom(
            coeffs=coeffs,
            const=const,
            text=canonical_atom_text(coeffs, const, self.var_names),
        )

    def parse_function_atom(self):
        _, name, _ = self.next()
        fn = self.functions[name]
        cmp_ = self.parse_cmp()
        rhs = self.parse_number()
        if cmp_ in (">", ">="):
            g = lambda s, fn=fn, c=rhs: fn(s) - c
        else:
            g = lambda s, fn=fn, c=rhs: c - fn(s)
        return Atom(func=g, name=name, text=f"{name} {cmp_} {_format_number(rhs)}")

    def parse_cmp(self):
        kind, val, pos = self.next()
        if val not in ("<", "<=", ">", ">="):
            raise ParseError(f"expected comparison operator, found {val!r}", pos)
        return val

    def parse_number(self):
        sign = 1.0
        if self.peek()[1] == "-":
            self.next()
            sign = -1.0
        kind, val, pos = self.next()
        if kind != "num":
            raise ParseError(f"expected number, found {val!r}", pos)
        return sign * float(val)

    def parse_affine(self):
        """affine := term (("+"|"-") term)* over the declared variables."""
        coeffs = [0.0] * len(self.var_names)
        const = 0.0
        sign = 1.0
        while True:
            c, idx = self.parse_term()
            if idx is None:
                const += sign * c
            else:
                coeffs[idx] += sign * c
            nxt = self.peek()[1]
            if nxt == "+":
                self.next()
                sign = 1.0
            elif nxt == "-":
                self.next()
                sign = -1.0
            else:
                return coeffs, const

    def parse_term(self):
        """term := ["-"] (number ["*" ident] | ident); returns (value, var index)."""
        sign = 1.0
        while self.peek()[1] == "-":
            self.next()
            sign = -sign
        kind, val, pos = self.next()
        if kind == "num":
            value = sign * float(val)
            if self.peek()[1] == "*":
                self.next()
                kind2, name, pos2 = self.next()
                if kind2 != "ident" or name in _KEYWORDS:
                    raise ParseError(f"expected identifier after '*', found {name!r}", pos2)
                return value, self.var_lookup(name, pos2)
            return value, None
        if kind == "ident":
            if val in _KEYWORDS:
                raise ParseError(f"expected atom, found keyword {val!r}", pos)
            return sign, self.var_lookup(val, pos)
        raise ParseError(f"expected number or identifier, found {val!r}", pos)

    def var_lookup(self, name, pos):
        if name not in self.var_index:
            raise ParseError(f"unknown identifier {name!r}", pos)
        return self.var_index[name]


def _normalize(coeffs, const, cmp_, rhs):
    """Rewrite `expr cmp rhs` as g > 0.  <= and < coincide quantitatively."""
    if cmp_ in (">", ">="):
        return tuple(coeffs), const - rhs
    return tuple(-c for c in coeffs), rhs - const


def parse_formula(
    text: str,
    var_names,
    functions: Optional[dict[str, Callable]] = None,
) -> Formula:
    """Parse an STL formula over the given state-variable names."""
    parser = _Parser(_tokenize(text), var_names, functions)
    return parser.parse_formula()
