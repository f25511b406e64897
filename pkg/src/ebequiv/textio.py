"""Infix text form of expressions.

Grammar::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | '+' unary | power
    power   := atom ('^' unary)?            # right associative
    atom    := number | name | name '(' args ')' | name '[' ints ']' '(' args ')'
             | 'D' '[' var ']' '(' expr ')' | '(' expr ')'

``R_yy`` is the jet of ``R`` differentiated twice in ``y``; suffix letters
pick the chart (``y``/``z`` or ``t``/``x``).  Bare jet names (``R``, ``w``,
``u`` ...) are base jets.  ``f[1](S)`` is the derivative symbol of ``f``; ``I``, ``pi`` and ``E`` are
the usual constants.
"""
from __future__ import annotations

import re

import sympy as sp

from .errors import ParseError
from .expr import TX, YZ, Jet, fn, total_derivative

VARIABLES = {"y", "z", "t", "x"}
JET_NAMES = frozenset({"R", "S", "L", "J", "h", "w", "u", "s"})
TX_JETS = frozenset({"u", "s"})
KNOWN = {"sqrt": sp.sqrt, "exp": sp.exp, "log": sp.log, "sin": sp.sin, "cos": sp.cos,
         "sinh": sp.sinh, "cosh": sp.cosh, "tan": sp.tan}
CONSTANTS = {"I": sp.I, "pi": sp.pi, "E": sp.E}

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|([A-Za-z][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str) -> list:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected input at {pos}: {text[pos:]!r}")
        num, name, op = m.groups()
        if num:
            out.append(("num", num, m.start(1)))
        elif name:
            out.append(("name", name, m.start(2)))
        else:
            out.append(("op", op, m.start(3)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def _jet_from_name(name: str, jet_names) -> sp.Expr | None:
    if "_" in name:
        base, _, suffix = name.rpartition("_")
        if base and suffix and set(suffix) <= {"y", "z"}:
            return Jet(base, (suffix.count("y"), suffix.count("z")), YZ)
        if base and suffix and set(suffix) <= {"t", "x"}:
            return Jet(base, (suffix.count("t"), suffix.count("x")), TX)
        return None
    if name in jet_names:
        return Jet(name, chart=TX if name in TX_JETS else YZ)
    return None


class _Parser:
    def __init__(self, text: str, jet_names):
        self.toks = _tokenize(text)
        self.i = 0
        self.text = text
        self.jet_names = jet_names

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value or kind
            raise ParseError(f"expected {want!r} at {tok[2]} in {self.text!r}, got {tok[1]!r}")
        self.i += 1
        return tok

    def at(self, value):
        tok = self.peek()
        return tok[0] == "op" and tok[1] == value

    def parse(self):
        e = self.expr()
        self.take("end")
        return e

    def expr(self):
        e = self.term()
        while self.at("+") or self.at("-"):
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.unary()
        while self.at("*") or self.at("/"):
            op = self.take()[1]
            rhs = self.unary()
            if op == "/" and rhs == 0:
                raise ParseError(f"division by zero in {self.text!r}")
            e = e * rhs if op == "*" else e / rhs
        return e

    def unary(self):
        if self.at("-"):
            self.take()
            return -self.unary()
        if self.at("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            self.take()
            return base ** self.unary()
        return base

    def args(self):
        self.take("op", "(")
        out = [self.expr()]
        while self.at(","):
            self.take()
            out.append(self.expr())
        self.take("op", ")")
        return out

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return sp.Rational(val)
        if self.at("("):
            self.take()
            e = self.expr()
            self.take("op", ")")
            return e
        if kind != "name":
            raise ParseError(f"unexpected {val!r} at {pos} in {self.text!r}")
        self.take()
        if val == "D" and self.at("["):
            self.take()
            var = self.take("name")[1]
            if var not in VARIABLES:
                raise ParseError(f"D[{var}]: not a variable")
            self.take("op", "]")
            self.take("op", "(")
            inner = self.expr()
            self.take("op", ")")
            return total_derivative(inner, var)
        if self.at("["):
            self.take()
            orders = [int(self.take("num")[1])]
            while self.at(","):
                self.take()
                orders.append(int(self.take("num")[1]))
            self.take("op", "]")
            args = self.args()
            if len(args) != len(orders):
                raise ParseError(f"{val}{orders} applied to {len(args)} arguments")
            return fn(val, orders)(*args)
        if self.at("("):
            args = self.args()
            if val in KNOWN:
                return KNOWN[val](*args)
            return fn(val)(*args)
        if val in CONSTANTS:
            return CONSTANTS[val]
        j = _jet_from_name(val, self.jet_names)
        if j is not None:
            return j
        return sp.Symbol(val)


def parse(text: str, jet_names=JET_NAMES) -> sp.Expr:
    """Parse infix text; raises :class:`ParseError`."""
    return _Parser(text, jet_names).parse()


def to_text(e) -> str:
    """Canonical one-line print; ``parse(to_text(e)) == e``."""
    return sp.sstr(sp.sympify(e)).replace("**", "^")


def split_top_level(text: str, sep: str = ",") -> list:
    """Split at ``sep`` outside parentheses and brackets."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def parse_assignments(text: str) -> dict:
    """``name = expr`` lines (or comma separated), ``#`` comments."""
    out = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        for item in split_top_level(line):
            if "=" not in item:
                raise ParseError(f"expected name = value, got {item!r}")
            name, _, value = item.partition("=")
            name = name.strip()
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", name):
                raise ParseError(f"bad name {name!r}")
            out[name] = parse(value)
    return out
