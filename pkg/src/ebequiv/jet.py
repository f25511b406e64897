"""Differential operators of a change of variables.

For a chart ``t = t(y, z)``, ``x = x(y, z)`` the chain rule
``D_y = t_y d_t + x_y d_x``, ``D_z = t_z d_t + x_z d_x`` is inverted by 2x2
Cramer elimination, giving ``d_t`` and ``d_x`` as first-order operators in
``(y, z)`` whose coefficients are exact expressions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import sympy as sp

from .errors import SingularJacobian
from .expr import YZ, AssumptionSet, normalize, total_derivative

LinearForm = Mapping  # {multi-index or None: coefficient}


@dataclass(frozen=True)
class LinOp:
    """sum_i coeff_i * D_{var_i}, at most one term per direction."""

    terms: tuple  # ((coeff, var_name), ...)

    @classmethod
    def from_pairs(cls, pairs, assumptions: AssumptionSet | None = None) -> "LinOp":
        merged: dict[str, sp.Expr] = {}
        for c, v in pairs:
            merged[str(v)] = merged.get(str(v), 0) + sp.sympify(c)
        terms = []
        for v, c in merged.items():
            c = normalize(c, assumptions)
            if c != 0:
                terms.append((c, v))
        return cls(tuple(terms))

    def coeff(self, var) -> sp.Expr:
        for c, v in self.terms:
            if v == str(var):
                return c
        return sp.S.Zero

    def __str__(self):
        return " + ".join(f"({c})*D[{v}]" for c, v in self.terms) or "0"


@dataclass(frozen=True)
class Jacobian2:
    varpi: sp.Expr  # t_y x_z - t_z x_y


def jacobian(t_of, x_of, chart=YZ, assumptions: AssumptionSet | None = None) -> Jacobian2:
    a, b = chart
    t_a, t_b = total_derivative(t_of, a), total_derivative(t_of, b)
    x_a, x_b = total_derivative(x_of, a), total_derivative(x_of, b)
    return Jacobian2(normalize(t_a * x_b - t_b * x_a, assumptions))


def solve_operator_system(t_of, x_of, chart=YZ,
                          assumptions: AssumptionSet | None = None) -> tuple[LinOp, LinOp]:
    """Return ``(d_t, d_x)`` as operators on the ``chart`` variables."""
    a, b = chart
    t_a, t_b = total_derivative(t_of, a), total_derivative(t_of, b)
    x_a, x_b = total_derivative(x_of, a), total_derivative(x_of, b)
    varpi = normalize(t_a * x_b - t_b * x_a, assumptions)
    if varpi == 0:
        raise SingularJacobian(f"chart ({t_of}, {x_of}) has vanishing Jacobian")
    d_t = LinOp.from_pairs([(x_b / varpi, a), (-x_a / varpi, b)], assumptions)
    d_x = LinOp.from_pairs([(-t_b / varpi, a), (t_a / varpi, b)], assumptions)
    return d_t, d_x


def apply(op: LinOp, e, assumptions: AssumptionSet | None = None) -> sp.Expr:
    return normalize(sp.Add(*[c * total_derivative(e, v) for c, v in op.terms]), assumptions)


def power(op: LinOp, e, n: int, assumptions: AssumptionSet | None = None) -> sp.Expr:
    if not 1 <= n <= 4:
        raise ValueError("operator powers are supported for 1 <= n <= 4")
    for _ in range(n):
        e = apply(op, e, assumptions)
    return e


# -- operators acting on forms linear in one jet family ------------------------

def _shift(idx, chart, var):
    k = chart.index(var)
    out = list(idx)
    out[k] += 1
    return tuple(out)


def apply_linear(op: LinOp, form: LinearForm, chart=YZ,
                 assumptions: AssumptionSet | None = None, family_deps=None) -> dict:
    """Apply ``op`` to ``sum_K c_K w_K + c_None`` given as a coefficient map.

    Equivalent to :func:`apply` on the reassembled expression, but keeps each
    coefficient small by normalizing it separately.
    """
    deps = chart if family_deps is None else family_deps
    acc: dict = {}
    for key, c in form.items():
        for coef, v in op.terms:
            dc = total_derivative(c, v)
            if dc != 0:
                acc[key] = acc.get(key, 0) + coef * dc
            if key is not None and v in deps:
                k2 = _shift(key, chart, v)
                acc[k2] = acc.get(k2, 0) + coef * c
    out = {}
    for key, c in acc.items():
        c = normalize(c, assumptions)
        if c != 0:
            out[key] = c
    return out


def power_linear(op: LinOp, form: LinearForm, n: int, chart=YZ,
                 assumptions: AssumptionSet | None = None) -> dict:
    for _ in range(n):
        form = apply_linear(op, form, chart, assumptions)
    return form


def scale_linear(form: LinearForm, factor, assumptions: AssumptionSet | None = None) -> dict:
    out = {}
    for key, c in form.items():
        c = normalize(factor * c, assumptions)
        if c != 0:
            out[key] = c
    return out


def add_linear(*forms: LinearForm, assumptions: AssumptionSet | None = None) -> dict:
    acc: dict = {}
    for form in forms:
        for key, c in form.items():
            acc[key] = acc.get(key, 0) + c
    out = {}
    for key, c in acc.items():
        c = normalize(c, assumptions)
        if c != 0:
            out[key] = c
    return out
