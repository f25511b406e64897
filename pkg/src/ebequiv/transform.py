"""Point transformations of the (generalized) Euler-Bernoulli beam equation.

The source equation is ``(f u_xx)_xx + m u_tt = 0``.  A point transformation
``t = R(y, z), x = S(y, z), u = L(y, z) w + J(y, z)`` maps it to a linear
equation in ``w(y, z)``, stored as a :class:`LinearPde`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import sympy as sp

from .expr import (YZ, AssumptionSet, Jet, applied, collect, fn, is_zero, multi_index_key,
                   normalize, reassemble, solve_linear_identity, t, total_derivative, x)
from .jet import add_linear, power_linear, scale_linear, solve_operator_system

W = "w"
EB_KEYS = ((0, 4), (0, 3), (0, 2), (2, 0))


@dataclass(frozen=True)
class EbEquation:
    """``(f u_xx)_xx + m u_tt = 0``.

    ``f`` and ``m`` are either function-symbol names (arbitrary functions of
    ``x``, or of ``(t, x)`` for the generalized flavor) or concrete
    expressions in the source variables ``t``, ``x``.
    """

    f: object = "f"
    m: object = "m"
    flavor: str = "classic"

    def __post_init__(self):
        if self.flavor not in ("classic", "generalized"):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        for c in (self.f, self.m):
            if self.flavor == "classic" and not isinstance(c, str) and sp.sympify(c).has(t):
                raise ValueError("classic flavor coefficients depend on x alone")

    def coefficient(self, which: str, t_of, x_of) -> sp.Expr:
        """The coefficient ``f`` or ``m`` evaluated on the chart ``(t_of, x_of)``."""
        c = self.f if which == "f" else self.m
        if isinstance(c, str):
            args = (x_of,) if self.flavor == "classic" else (t_of, x_of)
            return fn(c)(*args)
        return sp.sympify(c).xreplace({t: t_of, x: x_of})

    def source_residual(self, u) -> sp.Expr:
        """Residual in the source chart for ``u`` given as an expression in (t, x)
        (a ``Jet`` over ``("t", "x")`` or a concrete expression)."""
        f_ = self.coefficient("f", t, x)
        m_ = self.coefficient("m", t, x)
        u_xx = total_derivative(total_derivative(u, "x"), "x")
        inner = f_ * u_xx
        return (total_derivative(total_derivative(inner, "x"), "x")
                + m_ * total_derivative(total_derivative(u, "t"), "t"))


@dataclass(frozen=True)
class PointTransformation:
    """``t = R, x = S, u = L w + J`` with R, S, L, J expressions in (y, z)."""

    R: sp.Expr
    S: sp.Expr
    L: sp.Expr
    J: sp.Expr = sp.S.Zero

    @classmethod
    def generic(cls, R_deps=YZ, S_deps=YZ, L_deps=YZ, J_deps=YZ) -> "PointTransformation":
        return cls(Jet("R", deps=R_deps), Jet("S", deps=S_deps), Jet("L", deps=L_deps),
                   Jet("J", deps=J_deps))

    @classmethod
    def identity(cls) -> "PointTransformation":
        y, z = sp.symbols("y z")
        return cls(y, z, sp.S.One, sp.S.Zero)

    def varpi(self) -> sp.Expr:
        return normalize(total_derivative(self.R, "y") * total_derivative(self.S, "z")
                         - total_derivative(self.R, "z") * total_derivative(self.S, "y"))

    def check(self, assumptions: AssumptionSet | None = None) -> bool:
        """Nondegeneracy: R_y S_z L and varpi L not identically zero."""
        R_y = total_derivative(self.R, "y")
        S_z = total_derivative(self.S, "z")
        return not (is_zero(R_y * S_z * self.L, assumptions)
                    or is_zero(self.varpi() * self.L, assumptions))

    def subs(self, bindings: Mapping) -> "PointTransformation":
        from .expr import substitute
        return PointTransformation(*(substitute(e, bindings) for e in
                                     (self.R, self.S, self.L, self.J)))


@dataclass(frozen=True)
class LinearPde:
    """``sum_K coeffs[K] * w_K + inhom`` over the (y, z) chart."""

    coeffs: Mapping = field(default_factory=dict)
    inhom: sp.Expr = sp.S.Zero

    def coeff(self, idx) -> sp.Expr:
        return self.coeffs.get(tuple(idx), sp.S.Zero)

    def residual(self) -> sp.Expr:
        return reassemble(self.coeffs, W) + self.inhom

    def keys(self):
        return sorted(self.coeffs, key=multi_index_key)


def _transform_form(eq: EbEquation, T: PointTransformation, form: dict,
                    assumptions: AssumptionSet | None) -> dict:
    d_t, d_x = solve_operator_system(T.R, T.S, YZ, assumptions)
    f_ = eq.coefficient("f", T.R, T.S)
    m_ = eq.coefficient("m", T.R, T.S)
    u_xx = power_linear(d_x, form, 2, YZ, assumptions)
    bending = power_linear(d_x, scale_linear(u_xx, f_, assumptions), 2, YZ, assumptions)
    inertia = scale_linear(power_linear(d_t, form, 2, YZ, assumptions), m_, assumptions)
    return add_linear(bending, inertia, assumptions=assumptions)


def transform_pde(eq: EbEquation, T: PointTransformation,
                  assumptions: AssumptionSet | None = None) -> LinearPde:
    """Rewrite ``eq`` in the new variables ``(y, z, w)``."""
    form = {}
    if not is_zero(T.L, assumptions):
        form[(0, 0)] = normalize(T.L, assumptions)
    if not is_zero(T.J, assumptions):
        form[None] = normalize(T.J, assumptions)
    out = _transform_form(eq, T, form, assumptions)
    inhom = out.pop(None, sp.S.Zero)
    return LinearPde(dict(sorted(out.items(), key=lambda kv: multi_index_key(kv[0]))), inhom)


def constant_component(eq: EbEquation, T: PointTransformation,
                       assumptions: AssumptionSet | None = None) -> sp.Expr:
    """The w-free part of the transformed equation: the image of ``u = J``."""
    if is_zero(T.J, assumptions):
        return sp.S.Zero
    return _transform_form(eq, T, {None: T.J}, assumptions).get(None, sp.S.Zero)


def pde_from_expr(e, assumptions: AssumptionSet | None = None) -> LinearPde:
    coeffs = collect(e, W, assumptions)
    inhom = coeffs.pop(None, sp.S.Zero)
    return LinearPde(coeffs, inhom)


# -- recognising the beam form ---------------------------------------------------

def eb_residual(F, M, chart=YZ) -> sp.Expr:
    """``(F w_zz)_zz + M w_yy`` as a jet expression."""
    a, b = chart
    w_bb = Jet(W, (0, 2), chart)
    inner = F * w_bb
    return total_derivative(total_derivative(inner, b), b) + M * Jet(W, (2, 0), chart)


def _check_candidate(c: dict, F, M, assumptions) -> sp.Expr | None:
    if is_zero(F, assumptions):
        return None
    mu = normalize(c[(0, 4)] / F, assumptions)
    F_z = total_derivative(F, "z")
    F_zz = total_derivative(F_z, "z")
    if not (is_zero(c.get((0, 3), 0) - 2 * mu * F_z, assumptions)
            and is_zero(c.get((0, 2), 0) - mu * F_zz, assumptions)
            and is_zero(c.get((2, 0), 0) - mu * M, assumptions)):
        return None
    return mu


def _z_bases(e, assumptions) -> list:
    e = normalize(e, assumptions)
    if e == 0:
        return []
    bases = []
    for part in sp.fraction(e):
        for factor in sp.Mul.make_args(sp.factor(part)):
            base, _ = factor.as_base_exp()
            if base.is_Number:
                continue
            if total_derivative(base, "z") != 0 and not is_zero(total_derivative(base, "z"),
                                                               assumptions):
                bases.append(base)
    return bases


def _solve_exponents(g, bases, assumptions) -> list | None:
    expos = sp.symbols(f"_a0:{len(bases)}")
    residual = g - sp.Add(*[a * total_derivative(b, "z") / b for a, b in zip(expos, bases)])
    sol = solve_linear_identity(residual, expos, assumptions)
    if sol is None:
        return None
    values = [sol[a] for a in expos]
    # an undetermined exponent means its base does not matter; drop it
    return [v.xreplace({a: 0 for a in expos}) for v in values]


def match_eb_form(pde: LinearPde, candidate=None,
                  assumptions: AssumptionSet | None = None):
    """Return ``(F, M, mu)`` with ``pde == mu * ((F w_zz)_zz + M w_yy)`` or None.

    With ``candidate=(F, M)`` only proportionality is checked.  Otherwise
    ``F`` is found as a product of powers of the z-dependent factors of the
    coefficients, solving ``2 F_z / F = c_zzz / c_zzzz`` for the exponents;
    factors independent of ``z`` are absorbed into ``mu``.
    """
    if not is_zero(pde.inhom, assumptions):
        return None
    c = {k: v for k, v in pde.coeffs.items()}
    if any(k not in EB_KEYS for k in c) or (0, 4) not in c:
        return None
    if candidate is not None:
        F, M = (sp.sympify(v) for v in candidate)
        mu = _check_candidate(c, F, M, assumptions)
        return None if mu is None else (F, M, mu)

    g = normalize(c.get((0, 3), 0) / (2 * c[(0, 4)]), assumptions)
    bases = []
    for key in ((0, 4), (0, 3), (0, 2)):
        for b in _z_bases(c.get(key, 0), assumptions):
            if not any(is_zero(b - o, assumptions) for o in bases):
                bases.append(b)
    expos = _solve_exponents(g, bases, assumptions)
    if expos is None:
        return None
    F = normalize(sp.Mul(*[b ** a for b, a in zip(bases, expos)]), assumptions)
    mu = normalize(c[(0, 4)] / F, assumptions)
    M = normalize(c.get((2, 0), 0) / mu, assumptions)
    if _check_candidate(c, F, M, assumptions) is None:
        return None
    return F, M, mu
