"""The f,m-independent symmetry group of the beam equation.

The group acts by ``t = y + p6, x = z, u = p5 w + J`` with ``J`` in the
four-dimensional kernel ``span{1, t, x, t x}``; its generator is
``p6 d_t + (p4 + p2 t + p3 x + p1 t x + p5 u) d_u``.  Infinitesimal
invariance is checked by 4th-order prolongation and reduction modulo
``u_tt = -(f u_xx)_xx / m``.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import sympy as sp

from .errors import NonInvertible
from .expr import (TX, AssumptionSet, Jet, derivative_along, is_zero, normalize,
                   partial_derivative, t, total_derivative, x, y, z)
from .transform import EbEquation, PointTransformation, match_eb_form, transform_pde

U = Jet("u", chart=TX)
P = sp.symbols("p1:7")


@dataclass(frozen=True)
class SymmetryParams:
    p1: sp.Expr = P[0]
    p2: sp.Expr = P[1]
    p3: sp.Expr = P[2]
    p4: sp.Expr = P[3]
    p5: sp.Expr = P[4]
    p6: sp.Expr = P[5]

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, sp.sympify(getattr(self, f.name)))

    @classmethod
    def identity(cls) -> "SymmetryParams":
        return cls(0, 0, 0, 0, 1, 0)

    @classmethod
    def unit(cls, i: int, value=1) -> "SymmetryParams":
        """Zero except ``p_i = value`` (the generator basis)."""
        vals = [0] * 6
        vals[i - 1] = value
        return cls(*vals)

    def values(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))


@dataclass(frozen=True)
class VectorField:
    """``xi_t d_t + xi_x d_x + phi d_u`` with components in ``t, x`` and ``U``."""

    xi_t: sp.Expr = sp.S.Zero
    xi_x: sp.Expr = sp.S.Zero
    phi: sp.Expr = sp.S.Zero

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, sp.sympify(getattr(self, f.name)))


def kernel_function(p: SymmetryParams, a=t, b=x) -> sp.Expr:
    """``p4 + p2 a + b (p3 + p1 a)``: solves the equation for every f, m."""
    return p.p2 * a + p.p4 + b * (p.p1 * a + p.p3)


def ge_generator(p: SymmetryParams | None = None) -> VectorField:
    p = p or SymmetryParams()
    return VectorField(p.p6, 0, kernel_function(p) + p.p5 * U)


def finite_symmetry(p: SymmetryParams | None = None) -> PointTransformation:
    p = p or SymmetryParams()
    if is_zero(p.p5):
        raise NonInvertible("p5 = 0 collapses u")
    return PointTransformation(y + p.p6, z, p.p5, kernel_function(p, y, z))


def compose_symmetry(p: SymmetryParams, q: SymmetryParams) -> SymmetryParams:
    """Parameters of ``T_p o T_q`` (``T_q`` first)."""
    return SymmetryParams(
        p.p5 * q.p1 + p.p1,
        p.p5 * q.p2 + p.p2,
        p.p5 * q.p3 + p.p1 * q.p6 + p.p3,
        p.p5 * q.p4 + p.p2 * q.p6 + p.p4,
        p.p5 * q.p5,
        p.p6 + q.p6,
    )


def inverse_symmetry(p: SymmetryParams) -> SymmetryParams:
    if is_zero(p.p5):
        raise NonInvertible("p5 = 0 has no inverse")
    r = 1 / p.p5
    q6 = -p.p6
    q1, q2 = -r * p.p1, -r * p.p2
    return SymmetryParams(q1, q2, -r * (p.p3 + p.p1 * q6), -r * (p.p4 + p.p2 * q6), r, q6)


# -- prolongation -------------------------------------------------------------------

def prolong(v: VectorField, order: int) -> dict:
    """``phi^K`` for every ``|K| <= order`` on the (t, x) chart.

    ``phi^K = D_K(phi - xi_t u_t - xi_x u_x) + xi_t u_{K+t} + xi_x u_{K+x}``.
    """
    if not 1 <= order <= 4:
        raise ValueError("prolongation order must be between 1 and 4")
    u_t, u_x = U.shift("t"), U.shift("x")
    Q = v.phi - v.xi_t * u_t - v.xi_x * u_x
    out = {}
    for n in range(order + 1):
        for i in range(n, -1, -1):
            K = (i, n - i)
            uK = Jet("u", K, TX)
            out[K] = normalize(derivative_along(Q, TX, K)
                               + v.xi_t * uK.shift("t") + v.xi_x * uK.shift("x"))
    return out


def apply_prolonged(v: VectorField, e, order: int = 4) -> sp.Expr:
    """``pr v (e)`` for an expression in ``t, x`` and the u-jets."""
    e = sp.sympify(e)
    out = v.xi_t * partial_derivative(e, t) + v.xi_x * partial_derivative(e, x)
    for K, phiK in prolong(v, order).items():
        uK = Jet("u", K, TX)
        if e.has(uK):
            out += phiK * sp.diff(e, uK)
    return out


def solved_u_tt(eq: EbEquation, family: str = "u") -> sp.Expr:
    """``u_tt`` from the equation: ``-(f u_xx)_xx / m``."""
    u = Jet(family, chart=TX)
    f_, m_ = eq.coefficient("f", t, x), eq.coefficient("m", t, x)
    bending = total_derivative(total_derivative(f_ * derivative_along(u, TX, (0, 2)), "x"), "x")
    return -bending / m_


def reduce_mod_equation(e, eq: EbEquation, family: str = "u",
                        assumptions: AssumptionSet | None = None) -> sp.Expr:
    """Eliminate every jet with two or more t-derivatives using the equation."""
    rule = solved_u_tt(eq, family)
    e = sp.sympify(e)
    for _ in range(20):
        hits = [j for j in e.atoms(Jet)
                if j.func_name == family and j.chart == TX and j.index[0] >= 2]
        if not hits:
            return normalize(e, assumptions)
        e = e.xreplace({j: derivative_along(rule, TX, (j.index[0] - 2, j.index[1]))
                        for j in hits})
    raise RuntimeError("reduction modulo the equation did not terminate")


def check_infinitesimal_symmetry(v: VectorField, eq: EbEquation | None = None,
                                 assumptions: AssumptionSet | None = None) -> bool:
    eq = eq or EbEquation()
    delta = eq.source_residual(U)
    return is_zero(reduce_mod_equation(apply_prolonged(v, delta), eq, assumptions=assumptions),
                   assumptions)


def verify_J3_solution(p: SymmetryParams | None = None, eq: EbEquation | None = None,
                       assumptions: AssumptionSet | None = None) -> bool:
    eq = eq or EbEquation()
    return is_zero(eq.source_residual(kernel_function(p or SymmetryParams())), assumptions)


def superposition_symmetry(sol, p5=P[4]) -> PointTransformation:
    """``u = p5 w + sol`` with ``sol`` a solution given in (t, x)."""
    sol = sp.sympify(sol)
    if isinstance(sol, Jet):
        sol = Jet(sol.func_name, sol.index, ("y", "z"))
    else:
        sol = sol.xreplace({t: y, x: z})
    return PointTransformation(y, z, sp.sympify(p5), sol)


def superposition_defect(sol, eq: EbEquation | None = None, p5=P[4],
                         assumptions: AssumptionSet | None = None) -> sp.Expr:
    """``Delta(p5 u + sol) - p5 Delta(u)`` reduced modulo ``Delta(sol) = 0``.

    ``sol`` is either concrete or a jet family (a posited solution).
    """
    eq = eq or EbEquation()
    sol = sp.sympify(sol)
    split = eq.source_residual(p5 * U + sol) - p5 * eq.source_residual(U)
    if isinstance(sol, Jet):
        return reduce_mod_equation(split, eq, sol.func_name, assumptions)
    return normalize(split, assumptions)


def image_preserves_coefficients(p: SymmetryParams | None = None, eq: EbEquation | None = None,
                                 assumptions: AssumptionSet | None = None):
    """mu when the finite transformation maps the equation to itself, else None."""
    eq = eq or EbEquation()
    pde = transform_pde(eq, finite_symmetry(p), assumptions)
    cand = (eq.coefficient("f", y, z), eq.coefficient("m", y, z))
    match = match_eb_form(pde, candidate=cand, assumptions=assumptions)
    return None if match is None else match[2]


def time_scaled_image(k5=sp.Symbol("k5"), p: SymmetryParams | None = None,
                      eq: EbEquation | None = None,
                      assumptions: AssumptionSet | None = None):
    """``(F, M, mu)`` of the image when time is also scaled, ``t = k5 y + p6``."""
    eq = eq or EbEquation()
    T = finite_symmetry(p)
    T = PointTransformation(k5 * y + (p or SymmetryParams()).p6, T.S, T.L, T.J)
    pde = transform_pde(eq, T, assumptions)
    return match_eb_form(pde, assumptions=assumptions)


def generator_of_subgroup(i: int, eps=sp.Symbol("epsilon")) -> VectorField:
    """Tangent at the identity of the one-parameter subgroup in direction ``p_i``.

    The scaling direction ``p5`` is parametrized as ``exp(eps)``.
    """
    vals = list(SymmetryParams.identity().values())
    vals[i - 1] = sp.exp(eps) if i == 5 else eps
    T = finite_symmetry(SymmetryParams(*vals))
    w = Jet("w")
    image = {"t": T.R, "x": T.S, "u": T.L * w + T.J}
    d = {k: sp.diff(v, eps).subs(eps, 0) for k, v in image.items()}
    back = {y: t, z: x, w: U}
    return VectorField(*(normalize(sp.sympify(d[k]).xreplace(back)) for k in ("t", "x", "u")))


def same_field(a: VectorField, b: VectorField,
               assumptions: AssumptionSet | None = None) -> bool:
    return all(is_zero(getattr(a, f.name) - getattr(b, f.name), assumptions)
               for f in fields(VectorField))
