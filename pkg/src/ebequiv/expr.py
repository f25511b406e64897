"""Exact symbolic expressions over jet indeterminates.

Expressions are ordinary sympy expressions built from four kinds of atoms:

* independent variables (plain symbols ``y``, ``z``, ``t``, ``x``),
* parameters (any other plain symbol, e.g. ``k5`` or ``p1``); their derivative
  is zero in every direction,
* :class:`Jet` atoms standing for a partial derivative of an unknown function,
  e.g. ``Jet("R", (2, 0))`` is ``R_yy``,
* applied function symbols ``f(S)``, whose derivatives are new function
  symbols tagged with a derivative order (``f[1](S)``, ``f[0,2](R, S)``).

sympy supplies the commutative algebra (expansion, polynomial gcd); the jet
bookkeeping, total derivatives, radical handling and canonical form live here.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import sympy as sp
from sympy.core.function import AppliedUndef, UndefinedFunction

from .errors import AssumptionMissing, InconsistentBinding, NotPolynomial

Expr = sp.Expr

y, z, t, x = sp.symbols("y z t x")
YZ = ("y", "z")
TX = ("t", "x")


class Jet(sp.Symbol):
    """Derivative indeterminate of an unknown function.

    ``index`` counts derivatives along ``chart``; ``deps`` lists the chart
    variables the function actually depends on (``R = R(y)`` has
    ``deps=("y",)`` so that every ``z`` derivative vanishes).
    """

    __slots__ = ("func_name", "index", "chart", "deps")

    def __new__(cls, func_name, index=None, chart=YZ, deps=None):
        chart = tuple(chart)
        index = tuple(index) if index is not None else (0,) * len(chart)
        if len(index) != len(chart) or any(int(i) != i or i < 0 for i in index):
            raise ValueError(f"bad multi-index {index} for chart {chart}")
        deps = chart if deps is None else tuple(v for v in chart if v in deps)
        suffix = "".join(v * n for v, n in zip(chart, index))
        obj = sp.Symbol.__xnew__(cls, func_name + ("_" + suffix if suffix else ""))
        obj.func_name = func_name
        obj.index = tuple(int(i) for i in index)
        obj.chart = chart
        obj.deps = deps
        return obj

    def _hashable_content(self):
        return super()._hashable_content() + (self.func_name, self.index, self.chart, self.deps)

    def __getnewargs_ex__(self):
        return ((self.func_name, self.index, self.chart, self.deps), {})

    @property
    def order(self) -> int:
        return sum(self.index)

    def shift(self, var) -> Expr:
        """The jet one derivative further along ``var`` (zero if independent)."""
        name = str(var)
        if name not in self.chart:
            raise ValueError(f"{self} lives on chart {self.chart}, cannot differentiate by {name}")
        if name not in self.deps:
            return sp.S.Zero
        k = self.chart.index(name)
        idx = list(self.index)
        idx[k] += 1
        return Jet(self.func_name, idx, self.chart, self.deps)

    def base(self) -> "Jet":
        return Jet(self.func_name, None, self.chart, self.deps)


def jet(name: str, index=None, chart=YZ, deps=None) -> Jet:
    return Jet(name, index, chart, deps)


def jets(e: Expr, family: str | None = None) -> set[Jet]:
    found = sp.sympify(e).atoms(Jet)
    if family is not None:
        found = {j for j in found if j.func_name == family}
    return found


# -- applied function symbols ----------------------------------------------

_FN_NAME = re.compile(r"^([A-Za-z]\w*)\[(\d+(?:,\d+)*)\]$")


def fn(name: str, orders: Iterable[int] | None = None) -> UndefinedFunction:
    """Function symbol ``name`` differentiated ``orders`` times per argument."""
    if orders is None or not any(orders):
        return sp.Function(name)
    return sp.Function(f"{name}[{','.join(str(int(o)) for o in orders)}]")


def fn_info(app: AppliedUndef) -> tuple[str, tuple[int, ...]]:
    """Split an applied function symbol into (base name, derivative orders)."""
    name = app.func.__name__
    m = _FN_NAME.match(name)
    if m:
        orders = tuple(int(o) for o in m.group(2).split(","))
        if len(orders) != len(app.args):
            raise ValueError(f"{name} applied to {len(app.args)} arguments")
        return m.group(1), orders
    return name, (0,) * len(app.args)


def fn_apply(name: str, *args, orders=None) -> Expr:
    return fn(name, orders)(*args)


def _fn_shift(app: AppliedUndef, i: int) -> Expr:
    base, orders = fn_info(app)
    new = list(orders)
    new[i] += 1
    return fn(base, new)(*app.args)


def applied(e: Expr, family: str | None = None) -> set[AppliedUndef]:
    found = sp.sympify(e).atoms(AppliedUndef)
    if family is not None:
        found = {a for a in found if fn_info(a)[0] == family}
    return found


# -- assumptions ---------------------------------------------------------------

def _sign_key(g: Expr) -> tuple[int, Expr]:
    # deps are irrelevant for sign questions: R_y(y) and R_y(y, z) share a sign.
    g = sp.expand(g.xreplace({j: sp.Symbol(j.name) for j in g.atoms(Jet)}))
    _, prim = g.as_content_primitive()
    if prim.could_extract_minus_sign():
        return -1, sp.expand(-prim)
    return 1, prim


@dataclass(frozen=True)
class AssumptionSet:
    """Registered sign facts used to split radicals and to certify nonzero factors."""

    positive: tuple = ()
    nonzero: tuple = ()
    positive_functions: frozenset = frozenset()
    _pos_keys: dict = field(init=False, repr=False, compare=False, hash=False)
    _nz_keys: frozenset = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        pos = {}
        for g in self.positive:
            s, k = _sign_key(sp.sympify(g))
            pos[k] = s
        object.__setattr__(self, "_pos_keys", pos)
        object.__setattr__(
            self, "_nz_keys", frozenset(_sign_key(sp.sympify(g))[1] for g in self.nonzero)
        )

    def with_positive(self, *exprs) -> "AssumptionSet":
        return AssumptionSet(self.positive + tuple(sp.sympify(e) for e in exprs), self.nonzero,
                             self.positive_functions)

    def with_nonzero(self, *exprs) -> "AssumptionSet":
        return AssumptionSet(self.positive, self.nonzero + tuple(sp.sympify(e) for e in exprs),
                             self.positive_functions)

    def with_positive_functions(self, *names) -> "AssumptionSet":
        return AssumptionSet(self.positive, self.nonzero, self.positive_functions | set(names))

    def sign(self, g: Expr) -> int | None:
        """+1 / -1 when the sign of ``g`` follows from registered facts, else None."""
        g = sp.sympify(g)
        if g.is_Number:
            return None if g == 0 else (1 if g > 0 else -1)
        if isinstance(g, AppliedUndef):
            base, orders = fn_info(g)
            if base in self.positive_functions and not any(orders):
                return 1
        if g.is_Pow and g.exp.is_Rational and not g.exp.is_Integer:
            return 1 if self.sign(g.base) == 1 else None
        if g.is_Mul:
            total = 1
            for a in g.args:
                s = self.sign(a)
                if s is None:
                    return None
                total *= s
            return total
        if g.is_Pow and g.exp.is_Integer:
            s = self.sign(g.base)
            return None if s is None else s ** int(g.exp)
        s, k = _sign_key(g)
        if k in self._pos_keys:
            return s * self._pos_keys[k]
        return None

    def is_nonzero(self, g: Expr) -> bool:
        g = sp.sympify(g)
        if g.is_Number:
            return g != 0
        if g.is_Mul:
            return all(self.is_nonzero(a) for a in g.args)
        if g.is_Pow:
            return self.is_nonzero(g.base) or (g.exp.is_negative is True)
        if self.sign(g) is not None:
            return True
        return _sign_key(g)[1] in self._nz_keys


def default_assumptions() -> AssumptionSet:
    """Sign facts implicit in the beam problem and its transformation charts.

    Rigidity and mass density are positive; the chart derivatives, the Moebius
    determinants and the Moebius denominators are taken positive on the working
    domain so that square roots of them split.
    """
    k = sp.symbols("k0:12")
    p = sp.symbols("p1:7")
    R_y, S_z = Jet("R", (1, 0)), Jet("S", (0, 1))
    R_z, S_y = Jet("R", (0, 1)), Jet("S", (1, 0))
    positive = (R_y, S_z, k[2] - k[3] * k[4], k[5], k[5] - k[6] * k[7],
                1 + k[4] * z, 1 + k[7] * y)
    nonzero = (k[1], k[4], k[7], p[4], Jet("L"), Jet("h", deps=("z",)),
               R_y * S_z - R_z * S_y)
    return AssumptionSet(positive, nonzero, frozenset({"f", "m"}))


DEFAULT = default_assumptions()


# -- canonical form -----------------------------------------------------------

def _is_radical(n: Expr) -> bool:
    return n.is_Pow and n.exp.is_Rational and not n.exp.is_Integer


def _split_radical(base: Expr, q: sp.Rational, a: AssumptionSet) -> Expr:
    num, den = sp.fraction(sp.cancel(sp.together(base)))
    out = sp.S.One
    residual = sp.S.One
    blocked = False
    for part, sgn in ((num, 1), (den, -1)):
        coeff, factors = sp.factor_list(part)
        residual *= coeff ** sgn
        for g, k in factors:
            s = a.sign(g)
            if s == 1:
                out *= g ** (sgn * k * q)
            elif s == -1:
                out *= (-g) ** (sgn * k * q)
                residual *= (-1) ** k
            else:
                residual *= g ** (sgn * k)
                if (k * q).is_integer:
                    blocked = True
    if blocked:
        raise AssumptionMissing(
            f"simplifying ({base})^({q}) needs a sign assumption on a factor of {residual}")
    if residual.is_Number and residual > 0:
        return out * residual ** q
    return out * sp.Pow(residual, q)


def normalize(e, assumptions: AssumptionSet | None = None) -> Expr:
    """Canonical quotient of expanded polynomials in the atoms.

    Radicals are first split over the registered positive factors of their
    radicands (raising :class:`AssumptionMissing` when a simplification such
    as ``(a^2)^(1/2) -> a`` would need an unregistered sign), then the whole
    expression is cancelled to a single reduced fraction.  Function arguments
    are normalized recursively.
    """
    a = DEFAULT if assumptions is None else assumptions
    e = sp.sympify(e)
    if e.is_Number or e.is_Symbol:
        return e
    if e.has(sp.Function):
        seen: dict = {}

        def norm_arg(arg):
            if arg not in seen:
                seen[arg] = normalize(arg, a)
            return seen[arg]

        e = e.replace(lambda n: isinstance(n, sp.Function) and n.args,
                      lambda n: n.func(*[norm_arg(arg) for arg in n.args]))
    if e.has(sp.Pow):
        e = e.replace(_is_radical, lambda n: _split_radical(n.base, n.exp, a))
    prev = None
    for _ in range(10):
        e = sp.cancel(e)
        if e == prev:
            break
        prev = e
    return e


def is_zero(e, assumptions: AssumptionSet | None = None) -> bool:
    return normalize(e, assumptions) == 0


def is_nonzero_factor(e, assumptions: AssumptionSet | None = None,
                      forbid: Iterable[str] = ("w", "u")) -> bool:
    """True when ``e`` is certifiably nonzero and free of the ``forbid`` jets.

    Used for comparisons "up to a nonzero factor": every irreducible factor of
    numerator and denominator must be a nonzero constant or a registered
    nonzero / signed quantity.
    """
    a = DEFAULT if assumptions is None else assumptions
    e = normalize(e, a)
    if e == 0 or any(j.func_name in forbid for j in e.atoms(Jet)):
        return False
    num, den = sp.fraction(e)
    for part in (num, den):
        coeff, factors = sp.factor_list(part)
        if coeff == 0:
            return False
        for g, _ in factors:
            if not a.is_nonzero(g):
                return False
    return True


def proportional(a_expr, b_expr, assumptions: AssumptionSet | None = None) -> Expr | None:
    """Return the ratio a/b when it is a certified nonzero factor, else None."""
    if is_zero(b_expr, assumptions):
        return None
    ratio = normalize(sp.sympify(a_expr) / sp.sympify(b_expr), assumptions)
    return ratio if is_nonzero_factor(ratio, assumptions) else None


# -- differentiation ------------------------------------------------------------

def _as_var(var) -> sp.Symbol:
    return sp.Symbol(var) if isinstance(var, str) else var


def _derive(e: Expr, var: sp.Symbol, hold_jets: bool) -> Expr:
    memo: dict = {}

    def d(n):
        if n in memo:
            return memo[n]
        if n.is_Number or n.is_NumberSymbol:
            r = sp.S.Zero
        elif isinstance(n, Jet):
            r = sp.S.Zero if hold_jets else n.shift(var)
        elif n.is_Symbol:
            r = sp.S.One if n == var else sp.S.Zero
        elif n.is_Add:
            r = sp.Add(*[d(a) for a in n.args])
        elif n.is_Mul:
            args = n.args
            terms = []
            for i, a in enumerate(args):
                da = d(a)
                if da != 0:
                    terms.append(sp.Mul(*(args[:i] + (da,) + args[i + 1:])))
            r = sp.Add(*terms)
        elif n.is_Pow:
            b, ex = n.args
            dex = d(ex)
            if dex == 0:
                r = ex * b ** (ex - 1) * d(b)
            else:
                r = n * (dex * sp.log(b) + ex * d(b) / b)
        elif isinstance(n, AppliedUndef):
            r = sp.Add(*[_fn_shift(n, i) * d(a) for i, a in enumerate(n.args)])
        elif isinstance(n, sp.Function):
            r = sp.Add(*[n.fdiff(i + 1) * d(a) for i, a in enumerate(n.args)])
        else:
            raise TypeError(f"cannot differentiate {type(n).__name__}: {n}")
        memo[n] = r
        return r

    return d(sp.sympify(e))


def total_derivative(e, var) -> Expr:
    """D_var e: chain rule through jets (index shift) and applied functions."""
    return _derive(e, _as_var(var), hold_jets=False)


def partial_derivative(e, var) -> Expr:
    """Explicit derivative with every jet held fixed (jet-space partial)."""
    return _derive(e, _as_var(var), hold_jets=True)


def derivative_along(e, chart: tuple[str, ...], index: Iterable[int]) -> Expr:
    """Apply total derivatives following a multi-index on ``chart``."""
    for v, n in zip(chart, index):
        for _ in range(n):
            e = total_derivative(e, v)
    return e


# -- substitution ---------------------------------------------------------------

def substitute(e, bindings: Mapping, assumptions: AssumptionSet | None = None) -> Expr:
    """Simultaneous, jet-consistent substitution.

    Keys may be:

    * a function name (str) or base :class:`Jet` bound to an expression: every
      jet of that function is replaced by the matching total derivative;
    * a derived :class:`Jet` (e.g. ``R_z``) bound on its own;
    * a function name bound to a ``sympy.Lambda``: applied symbols of that
      name (and their derivative symbols) are replaced by the concrete
      function and its derivatives;
    * plain symbols (parameters, variables).
    """
    e = sp.sympify(e)
    funcs: dict[str, Expr] = {}
    lambdas: dict[str, sp.Lambda] = {}
    atoms: dict = {}
    for key, val in bindings.items():
        val = val if isinstance(val, sp.Lambda) else sp.sympify(val)
        if isinstance(key, UndefinedFunction):
            key = key.__name__
        if isinstance(key, str):
            (lambdas if isinstance(val, sp.Lambda) else funcs)[key] = val
        elif isinstance(key, Jet) and not any(key.index):
            funcs[key.func_name] = val
        else:
            atoms[sp.sympify(key)] = val

    mapping = dict(atoms)
    for j in e.atoms(Jet) | {k for k in atoms if isinstance(k, Jet)}:
        if j.func_name not in funcs:
            continue
        derived = derivative_along(funcs[j.func_name], j.chart, j.index)
        if j in atoms:
            if not is_zero(atoms[j] - derived, assumptions):
                raise InconsistentBinding(
                    f"{j} bound to {atoms[j]} but {j.func_name} binding gives {derived}")
            continue
        mapping[j] = derived
    out = e.xreplace(mapping) if mapping else e

    if lambdas:
        def concrete(app):
            base, orders = fn_info(app)
            lam = lambdas[base]
            body = lam.expr
            for v, n in zip(lam.variables, orders):
                if n:
                    body = sp.diff(body, v, n)
            return body.xreplace(dict(zip(lam.variables, app.args)))

        out = out.replace(lambda n: isinstance(n, AppliedUndef) and fn_info(n)[0] in lambdas,
                          concrete)
    return out


def solve_linear_identity(e, unknowns, assumptions: AssumptionSet | None = None):
    """Solve ``e == 0`` identically for unknowns entering ``e`` linearly.

    The numerator of ``e`` is expanded over every other atom (variables,
    jets, applied functions, radicals); each monomial's coefficient gives one
    linear equation.  Returns a dict (free unknowns map to themselves) or
    None when the system is inconsistent.
    """
    unknowns = list(unknowns)
    num = sp.expand(sp.numer(sp.together(sp.sympify(e))))
    if num == 0:
        return {u: u for u in unknowns}
    poly = sp.Poly(num)
    others = [i for i, gen in enumerate(poly.gens) if gen not in unknowns]
    groups: dict = {}
    for monom, coeff in poly.terms():
        key = tuple(monom[i] for i in others)
        rest = sp.Mul(coeff, *[gen ** monom[i] for i, gen in enumerate(poly.gens)
                               if i not in others])
        groups[key] = groups.get(key, 0) + rest
    sol = sp.linsolve(list(groups.values()), unknowns)
    if not sol:
        return None
    return dict(zip(unknowns, next(iter(sol))))


# -- coefficient collection -----------------------------------------------------

def multi_index_key(idx) -> tuple:
    """Graded lexicographic order, earlier chart variable first."""
    if idx is None:
        return (-1,)
    if idx and isinstance(idx[0], tuple):
        return (sum(map(sum, idx)), len(idx)) + tuple(-i for k in idx for i in k)
    return (sum(idx), 1) + tuple(-i for i in idx)


def _family_atoms(e: Expr, family: str) -> list:
    found = [j for j in e.atoms(Jet) if j.func_name == family]
    found += [a for a in e.atoms(AppliedUndef) if fn_info(a)[0] == family]
    return sorted(found, key=sp.default_sort_key)


def _family_index(atom):
    return atom.index if isinstance(atom, Jet) else fn_info(atom)[1]


def collect(e, family: str, assumptions: AssumptionSet | None = None) -> dict:
    """Coefficients of ``e`` viewed as a polynomial in the jets (or derivative
    symbols) of ``family``.

    Linear monomials are keyed by their multi-index (derivative orders for an
    applied function), higher monomials by the sorted tuple of multi-indices,
    and the family-free part by ``None``. Zero coefficients are omitted.
    """
    e = normalize(e, assumptions)
    num, den = sp.fraction(e)
    if _family_atoms(den, family):
        raise NotPolynomial(f"{family} appears in a denominator")
    for p in num.atoms(sp.Pow):
        if not p.exp.is_Integer and _family_atoms(p.base, family):
            raise NotPolynomial(f"{family} appears inside a radical")
    for g in num.atoms(sp.Function):
        if not isinstance(g, AppliedUndef) and _family_atoms(g, family):
            raise NotPolynomial(f"{family} appears inside {g.func}")
    gens = _family_atoms(num, family)
    if any(_family_atoms(a, family) for g in gens if isinstance(g, AppliedUndef)
           for a in g.args):
        raise NotPolynomial(f"{family} nested inside its own arguments")
    if not gens:
        out = {} if e == 0 else {None: e}
        return out
    poly = sp.Poly(sp.expand(num), *gens)
    out: dict = {}
    for monom, coeff in poly.terms():
        picked = []
        for g, power in zip(gens, monom):
            picked += [_family_index(g)] * power
        key = None if not picked else (picked[0] if len(picked) == 1 else tuple(sorted(picked)))
        c = normalize(coeff / den, assumptions)
        if c != 0:
            out[key] = normalize(out.get(key, 0) + c, assumptions) if key in out else c
    return dict(sorted(out.items(), key=lambda kv: multi_index_key(kv[0])))


def reassemble(coeffs: Mapping, family: str, chart=YZ, deps=None, args=None) -> Expr:
    """Inverse of :func:`collect` for a jet family (or applied family with ``args``)."""
    total = sp.S.Zero
    for key, c in coeffs.items():
        if key is None:
            total += c
            continue
        keys = key if key and isinstance(key[0], tuple) else (key,)
        mon = sp.S.One
        for k in keys:
            mon *= fn(family, k)(*args) if args is not None else Jet(family, k, chart, deps)
        total += c * mon
    return total
