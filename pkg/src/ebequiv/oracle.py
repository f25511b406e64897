"""Floating-point witnesses for the symbolic identities.

A scene fixes concrete ``f``, ``m``, a smooth ``w(y, z)``, parameter values
and sample points.  The source-side residual is computed without the jet
engine: the chart is inverted exactly with ``sympy.solve``, ``u(t, x)`` is
written down explicitly and differentiated with ``sympy.diff``.  It is
compared with the engine's image evaluated at the same points.

``f``, ``m`` and ``w`` may carry free coefficients whose values live in
``params``; compiled callables are cached per template so that a batch of
seeded scenes differentiates once and evaluates many times.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from functools import lru_cache

import sympy as sp
from sympy.core.function import AppliedUndef

from .errors import DomainError, SingularPoint, UnboundSymbol
from .expr import YZ, substitute, t, total_derivative, x, y, z
from .transform import EbEquation, PointTransformation, eb_residual

REL_TOL = 1e-6
CLAMP = 1e-12


@dataclass(frozen=True)
class NumericScene:
    f: sp.Lambda
    m: sp.Lambda
    w: sp.Expr
    params: dict = field(default_factory=dict)
    points: tuple = ()
    rtol: float = REL_TOL
    step: float = 1e-2

    def value(self, sym) -> float:
        try:
            return float(self.params[str(sym)])
        except KeyError:
            raise UnboundSymbol(f"scene does not bind {sym}") from None

    def with_params(self, **kw) -> "NumericScene":
        params = dict(self.params)
        params.update(kw)
        return replace(self, params=params)


def _scalar(v, where) -> float:
    if isinstance(v, complex):
        if abs(v.imag) > 1e-12 * max(1.0, abs(v.real)):
            raise DomainError(f"complex value {v} at {where}")
        v = v.real
    return float(v)


def _call(func, args, where):
    try:
        v = func(*args)
    except ValueError as exc:
        raise DomainError(f"{exc} at {where}") from exc
    except ZeroDivisionError as exc:
        raise SingularPoint(f"division by zero at {where}") from exc
    if isinstance(v, (tuple, list)):
        return tuple(_scalar(e, where) for e in v)
    return _scalar(v, where)


@lru_cache(maxsize=512)
def _compiled(e, f, m, w, variables=(y, z)):
    b = substitute(e, {"f": f, "m": m, "w": w})
    if b.atoms(AppliedUndef):
        raise UnboundSymbol(f"unbound functions {sorted(map(str, b.atoms(AppliedUndef)))}")
    syms = tuple(sorted(b.free_symbols - set(variables), key=str))
    return sp.lambdify(variables + syms, b, "math", cse=True), syms


def compile_numeric(e, scene: NumericScene, variables=(y, z)):
    """Callable ``(y, z) -> float`` for ``e`` under the scene bindings."""
    func, syms = _compiled(sp.sympify(e), scene.f, scene.m, scene.w, variables)
    vals = tuple(scene.value(s) for s in syms)

    def call(*point):
        return _call(func, tuple(float(p) for p in point) + vals, f"{variables} = {point}")

    return call


def eval(e, scene: NumericScene, point) -> float:  # noqa: A001 - oracle vocabulary
    """IEEE double value of ``e`` at ``point = (y, z)`` with the scene bound."""
    return compile_numeric(e, scene)(*point)


def rel_discrepancy(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), CLAMP)


# -- singular-locus margins -------------------------------------------------------

@lru_cache(maxsize=64)
def _margin_exprs(T: PointTransformation) -> tuple:
    dens = []
    for c in (T.R, T.S, T.L):
        for fac in sp.Mul.make_args(sp.factor(sp.denom(sp.together(c)))):
            base = fac.as_base_exp()[0]
            if base.has(y) or base.has(z):
                dens.append(base)
    S_z = sp.diff(T.S, z)
    varpi = sp.diff(T.R, y) * sp.diff(T.S, z) - sp.diff(T.R, z) * sp.diff(T.S, y)
    return tuple(dens), S_z, varpi


def check_margins(T: PointTransformation, scene: NumericScene, point) -> None:
    """Raise :class:`SingularPoint` within 0.1 of a chart denominator or 1e-3 of
    ``S_z = 0`` or ``varpi = 0``."""
    dens, S_z, varpi = _margin_exprs(T)
    for d in dens:
        if abs(eval(d, scene, point)) <= 0.1:
            raise SingularPoint(f"denominator {d} within 0.1 of zero at {point}")
    sz, vp = eval(S_z, scene, point), eval(varpi, scene, point)
    if abs(sz) <= 1e-3 or abs(vp) <= 1e-3:
        raise SingularPoint(f"S_z = {sz}, varpi = {vp} at {point}")


# -- the independent source-side route ------------------------------------------------

def _d(e, *vars_):
    # one order at a time: multi-order diff runs factor_terms on the result
    for v in vars_:
        e = sp.diff(e, v)
    return e


@lru_cache(maxsize=64)
def _inverse_branches(T: PointTransformation) -> tuple:
    sols = sp.solve([sp.Eq(t, T.R), sp.Eq(x, T.S)], [y, z], dict=True)
    return tuple((s[y], s[z]) for s in sols if y in s and z in s)


@lru_cache(maxsize=128)
def _compiled_source(eq: EbEquation, T: PointTransformation, f, m, w, branch: int):
    Y, Z = _inverse_branches(T)[branch]
    u = (T.L * w + T.J).xreplace({y: Y, z: Z})
    args = (x,) if eq.flavor == "classic" else (t, x)
    f_, m_ = f(*args), m(*args)
    u1 = _d(u, x)
    u2 = _d(u1, x)
    u3 = _d(u2, x)
    u4 = _d(u3, x)
    f1 = _d(f_, x)
    # (f u_xx)_xx expanded by Leibniz so each derivative of u is built once
    res = f_ * u4 + 2 * f1 * u3 + _d(f1, x) * u2 + m_ * _d(u, t, t)
    syms = tuple(sorted(res.free_symbols - {t, x}, key=str))
    return sp.lambdify((t, x) + syms, res, "math", cse=True), syms


def _pick_branch(T: PointTransformation, scene: NumericScene, points) -> int:
    fwd = compile_numeric(sp.Tuple(T.R, T.S), scene)
    for i, (Y, Z) in enumerate(_inverse_branches(T)):
        back = compile_numeric(sp.Tuple(Y, Z), scene, (t, x))
        try:
            if all(max(abs(b - float(q)) for b, q in zip(back(*fwd(*p)), p)) < 1e-9
                   for p in points):
                return i
        except (DomainError, SingularPoint):
            continue
    raise SingularPoint("no closed-form inverse of the chart through the sample points")


def source_residual_function(eq: EbEquation, T: PointTransformation, scene: NumericScene,
                             points=None):
    """Callable ``(y, z) -> (f u_xx)_xx + m u_tt`` at ``(t, x) = (R, S)(y, z)``
    for ``u = L w + J``, built by exact chart inversion and ``sympy.diff``."""
    points = scene.points if points is None else points
    branch = _pick_branch(T, scene, points)
    func, syms = _compiled_source(eq, T, scene.f, scene.m, scene.w, branch)
    vals = tuple(scene.value(s) for s in syms)
    fwd = compile_numeric(sp.Tuple(T.R, T.S), scene)

    def call(py, pz):
        return _call(func, fwd(py, pz) + vals, f"(y, z) = ({py}, {pz})")

    return call


def source_residual_value(eq: EbEquation, T: PointTransformation, scene: NumericScene,
                          point) -> float:
    return source_residual_function(eq, T, scene, (point,))(*point)


@dataclass
class ConsistencyReport:
    max_discrepancy: float
    per_point: list
    passed: bool


def residual_consistency(eq: EbEquation, T: PointTransformation, scene: NumericScene,
                         image=None) -> ConsistencyReport:
    """Compare the source residual with the transformed one at every sample.

    ``image`` is either ``(F, M, mu)`` (beam form claim) or a LinearPde-like
    object with ``residual()``; by default the engine's full transform.
    """
    if image is None:
        from .transform import transform_pde
        image = transform_pde(eq, T)
    if isinstance(image, tuple):
        F, M, mu = image
        target = mu * eb_residual(F, M)
    else:
        target = image.residual()
    target_num = compile_numeric(target, scene)
    for pt in scene.points:
        check_margins(T, scene, pt)
    source = source_residual_function(eq, T, scene)
    rows = []
    for pt in scene.points:
        a, b = source(*pt), target_num(*pt)
        rows.append((pt, a, b, rel_discrepancy(a, b)))
    worst = max((r[3] for r in rows), default=0.0)
    return ConsistencyReport(worst, rows, worst < scene.rtol)


def probe_coefficient(eq: EbEquation, T: PointTransformation, scene: NumericScene,
                      index, point) -> float:
    """Coefficient of ``w_index`` at ``point`` read off the source residual.

    Uses ``w = prod (v - v0)^k / k!`` whose only nonzero derivative at the
    point is ``w_index = 1`` (requires ``J = 0``).
    """
    w = sp.Mul(*[(v - v0) ** k / sp.factorial(k)
                 for v, v0, k in zip((y, z), map(sp.nsimplify, point), index)])
    return source_residual_value(eq, replace(T, J=sp.S.Zero), replace(scene, w=w), point)


# -- finite differences -------------------------------------------------------------------

@dataclass
class FdReport:
    symbolic: float
    numeric: float
    rel_error: float
    passed: bool


def fd_crosscheck(e, scene: NumericScene, direction: str, point, levels: int = 4) -> FdReport:
    """Symbolic total derivative vs Richardson-extrapolated central differences."""
    k = YZ.index(direction)
    sym = eval(total_derivative(e, direction), scene, point)
    g = compile_numeric(e, scene)

    def central(h):
        lo, hi = list(point), list(point)
        lo[k] -= h
        hi[k] += h
        return (g(*hi) - g(*lo)) / (2 * h)

    table = [central(scene.step / 2 ** i) for i in range(levels)]
    for j in range(1, levels):
        table = [(4 ** j * table[i + 1] - table[i]) / (4 ** j - 1) for i in range(len(table) - 1)]
    num = table[0]
    err = rel_discrepancy(sym, num)
    return FdReport(sym, num, err, err < scene.rtol)


# -- seeded random scenes ---------------------------------------------------------------------

A = sp.symbols("a1:4")
B = sp.symbols("b1:4")
C = sp.symbols("c1:8")

CLASSIC_F = sp.Lambda(x, 1 + A[0] * x ** 2 + A[1] * (1 + sp.sin(A[2] * x)))
CLASSIC_M = sp.Lambda(x, 1 + B[0] * x ** 2 + B[1] * sp.exp(B[2] * x))
GENERALIZED_F = sp.Lambda((t, x), 1 + A[0] * x ** 2 + A[1] * (1 + sp.sin(A[2] * (x + t / 2))))
GENERALIZED_M = sp.Lambda((t, x), 1 + B[0] * (x ** 2 + t ** 2) + B[1] * sp.exp(B[2] * (x - t)))
W_TEMPLATE = (C[0] * sp.sin(C[1] * y) * sp.cosh(C[2] * z) + C[3] * sp.exp(C[4] * y - C[5] * z)
              + C[6] * y ** 2 * z ** 3)


def _rat(rng: random.Random, lo: float, hi: float, den: int = 8) -> sp.Rational:
    return sp.Rational(rng.randint(round(lo * den), round(hi * den)), den)


def _template_values(rng) -> dict:
    """Coefficients keeping f, m positive (all weights nonnegative)."""
    vals = {}
    for s in (A[0], A[1], B[0], B[1]):
        vals[str(s)] = _rat(rng, 0, 1)
    for s in (A[2], B[2]):
        vals[str(s)] = _rat(rng, 0.25, 1.5)
    for s in C:
        vals[str(s)] = _rat(rng, -1.5, 1.5)
    return vals


def _points(rng, n=3):
    return tuple((_rat(rng, -1, 1, 16), _rat(rng, -1, 1, 16)) for _ in range(n))


def random_moebius_params(rng: random.Random, with_k7: bool) -> dict:
    """k0..k11 with determinants above 1/4 and denominators regular on [-1, 1]^2."""
    while True:
        k = {f"k{i}": _rat(rng, -1, 1) for i in range(12)}
        k["k1"] = _rat(rng, 0.5, 2)
        k["k2"] = _rat(rng, 1, 3)
        k["k4"] = _rat(rng, -0.5, 0.5)
        k["k5"] = _rat(rng, 0.5, 2)
        k["k7"] = _rat(rng, -0.5, 0.5) if with_k7 else sp.S.Zero
        if not with_k7:
            k["k11"] = sp.S.Zero
        D = k["k2"] - k["k3"] * k["k4"]
        E = k["k5"] - k["k6"] * k["k7"]
        if D > sp.Rational(1, 4) and E > sp.Rational(1, 4) and k["k4"] != 0 and \
                (not with_k7 or k["k7"] != 0):
            return k


def random_scene(rng: random.Random, kind: str) -> NumericScene:
    """``kind`` in {identity, theorem1, theorem2, theorem3}."""
    generalized = kind == "theorem2"
    f, m = (GENERALIZED_F, GENERALIZED_M) if generalized else (CLASSIC_F, CLASSIC_M)
    params = _template_values(rng)
    if kind == "theorem1":
        params.update(random_moebius_params(rng, with_k7=False))
    elif kind == "theorem2":
        params.update(random_moebius_params(rng, with_k7=True))
    elif kind == "theorem3":
        params.update({f"p{i}": _rat(rng, -1, 1) for i in range(1, 7)})
        params["p5"] = _rat(rng, 0.5, 2)
    elif kind != "identity":
        raise ValueError(f"unknown scene kind {kind!r}")
    return NumericScene(f, m, W_TEMPLATE, params, _points(rng))


def random_scenes(seed: int, kind: str, n: int) -> list:
    rng = random.Random(f"{kind}-{seed}")
    return [random_scene(rng, kind) for _ in range(n)]


def perturbed(scene: NumericScene, name: str, factor=sp.Rational(11, 10)) -> NumericScene:
    return scene.with_params(**{name: sp.sympify(scene.params[name]) * factor})


def identity_value_check(a, b, scene: NumericScene) -> float:
    """Max relative discrepancy between two expressions over the scene points."""
    fa, fb = compile_numeric(a, scene), compile_numeric(b, scene)
    return max(rel_discrepancy(fa(*p), fb(*p)) for p in scene.points)


# -- theorem-level witnesses --------------------------------------------------------------

@dataclass(frozen=True)
class TheoremSetup:
    eq: EbEquation
    T: PointTransformation
    image: tuple  # (F, M, mu), symbolic in the scene parameters
    kind: str


def theorem_setup(theorem: int, overrides: dict | None = None) -> TheoremSetup:
    """Symbolic image of the theorem's transformation, computed once."""
    from .derivation import (EquivParams, assemble_theorem1, moebius_pair_transformation,
                             reference_FM_moebius_pair)
    from .symmetry import SymmetryParams, finite_symmetry, image_preserves_coefficients
    from .transform import match_eb_form, transform_pde

    overrides = overrides or {}
    if theorem == 1:
        p = EquivParams.group().with_(**overrides)
        img = assemble_theorem1(p)
        return TheoremSetup(EbEquation(), img.T, (img.F, img.M, img.mu), "theorem1")
    if theorem == 2:
        eq = EbEquation(flavor="generalized")
        p = EquivParams.symbolic().with_(**overrides)
        T = moebius_pair_transformation(p)
        match = match_eb_form(transform_pde(eq, T),
                              candidate=reference_FM_moebius_pair(p, "generalized"))
        return TheoremSetup(eq, T, match, "theorem2")
    if theorem == 3:
        p = SymmetryParams(**overrides)
        mu = image_preserves_coefficients(p)
        return TheoremSetup(EbEquation(), finite_symmetry(p),
                            (sp.Function("f")(z), sp.Function("m")(z), mu), "theorem3")
    raise ValueError(f"no theorem {theorem}")


@dataclass
class WitnessSummary:
    theorem: int
    scenes: int
    max_discrepancy: float
    corrupted_F: float
    perturbed: dict
    skipped: list

    @property
    def passed(self) -> bool:
        controls = [self.corrupted_F] + list(self.perturbed.values())
        return (self.scenes > 0 and self.max_discrepancy < REL_TOL
                and all(c > 1e-3 for c in controls))


def theorem_witness(theorem: int, n: int = 20, seed: int = 0, overrides: dict | None = None,
                    setup: TheoremSetup | None = None, control_scenes: int = 3) -> WitnessSummary:
    """Residual consistency on ``n`` seeded scenes plus negative controls.

    Controls: F multiplied by ``1 + z``, and each parameter the claimed image
    depends on scaled by 11/10 on the source side only.
    """
    setup = setup or theorem_setup(theorem, overrides)
    fixed = {str(k): sp.sympify(v) for k, v in (overrides or {}).items()}
    F, M, mu = setup.image
    worst, used, skipped = 0.0, [], []
    for i, scene in enumerate(random_scenes(seed, setup.kind, n)):
        scene = scene.with_params(**fixed)
        try:
            r = residual_consistency(setup.eq, setup.T, scene, setup.image)
        except (SingularPoint, DomainError) as exc:
            skipped.append((i, str(exc)))
            continue
        worst = max(worst, r.max_discrepancy)
        used.append(scene)
    corrupted = 0.0
    for scene in used[:control_scenes]:
        r = residual_consistency(setup.eq, setup.T, scene, (F * (1 + z), M, mu))
        corrupted = max(corrupted, r.max_discrepancy)
    sensitive = sorted((str(s) for s in sp.sympify(F * M * mu).free_symbols
                        if str(s) not in fixed and s not in (y, z)),
                       key=lambda s: (len(s), s))
    perturbed_max = {}
    for name in sensitive:
        best = 0.0
        for scene in used[:control_scenes]:
            target = compile_numeric(mu * eb_residual(F, M), scene)
            source = source_residual_function(setup.eq, setup.T, perturbed(scene, name))
            best = max(best, max(rel_discrepancy(source(*p), target(*p)) for p in scene.points))
            if best > 1e-3:
                break
        perturbed_max[name] = best
    return WitnessSummary(theorem, len(used), worst, corrupted, perturbed_max, skipped)
