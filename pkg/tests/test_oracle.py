import math
import random

import pytest
import sympy as sp

from ebequiv import oracle as oc
from ebequiv.derivation import EquivParams, theorem1_transformation
from ebequiv.errors import DomainError, SingularPoint, UnboundSymbol
from ebequiv.expr import Jet, fn, y, z
from ebequiv.transform import EbEquation, PointTransformation, transform_pde


@pytest.fixture
def scene():
    return oc.random_scenes(0, "identity", 1)[0]


def test_eval_exact_inputs(scene):
    assert oc.eval(sp.Rational(3, 2), scene, (0, 0)) == 1.5
    assert oc.eval(2 * z + 1, scene, (0, 1)) == 3.0


def test_eval_binds_functions(scene):
    direct = scene.f(sp.Rational(1, 3))
    direct = float(direct.xreplace({sp.Symbol(k): v for k, v in scene.params.items()}))
    assert math.isclose(oc.eval(fn("f")(z), scene, (0, sp.Rational(1, 3))), direct, rel_tol=1e-14)


def test_unbound_symbol(scene):
    with pytest.raises(UnboundSymbol):
        oc.eval(sp.Symbol("q9") * y, scene, (1, 1))
    with pytest.raises(UnboundSymbol):
        oc.eval(fn("g")(z), scene, (1, 1))


def test_domain_error_near_chart_boundary(scene):
    S = (2 * z + 1) / (z + 1)
    with pytest.raises(DomainError):
        oc.eval(sp.sqrt(sp.diff(S, z) - 2), scene, (0, 0))
    with pytest.raises(DomainError):
        oc.eval(sp.log(z), scene, (0, -1))


def test_singular_point(scene):
    with pytest.raises(SingularPoint):
        oc.eval(1 / z, scene, (1, 0))
    T = PointTransformation(y, z ** 3, sp.S.One)
    with pytest.raises(SingularPoint):
        oc.check_margins(T, scene, (0, 0))


def test_rel_discrepancy():
    assert oc.rel_discrepancy(1.0, 1.0) == 0
    assert oc.rel_discrepancy(0.0, 0.0) == 0
    assert math.isclose(oc.rel_discrepancy(1.0, 2.0), 0.5)


def test_fd_crosscheck(scene):
    r = oc.fd_crosscheck(z ** 3, scene, "z", (0, 2))
    assert r.symbolic == 12.0 and r.passed
    r = oc.fd_crosscheck(scene.w, scene, "y", (0.3, -0.2))
    assert r.passed


def test_identity_scene_is_exact(scene):
    r = oc.residual_consistency(EbEquation(), PointTransformation.identity(), scene)
    assert r.max_discrepancy < 1e-12


def test_theorem1_chart():
    p = EquivParams.group().with_(k0=0, k1=1, k2=2, k3=1, k4=sp.Rational(1, 2), k5=3, k6=0,
                                  k8=0, k9=0, k10=0)
    T = theorem1_transformation(p)
    s = oc.random_scenes(3, "identity", 1)[0]
    assert oc.residual_consistency(EbEquation(), T, s).max_discrepancy < 1e-10


def test_probe_matches_engine():
    T = PointTransformation(y * z + 2 * y, z, sp.S.One)
    s = oc.random_scenes(1, "identity", 1)[0]
    pt = (sp.Rational(1, 2), sp.Rational(3, 2))
    engine = oc.eval(transform_pde(EbEquation(), T).coeff((4, 0)), s, pt)
    probe = oc.probe_coefficient(EbEquation(), T, s, (4, 0), pt)
    assert oc.rel_discrepancy(engine, probe) < 1e-9


def test_scenes_are_reproducible():
    a = oc.random_scenes(5, "theorem1", 3)
    b = oc.random_scenes(5, "theorem1", 3)
    assert [s.params for s in a] == [s.params for s in b]
    assert a[0].params != oc.random_scenes(6, "theorem1", 1)[0].params
    with pytest.raises(ValueError):
        oc.random_scene(random.Random(0), "nope")


def test_moebius_draws_respect_margins():
    rng = random.Random(0)
    for _ in range(50):
        k = oc.random_moebius_params(rng, True)
        assert k["k2"] - k["k3"] * k["k4"] > sp.Rational(1, 4)
        assert k["k5"] - k["k6"] * k["k7"] > sp.Rational(1, 4)
        assert k["k4"] != 0 and k["k7"] != 0


@pytest.mark.parametrize("theorem", [1, 2, 3])
def test_witness_small(setups, theorem):
    w = oc.theorem_witness(theorem, n=4, seed=1, setup=setups[theorem], control_scenes=2)
    assert w.passed, w
