import pytest
import sympy as sp

from ebequiv.expr import Jet, fn, is_zero, normalize, t, x, y, z
from ebequiv.transform import (EbEquation, LinearPde, PointTransformation, constant_component,
                               eb_residual, match_eb_form, pde_from_expr, transform_pde)

f, m = fn("f"), fn("m")


def test_identity_keeps_equation():
    pde = transform_pde(EbEquation(), PointTransformation.identity())
    assert match_eb_form(pde) == (f(z), m(z), 1)
    assert is_zero(pde.residual() - eb_residual(f(z), m(z)))


def test_source_residual_of_concrete_u():
    eq = EbEquation(x ** 2 + 1, 1)
    r = eq.source_residual(x ** 4 + t ** 2)
    assert is_zero(r - sp.diff((x ** 2 + 1) * 12 * x ** 2, x, 2) - 2)


def test_classic_rejects_time_dependence():
    with pytest.raises(ValueError):
        EbEquation(t * x, 1)
    with pytest.raises(ValueError):
        EbEquation(flavor="other")


def test_generalized_coefficients():
    eq = EbEquation(flavor="generalized")
    assert eq.coefficient("f", y, z) == f(y, z)


def test_time_shift_and_scale():
    T = PointTransformation(3 * y + 1, z, sp.S(2))
    F, M, mu = match_eb_form(transform_pde(EbEquation(), T))
    assert is_zero(M / F - m(z) / (9 * f(z)))


def test_affine_x_map():
    T = PointTransformation(y, 2 * z + 1, sp.S.One)
    pde = transform_pde(EbEquation(), T)
    F, M, mu = match_eb_form(pde)
    assert is_zero(mu * F - f(2 * z + 1) / 16)
    assert is_zero(mu * M - m(2 * z + 1))


def test_constant_component():
    eq = EbEquation()
    T = PointTransformation(y, z, sp.S.One, y * z + 3 * y)
    assert constant_component(eq, T) == 0
    T = PointTransformation(y, z, sp.S.One, z ** 2)
    assert is_zero(constant_component(eq, T) - 2 * fn("f", (2,))(z))


def test_non_beam_form_rejected():
    pde = pde_from_expr(Jet("w", (0, 4)) + Jet("w", (1, 1)))
    assert match_eb_form(pde) is None
    pde = LinearPde({(0, 4): sp.S.One, (2, 0): sp.S.One}, sp.S.One)
    assert match_eb_form(pde) is None


def test_candidate_mismatch():
    pde = transform_pde(EbEquation(), PointTransformation.identity())
    assert match_eb_form(pde, candidate=(f(z) * z, m(z))) is None


def test_generic_transformation_is_nondegenerate():
    T = PointTransformation.generic()
    assert T.check()
    assert not PointTransformation(y + z, y + z, sp.S.One).check()
    assert normalize(PointTransformation(2 * y, z, 1).varpi()) == 2
