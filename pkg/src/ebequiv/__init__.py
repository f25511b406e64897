"""Equivalence transformations of the Euler-Bernoulli beam equation
``(f u_xx)_xx + m u_tt = 0``: exact symbolic derivation, symmetry checks and
numeric witnesses."""

from .errors import EbError
from .expr import DEFAULT, AssumptionSet, Jet, normalize, total_derivative
from .transform import EbEquation, LinearPde, PointTransformation, match_eb_form, transform_pde

__all__ = ["DEFAULT", "AssumptionSet", "EbEquation", "EbError", "Jet", "LinearPde",
           "PointTransformation", "match_eb_form", "normalize", "total_derivative",
           "transform_pde"]
