"""Hypothesis strategies for jet expressions."""
import sympy as sp
from hypothesis import strategies as st

from ebequiv.expr import Jet, fn, y, z

k = sp.symbols("k0:4")

small_rationals = st.builds(sp.Rational, st.integers(-6, 6), st.integers(1, 4))
indices = st.tuples(st.integers(0, 2), st.integers(0, 2))
jet_atoms = st.builds(Jet, st.sampled_from(["R", "S", "L"]), indices)
w_jets = st.builds(lambda i: Jet("w", i), indices)
leaves = st.one_of(
    small_rationals,
    st.sampled_from([y, z, *k]),
    jet_atoms,
    st.builds(lambda j: fn("f")(j), st.sampled_from([Jet("S"), z, y + z])),
)


def _combine(children):
    pairs = st.tuples(children, children)
    return st.one_of(
        pairs.map(lambda p: p[0] + p[1]),
        pairs.map(lambda p: p[0] * p[1]),
        pairs.map(lambda p: p[0] - p[1]),
        st.tuples(children, st.integers(1, 3)).map(lambda p: p[0] ** p[1]),
    )


polynomials = st.recursive(leaves, _combine, max_leaves=8)
nonzero_dens = st.sampled_from([sp.S.One, 1 + k[1] * z, Jet("R", (1, 0)), Jet("S", (0, 1)) ** 2,
                                y ** 2 + 1])
rational_exprs = st.builds(lambda n, d: n / d, polynomials, nonzero_dens)


@st.composite
def linear_in_w(draw, with_products=False):
    """``sum c_K w_K + c_None`` (optionally with quadratic w monomials)."""
    e = draw(polynomials)
    for _ in range(draw(st.integers(1, 4))):
        e += draw(polynomials) * draw(w_jets)
    if with_products:
        e += draw(small_rationals) * draw(w_jets) * draw(w_jets)
    return e
