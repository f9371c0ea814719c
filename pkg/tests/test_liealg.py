from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from holonomy_lab import catalog
from holonomy_lab.exterior import Form, basis_indices, wedge
from holonomy_lab.liealg import (BasisChange, LieAlgebra, LieAlgebraError, apply_basis_change,
                                 center, extend, is_isomorphic_via, jacobi_check,
                                 solvability_class)
from holonomy_lab.scalars import Poly

PROPS = settings(max_examples=200, derandomize=True, deadline=None)
small = st.integers(-3, 3).map(Q)


def e(n, *idx):
    return Form.basis(n, *idx)


def abelian(n=5):
    return LieAlgebra([Form(n)] * n)


def nilmanifold6():
    de = [Form(6)] * 4 + [-2 * e(6, 1, 4) - 2 * e(6, 2, 3), -2 * e(6, 1, 3) + 2 * e(6, 2, 4)]
    return LieAlgebra(de)


def test_d_on_one_form_is_structure_equation():
    g = catalog.family_algebra("F4", {"a": 0, "b": 0})
    assert g.d(e(5, 5)) == -2 * e(5, 1, 4) - 2 * e(5, 2, 3)


def test_d_leibniz_on_nilmanifold():
    got = nilmanifold6().d(e(6, 5, 6))
    assert got == 2 * e(6, 1, 3, 5) - 2 * e(6, 1, 4, 6) - 2 * e(6, 2, 3, 6) - 2 * e(6, 2, 4, 5)


def test_d_of_zero():
    assert nilmanifold6().d(wedge(e(6, 1), e(6, 1))).is_zero()


def test_jacobi_symbolic_and_failure():
    assert jacobi_check(catalog.family_algebra("F3")).passed
    assert jacobi_check(abelian()).passed
    r = Poly.var("r")
    de = list(catalog.family_algebra("F1").differentials)
    de[3] = de[3] - r * e(5, 2, 3)
    res = jacobi_check(LieAlgebra(de))
    assert not res.passed
    assert 4 in res.failures


def test_solvability_classes():
    rep = solvability_class(catalog.family_algebra("F1", {"r": 1}))
    assert rep.derived_dims[:4] == (5, 4, 1, 0)
    assert rep.solvable and not rep.nilpotent
    assert solvability_class(catalog.family_algebra("F4", {"a": 0, "b": 0})).nilpotent
    ab = solvability_class(abelian())
    assert ab.derived_dims == (5, 0) and ab.nilpotent


def test_center_dimensions():
    assert center(catalog.canonical("h1")) == 1
    assert center(catalog.canonical("h3")) == 0
    assert center(abelian()) == 5


def test_basis_change_f1_to_h2():
    g = catalog.family_algebra("F1", {"r": 1})
    change = catalog.canonical_change("F1", {"r": 1})
    h = apply_basis_change(g, change)
    a = lambda *i: e(5, *i)
    assert h.de(1) == -2 * a(1, 5) - a(2, 3)
    assert h.de(2) == -a(2, 5)
    assert h.de(3) == -a(3, 5)
    assert h.de(4) == 3 * a(4, 5)
    assert h.de(5).is_zero()


def test_identity_basis_change():
    g = catalog.family_algebra("F2", {"r": 2})
    ident = BasisChange([[int(i == j) for j in range(5)] for i in range(5)])
    assert is_isomorphic_via(g, g, ident)


def test_extensions_k_and_ktilde():
    k = extend(catalog.family_algebra("F4"), 2 * e(5, 1, 2))
    kt = extend(catalog.family_algebra("F5"), -2 * e(5, 1, 3))
    assert jacobi_check(k).passed and jacobi_check(kt).passed
    prod = extend(catalog.family_algebra("F2"), Form(5))
    assert prod.de(6).is_zero() and prod.dim == 6


def test_extension_rejects_non_closed_form():
    with pytest.raises(LieAlgebraError):
        extend(catalog.family_algebra("F4", {"a": 0, "b": 0}), e(5, 1, 5))


def test_constructor_validation():
    with pytest.raises(LieAlgebraError):
        LieAlgebra([e(5, 1)] + [Form(5)] * 4)
    with pytest.raises(LieAlgebraError):
        LieAlgebra([Form(4)] * 5)


@st.composite
def structure_constants(draw):
    return LieAlgebra([Form(5, {k: draw(small) for k in basis_indices(5, 2)
                                if draw(st.booleans())}) for _ in range(5)])


@st.composite
def forms(draw, k):
    return Form(5, {key: draw(small) for key in basis_indices(5, k)})


@PROPS
@given(structure_constants(), forms(1), forms(2))
def test_d_is_antiderivation(g, a, b):
    # holds for arbitrary structure constants, Jacobi or not
    assert g.d(wedge(a, b)) == wedge(g.d(a), b) - wedge(a, g.d(b))


FAMILY_POINTS = [(fid, p) for fid in catalog.FAMILY_PARAMS for p in catalog.sweep_points(fid, 4)]


@PROPS
@given(st.sampled_from(FAMILY_POINTS), forms(2))
def test_d_squared_vanishes_on_families(point, a):
    fid, p = point
    g = catalog.family_algebra(fid, p)
    assert g.d(g.d(a)).is_zero()
