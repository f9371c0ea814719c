from fractions import Fraction as Q

import pytest

from holonomy_lab import catalog
from holonomy_lab.exterior import Form, Vector, wedge
from holonomy_lab.liealg import LieAlgebra
from holonomy_lab.scalars import Poly
from holonomy_lab.structures import (SU2Structure, check_contraction_identity, check_half_flat,
                                     check_hypo, check_hypo_contact, check_killing_model_frame,
                                     check_su2, flat_su3, lift_extension, restrict_by_normal,
                                     standard_su2)


def e(n, *idx):
    return Form.basis(n, *idx)


def abelian(n):
    return LieAlgebra([Form(n)] * n)


def nilmanifold6():
    de = [Form(6)] * 4 + [-2 * e(6, 1, 4) - 2 * e(6, 2, 3), -2 * e(6, 1, 3) + 2 * e(6, 2, 4)]
    return LieAlgebra(de)


def test_standard_structure_is_su2():
    rep = check_su2(standard_su2())
    assert rep.passed
    assert rep.v == 2 * e(5, 1, 2, 3, 4)


def test_degenerate_omega3_fails():
    s = standard_su2()
    assert not check_su2(SU2Structure(s.eta, s.omega1, s.omega2, e(5, 1, 4))).passed


def test_scaled_structure():
    rep = check_su2(standard_su2().scaled(Q(3)))
    assert rep.passed
    assert rep.v == 18 * e(5, 1, 2, 3, 4)


def test_hypo_checks():
    s = standard_su2()
    assert check_hypo(catalog.family_algebra("F2"), s).passed
    assert check_hypo(abelian(5), s).passed
    bad = SU2Structure(s.eta, s.omega1, s.omega2, s.omega3 + e(5, 1, 2))
    assert not check_hypo(catalog.family_algebra("F2", {"r": 1}), bad).passed


def test_hypo_contact_negative_cases():
    s = standard_su2()
    assert not check_hypo_contact(catalog.canonical("h1"), s).passed
    assert not check_hypo_contact(abelian(5), s).passed


def test_hypo_contact_implies_hypo():
    s = standard_su2()
    for fid in catalog.FAMILY_PARAMS:
        for p in catalog.sweep_points(fid, 5):
            g = catalog.family_algebra(fid, p)
            if check_hypo_contact(g, s).passed:
                assert check_hypo(g, s).passed


def test_nilmanifold_half_flat_and_df():
    g, S = nilmanifold6(), flat_su3()
    assert check_half_flat(g, S).passed
    assert g.d(S.F) == 2 * S.psi_plus


def test_abelian_model_half_flat():
    assert check_half_flat(abelian(6), flat_su3()).passed


def test_lift_cases():
    s = standard_su2()
    f2 = catalog.family_algebra("F2", {"r": 1})
    assert lift_extension(f2, s, Q(3, 5), Q(4, 5), Form(5)).half_flat
    f4 = catalog.family_algebra("F4", {"a": 0, "b": 0})
    assert lift_extension(f4, s, 0, 1, Q(5) * e(5, 1, 2)).half_flat
    assert not lift_extension(f4, s, 0, 1, e(5, 1, 3)).half_flat
    f1 = catalog.family_algebra("F1", {"r": 1})
    lifted = lift_extension(f1, s, Q(3, 5), Q(4, 5), 4 * e(5, 1, 2) - 3 * e(5, 1, 3))
    assert lifted.half_flat
    assert check_half_flat(lifted.algebra, lifted.structure).passed


def test_lift_needs_unit_vector():
    with pytest.raises(ValueError):
        lift_extension(catalog.family_algebra("F2"), standard_su2(), 1, 1, Form(5))


def test_restriction_of_flat_model():
    s = restrict_by_normal(flat_su3(), Vector.basis(6, 6), "hyp1")
    assert s.omega3 == e(5, 1, 2) + e(5, 3, 4)
    assert s.eta == e(5, 5)
    t = restrict_by_normal(flat_su3(), Vector.basis(6, 6), "thm25")
    assert t.eta == s.eta


def test_restriction_of_nilmanifold_is_hypo_contact():
    U = Vector([0, 0, 0, 0, 0, -1])
    s = restrict_by_normal(flat_su3(), U, "thm25")
    base = LieAlgebra([Form(5)] * 4 + [-2 * e(5, 1, 4) - 2 * e(5, 2, 3)])
    assert check_su2(s).passed
    assert check_hypo_contact(base, s).passed


def test_contraction_identity():
    E6 = Vector.basis(6, 6)
    s = standard_su2()
    lift = lift_extension(catalog.family_algebra("F2", {"r": 1}), s, 1, 0, Form(5))
    assert check_contraction_identity(lift.algebra, lift.structure, E6).is_zero()
    assert check_contraction_identity(abelian(6), flat_su3(), E6) == 2 * (e(6, 1, 4) + e(6, 2, 3))
    U = Vector([0, 0, 0, 0, 0, -1])
    assert check_contraction_identity(nilmanifold6(), flat_su3(), U).is_zero()


def test_contraction_examples():
    from holonomy_lab.exterior import contract
    E6 = Vector.basis(6, 6)
    S = flat_su3()
    assert contract(E6, e(6, 5, 6)) == -e(6, 5)
    assert -contract(E6, S.F) == e(6, 5)
    assert -contract(E6, S.psi_plus) == e(6, 1, 4) + e(6, 2, 3)


@pytest.mark.parametrize("x", [Q(1), Q(2), Poly.var("x")])
def test_killing_model_frame(x):
    rep = check_killing_model_frame(x)
    assert rep.passed


def test_killing_model_frame_doubles():
    got = check_killing_model_frame(Q(2)).extra["structure"]
    assert got.eta == 2 * e(6, 5)
    assert wedge(got.omega1, got.omega1) == 8 * e(6, 1, 2, 3, 4)
