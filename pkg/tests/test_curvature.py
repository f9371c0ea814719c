from fractions import Fraction as Q

from hypothesis import given, settings, strategies as st

from holonomy_lab import catalog
from holonomy_lab.curvature import (Metric, eta_einstein_fit, k_contact_check, koszul,
                                    bracket_constants, levi_civita, metric_residual, ricci,
                                    riemann_oracle, riemann_tensor, torsion_residual)
from holonomy_lab.exterior import Form, Vector
from holonomy_lab.liealg import LieAlgebra
from holonomy_lab.scalars import Poly

PROPS = settings(max_examples=200, derandomize=True, deadline=None)
r, a, b = Poly.var("r"), Poly.var("a"), Poly.var("b")
ETA = Form.basis(5, 5)


def abelian(n=5):
    return LieAlgebra([Form(n)] * n)


def diag(fid, params=None):
    return ricci(catalog.family_algebra(fid, params), eta=ETA).diagonal()


def test_abelian_connection_vanishes():
    conn = levi_civita(abelian())
    assert all(c == 0 for plane in conn.gamma for row in plane for c in row)


def test_h1_koszul_pattern():
    conn = levi_civita(catalog.canonical("h1"))
    # nabla_{E1} E4 has E5 component 1/2 with [E1, E4] = E5
    assert conn.gamma[0][3][4] == Q(1, 2)
    assert conn.gamma[0][4][3] == Q(-1, 2)


def test_torsion_and_metric_compatibility_on_families():
    for fid in catalog.FAMILY_PARAMS:
        for p in catalog.sweep_points(fid, 3):
            conn = levi_civita(catalog.family_algebra(fid, p))
            assert not torsion_residual(conn)
            assert not metric_residual(conn)


def test_symbolic_ricci_f1():
    assert diag("F1") == (
        -Q(1, 2) * (9 * r ** 4 + 18 * r ** 2 + 4), -(3 * r ** 2 + 2), -(3 * r ** 2 + 2),
        Q(1, 2) * (9 * r ** 4 + 6 * r ** 2 - 4), -Q(1, 2) * (9 * r ** 4 - 8))


def test_symbolic_ricci_f2():
    c = -2 * (3 * r ** 2 + 1)
    assert diag("F2") == (c, c, c, c, Poly.const(4))


def test_symbolic_ricci_f4():
    rho = a ** 2 + b ** 2
    top = -Q(1, 2) * (rho ** 2 + 8 * rho + 4)
    mid = Q(1, 2) * (rho ** 2 - 4)
    assert diag("F4") == (top, top, mid, mid, 4 - rho ** 2)


def test_symbolic_ricci_f5():
    one = -Q(1, 8) * (r ** 4 + 16 * r ** 2 + 16)
    two = Q(1, 8) * (r ** 4 - 16)
    assert diag("F5") == (one, two, one, two, -Q(1, 4) * (r ** 4 - 16))


def test_ricci_numeric_examples():
    assert diag("F2", {"r": 1}) == (-8, -8, -8, -8, 4)
    assert diag("F4", {"a": 0, "b": 0}) == (-2, -2, -2, -2, 4)
    assert diag("F5", {"r": 2}) == (-12, 0, -12, 0, 0)
    assert diag("F1", {"r": 1}) == (Q(-31, 2), -5, -5, Q(11, 2), Q(-1, 2))


def test_eta_einstein():
    assert ricci(catalog.family_algebra("F2", {"r": 1}), eta=ETA).eta_einstein == (-8, 12)
    fit = ricci(catalog.family_algebra("F2"), eta=ETA).eta_einstein
    assert fit == (-2 * (1 + 3 * r ** 2), 6 * (1 + r ** 2))
    assert ricci(catalog.family_algebra("F4", {"a": 0, "b": 0}), eta=ETA).eta_einstein == (-2, 6)
    assert ricci(catalog.family_algebra("F1", {"r": 1}), eta=ETA).eta_einstein is None
    assert ricci(catalog.family_algebra("F4", {"a": 1, "b": 0}), eta=ETA).eta_einstein is None
    assert ricci(catalog.family_algebra("F5", {"r": 1}), eta=ETA).eta_einstein is None


def test_eta_einstein_fit_direct():
    g = catalog.family_algebra("F2", {"r": 2})
    rep = ricci(g)
    assert eta_einstein_fit(rep, Metric.orthonormal(5), ETA) == (-26, 30)


def test_k_contact():
    assert k_contact_check(catalog.family_algebra("F2")).passed
    assert k_contact_check(abelian()).passed
    assert k_contact_check(catalog.family_algebra("F4", {"a": 0, "b": 0})).passed
    res = k_contact_check(catalog.family_algebra("F1", {"r": 1}))
    assert not res.passed and (1, 4) in res.failures
    for fid, p in (("F3", {"a": 1, "r": 1}), ("F4", {"a": 1, "b": 2}), ("F5", {"r": 1}),
                   ("F7", {"a": 1, "r": 2})):
        assert (1, 4) in k_contact_check(catalog.family_algebra(fid, p)).failures


def test_oracle_on_abelian_is_zero():
    X = Vector([1, 2, 3, 4, 5])
    assert riemann_oracle(abelian(), None, X, X, X) == Vector([0] * 5)


def test_oracle_reeb_sectional_sum():
    g = catalog.family_algebra("F4", {"a": 0, "b": 0})
    E = [Vector.basis(5, i) for i in range(1, 6)]
    total = sum(riemann_oracle(g, None, E[i], E[4], E[4])[i + 1] for i in range(5))
    assert total == 4


def test_non_orthonormal_metric_koszul():
    g = catalog.family_algebra("F2", {"r": 1})
    m = Metric([[2, 1, 0, 0, 0], [1, 2, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 3, 0],
                [0, 0, 0, 0, 1]])
    conn = levi_civita(g, m)
    assert not torsion_residual(conn)
    assert not metric_residual(conn)


def test_riemann_tensor_agrees_with_oracle():
    g = catalog.family_algebra("F5", {"r": 2})
    conn = levi_civita(g)
    R = riemann_tensor(conn)
    E = [Vector.basis(5, i) for i in range(1, 6)]
    for x in range(5):
        for y in range(5):
            for z in range(5):
                got = riemann_oracle(conn, None, E[x], E[y], E[z])
                assert list(got.components) == [R[x][y][z][w] for w in range(5)]


vec = st.lists(st.integers(-3, 3).map(Q), min_size=5, max_size=5).map(Vector)


@PROPS
@given(vec, vec, vec)
def test_first_bianchi_f2(X, Y, Z):
    g = catalog.family_algebra("F2", {"r": 1})
    s = (riemann_oracle(g, None, X, Y, Z) + riemann_oracle(g, None, Y, Z, X)
         + riemann_oracle(g, None, Z, X, Y))
    assert s == Vector([0] * 5)


@st.composite
def spd_metrics(draw):
    L = [[Q(draw(st.integers(1, 3))) if i == j else (Q(draw(st.integers(-2, 2))) if j < i else Q(0))
          for j in range(5)] for i in range(5)]
    return Metric([[sum(L[i][k] * L[j][k] for k in range(5)) for j in range(5)] for i in range(5)])


@PROPS
@given(st.sampled_from(sorted(catalog.FAMILY_PARAMS)), spd_metrics(), st.integers(0, 3))
def test_koszul_torsion_free_and_compatible(fid, m, k):
    p = catalog.sweep_points(fid, 4)[k]
    conn = koszul(bracket_constants(catalog.family_algebra(fid, p)), m.gram)
    assert not torsion_residual(conn)
    assert not metric_residual(conn)
