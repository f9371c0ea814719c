from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from holonomy_lab.linalg import (SingularMatrixError, float_rank, inverse_exact, matmul,
                                 nullspace_exact, rank_exact, solve_exact)
from holonomy_lab.scalars import (Jet2, ParseError, Poly, SingularityError, exact_root,
                                  format_poly, is_zero, jet_pow, parse_poly, parse_rational,
                                  sqrt_rational, to_float)

PROPS = settings(max_examples=200, derandomize=True, deadline=None)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def polys(draw):
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        mono = tuple((v, draw(st.integers(-2, 3))) for v in draw(
            st.lists(st.sampled_from(["r", "a", "b"]), max_size=2, unique=True)))
        terms[tuple(sorted((v, e) for v, e in mono if e))] = draw(fractions)
    return Poly(terms)


@st.composite
def jets(draw):
    return Jet2(draw(fractions), draw(fractions), draw(fractions))


@PROPS
@given(polys(), polys(), polys())
def test_poly_ring_laws(p, q, s):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + s == p + (q + s)
    assert (p * q) * s == p * (q * s)
    assert p * (q + s) == p * q + p * s
    assert p - p == Poly()


@PROPS
@given(jets(), jets(), jets())
def test_jet_ring_laws(x, y, z):
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x


@PROPS
@given(jets(), jets())
def test_jet_product_rule(x, y):
    p = x * y
    assert p.d1 == x.d1 * y.value + x.value * y.d1
    assert p.d2 == x.d2 * y.value + 2 * x.d1 * y.d1 + x.value * y.d2


def test_jet_reciprocal_matches_quotient_rule():
    t = Jet2.variable(Q(2))
    inv = 1 / t
    assert (inv.value, inv.d1, inv.d2) == (Q(1, 2), Q(-1, 4), Q(1, 4))


def test_jet_power_exact_when_perfect():
    # (1+4t)^(1/2) at t=0: value 1, slope 2, curvature -4
    u = Jet2(Q(1), Q(4), Q(0))
    j = jet_pow(u, Q(1, 2))
    assert (j.value, j.d1, j.d2) == (1, 2, -4)


def test_jet_power_falls_back_to_float():
    j = jet_pow(Jet2(Q(2), Q(1), Q(0)), Q(1, 2))
    assert isinstance(j.value, float)
    assert j.value == pytest.approx(2 ** 0.5)
    assert j.d1 == pytest.approx(0.5 * 2 ** -0.5)


def test_jet_power_at_zero_is_singular():
    with pytest.raises(SingularityError):
        jet_pow(Jet2(Q(0), Q(1), Q(0)), Q(1, 2))


def test_unknown_derivatives_propagate():
    j = Jet2(Q(1), None, None) * 2
    assert j.value == 2 and j.d1 is None and j.d2 is None


def test_mixing_jet_and_poly_is_rejected():
    with pytest.raises(TypeError):
        Jet2(1) + Poly.var("r")


def test_radicals_reduce():
    s2 = Poly.sqrt(2)
    assert s2 * s2 == Poly.const(2)
    assert sqrt_rational(Q(8, 9)) == Q(2, 3) * s2
    assert sqrt_rational(Q(9, 4)) == Q(3, 2)
    with pytest.raises(ValueError):
        Poly.sqrt(6)


def test_laurent_inverse():
    r = Poly.var("r")
    assert r * r.inverse() == Poly.const(1)
    assert to_float(Poly.sqrt(2)) == pytest.approx(2 ** 0.5)
    assert (r ** 2 + 1).subst({"r": Q(1, 2)}) == Q(5, 4)


def test_parse_and_format_roundtrip():
    for text in ("-3*r^2 + 1/2", "r*a - b^2", "2*sqrt_2", "0"):
        p = parse_poly(text)
        assert parse_poly(format_poly(p)) == p
    assert parse_poly("(r+1)^2") == parse_poly("r^2 + 2*r + 1")


def test_parse_errors_carry_column():
    with pytest.raises(ParseError) as exc:
        parse_poly("r + q", names=["r"])
    assert exc.value.col == 5
    assert exc.value.bare == "unknown parameter 'q'"
    with pytest.raises(ParseError):
        parse_poly("r +")
    with pytest.raises(ParseError):
        parse_rational("1/x")
    assert parse_rational("0.25") == Q(1, 4)


def test_exact_root():
    assert exact_root(Q(27, 8), 3) == Q(3, 2)
    assert exact_root(Q(2), 2) is None


def test_is_zero():
    assert is_zero(Poly())
    assert is_zero(Jet2(0, 0, None))
    assert not is_zero(Jet2(0, 1, 0))


def test_linalg_exact():
    assert rank_exact([[1, 2], [2, 4]]) == 1
    m = [[Q(2), Q(1)], [Q(1), Q(1)]]
    assert matmul(m, inverse_exact(m)) == [[1, 0], [0, 1]]
    assert solve_exact(m, [Q(3), Q(2)]) == [1, 1]
    (v,) = nullspace_exact([[1, 1]], 2)
    assert v[0] + v[1] == 0
    with pytest.raises(SingularMatrixError):
        inverse_exact([[1, 2], [2, 4]])


def test_float_rank_threshold():
    assert float_rank([[1.0, 0.0], [0.0, 1e-12]]).rank == 1
    assert float_rank([[1.0, 0.0], [0.0, 1e-3]]).rank == 2
