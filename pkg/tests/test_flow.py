import math
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from holonomy_lab.flow import (COMPLETED, STOPPED, build_hitchin_system, build_hypo_ode,
                               explicit_solution, first_integral_drift, hitchin_defect,
                               integrate, lift_jets, second_order_defect)
from holonomy_lab.scalars import Jet2, SingularityError, jet_pow

PROPS = settings(max_examples=200, derandomize=True, deadline=None)
HYPO_CASES = [("F1", {"r": 1}), ("F2", {"r": 1}), ("F2", {"r": 0}), ("F4", {"rho": 0}),
              ("F4", {"rho": 1}), ("F4", {"a": 1, "b": 1}), ("F5", {"r": 1})]


@pytest.mark.parametrize("fid,params", HYPO_CASES)
def test_initial_slope_is_two(fid, params):
    ode = build_hypo_ode(fid, params)
    assert ode.rhs((Q(1),)) == (2,)


@pytest.mark.parametrize("fid,params", HYPO_CASES)
def test_first_order_form_solves_second_order(fid, params):
    ode = build_hypo_ode(fid, params)
    (f,), _ = lift_jets(ode, (Q(1),))
    assert abs(float(ode.second_order_residual(f.value, f.d1, f.d2))) < 1e-12


def test_f2_second_derivative_at_zero():
    for r in (1, 2):
        (f,), _ = lift_jets(build_hypo_ode("F2", {"r": r}), (Q(1),))
        assert f.d2 == -2 * (3 * r * r + 2)


def test_f2_explicit_solution_zeroes_residual():
    ode = build_hypo_ode("F2", {"r": 0})
    sol = explicit_solution("F2-nilpotent")
    for t in (Q(0), Q(1, 4), Q(3)):
        (f,), _ = sol.at(t)
        assert ode.second_order_residual(f.value, f.d1, f.d2) == 0


def test_f4_rho0_first_order_is_two_over_f():
    ode = build_hypo_ode("F4", {"rho": 0})
    assert ode.rhs((Q(2),)) == (1,)


def test_conserved_values():
    assert build_hypo_ode("F2", {"r": 1}).conserved_value == 2
    assert build_hypo_ode("F4", {"rho": 1}).conserved_value == 12


def test_parameter_errors():
    with pytest.raises(ValueError):
        build_hypo_ode("F3")
    with pytest.raises(ValueError):
        build_hypo_ode("F4", {"rho": 1, "a": 1})
    with pytest.raises(ValueError):
        build_hitchin_system("L")


def test_hitchin_rhs_at_origin():
    k = build_hitchin_system("K", {"a": 0, "b": 0, "a1": 2})
    assert k.rhs((1, 1, 1)) == (3, -1, -2)


def test_ktilde_r0_coincides_with_k():
    k = build_hitchin_system("K", {"a": 0, "b": 0, "a1": 2})
    kt = build_hitchin_system("Ktilde", {"r": 0, "a2": -2})
    for y in ((Q(1), Q(1), Q(1)), (Q(2), Q(1, 3), Q(3, 2))):
        assert k.rhs(y) == kt.rhs(y)


def test_explicit_g2_triple_solves_system():
    k = build_hitchin_system("K", {"a": 0, "b": 0, "a1": 2})
    sol = explicit_solution("K-explicit")
    for i in range(100):
        t = Q(i, 50)
        jets, _ = sol.at(t)
        assert hitchin_defect(k, jets) < 1e-13


def test_explicit_jet_examples():
    j = jet_pow(Jet2(Q(1), Q(5), Q(0)), Q(3, 5))
    assert (j.value, j.d1, j.d2) == (1, 3, -6)
    assert jet_pow(Jet2(Q(1), Q(4), Q(0)), 1) == Jet2(Q(1), Q(4), Q(0))


def test_integrate_f2_nilpotent_matches_closed_form():
    tr = integrate(build_hypo_ode("F2", {"r": 0}), 1.0, 1e-10)
    assert tr.status == COMPLETED
    err = max(abs(v[0] - math.sqrt(1 + 4 * t)) for t, v in zip(tr.times, tr.values))
    assert err < 1e-9
    grid = [i / 97 for i in range(98)]
    assert max(abs(tr.state(t)[0] - math.sqrt(1 + 4 * t)) for t in grid) < 1e-6


def test_integrate_hitchin_matches_closed_form():
    tr = integrate(build_hitchin_system("K", {"a1": 2}), 1.0, 1e-10)
    sol = explicit_solution("K-explicit")
    err = max(abs(a - b) for t, v in zip(tr.times, tr.values)
              for a, b in zip(v, sol.values(Q(t))))
    assert err < 1e-8


def test_integrator_stops_before_radicand_root():
    tr = integrate(build_hypo_ode("F2", {"r": 1}), 2.0, 1e-10)
    assert tr.status == STOPPED
    assert max(v[0] for v in tr.values) < 2 ** (1 / 3)
    assert tr.t_final < 2.0


def test_sample_times_are_nodes_and_drift_is_small():
    ode = build_hypo_ode("F2", {"r": 1})
    tr = integrate(ode, 0.2, 1e-10, sample_times=[0.05, 0.1])
    assert tr.index_of(0.05) is not None and tr.index_of(0.1) is not None
    assert first_integral_drift(ode, tr) < 1e-9
    assert second_order_defect(ode, tr) < 1e-8


def test_backward_integration():
    tr = integrate(build_hypo_ode("F2", {"r": 0}), -0.2, 1e-10)
    assert tr.t_final == pytest.approx(-0.2)
    assert tr.values[-1][0] == pytest.approx(math.sqrt(1 - 0.8), abs=1e-8)


def test_bad_integrator_arguments():
    ode = build_hypo_ode("F2", {"r": 1})
    with pytest.raises(ValueError):
        integrate(ode, 1.0, 0)
    with pytest.raises(ValueError):
        integrate(ode, 0.0)


def test_singular_start_is_reported():
    ode = build_hypo_ode("F2", {"r": 1})
    bad = ode.__class__(ode.family, ode.params, ode.second_order_residual,
                        ode.first_order_rhs, ode.first_integral, f0=Q(0))
    with pytest.raises(SingularityError):
        integrate(bad, 0.1)


def test_table_export_has_columns():
    tr = integrate(build_hypo_ode("F4", {"rho": 1}), 0.05, 1e-10)
    lines = tr.as_table().splitlines()
    assert lines[0] == "# t f f' f''"
    assert len(lines) == len(tr.times) + 1


@pytest.mark.parametrize("fid,params", HYPO_CASES + [("K", {"a": 0.1}), ("Ktilde", {"r": 0.2})])
def test_against_scipy(fid, params):
    solve_ivp = pytest.importorskip("scipy.integrate").solve_ivp
    system = (build_hitchin_system(fid, params) if fid in ("K", "Ktilde")
              else build_hypo_ode(fid, params))
    t_end = 0.05
    tr = integrate(system, t_end, 1e-11)
    ref = solve_ivp(lambda t, y: [float(v) for v in system.rhs(tuple(y))], (0, t_end),
                    [float(v) for v in system.initial_state()], method="DOP853",
                    rtol=1e-12, atol=1e-12)
    assert ref.success
    assert max(abs(a - b) for a, b in zip(tr.values[-1], ref.y[:, -1])) < 1e-9


@PROPS
@given(st.sampled_from(["F1", "F2", "F4", "F5"]),
       st.fractions(min_value=Q(1, 10), max_value=2, max_denominator=10),
       st.floats(min_value=0.01, max_value=0.08))
def test_first_integral_drift_property(fid, p, t_end):
    params = {"rho": p} if fid == "F4" else {"r": p}
    ode = build_hypo_ode(fid, params)
    tr = integrate(ode, t_end, 1e-10)
    if tr.status == COMPLETED:
        assert first_integral_drift(ode, tr) < 1e-9


def _rational(t):
    # exact jet arithmetic when t is a jet, exact value when t is a Fraction
    return 1 / (1 + t * t) + t * t * t


@PROPS
@given(st.fractions(min_value=-2, max_value=2, max_denominator=40))
def test_jets_match_finite_differences(t0):
    j = _rational(Jet2.variable(t0))
    assert j.value == _rational(t0)

    def errors(h):
        lo, mid, hi = (_rational(t0 + k * h) for k in (-1, 0, 1))
        return abs((hi - lo) / (2 * h) - j.d1), abs((hi - 2 * mid + lo) / (h * h) - j.d2)

    e1, e2 = errors(Q(1, 100)), errors(Q(1, 200))
    for a, b in zip(e1, e2):
        assert b <= a / 3 or a == 0
