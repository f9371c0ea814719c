from fractions import Fraction as Q

import pytest

from holonomy_lab.exterior import Form
from holonomy_lab.flow import explicit_solution, integrate
from holonomy_lab.holonomy import (CohomFrame, certify_g2, certify_su3, connection_forms,
                                   curvature_forms, frame_at, hitchin_solution, holonomy_rank,
                                   hypo_solution, span_of_curvature, su3_residuals,
                                   verify_hitchin_lift)
from holonomy_lab.liealg import LieAlgebra
from holonomy_lab.scalars import Jet2

TIMES = (0, 0.05, 0.1)


def eta(*idx):
    return Form.basis(6, *idx)


def static_abelian():
    return CohomFrame(LieAlgebra([Form(5)] * 5), tuple(Jet2(Q(1), 0, 0) for _ in range(5)))


def traj(sol, t_end=0.1):
    return integrate(sol.system, t_end, 1e-11, sample_times=TIMES[1:])


def test_f2_initial_scalings():
    for r in (1, 2):
        fr = frame_at(hypo_solution("F2", {"r": r}), 0)
        assert all(s.value == 1 for s in fr.scalings)
        assert fr.scalings[4].d1 == -(3 * r * r + 2)


def test_k_initial_scalings():
    fr = frame_at(hitchin_solution("K", {"a1": 2}, explicit_solution("K-explicit")), 0)
    assert all(s.value == 1 for s in fr.scalings)


def test_static_abelian_connection_and_curvature_vanish():
    fr = static_abelian()
    assert all(w.is_zero() for row in connection_forms(fr) for w in row)
    assert span_of_curvature([curvature_forms(fr)]) == 0


def test_f4_origin_connection_time_component():
    fr = frame_at(hypo_solution("F4", {"rho": 0}), 0)
    w = connection_forms(fr)
    assert w[4][5].coeff(5).value == -2


@pytest.mark.parametrize("fid,params", [("F1", {"r": 1}), ("F2", {"r": 1}), ("F4", {"rho": 2}),
                                        ("F5", {"r": 1})])
def test_structural_residuals_vanish_exactly(fid, params):
    rep = curvature_forms(frame_at(hypo_solution(fid, params), 0))
    assert rep.residuals["first structure"] == 0
    assert max(rep.residuals.values()) < 1e-12


def test_f2_curvature_spot_values():
    rep = curvature_forms(frame_at(hypo_solution("F2", {"r": 1}), 0))
    assert rep.omega(1, 2) == -2 * (eta(1, 2) - eta(3, 4))
    assert rep.omega(1, 5).coeff(1, 5) == 6
    assert rep.omega(1, 5).coeff(4, 6) == 6


def test_f4_curvature_spot_value():
    rep = curvature_forms(frame_at(hypo_solution("F4", {"rho": 0}), 0))
    assert rep.omega(1, 2) == -(eta(1, 2) - eta(3, 4))


def test_rank_f2_at_zero():
    res = holonomy_rank(hypo_solution("F2", {"r": 1}), (0,))
    assert res.rank == 8 and res.exact


def test_rank_f4_rho2_needs_several_times():
    sol = hypo_solution("F4", {"rho": 2})
    assert holonomy_rank(sol, (0,)).rank < 8
    full = hypo_solution("F4", {"rho": 2}, traj(sol))
    assert holonomy_rank(full, TIMES).rank == 8


def test_certify_su3_explicit():
    cert = certify_su3("F2", {"r": 0}, explicit_solution("F2-nilpotent"), (0, Q(1, 2), 1))
    assert cert.max_residual < 1e-10
    assert cert.rank == 8
    assert cert.verdict == "holonomy = SU(3)"


def test_certify_su3_numeric_f2():
    sol = hypo_solution("F2", {"r": 1})
    cert = certify_su3("F2", {"r": 1}, traj(sol), TIMES)
    assert cert.passed and cert.rank == 8


def test_static_abelian_is_flat_not_su3():
    # integrable but flat: closed forms with a zero curvature span
    fr = static_abelian()
    assert max(su3_residuals(fr).values()) == 0
    assert span_of_curvature([curvature_forms(fr)]) == 0


def test_certify_g2_explicit_and_control():
    cert = certify_g2("K", {"a": 0, "b": 0, "a1": 2}, explicit_solution("K-explicit"), TIMES)
    assert cert.max_residual < 1e-10 and cert.rank == 14
    sol = hitchin_solution("K", {"a1": 0})
    control = certify_g2("K", {"a1": 0}, traj(sol), TIMES)
    assert control.rank <= 8
    assert not control.passed


def test_certify_g2_nearby_parameter():
    params = {"a": 0.1, "b": 0, "a1": 2}
    sol = hitchin_solution("K", params)
    cert = certify_g2("K", params, traj(sol), TIMES)
    assert cert.max_residual < 1e-8 and cert.rank == 14


@pytest.mark.parametrize("fid,params,source,lam,mu", [
    ("F2", {"r": 0}, "explicit", 1, 0),
    ("F4", {"rho": 0}, None, 0, 1),
    ("F2", {"r": 0}, "explicit", Q(3, 5), Q(4, 5)),
])
def test_hitchin_lift(fid, params, source, lam, mu):
    src = explicit_solution("F2-nilpotent") if source == "explicit" else None
    res = verify_hitchin_lift(fid, params, src, lam, mu)
    assert max(res.values()) < 1e-10


def test_frame_rejects_bad_scalings():
    with pytest.raises(ValueError):
        CohomFrame(LieAlgebra([Form(5)] * 5), (Jet2(Q(1)),) * 4)
    with pytest.raises(ValueError):
        CohomFrame(LieAlgebra([Form(5)] * 5), (Jet2(Q(-1)),) * 5)


def test_f4_rank_depends_on_rho_only():
    ranks = []
    for p in ({"rho": 2}, {"a": 2 ** 0.5, "b": 0}):
        sol = hypo_solution("F4", p)
        ranks.append(holonomy_rank(hypo_solution("F4", p, traj(sol)), TIMES).per_time)
    assert ranks[0] == ranks[1]


@pytest.mark.parametrize("threshold", [1e-10, 1e-8, 1e-6])
def test_float_ranks_are_threshold_stable(threshold):
    for fid, params in (("F2", {"r": 1}), ("F4", {"rho": 2}), ("F5", {"r": 1})):
        sol = hypo_solution(fid, params)
        res = holonomy_rank(hypo_solution(fid, params, traj(sol)), TIMES, threshold=threshold)
        assert not res.exact and res.rank == 8
    params = {"a": 0.1, "b": 0, "a1": 2}
    sol = traj(hitchin_solution("K", params))
    cert = certify_g2("K", params, sol, TIMES, threshold=threshold)
    assert cert.rank == 14
