"""SU(2)- and SU(3)-structures on Lie algebras and their defining conditions.

Checks return report objects holding the residual forms; a check passes
when every residual is exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional

from .exterior import Form, Vector, contract, linear_substitution, restrict, wedge
from .liealg import BasisChange, LieAlgebra, apply_basis_change, extend
from .scalars import is_zero


def _e(dim, *idx):
    return Form.basis(dim, *idx)


@dataclass(frozen=True)
class SU2Structure:
    """Quadruplet ``(eta, omega1, omega2, omega3)`` on a 5-dimensional space."""

    eta: Form
    omega1: Form
    omega2: Form
    omega3: Form

    @property
    def dim(self) -> int:
        return self.eta.dim

    def map_forms(self, fn: Callable[[Form], Form]) -> "SU2Structure":
        return SU2Structure(fn(self.eta), fn(self.omega1), fn(self.omega2), fn(self.omega3))

    def scaled(self, x) -> "SU2Structure":
        return self.map_forms(lambda f: x * f)


@dataclass(frozen=True)
class SU3Structure:
    """Triple ``(F, psi_plus, psi_minus)`` on a 6-dimensional space."""

    F: Form
    psi_plus: Form
    psi_minus: Form

    @property
    def dim(self) -> int:
        return self.F.dim

    def type_residuals(self) -> Dict[str, Form]:
        return {"F^psi+": wedge(self.F, self.psi_plus),
                "F^psi-": wedge(self.F, self.psi_minus)}


def standard_su2(dim: int = 5) -> SU2Structure:
    """``eta = e5``, ``omega1 = e12 + e34``, ``omega2 = e13 + e42``, ``omega3 = e14 + e23``."""
    return SU2Structure(
        _e(dim, 5),
        _e(dim, 1, 2) + _e(dim, 3, 4),
        _e(dim, 1, 3) - _e(dim, 2, 4),
        _e(dim, 1, 4) + _e(dim, 2, 3),
    )


def flat_su3() -> SU3Structure:
    """Model structure on the flat 6-dimensional space."""
    s = standard_su2(6)
    e6 = _e(6, 6)
    return SU3Structure(
        s.omega1 + wedge(s.eta, e6),
        wedge(s.omega2, s.eta) - wedge(s.omega3, e6),
        wedge(s.omega2, e6) + wedge(s.omega3, s.eta),
    )


@dataclass(frozen=True)
class CheckReport:
    """Named residual forms; passes iff all vanish exactly."""

    residuals: Dict[str, Form]
    extra: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(f.is_zero() for f in self.residuals.values())

    def __bool__(self):
        return self.passed

    def failing(self):
        return sorted(k for k, f in self.residuals.items() if not f.is_zero())

    def max_abs(self) -> float:
        return max((f.max_abs() for f in self.residuals.values()), default=0.0)


@dataclass(frozen=True)
class SU2Report(CheckReport):
    v: Optional[Form] = None


def check_su2(s: SU2Structure) -> SU2Report:
    """``omega_i ^ omega_j = delta_ij v`` with ``v ^ eta != 0``."""
    if s.dim != 5:
        raise ValueError("SU(2)-structures live in dimension 5")
    w = (s.omega1, s.omega2, s.omega3)
    v = wedge(w[0], w[0])
    res = {
        "omega2^2-v": wedge(w[1], w[1]) - v,
        "omega3^2-v": wedge(w[2], w[2]) - v,
        "omega1^omega2": wedge(w[0], w[1]),
        "omega1^omega3": wedge(w[0], w[2]),
        "omega2^omega3": wedge(w[1], w[2]),
    }
    vol = wedge(v, s.eta)
    extra = {"volume": vol}
    if vol.is_zero():
        # a degenerate v is a failure that no residual form records
        res["v^eta_nonzero"] = Form.basis(5)
    return SU2Report(res, extra, v)


def check_hypo(g: LieAlgebra, s: SU2Structure) -> CheckReport:
    return CheckReport({
        "d omega3": g.d(s.omega3),
        "d(eta^omega1)": g.d(wedge(s.eta, s.omega1)),
        "d(eta^omega2)": g.d(wedge(s.eta, s.omega2)),
    })


def check_hypo_contact(g: LieAlgebra, s: SU2Structure) -> CheckReport:
    return CheckReport({
        "d eta + 2 omega3": g.d(s.eta) + 2 * s.omega3,
        "d(eta^omega1)": g.d(wedge(s.eta, s.omega1)),
        "d(eta^omega2)": g.d(wedge(s.eta, s.omega2)),
    })


def check_closed_omega12(g: LieAlgebra, s: SU2Structure) -> CheckReport:
    return CheckReport({"d omega1": g.d(s.omega1), "d omega2": g.d(s.omega2)})


def check_half_flat(g6: LieAlgebra, S: SU3Structure) -> CheckReport:
    if g6.dim != 6:
        raise ValueError("half-flat check needs a 6-dimensional algebra")
    return CheckReport({
        "d(F^F)": g6.d(wedge(S.F, S.F)),
        "d psi+": g6.d(S.psi_plus),
    })


def check_integrable(g6: LieAlgebra, S: SU3Structure) -> CheckReport:
    return CheckReport({"dF": g6.d(S.F), "d psi+": g6.d(S.psi_plus), "d psi-": g6.d(S.psi_minus)})


def lift_forms(s: SU2Structure, lam, mu, e6: Form) -> SU3Structure:
    """``F = lam w1 + mu w2 + eta^e6`` and the matching complex volume form.

    ``s`` and ``e6`` must already live in the same dimension.
    """
    mix = -mu * s.omega1 + lam * s.omega2
    return SU3Structure(
        lam * s.omega1 + mu * s.omega2 + wedge(s.eta, e6),
        wedge(mix, s.eta) - wedge(s.omega3, e6),
        wedge(mix, e6) + wedge(s.omega3, s.eta),
    )


@dataclass(frozen=True)
class LiftedStructure:
    algebra: LieAlgebra
    structure: SU3Structure
    conditions: CheckReport

    @property
    def half_flat(self) -> bool:
        return self.conditions.passed


def lift_extension(g: LieAlgebra, s: SU2Structure, lam, mu, de6: Form) -> LiftedStructure:
    """Half-flat candidate on the extension of ``g`` by ``de6``.

    The conditions report holds ``2(lam w1 + mu w2)^eta^de6``,
    ``w3^de6`` and ``d(de6)``; they vanish exactly when the lift is
    half-flat on a Lie algebra.
    """
    if not is_zero(lam * lam + mu * mu - 1):
        raise ValueError("lift needs lam^2 + mu^2 = 1")
    d_de6 = g.d(de6)
    n = g.dim + 1
    diffs = [f.embed(n) for f in g.differentials] + [de6.embed(n)]
    g6 = LieAlgebra(diffs) if not d_de6.is_zero() else extend(g, de6)
    s6 = s.map_forms(lambda f: f.embed(n))
    S = lift_forms(s6, lam, mu, Form.basis(n, n))
    cond = CheckReport({
        "2(lam w1+mu w2)^eta^de6": 2 * wedge(lam * s.omega1 + mu * s.omega2, s.eta, de6),
        "w3^de6": wedge(s.omega3, de6),
        "d(de6)": d_de6,
    })
    return LiftedStructure(g6, S, cond)


def _basis_axis(U: Vector):
    nz = [(i, c) for i, c in enumerate(U.components, 1) if not is_zero(c)]
    if len(nz) != 1 or nz[0][1] not in (1, -1):
        raise ValueError("normal must be a signed basis vector")
    return nz[0][0]


def restrict_by_normal(S: SU3Structure, U: Vector, mode: str = "hyp1") -> SU2Structure:
    """Induced SU(2)-structure on the hyperplane orthogonal to ``U``.

    ``mode='hyp1'`` uses ``(-i_U F, i_U psi-, -i_U psi+, f*F)``;
    ``mode='thm25'`` uses ``(-i_U F, -i_U psi-, f*F, -i_U psi+)``.
    """
    k = _basis_axis(U)
    pull = lambda a: restrict(a, k)  # noqa: E731
    eta = pull(-contract(U, S.F))
    fF = pull(S.F)
    if mode == "hyp1":
        return SU2Structure(eta, pull(contract(U, S.psi_minus)),
                            pull(-contract(U, S.psi_plus)), fF)
    if mode == "thm25":
        return SU2Structure(eta, pull(-contract(U, S.psi_minus)), fF,
                            pull(-contract(U, S.psi_plus)))
    raise ValueError(f"unknown restriction mode {mode!r}")


def check_contraction_identity(g6: LieAlgebra, S: SU3Structure, U: Vector) -> Form:
    """``i_U(dF - 2 psi+)``."""
    return contract(U, g6.d(S.F) - 2 * S.psi_plus)


@dataclass(frozen=True)
class RotationMap:
    """Isomorphism with a rotation angle given by exact ``(cos, sin)``.

    ``basis_change`` writes the coframe of the second algebra in terms of
    the coframe of the first, i.e. it is the pullback ``F*``.
    """

    basis_change: BasisChange
    cos: object
    sin: object

    def __post_init__(self):
        if not is_zero(self.cos * self.cos + self.sin * self.sin - 1):
            raise ValueError("rotation data must satisfy cos^2 + sin^2 = 1")

    def pullback(self, a: Form) -> Form:
        return linear_substitution(a, self.basis_change.new_in_old())


def check_rotation_equivalence(g1: LieAlgebra, s1: SU2Structure,
                               g2: LieAlgebra, s2: SU2Structure,
                               m: RotationMap) -> CheckReport:
    iso = apply_basis_change(g1, m.basis_change)
    res = {f"isomorphism de{i}": iso.de(i) - g2.de(i) for i in range(1, g2.dim + 1)}
    pb = m.pullback
    c, s = m.cos, m.sin
    res["eta"] = s1.eta - pb(s2.eta)
    res["omega3"] = s1.omega3 - pb(s2.omega3)
    res["omega1"] = s1.omega1 - (c * pb(s2.omega1) - s * pb(s2.omega2))
    res["omega2"] = s1.omega2 - (s * pb(s2.omega1) + c * pb(s2.omega2))
    return CheckReport(res)


def check_killing_model_frame(x) -> CheckReport:
    """Induced quadruplet for ``X = x E6`` on the flat model frame.

    Compares ``-i_X F``, ``x i_X(F^alpha)``, ``i_X psi-`` and ``-i_X psi+``
    (with ``alpha = e6 / x``) against ``x`` times the standard structure.
    """
    if is_zero(x):
        raise ValueError("x must be invertible")
    S = flat_su3()
    X = Vector([0] * 5 + [x])
    alpha = Form.basis(6, 6) * (1 / x if not isinstance(x, int) else Fraction(1, x))
    std = standard_su2(6)
    got = SU2Structure(
        -contract(X, S.F),
        x * contract(X, wedge(S.F, alpha)),
        contract(X, S.psi_minus),
        -contract(X, S.psi_plus),
    )
    return CheckReport({
        "eta": got.eta - x * std.eta,
        "omega1": got.omega1 - x * std.omega1,
        "omega2": got.omega2 - x * std.omega2,
        "omega3": got.omega3 - x * std.omega3,
    }, {"structure": got})


def contact_twist(g: LieAlgebra, s: SU2Structure):
    """Constant ``lam`` with ``d w1 = lam w2^eta`` and ``d w2 = -lam w1^eta``.

    Returns ``None`` if no such constant exists.
    """
    d1, d2 = g.d(s.omega1), g.d(s.omega2)
    a = wedge(s.omega2, s.eta)
    b = wedge(s.omega1, s.eta)
    lead = a.items()[0]
    lam = d1.coeff(*lead[0]) / lead[1]
    if (d1 - lam * a).is_zero() and (d2 + lam * b).is_zero():
        return lam
    return None
