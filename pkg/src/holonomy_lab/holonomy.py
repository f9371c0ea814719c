"""Cohomogeneity-one geometry on (Lie group) x I.

A solution of a hypo or Hitchin flow gives a diagonal metric
``sum s_a(t)^2 (e^a)^2 + dt^2``.  Its orthonormal coframe is
``eta^a = s_a(t) e^a`` plus ``eta^{n+1} = dt``; every scaling is a
:class:`Jet2` at a sample time, so derivatives in ``t`` are exact jet
arithmetic.  Connection forms solve ``d eta^a = -omega^a_b ^ eta^b`` and
curvature is ``Omega = d omega + omega ^ omega``.

The holonomy rank is the dimension of the span of the curvature
endomorphisms ``Omega(eta^c, eta^d)`` in ``so(n+1)``, pooled over sample
times.  Sampling several times stands in for covariant derivatives of the
curvature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .catalog import family_algebra, g2_extension
from .curvature import ConnectionCoeffs, koszul, riemann_tensor
from .exterior import Form, linear_substitution, span_rank, rank_value, wedge
from .flow import (ExplicitSolution, ScalarODE, Trajectory,
                   build_hitchin_system, build_hypo_ode, lift_jets)
from .liealg import LieAlgebra
from .linalg import FloatRank
from .scalars import Jet2, Poly, exact_root, is_zero, jet_pow, to_float, value_of
from .structures import (SU2Structure, SU3Structure, check_half_flat, check_hypo,
                         lift_forms, standard_su2)

HALF = Fraction(1, 2)
SU3_RANK = 8
G2_RANK = 14


def _sqrt(x):
    return jet_pow(x, HALF)


def _numeric(x):
    """Rational if exact, else float; radicals become floats."""
    if isinstance(x, Poly):
        if x.parameters():
            raise ValueError(f"unbound parameter(s) {sorted(x.parameters())}")
        return x.constant_value() if x.is_constant() else x.evalf()
    return x


@dataclass(frozen=True)
class CohomFrame:
    """Diagonal coframe ``eta^a = s_a e^a`` on ``base x I`` at time ``t0``."""

    base: LieAlgebra
    scalings: Tuple[Jet2, ...]
    t0: object = 0
    label: str = ""

    def __post_init__(self):
        if len(self.scalings) != self.base.dim:
            raise ValueError("one scaling per base coframe index is required")
        for s in self.scalings:
            if to_float(value_of(s)) <= 0:
                raise ValueError("scalings must be positive")

    @property
    def dim(self) -> int:
        return self.base.dim + 1

    @property
    def time_index(self) -> int:
        """0-based index of ``eta^{n+1} = dt``."""
        return self.base.dim

    def differentials(self) -> List[Form]:
        n, N = self.base.dim, self.dim
        s = self.scalings
        out = []
        for a in range(1, n + 1):
            terms = {}
            for (b, c), coef in self.base.de(a).terms.items():
                terms[(b, c)] = s[a - 1] * _numeric(coef) / (s[b - 1] * s[c - 1])
            terms[(a, N)] = -(s[a - 1].derivative() / s[a - 1])
            out.append(Form(N, terms))
        out.append(Form(N))
        return out

    def algebra(self) -> LieAlgebra:
        """Frame differentials as a (time-dependent) structure-constant table."""
        return LieAlgebra(self.differentials(), self.label)

    def d(self, a: Form) -> Form:
        """Exterior derivative on ``base x I``; coefficients vary with ``t``."""
        g = self._alg()
        out = g.d(a)
        N = self.dim
        dt = Form.basis(N, N)
        for idx, c in a.terms.items():
            if isinstance(c, Jet2):
                out = out + wedge(dt, Form(N, {idx: c.derivative()}))
        return out

    def _alg(self) -> LieAlgebra:
        cached = self.__dict__.get("_alg_cache")
        if cached is None:
            cached = self.algebra()
            object.__setattr__(self, "_alg_cache", cached)
        return cached

    def to_eta(self, a: Form) -> Form:
        """Rewrite a form in the base coframe ``e`` (embedded) in ``eta``."""
        N = self.dim
        imgs = [Form(N, {(i + 1,): s.reciprocal()}) for i, s in enumerate(self.scalings)]
        imgs.append(Form.basis(N, N))
        return linear_substitution(a.embed(N) if a.dim < N else a, imgs)

    def to_e(self, a: Form) -> Form:
        """Rewrite a form in ``eta^1..eta^n`` in the base coframe (dimension n)."""
        n = self.base.dim
        imgs = [Form(n, {(i + 1,): s}) for i, s in enumerate(self.scalings)]
        return linear_substitution(a, imgs)


def _brackets(diffs: Sequence[Form]):
    n = len(diffs)
    zero = Fraction(0)
    c = [[[zero] * n for _ in range(n)] for _ in range(n)]
    for k, f in enumerate(diffs):
        for (i, j), v in f.terms.items():
            c[k][i - 1][j - 1] = -v
            c[k][j - 1][i - 1] = v
    return c


def frame_connection(frame: CohomFrame) -> ConnectionCoeffs:
    return koszul(_brackets(frame.differentials()), time_index=frame.time_index)


def connection_forms(frame: CohomFrame) -> List[List[Form]]:
    """``omega[a][b]`` (0-based) with ``d eta^a = -omega^a_b ^ eta^b``."""
    conn = frame_connection(frame)
    N = frame.dim
    return [[Form(N, {(c + 1,): conn.gamma[c][b][a] for c in range(N)}) for b in range(N)]
            for a in range(N)]


@dataclass
class CurvatureReport:
    connection: List[List[Form]]
    curvature: List[List[Form]]
    residuals: Dict[str, float] = field(default_factory=dict)

    def omega(self, a: int, b: int) -> Form:
        """``Omega^a_b`` with 1-based indices, values only."""
        return self.curvature[a - 1][b - 1]


def curvature_forms(frame: CohomFrame, cross_check: bool = True) -> CurvatureReport:
    """Connection and curvature forms with structural residuals.

    Residuals: first structure equation, antisymmetry of ``omega`` and
    ``Omega``, first Bianchi identity, and (optionally) agreement with the
    curvature from composing covariant derivatives.
    """
    N = frame.dim
    conn = frame_connection(frame)
    om = [[Form(N, {(c + 1,): conn.gamma[c][b][a] for c in range(N)}) for b in range(N)]
          for a in range(N)]
    eta = [Form.basis(N, a + 1) for a in range(N)]
    diffs = frame.differentials()
    res = {}
    first = 0.0
    for a in range(N):
        r = diffs[a]
        for b in range(N):
            r = r + wedge(om[a][b], eta[b])
        first = max(first, _jet_max(r))
    res["first structure"] = first
    res["omega antisymmetry"] = max(_jet_max(om[a][b] + om[b][a])
                                    for a in range(N) for b in range(N))
    Om = [[None] * N for _ in range(N)]
    for a in range(N):
        for b in range(N):
            acc = frame.d(om[a][b])
            for c in range(N):
                acc = acc + wedge(om[a][c], om[c][b])
            Om[a][b] = acc.values()
    res["Omega antisymmetry"] = max((Om[a][b] + Om[b][a]).max_abs()
                                    for a in range(N) for b in range(N))
    bianchi = 0.0
    for a in range(N):
        acc = Form(N)
        for b in range(N):
            acc = acc + wedge(Om[a][b], eta[b])
        bianchi = max(bianchi, acc.max_abs())
    res["first Bianchi"] = bianchi
    if cross_check:
        R = riemann_tensor(conn)
        worst = 0.0
        for a in range(N):
            for b in range(N):
                for x in range(N):
                    for y in range(x + 1, N):
                        # Omega^a_b(E_x, E_y) = eta^a(R(E_x, E_y) E_b)
                        diff = Om[a][b].coeff(x + 1, y + 1) - value_of(R[x][y][b][a])
                        worst = max(worst, abs(to_float(diff)))
        res["Cartan vs Koszul"] = worst
    return CurvatureReport(om, Om, res)


def _jet_max(a: Form) -> float:
    """Largest magnitude over the known slots of all jet coefficients."""
    worst = 0.0
    for c in a.terms.values():
        if isinstance(c, Jet2):
            for x in (c.value, c.d1, c.d2):
                if x is not None:
                    worst = max(worst, abs(to_float(x)))
        else:
            worst = max(worst, abs(to_float(c)))
    return worst


def curvature_endomorphisms(rep: CurvatureReport) -> List[Form]:
    """``Omega(eta^c, eta^d)`` as 2-forms on ``so(N)`` (slot ``(a, b)``, ``a < b``)."""
    N = len(rep.curvature)
    out = []
    for c in range(1, N + 1):
        for d in range(c + 1, N + 1):
            out.append(Form(N, {(a + 1, b + 1): rep.curvature[a][b].coeff(c, d)
                                for a in range(N) for b in range(a + 1, N)}))
    return out


def span_of_curvature(reports: Sequence[CurvatureReport], threshold: float = 1e-8):
    """Rank (int, or :class:`FloatRank` for floats) of the pooled curvature span."""
    mats = [m for rep in reports for m in curvature_endomorphisms(rep)]
    mats = [m for m in mats if not m.is_zero()]
    if not mats:
        return 0
    return span_rank(mats, threshold)


# solutions and their frames


def _two_squares(rho: Fraction) -> Optional[Tuple[Fraction, Fraction]]:
    """Small rational ``(a, b)`` with ``a^2 + b^2 = rho``, if one is found."""
    for q in range(1, 13):
        top = int((rho * q * q) ** 0.5) + 1
        for p in range(top, -1, -1):
            a = Fraction(p, q)
            b = exact_root(rho - a * a, 2) if rho >= a * a else None
            if b is not None:
                return a, b
    return None


def _rho_ab(params: Mapping[str, object]):
    """``(a, b)`` for F4 with ``a^2 + b^2 = rho``, rational when possible.

    The hypo flow and the curvature span depend on ``rho`` alone up to a
    rotation of the coframe, so any such pair represents the same metric.
    """
    if "rho" not in params:
        return params.get("a", 0), params.get("b", 0)
    rho = params["rho"]
    if isinstance(rho, float):
        return rho ** 0.5, 0
    pair = _two_squares(Fraction(rho))
    return pair if pair is not None else (float(Fraction(rho)) ** 0.5, 0)


def _specialised(fid: str, params: Mapping[str, object]) -> LieAlgebra:
    """Base algebra with numeric coefficients (``r = 0`` allowed)."""
    g = family_algebra(fid)
    if fid == "F4":
        a, b = _rho_ab(params)
        bind = {"a": a, "b": b}
    else:
        bind = {k: params[k] for k in ("a", "r") if k in params}
        bind.setdefault("r", 1)
    return g.map_coeffs(lambda c: _numeric(c.subst(bind)) if isinstance(c, Poly) else c)


def _hypo_scalings(fid: str, f: Jet2, fp: Jet2) -> Tuple[Jet2, ...]:
    half_fp = fp * HALF
    if fid == "F2":
        s = _sqrt(f)
        return (s, s, s, s, half_fp)
    if fid == "F4":
        big, small = f * _sqrt(half_fp), _sqrt(2 / fp)
        return (big, big, small, small, half_fp)
    if fid == "F5":
        big, small = f * _sqrt(half_fp), _sqrt(2 / fp)
        return (big, small, big, small, half_fp)
    if fid == "F1":
        sf = _sqrt(f)
        return (f * sf * fp * HALF, sf, sf, 2 / (fp * sf), half_fp)
    raise ValueError(f"no evolution frame for family {fid!r}")


def _g2_scalings(kind: str, f: Jet2, h: Jet2, k: Jet2) -> Tuple[Jet2, ...]:
    sk = _sqrt(k)
    big, small = f * sk, sk.reciprocal()
    if kind == "K":
        return (big, big, small, small, k, h)
    return (big, small, big, small, k, h)


def _g2_base(kind: str, params: Mapping[str, object]) -> LieAlgebra:
    g = g2_extension(kind)
    bind = dict(params)
    defaults = {"K": {"a": 0, "b": 0, "a1": 2}, "Ktilde": {"r": 0, "a2": -2}}[kind]
    for k, v in defaults.items():
        bind.setdefault(k, v)
    return g.map_coeffs(lambda c: _numeric(c.subst(bind)) if isinstance(c, Poly) else c)


def solution_jets(system, source, t) -> Tuple[Tuple[Jet2, ...], Tuple[Jet2, ...]]:
    """State jets and derivative jets at time ``t``.

    ``source`` is a :class:`Trajectory` (node values), an
    :class:`ExplicitSolution`, or ``None`` for the exact initial state
    (``t = 0`` only).
    """
    if source is None:
        if t != 0:
            raise ValueError("without a trajectory only t = 0 is available")
        return lift_jets(system, system.initial_state())
    if isinstance(source, ExplicitSolution):
        return source.at(t)
    if isinstance(source, Trajectory):
        if not source.covers(t):
            raise ValueError(f"t={t} outside the trajectory interval")
        i = source.index_of(float(t))
        y = source.values[i] if i is not None else source.state(float(t))
        return lift_jets(system, y)
    raise TypeError("source must be a Trajectory, an ExplicitSolution or None")


def frame_at(solution, t0) -> CohomFrame:
    """Frame of a ``Solution`` at ``t0``."""
    jets, djets = solution_jets(solution.system, solution.source, t0)
    if isinstance(solution.system, ScalarODE):
        fid = solution.system.family
        sc = _hypo_scalings(fid, jets[0], djets[0])
    else:
        sc = _g2_scalings(solution.system.kind, *jets)
    return CohomFrame(solution.base, sc, t0, solution.label)


@dataclass(frozen=True)
class Solution:
    """A flow system, its base algebra and a source of jets."""

    system: object
    base: LieAlgebra
    source: object = None
    label: str = ""


def hypo_solution(fid: str, params: Optional[Mapping[str, object]] = None,
                  source=None) -> Solution:
    params = dict(params or {})
    return Solution(build_hypo_ode(fid, params), _specialised(fid, params), source,
                    f"{fid}{params}")


def hitchin_solution(kind: str, params: Optional[Mapping[str, object]] = None,
                     source=None) -> Solution:
    params = dict(params or {})
    system = build_hitchin_system(kind, params)
    return Solution(system, _g2_base(system.kind, params), source, f"{system.kind}{params}")


@dataclass(frozen=True)
class RankResult:
    rank: int
    per_time: Tuple[int, ...]
    exact: bool
    pivot_ratio: Optional[float] = None
    gap: Optional[float] = None


def _rank_info(r) -> Tuple[int, bool, Optional[float], Optional[float]]:
    if isinstance(r, FloatRank):
        piv = [p for p in r.pivots if p > 0]
        kept = piv[:r.rank]
        return r.rank, False, (min(kept) if kept else None), r.gap
    return int(r), True, None, None


def holonomy_rank(solution: Solution, sample_times: Sequence = (0,),
                  threshold: float = 1e-8) -> RankResult:
    """Rank of the curvature span pooled over ``sample_times``."""
    if not sample_times:
        raise ValueError("at least one sample time is required")
    reports = [curvature_forms(frame_at(solution, t), cross_check=False) for t in sample_times]
    per = tuple(rank_value(span_of_curvature([r], threshold)) for r in reports)
    pooled = span_of_curvature(reports, threshold)
    rank, exact, ratio, gap = _rank_info(pooled)
    return RankResult(rank, per, exact, ratio, gap)


# defining forms and certificates


def _std(N: int) -> SU2Structure:
    return standard_su2(N)


def su3_forms_eta(N: int = 6) -> SU3Structure:
    """Integrable SU(3) forms of a hypo evolution in the ``eta`` coframe.

    ``F = eta ^ dt + omega3``, ``psi+ = omega1 ^ eta - omega2 ^ dt``,
    ``psi- = omega1 ^ dt + omega2 ^ eta``.
    """
    s = _std(N)
    dt = Form.basis(N, 6)
    return SU3Structure(
        wedge(s.eta, dt) + s.omega3,
        wedge(s.omega1, s.eta) - wedge(s.omega2, dt),
        wedge(s.omega1, dt) + wedge(s.omega2, s.eta),
    )


def _d_hat(base: LieAlgebra, a: Form) -> Form:
    return base.d(a)


def _dt(a: Form) -> Form:
    """``d/dt`` of a form with jet coefficients."""
    return a.map_coeffs(lambda c: c.derivative() if isinstance(c, Jet2) else 0 * c)


def _vmax(a: Form) -> float:
    return a.max_abs()


def _time_su2(frame: CohomFrame) -> SU2Structure:
    """The standard quadruplet of the ``eta`` frame rewritten in ``e``."""
    s = _std(frame.base.dim)
    return s.map_forms(frame.to_e)


@dataclass
class CertificateReport:
    kind: str
    inputs: Dict[str, object]
    residuals: Dict[str, float]
    rank: int
    per_time_rank: Tuple[int, ...]
    exact_rank: bool
    expected_rank: int
    tol: float
    pivot_ratio: Optional[float] = None
    gap: Optional[float] = None

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def verdict(self) -> str:
        group = {SU3_RANK: "SU(3)", G2_RANK: "G2"}[self.expected_rank]
        if self.max_residual >= self.tol:
            return "defining forms not closed"
        if self.rank == self.expected_rank:
            return f"holonomy = {group}"
        return f"rank {self.rank} < {self.expected_rank}"

    @property
    def passed(self) -> bool:
        return self.verdict.startswith("holonomy")

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind,
            "inputs": {k: str(v) for k, v in self.inputs.items()},
            "residuals": self.residuals,
            "max_residual": self.max_residual,
            "rank": self.rank,
            "per_time_rank": list(self.per_time_rank),
            "exact_rank": self.exact_rank,
            "pivot_ratio": self.pivot_ratio,
            "rank_gap": self.gap,
            "tol": self.tol,
            "verdict": self.verdict,
        }


def _merge(res: Dict[str, float], key: str, val: float):
    res[key] = max(res.get(key, 0.0), val)


def su3_residuals(frame: CohomFrame) -> Dict[str, float]:
    """Closedness on ``base x I`` and the hypo evolution equations at one time."""
    res = {}
    S = su3_forms_eta(frame.dim)
    res["dF"] = _vmax(frame.d(S.F))
    res["dpsi+"] = _vmax(frame.d(S.psi_plus))
    res["dpsi-"] = _vmax(frame.d(S.psi_minus))
    s = _time_su2(frame)
    g = frame.base
    res["dt omega3 + d eta"] = _vmax(_dt(s.omega3) + g.d(s.eta))
    res["dt(omega2^eta) - d omega1"] = _vmax(_dt(wedge(s.omega2, s.eta)) - g.d(s.omega1))
    res["dt(omega1^eta) + d omega2"] = _vmax(_dt(wedge(s.omega1, s.eta)) + g.d(s.omega2))
    hyp = check_hypo(g, s)
    res["hypo"] = max(f.max_abs() for f in hyp.residuals.values())
    return res


def certify_su3(fid: str, params: Optional[Mapping[str, object]] = None, source=None,
                sample_times: Sequence = (0,), tol: float = 1e-8,
                threshold: float = 1e-8) -> CertificateReport:
    """Closed SU(3) forms on ``base x I`` plus curvature rank 8."""
    sol = hypo_solution(fid, params, source)
    res: Dict[str, float] = {}
    reports = []
    for t in sample_times:
        frame = frame_at(sol, t)
        for k, v in su3_residuals(frame).items():
            _merge(res, k, v)
        rep = curvature_forms(frame)
        for k, v in rep.residuals.items():
            _merge(res, k, v)
        reports.append(rep)
    per = tuple(rank_value(span_of_curvature([r], threshold)) for r in reports)
    rank, exact, ratio, gap = _rank_info(span_of_curvature(reports, threshold))
    inputs = {"family": fid, **dict(params or {}), "sample_times": list(sample_times)}
    return CertificateReport("SU(3)", inputs, res, rank, per, exact, SU3_RANK, tol, ratio, gap)


def g2_forms_e(kind: str, f, h, k, dim: int = 6) -> SU3Structure:
    """Half-flat ``(F, psi+, psi-)`` of the Hitchin flow in the base coframe."""
    e = lambda *i: Form.basis(dim, *i)  # noqa: E731
    if kind == "K":
        F = f * (e(1, 3) - e(2, 4)) + k * h * e(5, 6)
        pp = -(f * f * k * k) * e(1, 2, 5) - e(3, 4, 5) - f * h * (e(1, 4, 6) + e(2, 3, 6))
        pm = (-(f * f * h * k) * e(1, 2, 6) - (h / k) * e(3, 4, 6)
              + k * f * (e(1, 4, 5) + e(2, 3, 5)))
    elif kind == "Ktilde":
        F = f * (e(1, 2) + e(3, 4)) + k * h * e(5, 6)
        pp = (f * f * k * k) * e(1, 3, 5) - e(2, 4, 5) - f * h * (e(1, 4, 6) + e(2, 3, 6))
        pm = (f * f * h * k) * e(1, 3, 6) - (h / k) * e(2, 4, 6) + f * k * (e(1, 4, 5) + e(2, 3, 5))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return SU3Structure(F, pp, pm)


def g2_residuals(frame: CohomFrame, kind: str, jets: Sequence[Jet2]) -> Dict[str, float]:
    res = {}
    g6 = frame.base
    S = g2_forms_e(kind, *jets)
    N = frame.dim
    dt = Form.basis(N, N)
    F, pp, pm = (frame.to_eta(x) for x in (S.F, S.psi_plus, S.psi_minus))
    phi = wedge(F, dt) + pp
    star = wedge(pm, dt) + HALF * wedge(F, F)
    res["d phi"] = _vmax(frame.d(phi))
    res["d star phi"] = _vmax(frame.d(star))
    res["dt psi+ - d F"] = _vmax(_dt(S.psi_plus) - g6.d(S.F))
    res["F^dt F + d psi-"] = _vmax(wedge(S.F, _dt(S.F)) + g6.d(S.psi_minus))
    hf = check_half_flat(g6, S)
    res["half-flat"] = max(f.max_abs() for f in hf.residuals.values())
    return res


def certify_g2(kind: str, params: Optional[Mapping[str, object]] = None, source=None,
               sample_times: Sequence = (0,), tol: float = 1e-8,
               threshold: float = 1e-8) -> CertificateReport:
    """Closed ``phi`` and ``*phi`` on ``base x I`` plus curvature rank 14."""
    sol = hitchin_solution(kind, params, source)
    res: Dict[str, float] = {}
    reports = []
    for t in sample_times:
        jets, _ = solution_jets(sol.system, sol.source, t)
        frame = frame_at(sol, t)
        for k, v in g2_residuals(frame, sol.system.kind, jets).items():
            _merge(res, k, v)
        rep = curvature_forms(frame)
        for k, v in rep.residuals.items():
            _merge(res, k, v)
        reports.append(rep)
    per = tuple(rank_value(span_of_curvature([r], threshold)) for r in reports)
    rank, exact, ratio, gap = _rank_info(span_of_curvature(reports, threshold))
    inputs = {"kind": sol.system.kind, **dict(params or {}), "sample_times": list(sample_times)}
    return CertificateReport("G2", inputs, res, rank, per, exact, G2_RANK, tol, ratio, gap)


def verify_hitchin_lift(fid: str, params: Optional[Mapping[str, object]], source,
                        lam, mu, sample_times: Sequence = (0,)) -> Dict[str, float]:
    """Hitchin residuals of the lift of a hypo evolution to ``base x R``.

    Uses ``F = lam w1 + mu w2 + eta ^ e6`` and the matching
    ``psi+-``, with ``de6 = 0``.
    """
    if not is_zero(lam * lam + mu * mu - 1):
        raise ValueError("need lam^2 + mu^2 = 1")
    sol = hypo_solution(fid, params, source)
    res: Dict[str, float] = {}
    for t in sample_times:
        frame = frame_at(sol, t)
        s = _time_su2(frame)
        g6 = LieAlgebra([f.embed(6) for f in frame.base.differentials] + [Form(6)])
        S = lift_forms(s.map_forms(lambda a: a.embed(6)), lam, mu, Form.basis(6, 6))
        _merge(res, "dt psi+ - d F", _vmax(_dt(S.psi_plus) - g6.d(S.F)))
        _merge(res, "F^dt F + d psi-", _vmax(wedge(S.F, _dt(S.F)) + g6.d(S.psi_minus)))
    return res
