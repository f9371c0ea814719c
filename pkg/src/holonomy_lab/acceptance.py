"""The acceptance suite: every headline identity, each as one criterion.

Each criterion returns a :class:`CriterionResult` with a pass flag, a short
detail string and the wall time; a criterion with a runtime budget fails
when it overruns.  Randomised property suites draw from
``random.Random(seed)`` so runs are reproducible.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from . import catalog
from .curvature import (Metric, k_contact_check, levi_civita, metric_residual,
                        ricci, riemann_oracle, torsion_residual)
from .exterior import Form, Vector, basis_indices, wedge
from .flow import (build_hitchin_system, build_hypo_ode, explicit_solution,
                   first_integral_drift, integrate, lift_jets)
from .holonomy import (certify_g2, certify_su3, curvature_forms, frame_at, holonomy_rank,
                       hypo_solution, verify_hitchin_lift)
from .liealg import apply_basis_change, jacobi_check
from .scalars import Jet2, Poly
from .structures import check_closed_omega12, check_hypo_contact, standard_su2

DEFAULT_SEED = 20240611
SAMPLE_TIMES = (0, 0.05, 0.1)

Q = Fraction
r = Poly.var("r")


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    budget: Optional[float] = None
    failures: List[str] = field(default_factory=list)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        t = f"{self.seconds:.2f}s" + (f"/{self.budget:g}s" if self.budget else "")
        return f"[{mark}] AC{self.number:>2} {self.title} ({t}) {self.detail}"

    def to_dict(self) -> Dict[str, object]:
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "detail": self.detail, "seconds": self.seconds, "budget": self.budget,
                "failures": list(self.failures)}


class _Collector:
    def __init__(self):
        self.failures: List[str] = []
        self.notes: List[str] = []

    def check(self, ok: bool, what: str):
        if not ok:
            self.failures.append(what)
        return ok


def _timed(number: int, title: str, budget: Optional[float], body: Callable[[_Collector], None]):
    col = _Collector()
    t0 = time.perf_counter()
    try:
        body(col)
    except Exception as exc:  # report, never crash the suite
        col.failures.append(f"{type(exc).__name__}: {exc}")
    dt = time.perf_counter() - t0
    if budget is not None and dt > budget:
        col.failures.append(f"runtime {dt:.1f}s exceeds {budget:g}s")
    detail = "; ".join(col.failures[:4]) if col.failures else "; ".join(col.notes)
    return CriterionResult(number, title, not col.failures, detail, dt, budget, col.failures)


# individual criteria


def ac1_jacobi() -> CriterionResult:
    def body(c):
        for fid in catalog.FAMILY_PARAMS:
            c.check(jacobi_check(catalog.family_algebra(fid)).passed, f"Jacobi fails for {fid}")
        c.check(jacobi_check(catalog.g2_extension("K", {"a1": 2})).passed, "Jacobi fails for K")
        c.check(jacobi_check(catalog.g2_extension("Ktilde", {"a2": -2})).passed,
                "Jacobi fails for Ktilde")
        c.notes.append("6 families + K, Ktilde symbolic")
    return _timed(1, "Jacobi identity, symbolic", 10, body)


def ac2_hypo_contact() -> CriterionResult:
    def body(c):
        for fid in catalog.FAMILY_PARAMS:
            e = catalog.family(fid)
            rep = check_hypo_contact(e.algebra, e.structure)
            c.check(rep.passed, f"{fid}: {rep.failing()}")
        c.notes.append("6 families symbolic")
    return _timed(2, "hypo-contact conditions, symbolic", 10, body)


def ac3_isomorphisms() -> CriterionResult:
    cases = [("F1", {}), ("F1", {"r": 1}), ("F2", {}), ("F2", {"r": 1}),
             ("F3", {"a": 0, "r": 1}), ("F5", {}), ("F5", {"r": 1}),
             ("F7", {"a": 0, "r": 1}), ("F7", {"a": 3, "r": 4})]

    def body(c):
        for fid, p in cases:
            e = catalog.family(fid, p)
            target = catalog.canonical(e.canonical_target)
            ok = e.basis_change is not None and apply_basis_change(e.algebra, e.basis_change) == target
            c.check(ok, f"{fid}{p} does not map onto {e.canonical_target}")
        c.notes.append(f"{len(cases)} maps exact")
    return _timed(3, "basis changes onto canonical algebras", 5, body)


RICCI_TABLES = [
    ("F1", {"r": 1}, (Q(-31, 2), -5, -5, Q(11, 2), Q(-1, 2))),
    ("F2", {"r": 1}, (-8, -8, -8, -8, 4)),
    ("F4", {"a": 1, "b": 1}, (Q(-17, 2), Q(-17, 2), 0, 0, 0)),
    ("F5", {"r": 2}, (-12, 0, -12, 0, 0)),
]


def ac4_ricci() -> CriterionResult:
    def body(c):
        for fid, p, want in RICCI_TABLES:
            rep = ricci(catalog.family_algebra(fid, p))
            got = rep.diagonal()
            c.check(rep.is_diagonal(), f"{fid}{p}: off-diagonal Ricci entries")
            c.check(all(g == w for g, w in zip(got, want)),
                    f"{fid}{p}: got {tuple(str(x) for x in got)}, "
                    f"expected {tuple(str(Q(x)) for x in want)}")
        sym = ricci(catalog.family_algebra("F2")).diagonal()
        c.check(sym == (-2 * (3 * r * r + 1),) * 4 + (4,), "F2 symbolic table")
    return _timed(4, "Ricci tables, exact", None, body)


def ac5_eta_einstein() -> CriterionResult:
    eta = Form.basis(5, 5)

    def body(c):
        fit = ricci(catalog.family_algebra("F2"), eta=eta).eta_einstein
        c.check(fit == (-2 * (1 + 3 * r * r), 6 * (1 + r * r)), f"F2 symbolic fit {fit}")
        fit = ricci(catalog.family_algebra("F4", {"a": 0, "b": 0}), eta=eta).eta_einstein
        c.check(fit == (-2, 6), f"F4(0,0) fit {fit}")
        for fid, p in [("F1", {}), ("F1", {"r": 1}), ("F4", {}), ("F4", {"a": 1, "b": 0}),
                       ("F4", {"a": 1, "b": 1}), ("F5", {}), ("F5", {"r": 2})]:
            fit = ricci(catalog.family_algebra(fid, p), eta=eta).eta_einstein
            c.check(fit is None, f"{fid}{p} unexpectedly eta-Einstein: {fit}")
    return _timed(5, "eta-Einstein fits", None, body)


def ac6_k_contact() -> CriterionResult:
    def body(c):
        for fid, p in [("F2", {}), ("F4", {"a": 0, "b": 0})]:
            res = k_contact_check(catalog.family_algebra(fid, p))
            c.check(res.passed, f"{fid}{p} should be K-contact, fails at {res.failures}")
        for fid, p in [("F1", {}), ("F3", {}), ("F4", {}), ("F4", {"a": 1, "b": 0}),
                       ("F5", {}), ("F7", {})]:
            res = k_contact_check(catalog.family_algebra(fid, p))
            c.check((1, 4) in res.failures, f"{fid}{p}: no (1,4) witness in {res.failures}")
    return _timed(6, "K-contact criterion", None, body)


def ac7_contact_cy() -> CriterionResult:
    def body(c):
        s = standard_su2()
        c.check(check_closed_omega12(catalog.family_algebra("F4", {"a": 0, "b": 0}), s).passed,
                "F4(0,0) should have closed omega1, omega2")
        n = 0
        for fid in catalog.FAMILY_PARAMS:
            pts = catalog.sweep_points(fid, 20)
            for p in pts:
                if fid == "F4" and p["a"] == 0 and p["b"] == 0:
                    continue
                n += 1
                g = catalog.family_algebra(fid, p)
                c.check(not check_closed_omega12(g, s).passed, f"{fid}{p} has closed omega1, omega2")
        c.notes.append(f"{n} sweep points fail as expected")
    return _timed(7, "closed omega1, omega2 only for F4(0,0)", None, body)


def ac8_explicit_su3() -> CriterionResult:
    def body(c):
        ode = build_hypo_ode("F2", {"r": 0})
        tr = integrate(ode, 1.0, 1e-10)
        c.check(tr.status == "completed", f"integration status {tr.status}")
        err = max(abs(v[0] - math.sqrt(1 + 4 * t)) for t, v in zip(tr.times, tr.values))
        c.check(err < 1e-9, f"max |f - (1+4t)^(1/2)| = {err:.2e}")
        g_err = 0.0
        for t, v in zip(tr.times, tr.values):
            jets, djets = lift_jets(ode, v)
            f, fp = float(jets[0].value), float(djets[0].value)
            g_err = max(g_err, abs(f - math.sqrt(1 + 4 * t)), abs((fp / 2) ** 2 - 1 / (1 + 4 * t)))
        c.check(g_err < 1e-9, f"metric coefficient error {g_err:.2e}")
        cert = certify_su3("F2", {"r": 0}, explicit_solution("F2-nilpotent"), [0])
        c.check(cert.exact_rank and cert.rank == 8, f"rank {cert.rank} (exact={cert.exact_rank})")
        c.check(cert.max_residual == 0, f"residual {cert.max_residual:.2e}")
        c.notes.append(f"f error {err:.1e}, metric error {g_err:.1e}, exact rank {cert.rank}")
    return _timed(8, "explicit SU(3) solution f = (1+4t)^(1/2)", 5, body)


def _omega12(fid, p):
    rep = curvature_forms(frame_at(hypo_solution(fid, p), 0))
    return rep.omega(1, 2)


def ac9_curvature_values() -> CriterionResult:
    def body(c):
        for rv in (Q(1), Q(2), Q(1, 2), Q(-3, 5)):
            got = _omega12("F2", {"r": rv})
            want = -(1 + rv * rv) * (Form.basis(6, 1, 2) - Form.basis(6, 3, 4))
            c.check(got == want, f"F2 r={rv}: Omega12 = {got}")
        for a, b in ((0, 0), (1, 0), (1, 1), (1, 2), (Q(1, 2), Q(1, 3))):
            rho = Q(a) ** 2 + Q(b) ** 2
            got = _omega12("F4", {"a": Q(a), "b": Q(b)})
            want = -((rho - 2) ** 2 / 4) * (Form.basis(6, 1, 2) - Form.basis(6, 3, 4))
            c.check(got == want, f"F4 a={a} b={b}: Omega12 = {got}")
    return _timed(9, "curvature Omega12 at t=0, exact", None, body)


AC10_CASES = [("F2", {"r": 1}), ("F4", {"rho": 0}), ("F4", {"rho": 1}), ("F4", {"rho": 2}),
              ("F4", {"rho": 6}), ("F5", {"r": 1}), ("F1", {"r": 1})]


def ac10_su3_rank() -> CriterionResult:
    def body(c):
        ranks = []
        for fid, p in AC10_CASES:
            tr = integrate(build_hypo_ode(fid, p), max(SAMPLE_TIMES), 1e-10, sample_times=SAMPLE_TIMES)
            missing = [t for t in SAMPLE_TIMES if not tr.covers(t)]
            if missing:
                c.check(False, f"{fid}{p}: solution stops at t={tr.t_final:.4f} "
                               f"before sample time(s) {missing}")
                continue
            cert = certify_su3(fid, p, tr, SAMPLE_TIMES)
            c.check(cert.rank == 8, f"{fid}{p}: rank {cert.rank}")
            c.check(cert.max_residual < 1e-8, f"{fid}{p}: residual {cert.max_residual:.2e}")
            if fid == "F4" and p["rho"] in (2, 6):
                single = holonomy_rank(hypo_solution(fid, p, tr), [0]).rank
                c.check(single < 8, f"{fid}{p}: rank {single} already at t=0")
            ranks.append(f"{fid}{p}={cert.rank}")
        c.notes.append(", ".join(ranks))
    return _timed(10, "SU(3) holonomy rank 8", 60, body)


def ac11_explicit_g2() -> CriterionResult:
    def body(c):
        sysk = build_hitchin_system("K", {"a": 0, "b": 0, "a1": 2})
        worst = 0.0
        for i in range(100):
            t = i / 99
            u = 1 + 5 * t
            f, h, k = u ** 0.6, u ** -0.2, u ** -0.4
            d = (3 * u ** -0.4, -u ** -1.2, -2 * u ** -1.4)
            rhs = sysk.rhs((f, h, k))
            worst = max(worst, max(abs(x - y) / max(1.0, abs(y)) for x, y in zip(d, rhs)))
        c.check(worst < 1e-13, f"explicit triple residual {worst:.2e}")
        cert = certify_g2("K", {"a": 0, "b": 0, "a1": 2}, explicit_solution("K-explicit"),
                          [0, Q(1, 20), Q(1, 10)])
        c.check(cert.max_residual < 1e-10, f"residual {cert.max_residual:.2e}")
        c.check(cert.rank == 14, f"rank {cert.rank}")
        p0 = {"a": 0, "b": 0, "a1": 0}
        tr = integrate(build_hitchin_system("K", p0), 0.1, 1e-10, sample_times=SAMPLE_TIMES)
        ctrl = certify_g2("K", p0, tr, SAMPLE_TIMES)
        c.check(ctrl.rank <= 8, f"trivial extension rank {ctrl.rank}")
        c.notes.append(f"triple residual {worst:.1e}, rank {cert.rank}, control rank {ctrl.rank}")
    return _timed(11, "explicit G2 solution f = (1+5t)^(3/5)", 30, body)


AC12_CASES = [("K", {"a": Q(1, 10), "b": 0, "a1": 2}), ("K", {"a": 0, "b": Q(1, 10), "a1": 2}),
              ("Ktilde", {"r": Q(1, 10), "a2": -2}), ("Ktilde", {"r": Q(1, 5), "a2": -2})]


def ac12_g2_neighbourhood() -> CriterionResult:
    def body(c):
        out = []
        for kind, p in AC12_CASES:
            tr = integrate(build_hitchin_system(kind, p), 0.1, 1e-10, sample_times=SAMPLE_TIMES)
            cert = certify_g2(kind, p, tr, SAMPLE_TIMES)
            c.check(cert.rank == 14, f"{kind}{p}: rank {cert.rank}")
            c.check(cert.max_residual < 1e-8, f"{kind}{p}: residual {cert.max_residual:.2e}")
            out.append(f"{kind}={cert.rank}")
        c.notes.append(", ".join(out))
    return _timed(12, "G2 holonomy near the explicit solution", 60, body)


def ac13_hitchin_lift() -> CriterionResult:
    def body(c):
        sol = explicit_solution("F2-nilpotent")
        worst = 0.0
        for fid, p in [("F2", {"r": 0}), ("F4", {"a": 0, "b": 0})]:
            for lam, mu in [(1, 0), (0, 1), (Q(3, 5), Q(4, 5))]:
                res = verify_hitchin_lift(fid, p, sol, lam, mu, [0, Q(1, 20), Q(1, 10)])
                m = max(res.values())
                worst = max(worst, m)
                c.check(m < 1e-10, f"{fid} ({lam},{mu}): residual {m:.2e}")
        c.notes.append(f"max residual {worst:.1e}")
    return _timed(13, "Hitchin lift of hypo evolutions", 10, body)


# randomised property suites


def _rand_q(rng: random.Random, lo=-5, hi=5, den=(1, 2, 3)) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.choice(den))


def _rand_poly(rng: random.Random) -> Poly:
    names = ("r", "a")
    out = Poly.const(_rand_q(rng))
    for _ in range(rng.randint(0, 3)):
        m = Poly.const(_rand_q(rng))
        for n in names:
            m = m * Poly.var(n) ** rng.randint(0, 2)
        out = out + m
    return out


def _rand_jet(rng: random.Random) -> Jet2:
    return Jet2(_rand_q(rng), _rand_q(rng), _rand_q(rng))


def _rand_form(rng: random.Random, dim: int, deg: int, coeff=None) -> Form:
    keys = basis_indices(dim, deg)
    coeff = coeff or (lambda: _rand_q(rng))
    return Form(dim, {k: coeff() for k in rng.sample(keys, min(len(keys), rng.randint(1, 4)))})


def _rand_family(rng: random.Random):
    fid = rng.choice(sorted(catalog.FAMILY_PARAMS))
    p = {}
    for name in catalog.FAMILY_PARAMS[fid]:
        v = _rand_q(rng)
        if name == "r" and v == 0:
            v = Fraction(1)
        p[name] = v
    return fid, p, catalog.family_algebra(fid, p)


def prop_ring_laws(rng: random.Random, cases: int) -> List[str]:
    bad = []
    for i in range(cases):
        gen = (_rand_q, _rand_poly, _rand_jet)[i % 3]
        x, y, z = gen(rng), gen(rng), gen(rng)
        if not (x + y == y + x and x * y == y * x and (x + y) + z == x + (y + z)
                and (x * y) * z == x * (y * z) and x * (y + z) == x * y + x * z
                and x - x == 0 and x + 0 == x and x * 1 == x):
            bad.append(f"ring laws fail for {x!r}, {y!r}, {z!r}")
    return bad


def prop_d_squared(rng: random.Random, cases: int) -> List[str]:
    bad = []
    for _ in range(cases):
        fid, p, g = _rand_family(rng)
        a = _rand_form(rng, 5, rng.randint(0, 4))
        if not g.d(g.d(a)).is_zero():
            bad.append(f"d^2 != 0 on {fid}{p} for {a}")
    return bad


def prop_antiderivation(rng: random.Random, cases: int) -> List[str]:
    bad = []
    for _ in range(cases):
        fid, p, g = _rand_family(rng)
        da, db = rng.randint(0, 3), rng.randint(0, 2)
        a, b = _rand_form(rng, 5, da), _rand_form(rng, 5, db)
        lhs = g.d(wedge(a, b))
        rhs = wedge(g.d(a), b) + (-1) ** da * wedge(a, g.d(b))
        if lhs != rhs:
            bad.append(f"Leibniz fails on {fid}{p}")
    return bad


def _rand_metric(rng: random.Random, n: int) -> Metric:
    A = [[Fraction(rng.randint(-2, 2), rng.choice((1, 2))) for _ in range(n)] for _ in range(n)]
    G = [[sum(A[i][k] * A[j][k] for k in range(n)) + (1 if i == j else 0) for j in range(n)]
         for i in range(n)]
    return Metric(G)


def prop_koszul(rng: random.Random, cases: int) -> List[str]:
    bad = []
    for i in range(cases):
        fid, p, g = _rand_family(rng)
        m = _rand_metric(rng, 5) if i % 2 else None
        conn = levi_civita(g, m)
        if torsion_residual(conn) or metric_residual(conn):
            bad.append(f"Levi-Civita fails on {fid}{p} (metric {'random' if m else 'identity'})")
    return bad


def prop_bianchi(rng: random.Random, cases: int) -> List[str]:
    bad = []
    for _ in range(cases):
        fid, p, g = _rand_family(rng)
        conn = levi_civita(g)
        X, Y, Z = (Vector([_rand_q(rng) for _ in range(5)]) for _ in range(3))
        s = (riemann_oracle(conn, None, X, Y, Z) + riemann_oracle(conn, None, Y, Z, X)
             + riemann_oracle(conn, None, Z, X, Y))
        if any(c != 0 for c in s.components):
            bad.append(f"first Bianchi fails on {fid}{p}")
    return bad


def _rand_expr(rng: random.Random, depth: int = 3):
    """Random rational function built from jet operations."""
    if depth == 0:
        kind = rng.randint(0, 2)
        if kind == 0:
            return lambda t: t
        c = _rand_q(rng)
        return lambda t, c=c: c + 0 * t
    a, b = _rand_expr(rng, depth - 1), _rand_expr(rng, depth - 1)
    op = rng.randint(0, 3)
    if op == 0:
        return lambda t: a(t) + b(t)
    if op == 1:
        return lambda t: a(t) * b(t)
    if op == 2:
        return lambda t: a(t) - b(t)
    return lambda t: a(t) / (2 + b(t) * b(t))


def prop_jet_vs_fd(rng: random.Random, cases: int) -> List[str]:
    """Central differences approach jet derivatives at rate ``h^2``."""
    bad = []
    for _ in range(cases):
        fn = _rand_expr(rng)
        t0 = _rand_q(rng, -2, 2)
        j = fn(Jet2.variable(t0))
        errs = []
        for h in (Fraction(1, 1000), Fraction(1, 2000)):
            fp, fm, f0 = fn(t0 + h), fn(t0 - h), fn(t0)
            fd1 = (fp - fm) / (2 * h)
            fd2 = (fp - 2 * f0 + fm) / (h * h)
            errs.append((abs(fd1 - j.d1), abs(fd2 - j.d2)))
        for k in range(2):
            e1, e2 = errs[0][k], errs[1][k]
            if e1 == 0:
                continue
            if not (e2 <= e1 / 3 and e1 < 1):
                bad.append(f"finite-difference rate off at t={t0}: {float(e1):.2e} -> {float(e2):.2e}")
    return bad


def prop_first_integral(rng: random.Random, cases: int) -> List[str]:
    bad = []
    for _ in range(cases):
        fid = rng.choice(("F1", "F2", "F4", "F5"))
        if fid == "F4":
            p = {"a": _rand_q(rng, -2, 2), "b": _rand_q(rng, -2, 2)}
        else:
            p = {"r": _rand_q(rng, -3, 3) or Fraction(1)}
        ode = build_hypo_ode(fid, p)
        tr = integrate(ode, rng.uniform(0.05, 0.5), 1e-10)
        drift = first_integral_drift(ode, tr)
        if drift >= 1e-9:
            bad.append(f"{fid}{p}: drift {drift:.2e}")
    return bad


PROPERTY_SUITES = {
    "ring laws": prop_ring_laws,
    "d^2 = 0": prop_d_squared,
    "antiderivation": prop_antiderivation,
    "Koszul torsion/compatibility": prop_koszul,
    "first Bianchi": prop_bianchi,
    "jet vs finite difference": prop_jet_vs_fd,
    "first-integral drift": prop_first_integral,
}


def ac14_properties(seed: int = DEFAULT_SEED, cases: int = 200) -> CriterionResult:
    def body(c):
        for i, (name, fn) in enumerate(PROPERTY_SUITES.items()):
            bad = fn(random.Random(seed + i), cases)
            for b in bad[:2]:
                c.check(False, f"{name}: {b}")
            if bad:
                c.check(False, f"{name}: {len(bad)}/{cases} cases fail")
        c.notes.append(f"{len(PROPERTY_SUITES)} suites x {cases} cases, seed {seed}")
    return _timed(14, "randomised property suites", None, body)


CRITERIA: Dict[int, Callable[[], CriterionResult]] = {
    1: ac1_jacobi, 2: ac2_hypo_contact, 3: ac3_isomorphisms, 4: ac4_ricci,
    5: ac5_eta_einstein, 6: ac6_k_contact, 7: ac7_contact_cy, 8: ac8_explicit_su3,
    9: ac9_curvature_values, 10: ac10_su3_rank, 11: ac11_explicit_g2,
    12: ac12_g2_neighbourhood, 13: ac13_hitchin_lift, 14: ac14_properties,
}


def run_criterion(number: int, seed: int = DEFAULT_SEED) -> CriterionResult:
    if number == 14:
        return ac14_properties(seed)
    return CRITERIA[number]()


def run_all(seed: int = DEFAULT_SEED, numbers: Optional[Sequence[int]] = None,
            threads: int = 1) -> List[CriterionResult]:
    """Run the selected criteria (all by default), optionally in a process pool."""
    nums = list(numbers or CRITERIA)
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run_criterion, nums, [seed] * len(nums)))
    return [run_criterion(n, seed) for n in nums]
