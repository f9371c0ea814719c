"""Evolution ODEs for hypo and Hitchin flows, with an adaptive integrator.

Scalar hypo ODEs carry one unknown ``f`` with ``f(0) = 1, f'(0) = 2``; the
integrator uses the first-order form and the second-order residual is an
independent check.  Hitchin systems carry ``(f, h, k)`` with all three
equal to 1 at ``t = 0``.

Every right-hand side works on floats, rationals and :class:`Jet2` values,
so jets along a solution come from the chain rule, not from differencing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

from .scalars import Jet2, SingularityError, jet_pow, to_float, value_of

GUARD = 1e-6

HYPO_FAMILIES = ("F1", "F2", "F4", "F5")
HITCHIN_KINDS = ("K", "Ktilde")


def _num(x):
    if isinstance(x, float):
        return x
    return Fraction(x)


def _guard(x, what: str):
    """Raise when ``|x|`` (or its jet value) is below the guard threshold."""
    v = value_of(x)
    if abs(float(v)) < GUARD:
        raise SingularityError(f"{what} is {float(v):.3g}, below the guard")
    return x


def _guard_positive(x, what: str):
    v = value_of(x)
    if float(v) < GUARD:
        raise SingularityError(f"{what} is {float(v):.3g}, below the guard")
    return x


@dataclass(frozen=True)
class ScalarODE:
    """Second-order hypo ODE for ``f`` together with its first integration."""

    family: str
    params: Dict[str, object]
    second_order_residual: Callable
    first_order_rhs: Callable
    first_integral: Callable
    f0: object = Fraction(1)
    fp0: object = Fraction(2)

    names: Tuple[str, ...] = ("f",)

    @property
    def conserved_value(self):
        return self.first_integral(self.f0, self.fp0)

    def initial_state(self) -> Tuple:
        return (self.f0,)

    def rhs(self, y: Sequence) -> Tuple:
        return (self.first_order_rhs(y[0]),)


def _rho(params: Mapping[str, object]):
    if "rho" in params:
        if "a" in params or "b" in params:
            raise ValueError("give either rho or (a, b), not both")
        return _num(params["rho"])
    a = _num(params.get("a", 0))
    b = _num(params.get("b", 0))
    return a * a + b * b


def build_hypo_ode(family: str, params: Optional[Mapping[str, object]] = None) -> ScalarODE:
    """Scalar ODE for a hypo-contact family (F1, F2, F4 or F5)."""
    params = dict(params or {})
    if family == "F1":
        r2 = _num(params.get("r", 1)) ** 2

        def rhs(f):
            rad = _guard_positive(1 + r2 - r2 * f ** 3, "radicand")
            return 2 / _guard(f, "f") * jet_pow(rad, Fraction(1, 4))

        return ScalarODE(
            family, params,
            lambda f, f1, f2: 12 * r2 + f * f1 ** 4 + f * f * f1 * f1 * f2,
            rhs,
            lambda f, f1: (f * f1 / 2) ** 4 + r2 * f ** 3,
        )
    if family == "F2":
        r2 = _num(params.get("r", 1)) ** 2

        def rhs(f):
            rad = _guard_positive(1 + r2 - r2 * f ** 3, "radicand")
            return 2 / _guard(f, "f") * jet_pow(rad, Fraction(1, 2))

        return ScalarODE(
            family, params,
            lambda f, f1, f2: f * f2 + f1 * f1 + 6 * r2 * f,
            rhs,
            lambda f, f1: (f * f1 / 2) ** 2 + r2 * f ** 3,
        )
    if family == "F4":
        rho = _rho(params)

        def rhs(f):
            rad = _guard(8 + 4 * rho - 4 * rho * f ** 3, "radicand")
            return jet_pow(rad, Fraction(1, 3)) / _guard(f, "f")

        return ScalarODE(
            family, params,
            lambda f, f1, f2: 4 * rho + f1 ** 3 + f * f1 * f2,
            rhs,
            lambda f, f1: (f * f1) ** 3 + 4 * rho * f ** 3,
        )
    if family == "F5":
        r2 = _num(params.get("r", 1)) ** 2

        def rhs(f):
            rad = _guard(8 + 2 * r2 - 2 * r2 * f ** 3, "radicand")
            return jet_pow(rad, Fraction(1, 3)) / _guard(f, "f")

        return ScalarODE(
            family, params,
            lambda f, f1, f2: 2 * r2 + f1 ** 3 + f * f1 * f2,
            rhs,
            lambda f, f1: (f * f1) ** 3 + 2 * r2 * f ** 3,
        )
    raise ValueError(f"no hypo evolution ODE for family {family!r}; "
                     f"expected one of {HYPO_FAMILIES}")


@dataclass(frozen=True)
class HitchinSystem:
    """Three-function Hitchin system for the extensions K or Ktilde."""

    kind: str
    params: Dict[str, object]
    rhs_fn: Callable
    names: Tuple[str, ...] = ("f", "h", "k")

    def initial_state(self) -> Tuple:
        return (Fraction(1), Fraction(1), Fraction(1))

    def rhs(self, y: Sequence) -> Tuple:
        return self.rhs_fn(*y)


def build_hitchin_system(kind: str, params: Optional[Mapping[str, object]] = None) -> HitchinSystem:
    params = dict(params or {})
    if kind == "K":
        a = _num(params.get("a", 0))
        b = _num(params.get("b", 0))
        a1 = _num(params.get("a1", 2))

        def rhs(f, h, k):
            _guard(f, "f")
            _guard(k, "k")
            return (2 * k + a1 * h / (2 * k * f),
                    -a1 * h * h / (2 * k * f * f),
                    -(a * a + b * b + 2 * k ** 3) / (k * f))

        return HitchinSystem(kind, params, rhs)
    if kind in ("Ktilde", "K~"):
        r = _num(params.get("r", 0))
        a2 = _num(params.get("a2", -2))

        def rhs(f, h, k):
            _guard(f, "f")
            _guard(k, "k")
            return (2 * k - a2 * h / (2 * k * f),
                    a2 * h * h / (2 * k * f * f),
                    -(r * r + 4 * k ** 3) / (2 * k * f))

        return HitchinSystem("Ktilde", params, rhs)
    raise ValueError(f"unknown Hitchin system {kind!r}; expected one of {HITCHIN_KINDS}")


def lift_jets(system, y: Sequence) -> Tuple[Tuple[Jet2, ...], Tuple[Jet2, ...]]:
    """Jets of the unknowns and of their derivatives at a state.

    Returns ``(Y, Y')`` where ``Y[i] = (y, y', y'')`` and
    ``Y'[i] = (y', y'', y''')``, all by repeated chain rule on the
    right-hand side.
    """
    y1 = system.rhs(tuple(y))
    part = tuple(Jet2(v, d, None) for v, d in zip(y, y1))
    y2 = tuple(j.d1 for j in system.rhs(part))
    full = tuple(Jet2(v, d, dd) for v, d, dd in zip(y, y1, y2))
    return full, tuple(system.rhs(full))


# Dormand-Prince 5(4) tableau
_A = (
    (),
    (Fraction(1, 5),),
    (Fraction(3, 40), Fraction(9, 40)),
    (Fraction(44, 45), Fraction(-56, 15), Fraction(32, 9)),
    (Fraction(19372, 6561), Fraction(-25360, 2187), Fraction(64448, 6561), Fraction(-212, 729)),
    (Fraction(9017, 3168), Fraction(-355, 33), Fraction(46732, 5247), Fraction(49, 176),
     Fraction(-5103, 18656)),
    (Fraction(35, 384), 0, Fraction(500, 1113), Fraction(125, 192), Fraction(-2187, 6784),
     Fraction(11, 84)),
)
_B5 = _A[6] + (0,)
_B4 = (Fraction(5179, 57600), 0, Fraction(7571, 16695), Fraction(393, 640),
       Fraction(-92097, 339200), Fraction(187, 2100), Fraction(1, 40))
_AF = tuple(tuple(float(x) for x in row) for row in _A)
_EF = tuple(float(a - b) for a, b in zip(_B5, _B4))


def _dp_step(rhs, y, h):
    ks = []
    for s in range(7):
        ys = [yi + h * sum(a * k[i] for a, k in zip(_AF[s], ks)) for i, yi in enumerate(y)]
        if s == 6:
            y5 = ys
        ks.append([float(v) for v in rhs(ys)])
    err = [h * sum(e * k[i] for e, k in zip(_EF, ks)) for i in range(len(y))]
    return y5, err, ks


COMPLETED = "completed"
STOPPED = "stopped-near-singularity"


@dataclass(frozen=True)
class Trajectory:
    """Accepted integrator nodes with ODE-derived first and second derivatives."""

    names: Tuple[str, ...]
    times: Tuple[float, ...]
    values: Tuple[Tuple[float, ...], ...]
    d1: Tuple[Tuple[float, ...], ...]
    d2: Tuple[Tuple[float, ...], ...]
    status: str
    system: object = field(repr=False, compare=False, default=None)

    @property
    def t_final(self) -> float:
        return self.times[-1]

    def index_of(self, t: float, tol: float = 1e-12) -> Optional[int]:
        for i, s in enumerate(self.times):
            if abs(s - t) <= tol * max(1.0, abs(t)):
                return i
        return None

    def covers(self, t: float) -> bool:
        lo, hi = sorted((self.times[0], self.times[-1]))
        return lo - 1e-12 <= t <= hi + 1e-12

    def state(self, t: float) -> Tuple[float, ...]:
        """Values at ``t``: a node if one matches, else cubic Hermite."""
        if not self.covers(t):
            raise ValueError(f"t={t} outside the trajectory interval")
        i = self.index_of(t)
        if i is not None:
            return self.values[i]
        ts = self.times
        forward = ts[-1] >= ts[0]
        j = next(j for j in range(1, len(ts)) if (ts[j] >= t if forward else ts[j] <= t))
        t0, t1 = ts[j - 1], ts[j]
        h = t1 - t0
        s = (t - t0) / h
        h00, h10 = 2 * s ** 3 - 3 * s ** 2 + 1, s ** 3 - 2 * s ** 2 + s
        h01, h11 = -2 * s ** 3 + 3 * s ** 2, s ** 3 - s ** 2
        return tuple(h00 * a + h10 * h * da + h01 * b + h11 * h * db
                     for a, da, b, db in zip(self.values[j - 1], self.d1[j - 1],
                                             self.values[j], self.d1[j]))

    def as_table(self) -> str:
        """Columnar text: ``t``, then each unknown with its two derivatives."""
        head = ["t"]
        for n in self.names:
            head += [n, f"{n}'", f"{n}''"]
        lines = ["# " + " ".join(head)]
        for t, v, a, b in zip(self.times, self.values, self.d1, self.d2):
            row = [t]
            for x, y, z in zip(v, a, b):
                row += [x, y, z]
            lines.append(" ".join(f"{x:.17g}" for x in row))
        return "\n".join(lines) + "\n"


def _node_derivs(system, y):
    full, _ = lift_jets(system, y)
    return tuple(float(j.d1) for j in full), tuple(float(j.d2) for j in full)


def integrate(system, t_end: float, tol: float = 1e-10,
              sample_times: Sequence[float] = (), h0: Optional[float] = None,
              max_steps: int = 200000) -> Trajectory:
    """Adaptive Dormand-Prince 5(4) from ``t = 0`` to ``t_end``.

    ``sample_times`` are hit exactly as nodes.  Integration stops early
    with status ``stopped-near-singularity`` when the right-hand side hits
    its guard and the step cannot shrink further.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if t_end == 0:
        raise ValueError("t_end must be nonzero")
    y = [float(v) for v in system.initial_state()]
    try:
        system.rhs(y)
    except (SingularityError, ZeroDivisionError) as exc:
        raise SingularityError(f"singular at t=0: {exc}") from None
    sign = 1.0 if t_end > 0 else -1.0
    stops = sorted({abs(float(t)) for t in sample_times if 0 < sign * t <= abs(t_end)} | {abs(t_end)})
    t = 0.0
    h = h0 if h0 is not None else min(1e-3, abs(t_end))
    hmin = 1e-14 * max(1.0, abs(t_end))
    # resolution at which a guard-triggered failure ends the run
    hsing = 1e-9 * max(1.0, abs(t_end))
    d1, d2 = _node_derivs(system, y)
    times, vals, D1, D2 = [0.0], [tuple(y)], [d1], [d2]
    status = COMPLETED
    steps = 0
    while stops:
        target = stops[0]
        step = min(h, target - t)
        last = step == target - t
        try:
            y_new, err, _ = _dp_step(system.rhs, y, sign * step)
            scale = [tol * max(1.0, abs(a), abs(b)) for a, b in zip(y, y_new)]
            enorm = math.sqrt(sum((e / s) ** 2 for e, s in zip(err, scale)) / len(y))
            if not all(math.isfinite(v) for v in y_new):
                raise SingularityError("non-finite state")
            new_d1, new_d2 = _node_derivs(system, y_new) if enorm <= 1 else (None, None)
        except (SingularityError, ZeroDivisionError, OverflowError, ValueError):
            h = step / 2
            if h < hsing:
                status = STOPPED
                break
            continue
        steps += 1
        if steps > max_steps:
            status = STOPPED
            break
        if enorm <= 1:
            t = target if last else t + step
            y = y_new
            times.append(sign * t)
            vals.append(tuple(y))
            D1.append(new_d1)
            D2.append(new_d2)
            if last:
                stops.pop(0)
        fac = 0.9 * (1.0 / enorm) ** 0.2 if enorm > 0 else 5.0
        h = step * min(5.0, max(0.2, fac))
        if h < hmin:
            status = STOPPED
            break
    return Trajectory(tuple(system.names), tuple(times), tuple(vals), tuple(D1), tuple(D2),
                      status, system)


def first_integral_drift(ode: ScalarODE, traj: Trajectory) -> float:
    """``max |Q(f, f') - Q(1, 2)|`` over the trajectory nodes."""
    q0 = to_float(ode.conserved_value)
    return max(abs(to_float(ode.first_integral(v[0], d[0])) - q0)
               for v, d in zip(traj.values, traj.d1))


def second_order_defect(ode: ScalarODE, traj: Trajectory) -> float:
    """``max |residual(f, f', f'')|`` using the node derivatives."""
    return max(abs(to_float(ode.second_order_residual(v[0], a[0], b[0])))
               for v, a, b in zip(traj.values, traj.d1, traj.d2))


def hitchin_defect(system: HitchinSystem, jets: Sequence[Jet2]) -> float:
    """Max difference between jet derivatives and the right-hand side."""
    rhs = system.rhs(tuple(j.value for j in jets))
    return max(abs(to_float(j.d1 - r)) for j, r in zip(jets, rhs))


@dataclass(frozen=True)
class ExplicitSolution:
    """Closed-form solution returning exact jets at rational times."""

    name: str
    names: Tuple[str, ...]
    jets: Callable

    def at(self, t) -> Tuple[Tuple[Jet2, ...], Tuple[Jet2, ...]]:
        return self.jets(Jet2.variable(_num(t)))

    def values(self, t) -> Tuple[float, ...]:
        return tuple(to_float(j.value) for j in self.at(t)[0])


def _sqrt_sol(T):
    u = 1 + 4 * T
    return (jet_pow(u, Fraction(1, 2)),), (2 * jet_pow(u, Fraction(-1, 2)),)


def _g2_sol(T):
    u = 1 + 5 * T
    f = jet_pow(u, Fraction(3, 5))
    h = jet_pow(u, Fraction(-1, 5))
    k = jet_pow(u, Fraction(-2, 5))
    fp = 3 * jet_pow(u, Fraction(-2, 5))
    hp = -jet_pow(u, Fraction(-6, 5))
    kp = -2 * jet_pow(u, Fraction(-7, 5))
    return (f, h, k), (fp, hp, kp)


def explicit_solution(name: str) -> ExplicitSolution:
    """``"F2-nilpotent"``: ``f = (1+4t)^(1/2)``;
    ``"K-explicit"``: ``(f, h, k) = ((1+5t)^(3/5), (1+5t)^(-1/5), (1+5t)^(-2/5))``."""
    if name == "F2-nilpotent":
        return ExplicitSolution(name, ("f",), _sqrt_sol)
    if name == "K-explicit":
        return ExplicitSolution(name, ("f", "h", "k"), _g2_sol)
    raise ValueError(f"unknown explicit solution {name!r}")
