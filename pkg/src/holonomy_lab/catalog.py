"""Named Lie algebras, hypo-contact families and the maps between them.

Families are keyed ``F1, F2, F3, F4, F5, F7``.  Parameters missing from the
call stay symbolic (``Poly`` variables); supplied values are rationals.
Every family carries the standard SU(2)-structure
``eta = e5, omega1 = e12 + e34, omega2 = e13 + e42, omega3 = e14 + e23``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from .exterior import Form
from .liealg import BasisChange, LieAlgebra, extend
from .scalars import Poly, is_zero, sqrt_rational
from .structures import RotationMap, SU2Structure, standard_su2

FAMILY_PARAMS: Dict[str, Tuple[str, ...]] = {
    "F1": ("r",),
    "F2": ("r",),
    "F3": ("a", "r"),
    "F4": ("a", "b"),
    "F5": ("r",),
    "F7": ("a", "r"),
}

CANONICAL_TARGET = {"F1": "h2", "F2": "h3", "F3": "h4", "F4": "h4", "F5": "h5", "F7": "h5"}

FREE_COEFFICIENTS = ("A", "B12", "B13", "B14", "B34", "C13", "C14")


class DomainError(ValueError):
    """Parameter outside the domain of a family."""


def _param(params: Mapping[str, object], name: str):
    v = params.get(name)
    if v is None:
        return Poly.var(name)
    if isinstance(v, Poly):
        return v
    if isinstance(v, float):
        raise TypeError(f"parameter {name} must be rational, got a float")
    return Fraction(v)


def _forms(dim: int, table: Mapping[int, Mapping[Tuple[int, int], object]]) -> List[Form]:
    return [Form(dim, table.get(i, {})) for i in range(1, dim + 1)]


def _f1(p):
    r = p["r"]
    return _forms(5, {
        2: {(1, 2): r},
        3: {(1, 3): r},
        4: {(1, 4): -r, (1, 5): -3 * r * r, (2, 3): 2 * r},
        5: {(1, 4): -2, (2, 3): -2},
    })


def _f2(p):
    r = p["r"]
    de5 = {(1, 4): -2, (2, 3): -2}
    return _forms(5, {
        2: {(1, 2): r, (3, 4): 3 * r, (3, 5): 3 * r * r},
        3: {(1, 3): r, (2, 4): -3 * r, (2, 5): -3 * r * r},
        4: {k: -r * c for k, c in de5.items()},
        5: de5,
    })


def _f3(p):
    a, r = p["a"], p["r"]
    de2 = {(1, 4): r, (2, 3): -r, (2, 5): -a * r, (3, 5): r * r}
    q = a / r
    return _forms(5, {
        2: de2,
        3: {k: q * c for k, c in de2.items()},
        4: {(1, 2): r, (1, 3): a, (1, 5): -(a * a + r * r), (2, 4): a, (3, 4): -r},
        5: {(1, 4): -2, (2, 3): -2},
    })


def _f4(p):
    a, b = p["a"], p["b"]
    rho = a * a + b * b
    return _forms(5, {
        3: {(1, 3): a, (1, 4): b, (2, 3): -b, (2, 4): a, (2, 5): -rho},
        4: {(1, 3): b, (1, 4): -a, (1, 5): -rho, (2, 3): a, (2, 4): b},
        5: {(1, 4): -2, (2, 3): -2},
    })


def _f5(p):
    r = p["r"]
    half = Fraction(1, 2)
    return _forms(5, {
        2: {(3, 4): r, (3, 5): half * r * r},
        3: {(1, 3): r},
        4: {(1, 5): -half * r * r, (2, 3): r},
        5: {(1, 4): -2, (2, 3): -2},
    })


def _f7(p):
    a, r = p["a"], p["r"]
    s2 = r * r + a * a
    half = Fraction(1, 2)
    return _forms(5, {
        2: {(1, 2): r, (1, 3): a, (2, 4): a, (2, 5): half * a / r * s2,
            (3, 4): a * a / r, (3, 5): half * a * a / (r * r) * s2},
        3: {(1, 2): a, (1, 3): a * a / r, (2, 4): -r, (2, 5): -half * s2,
            (3, 4): -a, (3, 5): -half * a / r * s2},
        4: {(1, 5): -s2 * s2 / (2 * r * r), (2, 3): s2 / r},
        5: {(1, 4): -2, (2, 3): -2},
    })


_BUILDERS = {"F1": _f1, "F2": _f2, "F3": _f3, "F4": _f4, "F5": _f5, "F7": _f7}


@dataclass(frozen=True)
class CatalogEntry:
    family: str
    params: Dict[str, object]
    algebra: LieAlgebra
    structure: SU2Structure
    canonical_target: str
    basis_change: Optional[BasisChange]
    notes: str = ""


def _check_params(fid: str, params: Mapping[str, object]):
    if fid not in FAMILY_PARAMS:
        raise KeyError(f"unknown family {fid!r}; expected one of {sorted(FAMILY_PARAMS)}")
    extra = set(params) - set(FAMILY_PARAMS[fid])
    if extra:
        raise DomainError(f"family {fid} has no parameter(s) {sorted(extra)}")
    if "r" in FAMILY_PARAMS[fid]:
        r = params.get("r")
        if r is not None and not isinstance(r, Poly) and r == 0:
            raise DomainError(f"family {fid} requires r != 0")


def family_algebra(fid: str, params: Optional[Mapping[str, object]] = None) -> LieAlgebra:
    params = dict(params or {})
    _check_params(fid, params)
    p = {name: _param(params, name) for name in FAMILY_PARAMS[fid]}
    return LieAlgebra(_BUILDERS[fid](p), fid)


def family(fid: str, params: Optional[Mapping[str, object]] = None, **kw) -> CatalogEntry:
    """Catalog entry for a family; unspecified parameters stay symbolic."""
    params = dict(params or {}, **kw)
    g = family_algebra(fid, params)
    p = {name: _param(params, name) for name in FAMILY_PARAMS[fid]}
    try:
        change = canonical_change(fid, p)
    except _NeedsSpecialisation:
        change = None
    return CatalogEntry(fid, dict(params), g, standard_su2(), CANONICAL_TARGET[fid], change)


def general_equations(free: Optional[Mapping[str, object]] = None, **kw) -> LieAlgebra:
    """Reduced structure equations with dependent coefficients filled in.

    The seven free coefficients default to symbols.  The Jacobi identity is
    not imposed.
    """
    free = dict(free or {}, **kw)
    bad = set(free) - set(FREE_COEFFICIENTS)
    if bad:
        raise DomainError(f"unknown coefficient(s) {sorted(bad)}")
    A, B12, B13, B14, B34, C13, C14 = (_param(free, n) for n in FREE_COEFFICIENTS)
    h = Fraction(1, 2)
    B15 = h * (B12 * B14 + B14 * B34 + 2 * B14 * C13 - 2 * B13 * C14)
    B25 = h * (B12 * B13 + 4 * A * B34 + 3 * B13 * B34 - 2 * B13 * C13 - 2 * B14 * C14)
    B35 = h * (2 * A * B13 + 2 * B13 * B13 + 2 * B14 * B14 - B12 * B34 + B34 * B34)
    C15 = h * (-4 * A * B14 - 2 * B13 * B14 + 3 * B12 * C14 + B34 * C14)
    C25 = h * (-12 * A * A - B12 * B12 - 10 * A * B13 - 2 * B13 * B13 - 2 * B12 * B34
               - B34 * B34 + 3 * B12 * C13 + 3 * B34 * C13 - 2 * C13 * C13 - 2 * C14 * C14)
    D15 = h * (-B12 * B12 - 2 * B14 * B14 + B12 * B34 - 3 * B12 * C13 + B34 * C13
               - 2 * C13 * C13 - 2 * C14 * C14)
    return LieAlgebra(_forms(5, {
        1: {(1, 4): A, (2, 3): A},
        2: {(1, 2): B12, (1, 3): B13, (1, 4): B14, (1, 5): B15, (2, 3): -B14,
            (2, 4): 2 * A + B13, (2, 5): B25, (3, 4): B34, (3, 5): B35},
        3: {(1, 2): 3 * A + B13, (1, 3): C13, (1, 4): C14, (1, 5): C15, (2, 3): -C14,
            (2, 4): -(B12 + B34 - C13), (2, 5): C25, (3, 4): -(A + B13), (3, 5): -B25},
        4: {(1, 2): B14, (1, 3): C14, (1, 4): B34 - C13, (1, 5): D15, (2, 3): B12 + C13,
            (2, 4): C14, (2, 5): C15, (3, 4): -B14, (3, 5): -B15},
        5: {(1, 4): -2, (2, 3): -2},
    }), "general")


def canonical(name: str) -> LieAlgebra:
    """The algebras h1..h5 in their canonical coframes."""
    n = 5
    tables = {
        "h1": {5: {(1, 4): -1, (2, 3): -1}},
        "h2": {1: {(1, 5): -2, (2, 3): -1}, 2: {(2, 5): -1}, 3: {(3, 5): -1}, 4: {(4, 5): 3}},
        "h3": {1: {(1, 4): -2, (2, 3): -1}, 2: {(2, 4): -1, (3, 5): -1},
               3: {(2, 5): 1, (3, 4): -1}},
        "h4": {1: {(1, 4): -1}, 2: {(2, 5): -1}, 3: {(3, 4): 1, (3, 5): 1}},
        "h5": {1: {(1, 5): -1, (2, 4): -1}, 2: {(3, 4): -1}, 3: {(3, 5): 1}, 4: {(4, 5): -1}},
    }
    if name not in tables:
        raise KeyError(f"unknown canonical algebra {name!r}")
    return LieAlgebra(_forms(n, tables[name]), name)


def k_algebra() -> LieAlgebra:
    """The 6-dimensional algebra whose only new relation is ``d a6 = a45``
    on top of h4."""
    h4 = canonical("h4")
    return extend(h4, Form(5, {(4, 5): 1}), "k")


class _NeedsSpecialisation(Exception):
    pass


def _num(x):
    if isinstance(x, Poly):
        if x.is_constant():
            return x.constant_value()
        raise _NeedsSpecialisation
    return x


def canonical_change(fid: str, p: Mapping[str, object]) -> BasisChange:
    """Basis change ``alpha = M e`` carrying family ``fid`` to its canonical form."""
    if fid == "F1":
        r = p["r"]
        return BasisChange([
            [0, 0, 0, 2, -3 * r],
            [0, 0, 5, 0, 0],
            [0, 2 * r, 0, 0, 0],
            [0, 0, 0, -3, -3 * r],
            [r, 0, 0, 0, 0],
        ])
    if fid == "F2":
        r = p["r"]
        s2 = Poly.sqrt(2)
        return BasisChange([
            [0, 0, 0, r, 0],
            [0, 0, s2 * r, 0, 0],
            [0, s2 * r, 0, 0, 0],
            [r, 0, 0, 0, 0],
            [0, 0, 0, 3 * r, 3 * r * r],
        ])
    if fid == "F3":
        a, r = Fraction(_num(p["a"])), Fraction(_num(p["r"]))
        s3 = Poly.sqrt(3)
        n = sqrt_rational(a * a + r * r)
        return BasisChange([
            [0, 2, 0, 0, r],
            [s3 * a / r, -n / r, 0, s3, n],
            [-s3 * a / r, -n / r, 0, -s3, n],
            [0, -2 * a, 2 * r, 0, 0],
            [-s3 * n, a, -r, 0, 0],
        ])
    if fid == "F4":
        raise _NeedsSpecialisation
    if fid == "F5":
        r = p["r"]
        s2 = Poly.sqrt(2)
        h = Fraction(1, 2)
        return BasisChange([
            [0, 0, 0, 1, -h * r],
            [0, -s2, 0, 0, 0],
            [0, 0, 0, -1, -h * r],
            [0, 0, s2 * r, 0, 0],
            [r, 0, 0, 0, 0],
        ])
    if fid == "F7":
        a, r = Fraction(_num(p["a"])), Fraction(_num(p["r"]))
        s = (a * a + r * r) / r
        to_f5 = f7_to_f5(a, r).basis_change
        alpha = canonical_change("F5", {"r": s})
        # alpha = A e and e = R^T f
        from .linalg import matmul
        return BasisChange(matmul(alpha.matrix, to_f5.matrix))
    raise KeyError(fid)


def f7_rotation(a, r) -> Tuple[object, object]:
    """``(cos theta, sin theta)`` with ``cos = a/|v|``, ``sin = r/|v|``."""
    n = sqrt_rational(Fraction(a) ** 2 + Fraction(r) ** 2)
    inv = 1 / n
    return a * inv, r * inv


def f7_to_f5(a, r) -> RotationMap:
    """Rotation from F7(a, r) onto F5 with ``s = (a^2 + r^2)/r``.

    The F5 coframe is ``e = R^T f`` in terms of the F7 coframe ``f``.
    """
    a, r = Fraction(a), Fraction(r)
    if r == 0:
        raise DomainError("F7 requires r != 0")
    c, s = f7_rotation(a, r)
    R_T = [
        [1, 0, 0, 0, 0],
        [0, c, -s, 0, 0],
        [0, s, c, 0, 0],
        [0, 0, 0, 1, 0],
        [0, 0, 0, 0, 1],
    ]
    # the forms rotate by -theta
    return RotationMap(BasisChange(R_T), c, -s)


def f3_f4_point(cos_sigma, sin_sigma, scale=1) -> Tuple[object, object]:
    """Parameters ``(a, b)`` whose angle satisfies ``sigma = (theta - pi)/3``."""
    c, s = cos_sigma, sin_sigma
    if not is_zero(c * c + s * s - 1):
        raise DomainError("need cos^2 + sin^2 = 1")
    cos_t = -(4 * c ** 3 - 3 * c)
    sin_t = -(3 * s - 4 * s ** 3)
    return scale * cos_t, scale * sin_t


def f3_to_f4(cos_sigma, sin_sigma, scale=1) -> Tuple[Tuple[object, object], RotationMap]:
    """Rotation from F3(a, r) onto F4(a, b=r) from exact ``sigma`` data.

    Returns ``((a, r), map)``; the map's basis change is the new F4
    coframe written in the F3 coframe, and its angle is ``-theta``.
    """
    a, r = f3_f4_point(cos_sigma, sin_sigma, scale)
    if is_zero(r):
        raise DomainError("the angle must give r != 0")
    c, s = cos_sigma, sin_sigma
    n = abs(Fraction(scale)) if not isinstance(scale, Poly) else scale
    ct, st = a / n, r / n
    M = [
        [s, -c * ct, c * st, 0, 0],
        [c, s * ct, -s * st, 0, 0],
        [0, s * st, s * ct, c, 0],
        [0, -c * st, -c * ct, s, 0],
        [0, 0, 0, 0, 1],
    ]
    return (a, r), RotationMap(BasisChange(M), ct, -st)


@dataclass(frozen=True)
class RotationPair:
    source: str
    source_params: Dict[str, object]
    target: str
    target_params: Dict[str, object]
    rotation: RotationMap
    note: str = ""


def rotation_pairs() -> List[RotationPair]:
    """The documented rotation equivalences at sample parameter points."""
    out = []
    s3h = Poly.sqrt(3) * Fraction(1, 2)
    (a, r), m = f3_to_f4(s3h, Fraction(-1, 2))
    out.append(RotationPair("F3", {"a": _num(a), "r": _num(r)}, "F4",
                            {"a": _num(a), "b": _num(r)}, m, "theta = pi/2"))
    for cs, sn in ((Fraction(4, 5), Fraction(3, 5)), (Fraction(3, 5), Fraction(-4, 5))):
        (a, r), m = f3_to_f4(cs, sn)
        out.append(RotationPair("F3", {"a": a, "r": r}, "F4", {"a": a, "b": r}, m,
                                "sigma with rational cosine"))
    for a, r in ((0, 1), (3, 4), (1, 2)):
        a, r = Fraction(a), Fraction(r)
        out.append(RotationPair("F7", {"a": a, "r": r}, "F5", {"r": (a * a + r * r) / r},
                                f7_to_f5(a, r), "theta from (a, r)"))
    return out


def g2_extension(kind: str, params: Optional[Mapping[str, object]] = None) -> LieAlgebra:
    """The 6-dimensional algebras K (F4 with ``de6 = a1 e12``) and
    Ktilde (F5 with ``de6 = a2 e13``)."""
    params = dict(params or {})
    if kind == "K":
        base = family_algebra("F4", {k: params[k] for k in ("a", "b") if k in params})
        a1 = _param(params, "a1")
        return extend(base, Form(5, {(1, 2): a1}), "K")
    if kind in ("Ktilde", "K~"):
        base = family_algebra("F5", {k: params[k] for k in ("r",) if k in params}) \
            if params.get("r", 1) != 0 else LieAlgebra(_f5({"r": Fraction(0)}), "F5(0)")
        a2 = _param(params, "a2")
        return extend(base, Form(5, {(1, 3): a2}), "Ktilde")
    raise KeyError(f"unknown extension kind {kind!r}")


def sweep_points(fid: str, count: int = 20) -> List[Dict[str, Fraction]]:
    """Deterministic, distinct rational parameter points inside a family's domain."""
    names = FAMILY_PARAMS[fid]
    vals = [Fraction(n, d) for d in (1, 2, 3, 5) for n in (1, -1, 2, -3, 5, 7)]
    zero_ok = [name in ("a", "b") for name in names]
    pts: List[Dict[str, Fraction]] = []
    if all(zero_ok):
        pts.append({name: Fraction(0) for name in names})
    i = 0
    while len(pts) < count:
        pt = {}
        for j, name in enumerate(names):
            v = vals[(i + 7 * j * (i // len(vals) + 1)) % len(vals)]
            if zero_ok[j] and (i + j) % 4 == 0:
                v = Fraction(0)
            pt[name] = v
        if pt not in pts:
            pts.append(pt)
        i += 1
        if i > 100 * count:
            raise RuntimeError("could not generate enough distinct points")
    return pts
