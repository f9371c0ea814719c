"""Lie algebras given by the differentials of a coframe.

A Lie algebra of dimension ``n`` is stored as the list ``de^1, ..., de^n``
of 2-forms.  The differential extends to all forms by the graded Leibniz
rule, and the bracket of the dual frame is recovered from
``dα(X, Y) = -α([X, Y])``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Sequence, Tuple

from .exterior import Form, Vector, linear_substitution, wedge
from .linalg import inverse_exact, nullspace_exact, rref
from .scalars import Poly, poly_subst, to_float


class LieAlgebraError(ValueError):
    pass


class LieAlgebra:
    """Left-invariant coframe data ``de^i`` on an ``n``-dimensional algebra."""

    def __init__(self, differentials: Sequence[Form], name: str = ""):
        diffs = tuple(differentials)
        if not diffs:
            raise LieAlgebraError("a Lie algebra needs at least one generator")
        n = len(diffs)
        for i, f in enumerate(diffs, 1):
            if f.dim != n:
                raise LieAlgebraError(f"de{i} lives in dimension {f.dim}, expected {n}")
            if not f.is_zero() and f.degree != 2:
                raise LieAlgebraError(f"de{i} must be a 2-form")
        self.dim = n
        self.differentials = diffs
        self.name = name
        self._cache: Dict[Tuple[int, ...], Form] = {}

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<LieAlgebra{label} dim={self.dim}>"

    def __eq__(self, other):
        return isinstance(other, LieAlgebra) and self.differentials == other.differentials

    def __hash__(self):
        return hash(self.differentials)

    def de(self, i: int) -> Form:
        return self.differentials[i - 1]

    def _d_monomial(self, idx: Tuple[int, ...]) -> Form:
        if idx in self._cache:
            return self._cache[idx]
        n = self.dim
        out = Form(n)
        for p, i in enumerate(idx):
            left = Form.basis(n, *idx[:p])
            right = Form.basis(n, *idx[p + 1:])
            term = wedge(left, self.differentials[i - 1], right)
            out = out - term if p % 2 else out + term
        self._cache[idx] = out
        return out

    def d(self, a: Form) -> Form:
        """Chevalley–Eilenberg differential of a left-invariant form.

        Coefficients are treated as constants.
        """
        if a.dim != self.dim:
            raise ValueError("form dimension differs from algebra dimension")
        out = Form(self.dim)
        for idx, c in a.terms.items():
            if idx:
                out = out + c * self._d_monomial(idx)
        return out

    def structure_constant(self, k: int, i: int, j: int):
        """``c^k_{ij}`` with ``[E_i, E_j] = sum_k c^k_{ij} E_k``."""
        return -self.differentials[k - 1].coeff(i, j)

    def bracket(self, x: Vector, y: Vector) -> Vector:
        n = self.dim
        comps = []
        for k in range(1, n + 1):
            acc = Fraction(0)
            for (i, j), c in self.differentials[k - 1].terms.items():
                xi, xj, yi, yj = x[i], x[j], y[i], y[j]
                acc = acc - c * (xi * yj - xj * yi)
            comps.append(acc)
        return Vector(comps)

    def map_coeffs(self, fn: Callable) -> "LieAlgebra":
        return LieAlgebra([f.map_coeffs(fn) for f in self.differentials], self.name)

    def specialize(self, bindings: Mapping[str, object]) -> "LieAlgebra":
        return self.map_coeffs(lambda c: poly_subst(c, bindings))

    def to_float(self) -> "LieAlgebra":
        return self.map_coeffs(to_float)

    def parameters(self) -> frozenset:
        out = set()
        for f in self.differentials:
            for c in f.terms.values():
                if isinstance(c, Poly):
                    out |= c.parameters()
        return frozenset(out)


def d_form(g: LieAlgebra, a: Form) -> Form:
    return g.d(a)


@dataclass(frozen=True)
class JacobiResult:
    """Outcome of ``d^2 e^i = 0`` for each generator."""

    failures: Dict[int, Form] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.passed


def jacobi_check(g: LieAlgebra) -> JacobiResult:
    fails = {}
    for i in range(1, g.dim + 1):
        dd = g.d(g.de(i))
        if not dd.is_zero():
            fails[i] = dd
    return JacobiResult(fails)


def _span_basis(vectors: List[list]) -> List[list]:
    if not vectors:
        return []
    red, piv = rref(vectors)
    return [red[i] for i in range(len(piv))]


def _vec_bracket(g: LieAlgebra, u: list, v: list) -> list:
    return list(g.bracket(Vector(u), Vector(v)).components)


@dataclass(frozen=True)
class SolvabilityReport:
    derived_dims: Tuple[int, ...]
    lower_central_dims: Tuple[int, ...]

    @property
    def solvable(self) -> bool:
        return self.derived_dims[-1] == 0

    @property
    def nilpotent(self) -> bool:
        return self.lower_central_dims[-1] == 0

    @property
    def abelian(self) -> bool:
        return len(self.derived_dims) > 1 and self.derived_dims[1] == 0


def solvability_class(g: LieAlgebra) -> SolvabilityReport:
    """Dimensions of the derived and lower central series.

    Needs rational structure constants; specialise parameters first.
    """
    if g.parameters():
        raise LieAlgebraError("specialise parameters before computing solvability")
    n = g.dim
    full = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def series(step):
        dims = [n]
        cur = full
        while True:
            nxt = step(cur)
            dims.append(len(nxt))
            if len(nxt) == len(cur) or not nxt:
                return tuple(dims), nxt
            cur = nxt

    derived, _ = series(lambda cur: _span_basis(
        [_vec_bracket(g, u, v) for a, u in enumerate(cur) for v in cur[a + 1:]]))
    lower, _ = series(lambda cur: _span_basis(
        [_vec_bracket(g, u, v) for u in full for v in cur]))
    return SolvabilityReport(_trim(derived), _trim(lower))


def _trim(dims: Tuple[int, ...]) -> Tuple[int, ...]:
    # drop the repeated stabilised entry
    if len(dims) >= 2 and dims[-1] == dims[-2] and dims[-1] != 0:
        return dims[:-1]
    return dims


def center_basis(g: LieAlgebra) -> List[list]:
    """Basis of the centre as coordinate vectors."""
    n = g.dim
    rows = []
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            rows.append([g.structure_constant(k, i, j) for i in range(1, n + 1)])
    return nullspace_exact(rows, n)


def center(g: LieAlgebra) -> int:
    """Dimension of the centre."""
    return len(center_basis(g))


@dataclass(frozen=True)
class BasisChange:
    """New coframe ``f^i = sum_j matrix[i][j] e^j``."""

    matrix: Tuple[Tuple, ...]

    def __init__(self, matrix: Sequence[Sequence]):
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in matrix))

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def inverse(self) -> "BasisChange":
        return BasisChange(inverse_exact(self.matrix))

    def new_in_old(self) -> List[Form]:
        """Each ``f^i`` as a 1-form in the old coframe."""
        n = self.dim
        return [Form(n, {(j + 1,): c for j, c in enumerate(row)}) for row in self.matrix]

    def old_in_new(self) -> List[Form]:
        """Each ``e^j`` as a 1-form in the new coframe."""
        return self.inverse().new_in_old()

    def to_new(self, a: Form) -> Form:
        """Rewrite a form given in the old coframe in the new one."""
        return linear_substitution(a, self.old_in_new())

    def to_old(self, a: Form) -> Form:
        return linear_substitution(a, self.new_in_old())


def apply_basis_change(g: LieAlgebra, change) -> LieAlgebra:
    """Differentials of the new coframe ``f = M e``, written in ``f``."""
    if not isinstance(change, BasisChange):
        change = BasisChange(change)
    if change.dim != g.dim:
        raise LieAlgebraError("basis change has the wrong size")
    old = change.old_in_new()
    new = []
    for f_old in change.new_in_old():
        new.append(linear_substitution(g.d(f_old), old))
    return LieAlgebra(new, g.name)


def extend(g: LieAlgebra, d_new: Form, name: str = "") -> LieAlgebra:
    """Append one generator ``e^{n+1}`` with the given differential.

    ``d_new`` is a closed 2-form on ``g`` (checked) and the old
    differentials are unchanged.
    """
    if d_new.dim != g.dim:
        raise LieAlgebraError("extension form must live on the base algebra")
    if not g.d(d_new).is_zero():
        raise LieAlgebraError("extension form is not closed")
    n = g.dim + 1
    diffs = [f.embed(n) for f in g.differentials] + [d_new.embed(n)]
    return LieAlgebra(diffs, name)


def closed_two_forms(g: LieAlgebra) -> List[Form]:
    """Basis of closed left-invariant 2-forms (rational coefficients)."""
    from .exterior import basis_indices

    keys = basis_indices(g.dim, 2)
    images = [g.d(Form.basis(g.dim, *k)) for k in keys]
    out_keys = sorted({k for im in images for k in im.terms})
    rows = [[im.coeff(*ok) for im in images] for ok in out_keys]
    null = nullspace_exact(rows, len(keys)) if rows else nullspace_exact([], len(keys))
    return [Form(g.dim, {k: c for k, c in zip(keys, v)}) for v in null]


def is_isomorphic_via(g: LieAlgebra, h: LieAlgebra, change) -> bool:
    """Whether ``change`` carries the coframe of ``g`` onto that of ``h``."""
    return apply_basis_change(g, change) == h
