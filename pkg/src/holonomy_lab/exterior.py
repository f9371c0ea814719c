"""Exterior algebra of a finite-dimensional dual space.

A :class:`Form` maps strictly increasing index tuples (1-based) to
coefficients.  ``e^{ij}`` is ``e^i ∧ e^j`` and evaluates on a pair of
vectors by the determinant rule ``e^{ij}(X, Y) = e^i(X) e^j(Y) - e^i(Y) e^j(X)``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .linalg import FloatRank, float_rank, rank_exact
from .scalars import is_zero, magnitude, to_float, value_of

Index = Tuple[int, ...]


def _sort_sign(idx: Sequence[int]) -> Tuple[int, Index]:
    """Sign of the sorting permutation, or 0 if an index repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class Form:
    """Immutable, possibly inhomogeneous, exterior form."""

    __slots__ = ("dim", "_terms")

    def __init__(self, dim: int, terms: Optional[Mapping[Iterable[int], object]] = None):
        if dim < 0:
            raise ValueError("dimension must be non-negative")
        self.dim = dim
        acc: Dict[Index, object] = {}
        for idx, c in (terms or {}).items():
            idx = tuple(idx)
            for i in idx:
                if not 1 <= i <= dim:
                    raise ValueError(f"index {i} out of range 1..{dim}")
            sign, key = _sort_sign(idx)
            if sign == 0 or is_zero(c):
                continue
            c = c if sign > 0 else -c
            acc[key] = acc[key] + c if key in acc else c
        self._terms = {k: v for k, v in acc.items() if not is_zero(v)}

    # construction helpers
    @classmethod
    def basis(cls, dim: int, *indices: int) -> "Form":
        """``e^{i1...ik}``; with no indices, the constant 1."""
        return cls(dim, {indices: Fraction(1)})

    @classmethod
    def scalar(cls, dim: int, c) -> "Form":
        return cls(dim, {(): c})

    @classmethod
    def zero(cls, dim: int) -> "Form":
        return cls(dim)

    # inspection
    @property
    def terms(self) -> Dict[Index, object]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def coeff(self, *idx: int):
        sign, key = _sort_sign(idx)
        if sign == 0:
            return Fraction(0)
        c = self._terms.get(key, Fraction(0))
        return c if sign > 0 else -c

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degrees(self) -> frozenset:
        return frozenset(len(k) for k in self._terms)

    @property
    def degree(self) -> Optional[int]:
        """Degree of a non-zero homogeneous form, else ``None``."""
        d = self.degrees
        return next(iter(d)) if len(d) == 1 else None

    def homogeneous_part(self, k: int) -> "Form":
        return Form(self.dim, {i: c for i, c in self._terms.items() if len(i) == k})

    def max_abs(self) -> float:
        """Largest coefficient magnitude (jet values only)."""
        return max((magnitude(c) for c in self._terms.values()), default=0.0)

    # algebra
    def _check(self, other: "Form"):
        if not isinstance(other, Form):
            raise TypeError("expected a Form")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        self._check(other)
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return Form(self.dim, terms)

    def __neg__(self):
        return Form(self.dim, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, Form):
            return wedge(self, c)
        return Form(self.dim, {k: v * c for k, v in self._terms.items()})

    def __rmul__(self, c):
        return Form(self.dim, {k: c * v for k, v in self._terms.items()})

    def __truediv__(self, c):
        return Form(self.dim, {k: v / c for k, v in self._terms.items()})

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        if self.dim != other.dim:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.dim, frozenset(self._terms)))

    def map_coeffs(self, fn: Callable) -> "Form":
        return Form(self.dim, {k: fn(c) for k, c in self._terms.items()})

    def values(self) -> "Form":
        """Replace jet coefficients by their values."""
        return self.map_coeffs(value_of)

    def to_float(self) -> "Form":
        return self.map_coeffs(to_float)

    def embed(self, dim: int) -> "Form":
        """Same form viewed in a larger dual space."""
        if dim < self.dim:
            raise ValueError("embed needs a dimension at least as large")
        return Form(dim, self._terms)

    def __repr__(self):
        return f"Form({self.dim}, {format_form(self)!r})"

    def __str__(self):
        return format_form(self)


def format_form(a: Form) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for idx, c in a.items():
        name = "e" + "".join(str(i) for i in idx) if idx else "1"
        if a.dim >= 10 and idx:
            name = "e(" + ",".join(str(i) for i in idx) + ")"
        parts.append(f"({c}) {name}")
    return " + ".join(parts)


class Vector:
    """Vector of components with respect to the dual basis of ``e^i``."""

    __slots__ = ("dim", "components")

    def __init__(self, components: Sequence):
        self.components = tuple(components)
        self.dim = len(self.components)

    @classmethod
    def basis(cls, dim: int, k: int) -> "Vector":
        return cls([Fraction(int(i == k)) for i in range(1, dim + 1)])

    def __getitem__(self, i: int):
        """1-based component access."""
        return self.components[i - 1]

    def __add__(self, other):
        return Vector([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        return Vector([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return Vector([-a for a in self.components])

    def __rmul__(self, c):
        return Vector([c * a for a in self.components])

    def __eq__(self, other):
        return isinstance(other, Vector) and all(
            is_zero(a - b) for a, b in zip(self.components, other.components)
        ) and self.dim == other.dim

    def __repr__(self):
        return f"Vector({list(self.components)!r})"


def wedge(*forms: Form) -> Form:
    """Exterior product of any number of forms."""
    if not forms:
        raise ValueError("wedge needs at least one form")
    out = forms[0]
    for b in forms[1:]:
        out._check(b)
        terms: Dict[Index, object] = {}
        for i, ci in out._terms.items():
            si = set(i)
            for j, cj in b._terms.items():
                if si.intersection(j):
                    continue
                sign, key = _sort_sign(i + j)
                c = ci * cj
                if sign < 0:
                    c = -c
                terms[key] = terms[key] + c if key in terms else c
        out = Form(out.dim, terms)
    return out


def contract(x: Vector, a: Form) -> Form:
    """Interior product ``i_X a`` (insertion into the first slot)."""
    if x.dim != a.dim:
        raise ValueError("dimension mismatch in contraction")
    terms: Dict[Index, object] = {}
    for idx, c in a._terms.items():
        for p, i in enumerate(idx):
            xi = x.components[i - 1]
            if is_zero(xi):
                continue
            rest = idx[:p] + idx[p + 1:]
            v = c * xi
            if p % 2:
                v = -v
            terms[rest] = terms[rest] + v if rest in terms else v
    return Form(a.dim, terms)


def evaluate(a: Form, *vectors: Vector):
    """Value of a homogeneous k-form on k vectors."""
    deg = a.degree
    if a.is_zero():
        return Fraction(0)
    if deg != len(vectors):
        raise ValueError(f"form of degree {deg} evaluated on {len(vectors)} vectors")
    out = a
    for v in vectors:
        out = contract(v, out)
    return out.coeff()


# ``eval`` is reserved by Python; alias for readability at call sites
eval_form = evaluate


def restrict(a: Form, drop: int) -> Form:
    """Pull back to the hyperplane ``e^drop = 0`` with indices renumbered.

    The basis vector ``e_drop`` is removed and later indices shift down.
    """
    terms = {}
    for idx, c in a._terms.items():
        if drop in idx:
            continue
        terms[tuple(i - 1 if i > drop else i for i in idx)] = c
    return Form(a.dim - 1, terms)


def linear_substitution(a: Form, images: Sequence[Form]) -> Form:
    """Replace each ``e^i`` by the 1-form ``images[i-1]`` and expand.

    This is the pullback of ``a`` under the linear map whose transpose sends
    ``e^i`` to ``images[i-1]``.
    """
    if len(images) != a.dim:
        raise ValueError("need one image per basis covector")
    dim = images[0].dim if images else a.dim
    out = Form(dim)
    for idx, c in a._terms.items():
        if not idx:
            out = out + Form.scalar(dim, c)
            continue
        term = images[idx[0] - 1]
        for i in idx[1:]:
            term = wedge(term, images[i - 1])
        out = out + c * term
    return out


def basis_indices(dim: int, k: int):
    return list(combinations(range(1, dim + 1), k))


def coefficient_rows(forms: Sequence[Form]) -> Tuple[list, list]:
    """Coefficient matrix of forms over the union of their monomials."""
    keys = sorted({k for f in forms for k in f._terms}, key=lambda k: (len(k), k))
    rows = [[f._terms.get(k, Fraction(0)) for k in keys] for f in forms]
    return rows, keys


def _all_exact(rows) -> bool:
    for row in rows:
        for x in row:
            x = value_of(x)
            if isinstance(x, float):
                return False
    return True


def span_rank(forms: Sequence[Form], threshold: float = 1e-8, exact: Optional[bool] = None):
    """Dimension of the span of ``forms``.

    Exact rational (or radical) coefficients give an exact rank.  Floats
    use elimination with complete pivoting, dropping pivots at or below
    ``threshold`` relative to the largest entry; for them the returned value
    is a :class:`FloatRank` carrying the pivot profile.  Jet coefficients
    contribute their values.
    """
    rows, _ = coefficient_rows(forms)
    rows = [[value_of(x) for x in r] for r in rows]
    if not rows or not rows[0]:
        return 0 if exact is not False else FloatRank(0, (), threshold)
    if exact is None:
        exact = _all_exact(rows)
    if exact:
        return rank_exact(rows)
    return float_rank([[to_float(x) for x in r] for r in rows], threshold)


def rank_value(r) -> int:
    return r.rank if isinstance(r, FloatRank) else int(r)
