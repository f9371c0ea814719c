"""Small dense linear algebra over exact scalars and floats.

Matrices are lists of row lists.  Exact routines work over ``Fraction`` and
over :class:`~holonomy_lab.scalars.Poly` as long as every pivot they pick is
invertible; they fail loudly otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .scalars import Poly, is_zero


class SingularMatrixError(ValueError):
    pass


def _inv(x):
    if isinstance(x, Poly):
        return x.inverse()
    if isinstance(x, int):
        return Fraction(1, x)
    return 1 / x


def _pivot_rank(x) -> int:
    # prefer rationals, then monomials
    if isinstance(x, Poly):
        if x.is_constant():
            return 0
        return 1 if len(x.terms) == 1 else 2
    return 0


def rref(rows: Sequence[Sequence]) -> tuple:
    """Reduced row echelon form; returns ``(matrix, pivot_columns)``."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        cands = [i for i in range(r, len(m)) if not is_zero(m[i][c])]
        if not cands:
            continue
        cands.sort(key=lambda i: _pivot_rank(m[i][c]))
        inv = None
        for i in cands:
            try:
                inv = _inv(m[i][c])
            except ValueError:
                continue
            m[r], m[i] = m[i], m[r]
            break
        if inv is None:
            raise ValueError(f"no invertible pivot in column {c}")
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and not is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank_exact(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def inverse_exact(mat: Sequence[Sequence]) -> List[list]:
    n = len(mat)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in red[:n]]


def solve_exact(mat: Sequence[Sequence], rhs: Sequence) -> list:
    """Unique solution of ``mat @ x = rhs`` for square invertible ``mat``."""
    n = len(mat)
    aug = [list(row) + [rhs[i]] for i, row in enumerate(mat)]
    red, piv = rref(aug)
    if piv != list(range(n)):
        raise SingularMatrixError("system is singular or inconsistent")
    return [red[i][n] for i in range(n)]


def nullspace_exact(rows: Sequence[Sequence], ncols: int) -> List[list]:
    """Basis of ``{x : rows @ x = 0}``."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(piv):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> List[list]:
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0))
             for j in range(len(b[0]))] for i in range(len(a))]


def identity(n: int) -> List[list]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(a: Sequence[Sequence]) -> List[list]:
    return [list(col) for col in zip(*a)]


@dataclass(frozen=True)
class FloatRank:
    """Numerical rank with the pivot profile that decided it."""

    rank: int
    pivots: tuple
    threshold: float

    @property
    def gap(self) -> Optional[float]:
        """Ratio of the last kept pivot to the first dropped one."""
        if self.rank == 0 or self.rank >= len(self.pivots):
            return None
        nxt = self.pivots[self.rank]
        return float("inf") if nxt == 0 else self.pivots[self.rank - 1] / nxt


def float_rank(rows: Sequence[Sequence[float]], rel_tol: float = 1e-8) -> FloatRank:
    """Rank by Gaussian elimination with complete pivoting.

    A pivot counts when it exceeds ``rel_tol`` times the largest entry of
    the input.
    """
    m = [[float(x) for x in r] for r in rows]
    if not m or not m[0]:
        return FloatRank(0, (), rel_tol)
    nr, nc = len(m), len(m[0])
    scale = max((abs(x) for r in m for x in r), default=0.0)
    pivots = []
    if scale == 0.0:
        return FloatRank(0, (), rel_tol)
    rank = 0
    for k in range(min(nr, nc)):
        best, bi, bj = 0.0, -1, -1
        for i in range(k, nr):
            row = m[i]
            for j in range(k, nc):
                if abs(row[j]) > best:
                    best, bi, bj = abs(row[j]), i, j
        pivots.append(best / scale)
        if best <= rel_tol * scale:
            # record the remaining profile for diagnostics only
            break
        rank += 1
        m[k], m[bi] = m[bi], m[k]
        for r in m:
            r[k], r[bj] = r[bj], r[k]
        p = m[k][k]
        for i in range(k + 1, nr):
            f = m[i][k] / p
            if f:
                ri, rk = m[i], m[k]
                for j in range(k, nc):
                    ri[j] -= f * rk[j]
    return FloatRank(rank, tuple(pivots), rel_tol)
