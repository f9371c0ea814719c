"""Left-invariant Riemannian geometry on metric Lie algebras.

Conventions:

* ``[E_i, E_j] = sum_k c^k_ij E_k`` with ``c^k_ij = -de^k(E_i, E_j)``;
* ``gamma[i][j][k]`` is the ``E_k`` component of ``nabla_{E_i} E_j``;
* ``R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``;
* ``Ric(Y, Z) = trace(X -> R(X, Y)Z)``, which is positive on the centre of
  the Heisenberg algebra.

Indices are 0-based in arrays and 1-based in forms.  Connections may also
carry a *time direction*: a frame index along which coefficient jets are
differentiated, so that the same code handles frames on ``G x I``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .exterior import Form, Vector
from .liealg import LieAlgebra
from .linalg import identity, inverse_exact
from .scalars import Jet2, is_zero

ZERO = Fraction(0)


class Metric:
    """Gram matrix on the dual basis of the coframe (identity by default)."""

    def __init__(self, gram: Optional[Sequence[Sequence]] = None, dim: Optional[int] = None):
        if gram is None:
            if dim is None:
                raise ValueError("give a Gram matrix or a dimension")
            gram = identity(dim)
        self.gram = tuple(tuple(r) for r in gram)
        n = len(self.gram)
        for i in range(n):
            if len(self.gram[i]) != n:
                raise ValueError("Gram matrix must be square")
            for j in range(i):
                if not is_zero(self.gram[i][j] - self.gram[j][i]):
                    raise ValueError("Gram matrix must be symmetric")
        self.dim = n
        self._inv = None

    @classmethod
    def orthonormal(cls, dim: int) -> "Metric":
        return cls(dim=dim)

    @property
    def is_identity(self) -> bool:
        return all(is_zero(self.gram[i][j] - int(i == j))
                   for i in range(self.dim) for j in range(self.dim))

    def inverse(self):
        if self._inv is None:
            self._inv = inverse_exact(self.gram)
        return self._inv

    def inner(self, x: Sequence, y: Sequence):
        return sum((x[i] * self.gram[i][j] * y[j]
                    for i in range(self.dim) for j in range(self.dim)), ZERO)


def bracket_constants(g: LieAlgebra) -> List[List[List]]:
    """``c[k][i][j]`` (0-based) of the algebra."""
    n = g.dim
    c = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
    for k in range(n):
        for (i, j), v in g.differentials[k].terms.items():
            c[k][i - 1][j - 1] = -v
            c[k][j - 1][i - 1] = v
    return c


@dataclass(frozen=True)
class ConnectionCoeffs:
    """Levi-Civita coefficients with the bracket data they came from."""

    gamma: Tuple
    brackets: Tuple
    gram: Tuple
    time_index: Optional[int] = None

    @property
    def dim(self) -> int:
        return len(self.gamma)

    def derivation(self, a: int, phi):
        """``E_a(phi)`` for a frame-index ``a`` and a coefficient ``phi``."""
        if self.time_index is None or a != self.time_index:
            return ZERO
        if isinstance(phi, Jet2):
            return phi.derivative()
        return ZERO


def koszul(brackets, gram=None, time_index: Optional[int] = None) -> ConnectionCoeffs:
    """Levi-Civita connection from bracket constants ``c[k][i][j]``.

    For non-constant frames the Koszul formula keeps the same form as long
    as the metric coefficients in the frame are constant, which holds for
    orthonormal frames.
    """
    n = len(brackets)
    G = gram if gram is not None else identity(n)
    Ginv = identity(n) if gram is None else inverse_exact(G)

    def ip(k_vec, z):
        # <sum_k v_k E_k, E_z>
        return sum((k_vec[k] * G[k][z] for k in range(n) if not is_zero(G[k][z])), ZERO)

    def br(i, j):
        return [brackets[k][i][j] for k in range(n)]

    low = [[[None] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            bij = br(i, j)
            for k in range(n):
                val = ip(bij, k) - ip(br(j, k), i) + ip(br(k, i), j)
                low[i][j][k] = val * Fraction(1, 2)
    gamma = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for l in range(n):
                acc = ZERO
                for k in range(n):
                    if not is_zero(Ginv[l][k]):
                        acc = acc + Ginv[l][k] * low[i][j][k]
                gamma[i][j][l] = acc
    freeze = lambda a: tuple(tuple(tuple(z) for z in y) for y in a)  # noqa: E731
    return ConnectionCoeffs(freeze(gamma), freeze(brackets), tuple(tuple(r) for r in G), time_index)


def levi_civita(g: LieAlgebra, m: Optional[Metric] = None) -> ConnectionCoeffs:
    m = m or Metric.orthonormal(g.dim)
    if m.dim != g.dim:
        raise ValueError("metric and algebra dimensions differ")
    return koszul(bracket_constants(g), None if m.is_identity else m.gram)


def torsion_residual(conn: ConnectionCoeffs):
    """Largest violation list of ``gamma^k_ij - gamma^k_ji = c^k_ij``."""
    n = conn.dim
    bad = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                r = conn.gamma[i][j][k] - conn.gamma[j][i][k] - conn.brackets[k][i][j]
                if not is_zero(r):
                    bad.append((i + 1, j + 1, k + 1))
    return bad


def metric_residual(conn: ConnectionCoeffs):
    """Violations of ``<nabla_i E_j, E_k> + <E_j, nabla_i E_k> = 0``."""
    n = conn.dim
    G = conn.gram
    bad = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                a = sum((conn.gamma[i][j][l] * G[l][k] for l in range(n)), ZERO)
                b = sum((conn.gamma[i][k][l] * G[j][l] for l in range(n)), ZERO)
                if not is_zero(a + b):
                    bad.append((i + 1, j + 1, k + 1))
    return bad


def riemann_tensor(conn: ConnectionCoeffs):
    """``R[a][b][c][d]``: the ``E_d`` component of ``R(E_a, E_b)E_c``."""
    n = conn.dim
    G, C = conn.gamma, conn.brackets
    R = [[[[ZERO] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            if b < a:
                for c in range(n):
                    R[a][b][c] = [-x for x in R[b][a][c]]
                continue
            for c in range(n):
                row = []
                for d in range(n):
                    v = conn.derivation(a, G[b][c][d]) - conn.derivation(b, G[a][c][d])
                    for k in range(n):
                        gbck, gack = G[b][c][k], G[a][c][k]
                        if not is_zero(gbck):
                            v = v + gbck * G[a][k][d]
                        if not is_zero(gack):
                            v = v - gack * G[b][k][d]
                        cab = C[k][a][b]
                        if not is_zero(cab):
                            v = v - cab * G[k][c][d]
                    row.append(v)
                R[a][b][c] = row
    return R


@dataclass(frozen=True)
class RicciReport:
    ricci: Tuple
    scalar: object
    eta_einstein: Optional[Tuple] = None

    def diagonal(self):
        return tuple(self.ricci[i][i] for i in range(len(self.ricci)))

    def is_diagonal(self) -> bool:
        n = len(self.ricci)
        return all(is_zero(self.ricci[i][j]) for i in range(n) for j in range(n) if i != j)


def ricci_from_riemann(R, gram=None) -> Tuple[Tuple, object]:
    n = len(R)
    ric = [[sum((R[i][b][c][i] for i in range(n)), ZERO) for c in range(n)] for b in range(n)]
    Ginv = identity(n) if gram is None else inverse_exact(gram)
    s = sum((Ginv[b][c] * ric[b][c] for b in range(n) for c in range(n)
             if not is_zero(Ginv[b][c])), ZERO)
    return tuple(tuple(r) for r in ric), s


def ricci(g: LieAlgebra, m: Optional[Metric] = None, eta: Optional[Form] = None) -> RicciReport:
    """Ricci tensor and scalar curvature; fits an eta-Einstein pair if ``eta`` is given."""
    m = m or Metric.orthonormal(g.dim)
    conn = levi_civita(g, m)
    ric, s = ricci_from_riemann(riemann_tensor(conn), None if m.is_identity else m.gram)
    rep = RicciReport(ric, s)
    if eta is not None:
        rep = RicciReport(ric, s, eta_einstein_fit(rep, m, eta))
    return rep


def eta_einstein_fit(rep: RicciReport, m: Metric, eta: Form):
    """Constants ``(tau, nu)`` with ``Ric = tau g + nu eta (x) eta``, or ``None``."""
    n = m.dim
    e = [eta.coeff(i + 1) for i in range(n)]
    entries = [(m.gram[i][j], e[i] * e[j], rep.ricci[i][j])
               for i in range(n) for j in range(i, n)]
    tau = next((r / g for g, h, r in entries if is_zero(h) and not is_zero(g)), None)
    if tau is None:
        return None
    nu = next(((r - tau * g) / h for g, h, r in entries if not is_zero(h)), None)
    if nu is None:
        return None
    for g, h, r in entries:
        if not is_zero(r - tau * g - nu * h):
            return None
    return tau, nu


@dataclass(frozen=True)
class KContactResult:
    failures: Tuple[Tuple[int, int], ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.passed


def k_contact_check(g: LieAlgebra, m: Optional[Metric] = None, reeb_index: int = 5) -> KContactResult:
    """``de^j(e_i, e_r) + de^i(e_j, e_r) = 0`` for all pairs, ``r`` the Reeb index."""
    if m is not None and not m.is_identity:
        raise ValueError("the Killing criterion is stated for orthonormal coframes")
    n = g.dim
    fails = []
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            v = g.de(j).coeff(i, reeb_index) + g.de(i).coeff(j, reeb_index)
            if not is_zero(v):
                fails.append((i, j))
    return KContactResult(tuple(fails))


# independent curvature by composing covariant derivatives


def _nabla(conn: ConnectionCoeffs, X: Sequence, V: Sequence) -> List:
    n = conn.dim
    out = []
    for c in range(n):
        acc = ZERO
        for a in range(n):
            xa = X[a]
            if is_zero(xa):
                continue
            term = conn.derivation(a, V[c])
            for j in range(n):
                if not is_zero(V[j]):
                    term = term + V[j] * conn.gamma[a][j][c]
            acc = acc + xa * term
        out.append(acc)
    return out


def _bracket_fields(conn: ConnectionCoeffs, X: Sequence, Y: Sequence) -> List:
    n = conn.dim
    out = []
    for k in range(n):
        acc = ZERO
        for a in range(n):
            for b in range(n):
                if not is_zero(X[a]) and not is_zero(Y[b]):
                    acc = acc + X[a] * Y[b] * conn.brackets[k][a][b]
        for a in range(n):
            if not is_zero(X[a]):
                acc = acc + X[a] * conn.derivation(a, Y[k])
            if not is_zero(Y[a]):
                acc = acc - Y[a] * conn.derivation(a, X[k])
        out.append(acc)
    return out


def riemann_oracle(g, m: Optional[Metric], X: Vector, Y: Vector, Z: Vector) -> Vector:
    """``R(X, Y)Z`` by literally composing covariant derivatives.

    ``g`` is a :class:`LieAlgebra` or a ready :class:`ConnectionCoeffs`.
    """
    conn = g if isinstance(g, ConnectionCoeffs) else levi_civita(g, m)
    x, y, z = X.components, Y.components, Z.components
    a = _nabla(conn, x, _nabla(conn, y, z))
    b = _nabla(conn, y, _nabla(conn, x, z))
    c = _nabla(conn, _bracket_fields(conn, x, y), z)
    return Vector([p - q - r for p, q, r in zip(a, b, c)])
