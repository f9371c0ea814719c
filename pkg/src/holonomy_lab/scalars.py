"""Exact and jet-valued scalars.

Three coefficient rings are used throughout the package:

* ``Fraction`` for plain rational numbers,
* :class:`Poly`, Laurent polynomials over the rationals in named parameters,
  extended by square roots of primes (variables called ``sqrt_p``),
* :class:`Jet2`, truncated Taylor data ``(value, d1, d2)`` of a function of
  one real variable, used along one-parameter flows.

Rationals embed into both ``Poly`` and ``Jet2``.  Mixing a ``Poly`` with a
``Jet2`` (or a ``Poly`` with a float) is an error; callers convert
explicitly.
"""

from __future__ import annotations

import math
import numbers
import re
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

Rational = Union[int, Fraction]
Monomial = Tuple[Tuple[str, int], ...]

_RADICAL = re.compile(r"^sqrt_(\d+)$")


class SingularityError(ArithmeticError):
    """Raised when an evaluation leaves the domain of a formula."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def radical_base(name: str) -> Optional[int]:
    """Return ``p`` if ``name`` is ``sqrt_p`` for a prime ``p``."""
    m = _RADICAL.match(name)
    if m is None:
        return None
    p = int(m.group(1))
    if not _is_prime(p):
        raise ValueError(f"radical variable {name!r} must use a prime")
    return p


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    raise TypeError(f"expected a rational number, got {type(x).__name__}")


def _mono_mul(a: Monomial, b: Monomial) -> Tuple[Fraction, Monomial]:
    exps: Dict[str, int] = dict(a)
    for name, e in b:
        exps[name] = exps.get(name, 0) + e
    return _reduce_mono(exps)


def _reduce_mono(exps: Mapping[str, int]) -> Tuple[Fraction, Monomial]:
    coeff = Fraction(1)
    out = []
    for name in sorted(exps):
        e = exps[name]
        p = radical_base(name)
        if p is not None:
            q, e = divmod(e, 2)
            coeff *= Fraction(p) ** q
        if e:
            out.append((name, e))
    return coeff, tuple(out)


class Poly:
    """Laurent polynomial with rational coefficients.

    Variables named ``sqrt_p`` (``p`` prime) satisfy ``sqrt_p**2 == p`` and
    are reduced automatically, so ``Poly.sqrt(2) * Poly.sqrt(2) == 2``.
    Instances are immutable and never store zero coefficients.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Rational]] = None):
        acc: Dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            c = _as_fraction(c)
            if c == 0:
                continue
            k, mono = _reduce_mono(dict(mono))
            acc[mono] = acc.get(mono, Fraction(0)) + k * c
        self._terms = {m: c for m, c in acc.items() if c != 0}

    # construction
    @classmethod
    def const(cls, c: Rational) -> "Poly":
        return cls({(): c})

    @classmethod
    def var(cls, name: str) -> "Poly":
        if not re.match(r"^[A-Za-z][A-Za-z0-9_]*$", name):
            raise ValueError(f"invalid variable name {name!r}")
        return cls({((name, 1),): 1})

    @classmethod
    def sqrt(cls, p: int) -> "Poly":
        """Square root of a prime as a radical variable."""
        if not _is_prime(p):
            raise ValueError("Poly.sqrt expects a prime; use sqrt_rational")
        return cls.var(f"sqrt_{p}")

    @staticmethod
    def lift(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        return Poly.const(_as_fraction(x))

    # inspection
    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(m == () for m in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get((), Fraction(0))

    def variables(self) -> frozenset:
        return frozenset(name for m in self._terms for name, _ in m)

    def parameters(self) -> frozenset:
        """Variables that are not radicals."""
        return frozenset(v for v in self.variables() if radical_base(v) is None)

    # arithmetic
    def _coerce(self, other) -> Optional["Poly"]:
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, Jet2)):
                raise TypeError("cannot mix Poly with float or Jet2")
            return NotImplemented
        terms = dict(self._terms)
        for m, c in o._terms.items():
            terms[m] = terms.get(m, Fraction(0)) + c
        return Poly(terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, Jet2)):
                raise TypeError("cannot mix Poly with float or Jet2")
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, Jet2)):
                raise TypeError("cannot mix Poly with float or Jet2")
            return NotImplemented
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in o._terms.items():
                k, m = _mono_mul(m1, m2)
                terms[m] = terms.get(m, Fraction(0)) + k * c1 * c2
        return Poly(terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, Jet2)):
                raise TypeError("cannot mix Poly with float or Jet2")
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("Poly powers must be integers")
        if n < 0:
            return self.inverse() ** (-n)
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "Poly":
        """Multiplicative inverse.

        Monomials are always invertible.  Otherwise radicals are removed by
        multiplying with conjugates; what remains must be a monomial.
        """
        if not self._terms:
            raise ZeroDivisionError("inverse of zero polynomial")
        if len(self._terms) == 1:
            (m, c), = self._terms.items()
            return Poly({tuple((n, -e) for n, e in m): 1 / c})
        rad = sorted(v for v in self.variables() if radical_base(v) is not None)
        if not rad:
            raise ValueError(f"{self} is not invertible in the Laurent ring")
        s = rad[0]
        p = radical_base(s)
        a_terms: Dict[Monomial, Fraction] = {}
        b_terms: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            d = dict(m)
            if d.pop(s, 0):
                b_terms[tuple(sorted(d.items()))] = c
            else:
                a_terms[m] = c
        a, b = Poly(a_terms), Poly(b_terms)
        sv = Poly.var(s)
        norm = a * a - b * b * p
        return (a - b * sv) * norm.inverse()

    # comparison
    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant_value())
        return hash(frozenset(self._terms.items()))

    def __bool__(self):
        return bool(self._terms)

    # evaluation
    def subst(self, bindings: Mapping[str, object]):
        """Substitute values for variables.

        Values may be rationals, floats or other polynomials.  The result is
        a ``Fraction`` (or float) when no variables remain, else a ``Poly``.
        """
        total = None
        for m, c in self._terms.items():
            term = c
            rest = []
            for name, e in m:
                if name in bindings:
                    v = bindings[name]
                    if isinstance(v, Poly):
                        term = v ** e * term
                    elif isinstance(v, float):
                        term = float(term) * v ** e
                    else:
                        v = _as_fraction(v)
                        if v == 0 and e < 0:
                            raise ZeroDivisionError(f"{name}=0 in negative power")
                        term = term * v ** e
                else:
                    rest.append((name, e))
            if rest:
                if isinstance(term, float):
                    raise TypeError("partial float substitution is not supported")
                term = Poly({tuple(rest): 1}) * term
            total = term if total is None else total + term
        if total is None:
            return Fraction(0)
        if isinstance(total, Poly) and total.is_constant():
            return total.constant_value()
        return total

    def evalf(self, bindings: Optional[Mapping[str, float]] = None) -> float:
        """Float value; radicals evaluate to their real roots."""
        env = dict(bindings or {})
        for v in self.variables():
            p = radical_base(v)
            if p is not None:
                env.setdefault(v, math.sqrt(p))
        val = self.subst({k: float(x) for k, x in env.items()})
        if isinstance(val, Poly):
            raise ValueError(f"unbound variables in {self}: {sorted(val.variables())}")
        return float(val)

    def specialize(self, bindings: Mapping[str, Rational]) -> "Poly":
        out = self.subst(bindings)
        return Poly.lift(out) if not isinstance(out, Poly) else out

    # printing
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


def _fmt_mono(m: Monomial) -> str:
    parts = []
    for name, e in m:
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def _mono_key(m: Monomial):
    return (-sum(abs(e) for _, e in m), m)


def format_poly(p: Poly) -> str:
    """Deterministic text form that :func:`parse_poly` reads back."""
    if not p._terms:
        return "0"
    out = []
    for m in sorted(p._terms, key=_mono_key):
        c = p._terms[m]
        sign = "-" if c < 0 else "+"
        c = abs(c)
        mono = _fmt_mono(m)
        if not mono:
            body = str(c)
        elif c == 1:
            body = mono
        else:
            body = f"{c}*{mono}"
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


class ParseError(ValueError):
    """Malformed text input; ``col`` is 1-based within the parsed string."""

    def __init__(self, message: str, col: int = 0):
        super().__init__(message if not col else f"col {col}: {message}")
        self.col = col
        self.bare = message


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else pos
        if m.group(1) is not None:
            toks.append(("num", m.group(1), start + 1))
        elif m.group(2) is not None:
            toks.append(("id", m.group(2), start + 1))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start + 1)
            toks.append(("op", ch, start + 1))
        pos = m.end()
    toks.append(("end", "", len(text) + 1))
    return toks


class _PolyParser:
    def __init__(self, text: str, names: Optional[Iterable[str]]):
        self.toks = _tokenize(text)
        self.i = 0
        self.names = None if names is None else set(names)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            raise ParseError(f"expected {value!r}", t[2])
        return t

    def parse(self) -> Poly:
        p = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected {t[1]!r}", t[2])
        return p

    def expr(self) -> Poly:
        t = self.peek()
        neg = False
        if t[1] in "+-" and t[0] == "op":
            self.take()
            neg = t[1] == "-"
        p = self.term()
        if neg:
            p = -p
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                q = self.term()
                p = p + q if t[1] == "+" else p - q
            else:
                return p

    def term(self) -> Poly:
        p = self.power()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "*/":
                self.take()
                q = self.power()
                if t[1] == "*":
                    p = p * q
                else:
                    try:
                        p = p / q
                    except (ValueError, ZeroDivisionError) as exc:
                        raise ParseError(str(exc), t[2]) from None
            else:
                return p

    def power(self) -> Poly:
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            sign = 1
            t2 = self.peek()
            if t2[0] == "op" and t2[1] in "+-":
                self.take()
                sign = -1 if t2[1] == "-" else 1
            n = self.take()
            if n[0] != "num":
                raise ParseError("exponent must be an integer", n[2])
            try:
                return base ** (sign * int(n[1]))
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(str(exc), n[2]) from None
        return base

    def atom(self) -> Poly:
        t = self.take()
        if t[0] == "num":
            return Poly.const(int(t[1]))
        if t[0] == "id":
            name = t[1]
            try:
                base = radical_base(name)
            except ValueError as exc:
                raise ParseError(str(exc), t[2]) from None
            if base is None and self.names is not None and name not in self.names:
                raise ParseError(f"unknown parameter {name!r}", t[2])
            return Poly.var(name)
        if t[1] == "(":
            p = self.expr()
            self.expect(")")
            return p
        raise ParseError(f"unexpected {t[1]!r}" if t[1] else "unexpected end", t[2])


def parse_poly(text: str, names: Optional[Iterable[str]] = None) -> Poly:
    """Parse ``"3*r^2 - 1/2*a*b + sqrt_2"``.

    When ``names`` is given, any other non-radical identifier is rejected.
    """
    return _PolyParser(text, names).parse()


def poly_subst(p, bindings: Mapping[str, object]):
    """Substitute into a scalar, passing non-polynomials through."""
    if isinstance(p, Poly):
        return p.subst(bindings)
    return p


def sqrt_rational(q: Rational):
    """Exact square root of a non-negative rational.

    Returns a ``Fraction`` for perfect squares and a radical ``Poly``
    otherwise.
    """
    q = _as_fraction(q)
    if q < 0:
        raise ValueError("square root of a negative rational")
    if q == 0:
        return Fraction(0)
    n = q.numerator * q.denominator
    out = Fraction(1, q.denominator)
    rest = []
    k = 2
    while k * k <= n:
        e = 0
        while n % k == 0:
            n //= k
            e += 1
        out *= k ** (e // 2)
        if e % 2:
            rest.append(k)
        k += 1
    if n > 1:
        rest.append(n)
    if not rest:
        return out
    p = Poly.const(out)
    for prime in rest:
        p = p * Poly.sqrt(prime)
    return p


def exact_root(x: Fraction, n: int) -> Optional[Fraction]:
    """``x**(1/n)`` when it is rational, else ``None``."""
    if x < 0:
        if n % 2 == 0:
            return None
        r = exact_root(-x, n)
        return None if r is None else -r
    num = _int_root(x.numerator, n)
    den = _int_root(x.denominator, n)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _int_root(m: int, n: int) -> Optional[int]:
    if m < 2:
        return m
    r = round(m ** (1.0 / n))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** n == m:
            return c
    lo, hi = 0, 1
    while hi ** n <= m:
        hi *= 2
    while lo < hi - 1:
        mid = (lo + hi) // 2
        if mid ** n <= m:
            lo = mid
        else:
            hi = mid
    return lo if lo ** n == m else None


# jets


def _is_ring_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, float, Poly)) and not isinstance(x, bool)


def _opt(f, *args):
    return None if any(a is None for a in args) else f(*args)


class Jet2:
    """Second-order jet of a function at a point.

    ``d1`` and ``d2`` may be ``None`` for unknown derivatives; unknowns
    propagate through arithmetic.  Components may be rationals, floats or
    ``Poly`` values.
    """

    __slots__ = ("value", "d1", "d2")

    def __init__(self, value, d1=0, d2=0):
        for c in (value, d1, d2):
            if c is not None and not _is_ring_scalar(c):
                raise TypeError(f"invalid jet component {c!r}")
        if value is None:
            raise ValueError("jet value must be known")
        self.value = value
        self.d1 = d1
        self.d2 = d2

    @classmethod
    def constant(cls, c) -> "Jet2":
        return cls(c, 0, 0)

    @classmethod
    def variable(cls, c) -> "Jet2":
        """The identity function ``t`` at ``t = c``."""
        return cls(c, 1, 0)

    def _coerce(self, other) -> Optional["Jet2"]:
        if isinstance(other, Jet2):
            return other
        if isinstance(other, Poly):
            raise TypeError("cannot mix Jet2 with Poly; lift with Jet2.constant")
        if isinstance(other, (int, Fraction, float)) and not isinstance(other, bool):
            return Jet2(other, 0, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet2(self.value + o.value,
                    _opt(lambda a, b: a + b, self.d1, o.d1),
                    _opt(lambda a, b: a + b, self.d2, o.d2))

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, _opt(lambda a: -a, self.d1), _opt(lambda a: -a, self.d2))

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self, o
        d1 = _opt(lambda x1, y1: x1 * b.value + a.value * y1, a.d1, b.d1)
        d2 = _opt(lambda x1, y1, x2, y2: x2 * b.value + 2 * x1 * y1 + a.value * y2,
                  a.d1, b.d1, a.d2, b.d2)
        # a zero factor kills unknown derivative data of the other
        if _exact_zero_jet(a) or _exact_zero_jet(b):
            return Jet2(a.value * b.value, 0, 0)
        return Jet2(a.value * b.value, d1, d2)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        v = self.value
        if _scalar_is_zero(v):
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        inv = 1 / v if not isinstance(v, int) else Fraction(1, v)
        d1 = _opt(lambda x1: -x1 * inv * inv, self.d1)
        d2 = _opt(lambda x1, x2: (2 * x1 * x1 * inv - x2) * inv * inv, self.d1, self.d2)
        return Jet2(inv, d1, d2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, n):
        if isinstance(n, int) and not isinstance(n, bool):
            if n < 0:
                return self.reciprocal() ** (-n)
            out = Jet2(1, 0, 0)
            for _ in range(n):
                out = out * self
            return out
        return jet_pow(self, n)

    def derivative(self) -> "Jet2":
        """Shift down one order; the top slot becomes unknown."""
        if self.d1 is None:
            raise ValueError("derivative of a jet with unknown first derivative")
        return Jet2(self.d1, self.d2, None)

    def map(self, fn) -> "Jet2":
        return Jet2(fn(self.value), _opt(fn, self.d1), _opt(fn, self.d2))

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, Poly) else None
        if o is None:
            return NotImplemented
        return (self.value, self.d1, self.d2) == (o.value, o.d1, o.d2)

    def __hash__(self):
        return hash((self.value, self.d1, self.d2))

    def __repr__(self):
        return f"Jet2({self.value!r}, {self.d1!r}, {self.d2!r})"


def _scalar_is_zero(x) -> bool:
    if isinstance(x, Poly):
        return x.is_zero()
    return x == 0


def _exact_zero_jet(j: Jet2) -> bool:
    return all(c is not None and _scalar_is_zero(c) for c in (j.value, j.d1, j.d2))


def is_zero(x) -> bool:
    """Exact zero test for any supported scalar."""
    if isinstance(x, Jet2):
        return _scalar_is_zero(x.value) and all(
            c is None or _scalar_is_zero(c) for c in (x.d1, x.d2))
    return _scalar_is_zero(x)


def _real_power(x, p: Fraction):
    """``x**p`` for a rational or float base, exact when possible."""
    if isinstance(x, Poly):
        if x.is_constant():
            x = x.constant_value()
        else:
            raise TypeError("fractional power of a non-constant Poly")
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        if p.denominator == 1:
            return x ** p.numerator
        root = exact_root(x, p.denominator)
        if root is not None:
            return root ** p.numerator
        if x < 0:
            raise SingularityError("fractional power of a negative number")
        return float(x) ** float(p)
    if x < 0 and p.denominator % 2 == 0:
        raise SingularityError("fractional power of a negative number")
    if x < 0:
        return -((-x) ** float(p))
    return x ** float(p)


def jet_pow(j, p) -> object:
    """``j**p`` for a rational exponent.

    Works on jets and plain scalars.  The result stays exact when the value
    is a perfect power of a rational; otherwise it is a float.
    """
    p = Fraction(p)
    if not isinstance(j, Jet2):
        return _real_power(j, p)
    v = j.value
    if _scalar_is_zero(v) and p < 2:
        raise SingularityError("non-smooth power at zero")
    vp = _real_power(v, p)
    vp1 = _real_power(v, p - 1) if p != 1 else 1
    vp2 = _real_power(v, p - 2) if p != 2 else 1
    if isinstance(vp, float) or isinstance(vp1, float) or isinstance(vp2, float):
        vp, vp1, vp2 = float(vp), float(vp1), float(vp2)
        pp = float(p)
    else:
        pp = p
    d1 = _opt(lambda x1: pp * vp1 * x1, j.d1)
    d2 = _opt(lambda x1, x2: pp * (pp - 1) * vp2 * x1 * x1 + pp * vp1 * x2, j.d1, j.d2)
    return Jet2(vp, d1, d2)


def to_float(x):
    """Float image of a scalar, mapping over jet components."""
    if isinstance(x, Jet2):
        return x.map(to_float)
    if isinstance(x, Poly):
        return x.evalf()
    if isinstance(x, numbers.Real):
        return float(x)
    raise TypeError(f"cannot convert {type(x).__name__} to float")


def magnitude(x) -> float:
    """Absolute size of a scalar's value, for residual reporting."""
    if isinstance(x, Jet2):
        x = x.value
    return abs(to_float(x))


def value_of(x):
    """The value slot of a jet, or the scalar itself."""
    return x.value if isinstance(x, Jet2) else x


def parse_rational(text: str) -> Fraction:
    """Read ``"3"``, ``"-1/2"`` or ``"0.25"`` as an exact rational."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}") from None
