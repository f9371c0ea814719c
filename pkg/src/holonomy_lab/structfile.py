"""Line-oriented text format for structure equations and structures.

Example::

    # the first family
    dim 5
    param r
    d e2 = (r) e12
    d e3 = (r) e13
    d e4 = (-r) e14 + (-3*r^2) e15 + (2*r) e23
    d e5 = -2 e14 - 2 e23
    form eta = e5
    form omega1 = e12 + e34

Keywords: ``dim N`` (once, first), ``param NAME [= RATIONAL]``,
``d eK = TERMS`` and ``form NAME = TERMS``.  A term is an optional sign,
an optional coefficient (a rational literal or a parenthesised polynomial)
and a monomial ``e`` followed by one digit per index, or ``0``.
Missing differentials are zero.  Form names: ``eta``, ``omega1..3``,
``F``, ``psi+``, ``psi-``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from .exterior import Form
from .liealg import LieAlgebra
from .scalars import ParseError, Poly, parse_poly, poly_subst
from .structures import SU2Structure, SU3Structure

SU2_NAMES = ("eta", "omega1", "omega2", "omega3")
SU3_NAMES = ("F", "psi+", "psi-")
FORM_NAMES = SU2_NAMES + SU3_NAMES
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*$")


class StructureFileError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0, source: str = ""):
        self.line, self.col, self.source = line, col, source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{col}: {message}")


@dataclass
class StructureFile:
    dim: int
    params: Dict[str, Optional[Fraction]] = field(default_factory=dict)
    d: Dict[int, Form] = field(default_factory=dict)
    forms: Dict[str, Form] = field(default_factory=dict)

    def bindings(self, overrides: Optional[Mapping[str, object]] = None) -> Dict[str, object]:
        b = {k: v for k, v in self.params.items() if v is not None}
        for k, v in (overrides or {}).items():
            if k not in self.params:
                raise KeyError(f"unknown parameter {k!r}")
            b[k] = v
        return b

    def _bind(self, a: Form, bind) -> Form:
        return a.map_coeffs(lambda c: poly_subst(c, bind)) if bind else a

    def algebra(self, overrides: Optional[Mapping[str, object]] = None) -> LieAlgebra:
        bind = self.bindings(overrides)
        diffs = [self._bind(self.d.get(i, Form(self.dim)), bind) for i in range(1, self.dim + 1)]
        return LieAlgebra(diffs)

    def form(self, name: str, overrides=None) -> Form:
        return self._bind(self.forms[name], self.bindings(overrides))

    def su2(self, overrides=None) -> Optional[SU2Structure]:
        if not all(n in self.forms for n in SU2_NAMES):
            return None
        return SU2Structure(*(self.form(n, overrides) for n in SU2_NAMES))

    def su3(self, overrides=None) -> Optional[SU3Structure]:
        if not all(n in self.forms for n in SU3_NAMES):
            return None
        return SU3Structure(*(self.form(n, overrides) for n in SU3_NAMES))


def _split_terms(text: str, base_col: int) -> List[Tuple[int, str, str]]:
    """Split ``TERMS`` into ``(col, sign, body)`` at top-level ``+``/``-``."""
    out = []
    depth = 0
    start = 0
    sign = "+"
    i = 0
    s = text
    # leading sign
    while i < len(s) and s[i].isspace():
        i += 1
    if i < len(s) and s[i] in "+-":
        sign = s[i]
        i += 1
    start = i
    while i < len(s):
        ch = s[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise StructureFileError("unbalanced ')'", 0, base_col + i)
        elif ch in "+-" and depth == 0:
            out.append((base_col + start, sign, s[start:i]))
            sign = ch
            start = i + 1
        i += 1
    if depth != 0:
        raise StructureFileError("unbalanced '('", 0, base_col + len(s))
    out.append((base_col + start, sign, s[start:]))
    return out


_TERM = re.compile(r"\s*(?:(\([^()]*(?:\([^()]*\)[^()]*)*\))|([0-9]+(?:/[0-9]+)?))?\s*\*?\s*(e[0-9]+)?\s*$")


def parse_terms(text: str, dim: int, params, col: int = 1) -> Form:
    """Parse ``TERMS`` into a form; raises :class:`StructureFileError`."""
    if text.strip() == "0":
        return Form(dim)
    acc = Form(dim)
    for tcol, sign, body in _split_terms(text, col):
        if not body.strip():
            raise StructureFileError("empty term", 0, tcol)
        m = _TERM.match(body)
        if not m or (m.group(1) is None and m.group(2) is None and m.group(3) is None):
            raise StructureFileError(f"cannot read term {body.strip()!r}", 0, tcol)
        coef: object = Fraction(1)
        if m.group(1):
            try:
                coef = parse_poly(m.group(1)[1:-1], names=params)
            except ParseError as exc:
                raise StructureFileError(exc.bare, 0, tcol + body.index("(") + exc.col) from None
            if coef.is_constant():
                coef = coef.constant_value()
        elif m.group(2):
            coef = Fraction(m.group(2))
        idx: Tuple[int, ...] = ()
        if m.group(3):
            digits = m.group(3)[1:]
            idx = tuple(int(ch) for ch in digits)
            pos = tcol + body.index(m.group(3))
            if any(not 1 <= i <= dim for i in idx):
                raise StructureFileError(f"index out of range 1..{dim} in {m.group(3)}", 0, pos)
            if len(set(idx)) != len(idx):
                raise StructureFileError(f"repeated index in {m.group(3)}", 0, pos)
        elif not (m.group(1) or m.group(2)):
            raise StructureFileError("missing monomial", 0, tcol)
        if sign == "-":
            coef = -coef
        acc = acc + Form(dim, {idx: coef})
    return acc


def loads(text: str, source: str = "") -> StructureFile:
    dim = None
    sf: Optional[StructureFile] = None
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col0 = len(line) - len(line.lstrip()) + 1
        words = line.split()
        key = words[0]
        try:
            if key == "dim":
                if sf is not None:
                    raise StructureFileError("dim given twice", ln, col0)
                if len(words) != 2 or not words[1].isdigit() or int(words[1]) < 1:
                    raise StructureFileError("expected 'dim N' with N >= 1", ln, col0)
                dim = int(words[1])
                sf = StructureFile(dim)
                continue
            if sf is None:
                raise StructureFileError("'dim N' must come first", ln, col0)
            if key == "param":
                rest = line.strip()[len("param"):].strip()
                name, _, val = rest.partition("=")
                name = name.strip()
                if not _IDENT.match(name):
                    raise StructureFileError(f"bad parameter name {name!r}", ln, col0 + 6)
                if name in sf.params:
                    raise StructureFileError(f"parameter {name} given twice", ln, col0 + 6)
                if val.strip():
                    try:
                        sf.params[name] = Fraction(val.strip())
                    except (ValueError, ZeroDivisionError):
                        raise StructureFileError(f"bad rational {val.strip()!r}", ln,
                                                 line.index("=") + 2) from None
                else:
                    sf.params[name] = None
                continue
            if key in ("d", "form"):
                if "=" not in line:
                    raise StructureFileError("expected '='", ln, len(line) + 1)
                lhs, rhs = line.split("=", 1)
                target = lhs.split()[1:] if len(lhs.split()) > 1 else []
                if len(target) != 1:
                    raise StructureFileError(f"expected '{key} NAME = ...'", ln, col0)
                name = target[0]
                rcol = len(lhs) + 2
                try:
                    f = parse_terms(rhs, dim, list(sf.params), rcol)
                except StructureFileError as exc:
                    raise StructureFileError(str(exc).split(": ", 1)[-1], ln, exc.col) from None
                if key == "d":
                    m = re.fullmatch(r"e([0-9]+)", name)
                    if not m or not 1 <= int(m.group(1)) <= dim:
                        raise StructureFileError(f"bad coframe name {name!r}", ln, line.index(name) + 1)
                    k = int(m.group(1))
                    if k in sf.d:
                        raise StructureFileError(f"d {name} given twice", ln, col0)
                    if not f.is_zero() and f.degree != 2:
                        first = rcol + len(rhs) - len(rhs.lstrip())
                        raise StructureFileError("a differential must be a 2-form", ln, first)
                    sf.d[k] = f
                else:
                    if name not in FORM_NAMES:
                        raise StructureFileError(f"unknown form {name!r}; expected one of "
                                                 f"{', '.join(FORM_NAMES)}", ln, line.index(name) + 1)
                    if name in sf.forms:
                        raise StructureFileError(f"form {name} given twice", ln, col0)
                    sf.forms[name] = f
                continue
            raise StructureFileError(f"unknown keyword {key!r}", ln, col0)
        except StructureFileError as exc:
            if exc.line == 0:
                raise StructureFileError(str(exc).split(": ", 1)[-1], ln, exc.col, source) from None
            if source and not exc.source:
                raise StructureFileError(str(exc).split(": ", 1)[-1], exc.line, exc.col, source) from None
            raise
    if sf is None:
        raise StructureFileError("empty file: 'dim N' missing", 1, 1, source)
    return sf


def load(path: str) -> StructureFile:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), source=str(path))


def _coef_text(c) -> str:
    if isinstance(c, Poly):
        if c.is_constant():
            c = c.constant_value()
        else:
            return f"({c})"
    c = Fraction(c)
    return str(abs(c))


def _sign(c) -> str:
    if isinstance(c, Poly):
        if not c.is_constant():
            return "+"
        c = c.constant_value()
    return "-" if c < 0 else "+"


def format_terms(a: Form) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for idx, c in a.items():
        s = _sign(c)
        body = _coef_text(c)
        mono = "e" + "".join(str(i) for i in idx) if idx else ""
        if mono and body == "1":
            body = ""
        text = f"{body} {mono}".strip()
        parts.append((s, text))
    first_s, first_t = parts[0]
    out = ("-" if first_s == "-" else "") + first_t
    for s, t in parts[1:]:
        out += f" {s} {t}"
    return out


def dumps(sf: StructureFile, header: str = "") -> str:
    if sf.dim > 9:
        raise ValueError("the text format supports dimensions up to 9")
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    lines.append(f"dim {sf.dim}")
    for name, v in sf.params.items():
        lines.append(f"param {name}" + (f" = {v}" if v is not None else ""))
    for i in range(1, sf.dim + 1):
        f = sf.d.get(i, Form(sf.dim))
        if not f.is_zero():
            lines.append(f"d e{i} = {format_terms(f)}")
    for name in FORM_NAMES:
        if name in sf.forms:
            lines.append(f"form {name} = {format_terms(sf.forms[name])}")
    return "\n".join(lines) + "\n"


def from_algebra(g: LieAlgebra, params: Optional[Mapping[str, Optional[Fraction]]] = None,
                 su2: Optional[SU2Structure] = None) -> StructureFile:
    names = sorted(g.parameters())
    p = {n: None for n in names}
    p.update(params or {})
    sf = StructureFile(g.dim, p, {i: g.de(i) for i in range(1, g.dim + 1) if not g.de(i).is_zero()})
    if su2 is not None:
        for n, f in zip(SU2_NAMES, (su2.eta, su2.omega1, su2.omega2, su2.omega3)):
            sf.forms[n] = f
    return sf
