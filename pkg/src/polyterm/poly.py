"""Exact multivariate polynomials over the rationals.

Variables are identified by name.  Monomials are stored as sorted tuples of
``(name, exponent)`` pairs and a polynomial keeps its terms in graded
lexicographic order (highest total degree first), which makes the printed
form and equality canonical.

Example:
    >>> p = parse("x1^3 + 2*x1 + 2")
    >>> str(p)
    'x1^3 + 2*x1 + 2'
    >>> p.evaluate({"x1": 2})
    14
"""

from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "NEG_INF",
    "Polynomial",
    "PolynomialSyntaxError",
    "UnboundVariableError",
    "add",
    "mul",
    "substitute",
    "evaluate",
    "degree",
    "coefficient_of",
    "has_positive_coefficients",
    "scale_vars",
    "sign_split",
    "parse",
    "var",
    "const",
    "sign_vectors",
]

#: Degree of the zero polynomial.
NEG_INF = -math.inf

# Exponents are kept below a machine word so that degree blow-up is reported.
MAX_EXPONENT = 2**63 - 1

Coefficient = Union[int, Fraction]
MonomialKey = tuple  # tuple[tuple[str, int], ...]
PolyLike = Union["Polynomial", int, Fraction]


class UnboundVariableError(KeyError):
    """A polynomial variable has no binding."""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unbound variable {self.name!r}"


class PolynomialSyntaxError(ValueError):
    pass


@lru_cache(maxsize=None)
def var_key(name: str) -> tuple:
    """Natural sort key so that ``x2`` precedes ``x10``."""
    return tuple(
        (0, int(part)) if part.isdigit() else (1, part)
        for part in re.findall(r"\d+|\D+", name)
    )


def _norm(c) -> Coefficient:
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return _norm(Fraction(c.numerator, c.denominator))
    if isinstance(c, str):
        return _norm(Fraction(c))
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


def _check_exp(e: int) -> int:
    if e > MAX_EXPONENT:
        raise OverflowError(f"exponent {e} exceeds {MAX_EXPONENT}")
    return e


def _mono_mul(m1: MonomialKey, m2: MonomialKey) -> MonomialKey:
    if not m1:
        return m2
    if not m2:
        return m1
    exps = dict(m1)
    for v, e in m2:
        exps[v] = _check_exp(exps.get(v, 0) + e)
    return tuple(sorted(exps.items(), key=lambda ve: var_key(ve[0])))


def _mono_degree(m: MonomialKey) -> int:
    return sum(e for _, e in m)


def _grlex_key(m: MonomialKey) -> tuple:
    return (-_mono_degree(m), tuple((var_key(v), -e) for v, e in m))


def _mono_str(m: MonomialKey) -> str:
    parts = []
    for v, e in m:
        name = v if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v) else f"[{v}]"
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def monomial(exponents: Mapping[str, int] | Iterable[tuple[str, int]]) -> MonomialKey:
    """Canonical monomial key from an exponent map; zero exponents are dropped."""
    items = exponents.items() if isinstance(exponents, Mapping) else exponents
    out: dict[str, int] = {}
    for v, e in items:
        if e < 0:
            raise ValueError(f"negative exponent for {v!r}")
        if e:
            out[v] = _check_exp(out.get(v, 0) + int(e))
    return tuple(sorted(out.items(), key=lambda ve: var_key(ve[0])))


def _dict_mul(a: dict, b: dict) -> dict:
    if len(b) == 1 and () in b:
        k = b[()]
        return {m: c * k for m, c in a.items()} if k != 1 else a
    if len(a) == 1 and () in a:
        k = a[()]
        return {m: c * k for m, c in b.items()} if k != 1 else b
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _mono_mul(m1, m2)
            out[m] = out.get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def _dict_pow(a: dict, n: int) -> dict:
    result: dict = {(): 1}
    for _ in range(n):
        result = _dict_mul(result, a)
    return result


class Polynomial:
    """An immutable polynomial with exact rational coefficients."""

    __slots__ = ("_terms", "_hash", "_order")

    def __init__(self, terms: Mapping[MonomialKey, object] | None = None):
        cleaned = {}
        for m, c in (terms or {}).items():
            c = _norm(c)
            if c:
                cleaned[m] = c
        self._terms: dict[MonomialKey, Coefficient] = cleaned
        self._hash = None
        self._order = None

    @classmethod
    def _raw(cls, terms: dict) -> Polynomial:
        # terms already normalised and free of zeros
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        p._order = None
        return p

    def _ordered(self) -> list[tuple[MonomialKey, Coefficient]]:
        if self._order is None:
            self._order = sorted(self._terms.items(), key=lambda mc: _grlex_key(mc[0]))
        return self._order

    @classmethod
    def coerce(cls, value: PolyLike) -> Polynomial:
        if isinstance(value, Polynomial):
            return value
        if isinstance(value, str):
            return parse(value)
        return cls({(): value})

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> list[tuple[MonomialKey, Coefficient]]:
        """Monomials in canonical (graded lexicographic) order."""
        return list(self._ordered())

    def __iter__(self) -> Iterator[tuple[MonomialKey, Coefficient]]:
        return iter(self._ordered())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    @property
    def variables(self) -> tuple[str, ...]:
        seen = {v for m in self._terms for v, _ in m}
        return tuple(sorted(seen, key=var_key))

    @property
    def constant_term(self) -> Coefficient:
        return self._terms.get((), 0)

    def coefficient(self, exponents: Mapping[str, int] | MonomialKey = ()) -> Coefficient:
        key = exponents if isinstance(exponents, tuple) else monomial(exponents)
        return self._terms.get(key, 0)

    def degree(self, variable: str | None = None) -> float | int:
        if not self._terms:
            return NEG_INF
        if variable is None:
            return max(_mono_degree(m) for m in self._terms)
        return max(dict(m).get(variable, 0) for m in self._terms)

    def is_linear(self) -> bool:
        return self.degree() <= 1

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: PolyLike) -> Polynomial:
        other = Polynomial.coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = _norm(s)
            else:
                out.pop(m, None)
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: PolyLike) -> Polynomial:
        return self + (-Polynomial.coerce(other))

    def __rsub__(self, other: PolyLike) -> Polynomial:
        return Polynomial.coerce(other) - self

    def __mul__(self, other: PolyLike) -> Polynomial:
        other = Polynomial.coerce(other)
        out: dict[MonomialKey, Coefficient] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial._raw({m: _norm(c) for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Polynomial:
        if not isinstance(n, int) or n < 0:
            raise ValueError("only natural powers are supported")
        result = Polynomial({(): 1})
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- substitution / evaluation -----------------------------------------

    def substitute(self, bindings: Mapping[str, PolyLike], *, strict: bool = True) -> Polynomial:
        """Simultaneously replace variables by polynomials.

        With ``strict=False`` unbound variables are left in place.
        """
        cache: dict[tuple[str, int], dict] = {}
        bound = {v: Polynomial.coerce(p)._terms for v, p in bindings.items()}
        out: dict[MonomialKey, Coefficient] = {}
        for m, c in self._terms.items():
            term: dict = {(): c}
            rest = []
            for v, e in m:
                if v in bound:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = _dict_pow(bound[v], e)
                    term = _dict_mul(term, cache[key])
                elif strict:
                    raise UnboundVariableError(v)
                else:
                    rest.append((v, e))
            if rest:
                term = _dict_mul(term, {tuple(rest): 1})
            for tm, tc in term.items():
                out[tm] = out.get(tm, 0) + tc
        return Polynomial._raw({m: _norm(c) for m, c in out.items() if c})

    def evaluate(self, point: Mapping[str, object]) -> Coefficient:
        total: Coefficient = 0
        for m, c in self._terms.items():
            for v, e in m:
                try:
                    x = point[v]
                except KeyError:
                    raise UnboundVariableError(v) from None
                c = c * _norm(x) ** e
            total += c
        return _norm(total)

    __call__ = evaluate

    # -- comparison / printing ---------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Polynomial({(): other})._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for i, (m, c) in enumerate(self._ordered()):
            sign = "-" if c < 0 else "+"
            a = -c if c < 0 else c
            if not m:
                body = str(a)
            elif a == 1:
                body = _mono_str(m)
            else:
                body = f"{a}*{_mono_str(m)}"
            if i == 0:
                out.append(body if sign == "+" else f"-{body}")
            else:
                out.append(f" {sign} {body}")
        return "".join(out)

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"

    def __reduce__(self):
        return (Polynomial, (dict(self._terms),))


def var(name: str) -> Polynomial:
    return Polynomial({((name, 1),): 1})


def const(c) -> Polynomial:
    return Polynomial({(): c})


# Functional API ------------------------------------------------------------


def add(p: PolyLike, q: PolyLike) -> Polynomial:
    return Polynomial.coerce(p) + q


def mul(p: PolyLike, q: PolyLike) -> Polynomial:
    return Polynomial.coerce(p) * q


def substitute(p: Polynomial, bindings: Mapping[str, PolyLike], *, strict: bool = True) -> Polynomial:
    return p.substitute(bindings, strict=strict)


def evaluate(p: Polynomial, point: Mapping[str, object]) -> Coefficient:
    return p.evaluate(point)


def degree(p: Polynomial, variable: str | None = None) -> float | int:
    """Total degree (or degree in ``variable``); :data:`NEG_INF` for zero."""
    return p.degree(variable)


def coefficient_of(p: Polynomial, exponents: Mapping[str, int] | MonomialKey) -> Coefficient:
    return p.coefficient(exponents)


def has_positive_coefficients(p: Polynomial) -> bool:
    """True iff every stored coefficient is positive; zero passes vacuously."""
    return all(c > 0 for _, c in p)


def scale_vars(r: Polynomial, signs: Iterable[int], variables: Iterable[str] | None = None) -> Polynomial:
    """Replace each variable ``x_i`` by ``a_i * x_i``."""
    signs = tuple(signs)
    variables = tuple(variables) if variables is not None else r.variables
    if len(signs) != len(variables):
        raise ValueError(
            f"sign vector has length {len(signs)} but there are {len(variables)} variables"
        )
    if any(a not in (-1, 0, 1) for a in signs):
        raise ValueError(f"sign vector entries must be -1, 0 or 1: {signs}")
    return r.substitute({v: a * var(v) for v, a in zip(variables, signs)}, strict=False)


def sign_split(r: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Split ``r`` into ``(P, Q)`` with positive coefficients and ``Q - P == r``."""
    pos = {m: c for m, c in r if c > 0}
    neg = {m: -c for m, c in r if c < 0}
    return Polynomial._raw(neg), Polynomial._raw(pos)


def sign_vectors(n: int) -> Iterator[tuple[int, ...]]:
    """All of ``{1, 0, -1}^n`` in lexicographically descending order."""
    return itertools.product((1, 0, -1), repeat=n)


# Parsing ------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|\[(?P<bracket>[^\[\]]+)\]|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolynomialSyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        kind = m.lastgroup
        out.append(("name" if kind == "bracket" else kind, m.group(kind)))
        pos = m.end()
    return out


class _Parser:
    # expr   := ['-'|'+'] term (('+'|'-') term)*
    # term   := factor (('*'|'/') factor)*
    # factor := atom ['^' NUM]
    # atom   := NUM | NAME | '(' expr ')' | '-' factor

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            want = f" {value!r}" if value else ""
            raise PolynomialSyntaxError(f"expected{want} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        if not self.tokens:
            raise PolynomialSyntaxError("empty polynomial")
        p = self.expr()
        if self.i != len(self.tokens):
            raise PolynomialSyntaxError(f"trailing input {self.peek()[1]!r} in {self.text!r}")
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.factor()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            q = self.factor()
            if op == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    raise PolynomialSyntaxError("can only divide by a nonzero constant")
                p = p * const(1 / Fraction(q.constant_term))
        return p

    def factor(self) -> Polynomial:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise PolynomialSyntaxError("exponent must be a natural number literal")
            base = base ** _check_exp(int(val))
        return base

    def atom(self) -> Polynomial:
        kind, val = self.peek()
        if val in ("-", "+"):
            self.take()
            f = self.factor()
            return -f if val == "-" else f
        if kind == "num":
            self.take()
            return const(int(val))
        if kind == "name":
            self.take()
            return var(val)
        if val == "(":
            self.take()
            p = self.expr()
            self.take(")")
            return p
        found = "end of input" if val is None else f"token {val!r}"
        raise PolynomialSyntaxError(f"unexpected {found} in {self.text!r}")


def parse(text: str) -> Polynomial:
    """Parse polynomial text such as ``"x1^3 + 2*x1 + 2"`` or ``"1/2*[X]^2"``."""
    return _Parser(text).parse()
