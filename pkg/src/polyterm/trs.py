"""First-order terms, rewrite rules and the two reduction gadgets.

Polynomials with positive integer coefficients are encoded as terms over
``z`` (zero), ``a`` (binary) and one unary symbol per indeterminate: a
natural number ``m`` becomes ``a(x, a(x, ... z))`` with ``m`` copies of the
spine variable, a monomial wraps the encoded coefficient in its unary
symbols, and a polynomial is a right-nested ``a``-list of its monomials.

Terms can be very deep (their size grows with the coefficient sum), so
printing, serialization and traversal are iterative.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .poly import Polynomial, var_key

__all__ = [
    "FunSym",
    "Var",
    "App",
    "Term",
    "Rule",
    "Trs",
    "TermError",
    "encode_number",
    "encode_monomial",
    "encode_poly",
    "build_single_rule_trs",
    "build_qr_trs",
    "serialize",
    "iter_serialize",
    "parse_json",
    "term_str",
]


class TermError(ValueError):
    pass


@dataclass(frozen=True)
class FunSym:
    name: str
    arity: int

    def __call__(self, *args: Term) -> App:
        return App(self, tuple(args))


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, eq=False)
class App:
    sym: FunSym
    args: tuple = ()

    def __post_init__(self):
        if len(self.args) != self.sym.arity:
            raise TermError(
                f"{self.sym.name} has arity {self.sym.arity}, got {len(self.args)} arguments"
            )
        # children hash in O(1), so deep terms hash without recursion
        object.__setattr__(self, "_hash", hash((self.sym, tuple(hash(a) for a in self.args))))

    @property
    def name(self) -> str:
        return self.sym.name

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if not isinstance(other, App):
            return NotImplemented
        stack = [(self, other)]
        while stack:
            s, t = stack.pop()
            if s is t:
                continue
            if isinstance(s, App) and isinstance(t, App):
                if s._hash != t._hash or s.sym != t.sym:
                    return False
                stack.extend(zip(s.args, t.args))
            elif s != t:
                return False
        return True

    def __str__(self) -> str:
        return term_str(self)


Term = Union[Var, App]

Z = FunSym("z", 0)
O = FunSym("o", 0)
A = FunSym("a", 2)
F = FunSym("f", 4)
H = FunSym("h", 1)
QS = FunSym("q", 1)
G = FunSym("g", 2)


def subterms(t: Term) -> Iterator[Term]:
    """Pre-order traversal, without recursion."""
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, App):
            stack.extend(reversed(s.args))


def variables(t: Term) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, Var)}


def symbols(t: Term) -> set[FunSym]:
    return {s.sym for s in subterms(t) if isinstance(s, App)}


def count_symbol(t: Term, name: str) -> int:
    return sum(1 for s in subterms(t) if isinstance(s, App) and s.sym.name == name)


def count_var(t: Term, name: str) -> int:
    return sum(1 for s in subterms(t) if isinstance(s, Var) and s.name == name)


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise TermError("left-hand side of a rule must not be a variable")
        extra = variables(self.rhs) - variables(self.lhs)
        if extra:
            raise TermError(f"variables {sorted(extra)} occur only on the right-hand side")

    def __str__(self) -> str:
        return f"{term_str(self.lhs)} -> {term_str(self.rhs)}"


@dataclass(frozen=True)
class Trs:
    signature: tuple = ()
    rules: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "signature", tuple(self.signature))
        object.__setattr__(self, "rules", tuple(self.rules))
        by_name: dict[str, FunSym] = {}
        for sym in self.signature:
            if sym.name in by_name:
                raise TermError(f"duplicate symbol {sym.name!r} in signature")
            by_name[sym.name] = sym
        for i, rule in enumerate(self.rules, 1):
            for side in (rule.lhs, rule.rhs):
                for sym in symbols(side):
                    if by_name.get(sym.name) != sym:
                        raise TermError(f"rule {i} uses {sym.name}/{sym.arity}, not in signature")

    def symbol(self, name: str) -> FunSym:
        for sym in self.signature:
            if sym.name == name:
                return sym
        raise KeyError(name)


# Printing -----------------------------------------------------------------


def _is_numeral(t: Term) -> bool:
    while isinstance(t, App):
        if t.sym == Z:
            return True
        if t.sym != A or not isinstance(t.args[0], Var):
            return False
        t = t.args[1]
    return False


def iter_term_text(t: Term, *, compact: bool = False) -> Iterator[str]:
    """Yield the printed form of ``t`` in chunks.

    The default layout separates arguments with ``", "`` except inside
    numerals ``a(x, ... z)``, which print tight, e.g. ``a(X(a(y,z)), z)``.
    ``compact=True`` never emits spaces (TPDB style).
    """
    stack: list = [t]
    tight_depth = 0
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            yield item
            continue
        if isinstance(item, int):
            tight_depth += item
            continue
        if isinstance(item, Var):
            yield item.name
            continue
        if not item.args:
            yield item.sym.name
            continue
        tight = compact or tight_depth > 0 or _is_numeral(item)
        sep = "," if tight else ", "
        mark = 1 if tight and not compact and tight_depth == 0 else 0
        yield item.sym.name + "("
        stack.append(-mark)
        stack.append(")")
        for k, arg in enumerate(reversed(item.args)):
            stack.append(arg)
            if k < len(item.args) - 1:
                stack.append(sep)
        stack.append(mark)


def term_str(t: Term, *, compact: bool = False) -> str:
    return "".join(iter_term_text(t, compact=compact))


def iter_term_json(t: Term) -> Iterator[str]:
    stack: list = [t]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            yield item
        elif isinstance(item, Var):
            yield '{"var": ' + json.dumps(item.name) + "}"
        else:
            yield '{"f": ' + json.dumps(item.sym.name) + ', "args": ['
            stack.append("]}")
            for k, arg in enumerate(reversed(item.args)):
                stack.append(arg)
                if k < len(item.args) - 1:
                    stack.append(", ")


# Encoding -----------------------------------------------------------------


def _as_var(x: Var | str) -> Var:
    return x if isinstance(x, Var) else Var(x)


def encode_number(m: int, x: Var | str) -> Term:
    """``0 -> z`` and ``m+1 -> a(x, <m>)``."""
    if m < 0:
        raise ValueError("only natural numbers can be encoded")
    x = _as_var(x)
    t: Term = App(Z)
    for _ in range(m):
        t = App(A, (x, t))
    return t


def encode_monomial(coefficient: int, exponents, x: Var | str) -> Term:
    """Encode ``c * v1^m1 * ... * vn^mn``; ``v1`` ends up outermost."""
    if isinstance(coefficient, bool) or not _is_positive_int(coefficient):
        raise ValueError(f"monomial coefficient must be a positive integer, got {coefficient}")
    exps = dict(exponents)
    t = encode_number(int(coefficient), x)
    for name in sorted(exps, key=var_key, reverse=True):
        sym = FunSym(name, 1)
        for _ in range(exps[name]):
            t = App(sym, (t,))
    return t


def _is_positive_int(c) -> bool:
    try:
        return c > 0 and c == int(c)
    except (TypeError, ValueError):
        return False


def encode_poly(p: Polynomial, x: Var | str) -> Term:
    """Right-nested ``a``-list of the monomial encodings in canonical order."""
    for _, c in p:
        if not _is_positive_int(c):
            raise ValueError(f"polynomial must have positive integer coefficients: {p}")
    t: Term = App(Z)
    for mono, c in reversed(p.terms):
        t = App(A, (encode_monomial(c, mono, x), t))
    return t


def _indeterminates(p: Polynomial, q: Polynomial, reserved: Iterable[str]) -> list[FunSym]:
    names = sorted(set(p.variables) | set(q.variables), key=var_key)
    clash = set(names) & set(reserved)
    if clash:
        raise ValueError(f"indeterminate names {sorted(clash)} clash with gadget symbols")
    return [FunSym(n, 1) for n in names]


def build_single_rule_trs(p: Polynomial, q: Polynomial) -> Trs:
    """The one-rule system
    ``f(y1, y2, a(<P>^y3, y3), o) -> f(a(y1, z), a(z, y2), a(<Q>^y3, y3), z)``.
    """
    unary = _indeterminates(p, q, {"z", "o", "a", "f", "y1", "y2", "y3"})
    y1, y2, y3 = Var("y1"), Var("y2"), Var("y3")
    z = App(Z)
    lhs = F(y1, y2, A(encode_poly(p, y3), y3), App(O))
    rhs = F(A(y1, z), A(z, y2), A(encode_poly(q, y3), y3), z)
    return Trs((Z, O, A, F, *unary), (Rule(lhs, rhs),))


def build_qr_trs(p: Polynomial, q: Polynomial) -> Trs:
    """The eight-rule system whose termination over the non-negative
    rationals/reals is equivalent to ``P >= Q`` having a positive solution.
    """
    unary = _indeterminates(p, q, {"z", "a", "h", "q", "g", "x"})
    x = Var("x")
    z = App(Z)
    rules = (
        Rule(QS(H(x)), H(H(QS(x)))),
        Rule(H(x), G(x, x)),
        Rule(G(QS(x), H(H(H(x)))), QS(G(x, H(z)))),
        Rule(H(QS(x)), A(x, x)),
        Rule(A(x, x), QS(x)),
        Rule(H(x), A(z, x)),
        Rule(H(x), A(x, z)),
        Rule(H(A(encode_poly(p, x), x)), A(encode_poly(q, x), x)),
    )
    return Trs((Z, A, H, QS, G, *unary), rules)


_MAX_JSON_DEPTH = 200_000

# Serialization ------------------------------------------------------------


def iter_serialize(trs: Trs, format: str = "json") -> Iterator[str]:
    """Stream the serialized system in chunks."""
    if format == "tpdb":
        names = set()
        for r in trs.rules:
            names |= variables(r.lhs)
        yield "(VAR " + " ".join(sorted(names, key=var_key)) + ")\n(RULES\n"
        for r in trs.rules:
            yield "  "
            yield from iter_term_text(r.lhs, compact=True)
            yield " -> "
            yield from iter_term_text(r.rhs, compact=True)
            yield "\n"
        yield ")\n"
    elif format == "json":
        sig = ", ".join(
            '{"name": %s, "arity": %d}' % (json.dumps(s.name), s.arity) for s in trs.signature
        )
        yield '{"signature": [' + sig + '],\n "rules": ['
        for i, r in enumerate(trs.rules):
            yield ("\n  " if i == 0 else ",\n  ") + '{"lhs": '
            yield from iter_term_json(r.lhs)
            yield ', "rhs": '
            yield from iter_term_json(r.rhs)
            yield "}"
        yield "]}\n"
    else:
        raise ValueError(f"unknown format {format!r}")


def serialize(trs: Trs, format: str = "json") -> str:
    return "".join(iter_serialize(trs, format))


def _term_from_json(obj, signature: dict[str, FunSym]) -> Term:
    # post-order rebuild with an explicit stack
    out: list[Term] = []
    stack: list = [(obj, False)]
    while stack:
        node, done = stack.pop()
        if "var" in node:
            out.append(Var(node["var"]))
            continue
        name = node["f"]
        if name not in signature:
            raise TermError(f"unknown symbol {name!r}")
        args = node.get("args", [])
        if done:
            n = len(args)
            built = tuple(out[len(out) - n:]) if n else ()
            del out[len(out) - n:]
            out.append(App(signature[name], built))
        else:
            stack.append((node, True))
            for arg in reversed(args):
                stack.append((arg, False))
    return out[0]


def parse_json(text: str) -> Trs:
    """Read a system written by :func:`serialize` in ``json`` format."""
    # the stdlib decoder recurses once per nesting level
    limit = sys.getrecursionlimit()
    needed = min(2 * text.count("[") + 200, _MAX_JSON_DEPTH)
    try:
        sys.setrecursionlimit(max(limit, needed))
        data = json.loads(text)
    finally:
        sys.setrecursionlimit(limit)
    sig = [FunSym(s["name"], int(s["arity"])) for s in data["signature"]]
    by_name = {s.name: s for s in sig}
    rules = [
        Rule(_term_from_json(r["lhs"], by_name), _term_from_json(r["rhs"], by_name))
        for r in data["rules"]
    ]
    return Trs(sig, rules)
