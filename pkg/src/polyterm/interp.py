"""Polynomial interpretations and orientation certificates.

An interpretation maps every function symbol of arity ``k`` to a polynomial
in the placeholders ``x1 .. xk``.  Terms evaluate bottom-up to polynomials in
their variables.  A rule ``l -> r`` is oriented when ``[l] - [r]`` has only
non-negative coefficients and a constant term of at least the domain margin
(1 over the naturals, ``delta`` over the non-negative rationals).  This is
the absolute-positiveness criterion: sufficient, not complete.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .poly import Polynomial, const, parse, var, var_key
from .trs import A, F, FunSym, G, H, O, QS, Rule, Term, Trs, Var, Z, build_qr_trs

__all__ = [
    "Domain",
    "NAT",
    "Interpretation",
    "OrientationCert",
    "NotOriented",
    "Witness",
    "placeholder",
    "evaluate_term",
    "is_monotone",
    "orients",
    "orients_all",
    "theorem_lin_interpretation",
    "always_terminating_interpretation",
    "qr_interpretation",
    "minimal_h",
    "extract_witness",
]

_PLACEHOLDER = re.compile(r"x([1-9][0-9]*)")


def placeholder(j: int) -> str:
    return f"x{j}"


@dataclass(frozen=True)
class Domain:
    """``kind`` is ``"nat"`` or ``"rat"``; ``delta`` is only used for ``"rat"``."""

    kind: str = "nat"
    delta: Fraction = Fraction(1)

    def __post_init__(self):
        if self.kind not in ("nat", "rat"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        delta = Fraction(self.delta)
        if delta <= 0:
            raise ValueError("delta must be positive")
        object.__setattr__(self, "delta", delta)

    @property
    def margin(self) -> Fraction:
        return Fraction(1) if self.kind == "nat" else self.delta

    def to_dict(self) -> dict:
        if self.kind == "nat":
            return {"kind": "nat"}
        return {"kind": "rat", "delta": str(self.delta)}

    @classmethod
    def from_dict(cls, d: Mapping) -> Domain:
        return cls(d.get("kind", "nat"), Fraction(str(d.get("delta", "1"))))


NAT = Domain("nat")


class Interpretation:
    """Immutable map from function symbols to polynomials over a domain."""

    def __init__(self, assignment: Mapping[FunSym, Polynomial], domain: Domain = NAT):
        self.domain = domain
        self._by_sym: dict[FunSym, Polynomial] = {}
        for sym, p in assignment.items():
            p = Polynomial.coerce(p)
            for v in p.variables:
                m = _PLACEHOLDER.fullmatch(v)
                if not m or int(m.group(1)) > sym.arity:
                    raise ValueError(
                        f"{sym.name}/{sym.arity} uses {v!r}; only x1..x{sym.arity} are allowed"
                    )
            for _, c in p:
                if c < 0:
                    raise ValueError(f"negative coefficient in interpretation of {sym.name}: {p}")
                if domain.kind == "nat" and Fraction(c).denominator != 1:
                    raise ValueError(f"non-integer coefficient over the naturals for {sym.name}: {p}")
            self._by_sym[sym] = p

    @property
    def assignment(self) -> dict[FunSym, Polynomial]:
        return dict(self._by_sym)

    def __getitem__(self, sym: FunSym | str) -> Polynomial:
        if isinstance(sym, str):
            for s, p in self._by_sym.items():
                if s.name == sym:
                    return p
            raise KeyError(sym)
        return self._by_sym[sym]

    def __contains__(self, sym) -> bool:
        try:
            self[sym]
        except KeyError:
            return False
        return True

    def symbols(self) -> list[FunSym]:
        return list(self._by_sym)

    def is_linear(self) -> bool:
        return all(p.degree() <= 1 for p in self._by_sym.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Interpretation):
            return NotImplemented
        return self.domain == other.domain and self._by_sym == other._by_sym

    def __repr__(self) -> str:
        body = ", ".join(f"{s.name}: {p}" for s, p in self._by_sym.items())
        return f"Interpretation({{{body}}}, {self.domain})"

    def to_json(self) -> str:
        return json.dumps(
            {
                "domain": self.domain.to_dict(),
                "symbols": {s.name: str(p) for s, p in self._by_sym.items()},
            },
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str, signature: Iterable[FunSym] | None = None) -> Interpretation:
        """Load ``{"domain": {...}, "symbols": {"a": "x1 + x2", ...}}``.

        Arities come from ``signature`` when given, otherwise from the
        highest placeholder used.
        """
        data = json.loads(text)
        sig = {s.name: s for s in signature or ()}
        assignment = {}
        for name, text_poly in data["symbols"].items():
            p = parse(text_poly)
            if name in sig:
                sym = sig[name]
            else:
                used = [int(m.group(1)) for v in p.variables if (m := _PLACEHOLDER.fullmatch(v))]
                sym = FunSym(name, max(used, default=0))
            assignment[sym] = p
        return cls(assignment, Domain.from_dict(data.get("domain", {})))


@dataclass(frozen=True)
class OrientationCert:
    rule_index: int
    difference: Polynomial
    delta: Fraction


class NotOriented(Exception):
    """``[l] - [r]`` is not absolutely positive; carries the first bad coefficient."""

    def __init__(self, rule_index: int, monomial: tuple, coefficient, difference: Polynomial, margin):
        self.rule_index = rule_index
        self.monomial = monomial
        self.coefficient = coefficient
        self.difference = difference
        self.margin = margin
        mono = Polynomial({monomial: 1}) if monomial else "constant term"
        need = f">= {margin}" if not monomial else ">= 0"
        super().__init__(
            f"rule {rule_index}: coefficient of {mono} is {coefficient}, need {need} "
            f"(difference {difference})"
        )


@dataclass(frozen=True)
class Witness:
    """Positive values for the indeterminates, optionally with a sign vector."""

    values: tuple
    variables: tuple | None = None
    signs: tuple | None = None

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if any(v < 1 for v in values):
            raise ValueError(f"witness entries must be positive: {values}")
        object.__setattr__(self, "values", values)
        names = self.variables
        names = tuple(placeholder(i) for i in range(1, len(values) + 1)) if names is None else tuple(names)
        if len(names) != len(values):
            raise ValueError("witness needs one value per variable")
        object.__setattr__(self, "variables", names)
        if self.signs is not None:
            object.__setattr__(self, "signs", tuple(self.signs))

    def point(self) -> dict[str, int]:
        return dict(zip(self.variables, self.values))

    def signed_point(self) -> dict[str, int]:
        signs = self.signs or (1,) * len(self.values)
        return {v: a * x for v, a, x in zip(self.variables, signs, self.values)}


def _evaluate(assignment: Mapping[FunSym, Polynomial], t: Term, strict: bool = True) -> Polynomial:
    # iterative post-order; ``strict=False`` keeps foreign variables in the
    # assigned polynomials (used for symbolic parameters)
    out: list[Polynomial] = []
    stack: list = [(t, False)]
    while stack:
        node, done = stack.pop()
        if isinstance(node, Var):
            out.append(var(node.name))
            continue
        if not done:
            stack.append((node, True))
            stack.extend((arg, False) for arg in reversed(node.args))
            continue
        try:
            poly = assignment[node.sym]
        except KeyError:
            raise KeyError(f"no interpretation for symbol {node.sym.name}/{node.sym.arity}") from None
        k = node.sym.arity
        args = out[len(out) - k:] if k else []
        if k:
            del out[len(out) - k:]
        bindings = {placeholder(j + 1): a for j, a in enumerate(args)}
        out.append(poly.substitute(bindings, strict=strict))
    return out[0]


def evaluate_term(i: Interpretation, t: Term) -> Polynomial:
    """The polynomial ``[t]`` over the variables of ``t``."""
    return _evaluate(i._by_sym, t)


def is_monotone(i: Interpretation) -> bool:
    """Sufficient check for strict monotonicity.

    Every coefficient must be non-negative and each argument ``x_j`` must
    occur in a pure-power monomial ``c * x_j^e`` with ``c * delta^(e-1) >= 1``
    (``c >= 1`` for the linear case and over the naturals).
    """
    delta = i.domain.margin
    for sym, p in i._by_sym.items():
        if any(c < 0 for _, c in p):
            return False
        for j in range(1, sym.arity + 1):
            name = placeholder(j)
            if not any(
                len(m) == 1 and m[0][0] == name and c * delta ** (m[0][1] - 1) >= 1 for m, c in p
            ):
                return False
    return True


def check_difference(diff: Polynomial, margin, rule_index: int = 0) -> OrientationCert:
    for m, c in diff:
        if m and c < 0:
            raise NotOriented(rule_index, m, c, diff, margin)
    if diff.constant_term < margin:
        raise NotOriented(rule_index, (), diff.constant_term, diff, margin)
    return OrientationCert(rule_index, diff, Fraction(margin))


def orients(i: Interpretation, rule: Rule, rule_index: int = 0) -> OrientationCert:
    """Certify ``[l] > [r]`` by absolute positiveness; raise :class:`NotOriented`."""
    diff = evaluate_term(i, rule.lhs) - evaluate_term(i, rule.rhs)
    return check_difference(diff, i.domain.margin, rule_index)


def orients_all(i: Interpretation, rules: Trs | Sequence[Rule]) -> list[OrientationCert]:
    """Certificates for every rule, numbered from 1."""
    rules = rules.rules if isinstance(rules, Trs) else rules
    return [orients(i, r, k) for k, r in enumerate(rules, 1)]


# Named interpretations -----------------------------------------------------

_X1, _X2, _X3, _X4 = (var(placeholder(j)) for j in range(1, 5))


def theorem_lin_interpretation(w: Witness) -> Interpretation:
    """Linear interpretation that orients the single rule whenever ``P(w) >= Q(w)``."""
    assignment = {
        Z: const(0),
        O: const(1),
        A: _X1 + _X2,
        F: _X1 + _X2 + _X3 + _X4,
    }
    for name, v in zip(w.variables, w.values):
        assignment[FunSym(name, 1)] = v * _X1
    return Interpretation(assignment, NAT)


def always_terminating_interpretation(p: Polynomial, q: Polynomial) -> Interpretation:
    """Non-linear interpretation orienting the single rule for every ``P``, ``Q``."""
    names = sorted(set(p.variables) | set(q.variables), key=var_key)
    q_at_ones = q.evaluate({n: 1 for n in names})
    assignment = {
        Z: const(0),
        O: const(q_at_ones + 1),
        A: _X1 + _X2,
        F: _X3 * _X4 + _X1 + _X2 + _X3 + _X4,
    }
    for name in names:
        assignment[FunSym(name, 1)] = _X1
    return Interpretation(assignment, NAT)


def qr_interpretation(w: Witness, h, delta=1) -> Interpretation:
    """Interpretation over the non-negative rationals for the eight-rule system.

    ``h`` must exceed 2; ``v_i`` is interpreted as ``x^(v_i)`` so that the
    degree of an encoded polynomial is its value at the witness.
    """
    h = Fraction(h)
    if h <= 2:
        raise ValueError(f"h must be greater than 2, got {h}")
    assignment = {
        Z: const(0),
        G: _X1 + _X2,
        A: _X1 * _X2 + _X1 + _X2 + 1,
        QS: _X1**2 + 2 * _X1,
        H: h * _X1 + h,
    }
    for name, v in zip(w.variables, w.values):
        assignment[FunSym(name, 1)] = _X1**v
    return Interpretation(assignment, Domain("rat", Fraction(delta)))


def minimal_h(p: Polynomial, q: Polynomial, w: Witness, delta=1, hmax: int = 64) -> int | None:
    """Smallest integer ``h`` in ``3..hmax`` whose interpretation orients all
    eight rules, or ``None`` when the bound is exhausted.

    Raises ``ValueError`` when ``P(w) < Q(w)``.
    """
    point = w.point()
    if p.evaluate(point) < q.evaluate(point):
        raise ValueError(f"precondition violated: P{w.values} < Q{w.values}")
    trs = build_qr_trs(p, q)
    for h in range(3, hmax + 1):
        interp = qr_interpretation(w, h, delta)
        try:
            orients_all(interp, trs)
        except NotOriented:
            continue
        return h
    return None


def extract_witness(i: Interpretation, variables: Sequence[str] | None = None) -> Witness:
    """Read ``v_i`` off the linear coefficient of each indeterminate symbol.

    ``variables`` defaults to every unary symbol other than the gadget's own.
    """
    if variables is None:
        variables = sorted(
            (s.name for s in i.symbols() if s.arity == 1 and s.name not in ("z", "o", "a", "f")),
            key=var_key,
        )
    values = []
    for name in variables:
        p = i[name]
        if p.degree() > 1:
            raise ValueError(f"interpretation of {name} is not linear: {p}")
        values.append(p.coefficient({placeholder(1): 1}))
    return Witness(tuple(values), tuple(variables))
