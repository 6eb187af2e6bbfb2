"""Bounded searches and the Hilbert's-tenth reduction pipeline.

Everything here is exhaustive within explicit bounds, so "nothing found"
always means "nothing found up to the bound".  Parallel runs split the
enumeration on its first coordinate and keep the lexicographically smallest
hit, so results do not depend on the number of workers.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .interp import (
    NAT,
    Interpretation,
    NotOriented,
    Witness,
    _evaluate,
    extract_witness,
    orients_all,
    placeholder,
    theorem_lin_interpretation,
)
from .poly import Polynomial, has_positive_coefficients, monomial, scale_vars, sign_split, sign_vectors, var, var_key
from .trs import FunSym, Trs, build_single_rule_trs

__all__ = [
    "SearchConfig",
    "Branch",
    "ReductionReport",
    "CrossCheck",
    "witness_search",
    "linear_interp_search",
    "hilbert_pipeline",
    "cross_check",
    "corpus",
]


@dataclass(frozen=True)
class SearchConfig:
    witness_bound: int = 10
    coeff_bound: int = 2
    hmax: int = 64
    threads: int = 1

    def __post_init__(self):
        for name in ("witness_bound", "coeff_bound", "hmax", "threads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")


def _map(fn, jobs: list, threads: int) -> list:
    if threads <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, *zip(*jobs)))


# Witness search -------------------------------------------------------------


def _witness_block(diff_terms, n: int, bound: int, first: int):
    # diff_terms: [(coef, ((index, exp), ...)), ...]
    for rest in itertools.product(range(1, bound + 1), repeat=n - 1):
        point = (first, *rest)
        total = 0
        for c, mono in diff_terms:
            for k, e in mono:
                c = c * point[k] ** e
            total += c
        if total >= 0:
            return point
    return None


def witness_search(
    p: Polynomial,
    q: Polynomial,
    bound: int,
    variables: Sequence[str] | None = None,
    threads: int = 1,
) -> Witness | None:
    """Lexicographically smallest ``v`` in ``{1..bound}^n`` with ``P(v) >= Q(v)``."""
    if not (has_positive_coefficients(p) and has_positive_coefficients(q)):
        raise ValueError("witness search needs polynomials with positive coefficients")
    if variables is None:
        variables = sorted(set(p.variables) | set(q.variables), key=var_key)
    variables = tuple(variables)
    missing = (set(p.variables) | set(q.variables)) - set(variables)
    if missing:
        raise ValueError(f"variables {sorted(missing)} are not in the search space")
    if bound < 1:
        raise ValueError("bound must be at least 1")
    index = {v: k for k, v in enumerate(variables)}
    diff_terms = [(c, tuple((index[v], e) for v, e in m)) for m, c in p - q]
    if not variables:
        return Witness(()) if sum(c for c, _ in diff_terms) >= 0 else None
    n = len(variables)
    jobs = [(diff_terms, n, bound, first) for first in range(1, bound + 1)]
    if threads <= 1:
        for job in jobs:
            hit = _witness_block(*job)
            if hit:
                return Witness(hit, variables)
        return None
    hits = [h for h in _map(_witness_block, jobs, threads) if h]
    return Witness(min(hits), variables) if hits else None


# Linear interpretation search ---------------------------------------------


@dataclass(frozen=True)
class _Param:
    sym: FunSym
    position: int  # 0 is the constant part
    lo: int
    hi: int


def _params(signature: Sequence[FunSym], bound: int) -> list[_Param]:
    out = []
    for sym in signature:
        out.append(_Param(sym, 0, 0, bound))
        out.extend(_Param(sym, j, 1, bound) for j in range(1, sym.arity + 1))
    return out


def _param_name(k: int) -> str:
    return f"@p{k}"


def _constraints(trs: Trs, params: list[_Param], margin) -> list[tuple[int, dict]]:
    """Compile orientation of every rule into polynomial inequalities over
    the parameters: ``(required_minimum, {((param, exp), ...): coefficient})``."""
    assignment: dict[FunSym, Polynomial] = {}
    for k, prm in enumerate(params):
        term = var(_param_name(k)) * (var(placeholder(prm.position)) if prm.position else 1)
        assignment[prm.sym] = assignment.get(prm.sym, Polynomial()) + term
    index = {_param_name(k): k for k in range(len(params))}
    out = []
    for rule in trs.rules:
        diff = _evaluate(assignment, rule.lhs, strict=False) - _evaluate(assignment, rule.rhs, strict=False)
        grouped: dict[tuple, dict] = {}
        for m, c in diff:
            outer = tuple((v, e) for v, e in m if v not in index)
            key = tuple(sorted((index[v], e) for v, e in m if v in index))
            bucket = grouped.setdefault(outer, {})
            bucket[key] = bucket.get(key, 0) + c
        # a missing constant term still has to reach the margin
        grouped.setdefault((), {})
        for outer, poly in grouped.items():
            out.append((0 if outer else margin, {k: c for k, c in poly.items() if c}))
    return out


def _fix(poly: dict, k: int, value: int) -> dict:
    out: dict = {}
    for exps, c in poly.items():
        for pos, (j, e) in enumerate(exps):
            if j == k:
                c = c * value**e
                exps = exps[:pos] + exps[pos + 1:]
                break
        s = out.get(exps, 0) + c
        if s:
            out[exps] = s
        else:
            out.pop(exps, None)
    return out


def _upper_bound(poly: dict, lo: Sequence[int], hi: Sequence[int]):
    # parameters are non-negative, so each monomial peaks at one corner
    total = 0
    for exps, c in poly.items():
        corner = hi if c > 0 else lo
        for k, e in exps:
            c = c * corner[k] ** e
        total += c
    return total


def _dfs(constraints, lo, hi, k: int, prefix: tuple):
    # constraints: [(need, poly, params_used)]
    if k == len(lo):
        return prefix
    for value in range(lo[k], hi[k] + 1):
        kept = []
        for need, poly, used in constraints:
            if k not in used:
                kept.append((need, poly, used))
                continue
            poly = _fix(poly, k, value)
            if _upper_bound(poly, lo, hi) < need:
                break
            used = used - {k}
            if used:
                kept.append((need, poly, used))
        else:
            found = _dfs(kept, lo, hi, k + 1, prefix + (value,))
            if found is not None:
                return found
    return None


def _dfs_from(constraints, lo, hi, first: int):
    lo = list(lo)
    hi = list(hi)
    lo[0] = hi[0] = first
    live = []
    for need, poly in constraints:
        used = frozenset(k for exps in poly for k, _ in exps)
        if _upper_bound(poly, lo, hi) < need:
            return None
        if used:
            live.append((need, poly, used))
    return _dfs(live, lo, hi, 0, ())


def linear_interp_search(trs: Trs, cfg: SearchConfig = SearchConfig()) -> Interpretation | None:
    """First linear monotone interpretation over the naturals, in lexicographic
    order of coefficient vectors (signature order, constant part first), whose
    coefficients are at most ``cfg.coeff_bound`` and which orients every rule.

    The enumeration is a branch and bound: a branch is cut once some
    orientation constraint cannot be met anywhere in the remaining box.
    """
    params = _params(trs.signature, cfg.coeff_bound)
    if not params:
        return Interpretation({}, NAT)
    constraints = _constraints(trs, params, int(NAT.margin))
    lo = tuple(p.lo for p in params)
    hi = tuple(p.hi for p in params)
    jobs = [(constraints, lo, hi, first) for first in range(lo[0], hi[0] + 1)]
    if cfg.threads <= 1:
        found = None
        for job in jobs:
            found = _dfs_from(*job)
            if found is not None:
                break
    else:
        hits = [h for h in _map(_dfs_from, jobs, cfg.threads) if h is not None]
        found = min(hits) if hits else None
    if found is None:
        return None
    assignment: dict[FunSym, Polynomial] = {}
    for prm, value in zip(params, found):
        term = value * (var(placeholder(prm.position)) if prm.position else Polynomial({(): 1}))
        assignment[prm.sym] = assignment.get(prm.sym, Polynomial()) + term
    interp = Interpretation(assignment, NAT)
    # independent re-check on the concrete interpretation
    orients_all(interp, trs)
    return interp


# Reduction pipeline -------------------------------------------------------


@dataclass(frozen=True)
class Branch:
    signs: tuple
    p: Polynomial
    q: Polynomial
    split_verified: bool
    witness: Witness | None = None


@dataclass(frozen=True)
class ReductionReport:
    r: Polynomial
    variables: tuple
    bound: int
    branches: tuple = ()

    @property
    def witness(self) -> Witness | None:
        for b in self.branches:
            if b.witness is not None:
                return b.witness
        return None

    @property
    def verdict(self) -> str:
        return "witness_found" if self.witness is not None else "none_up_to_bound"

    def root(self) -> dict[str, int] | None:
        w = self.witness
        return w.signed_point() if w else None

    def to_dict(self) -> dict:
        return {
            "r": str(self.r),
            "variables": list(self.variables),
            "bound": self.bound,
            "verdict": self.verdict,
            "root": self.root(),
            "branches": [
                {
                    "signs": list(b.signs),
                    "P": str(b.p),
                    "Q": str(b.q),
                    "split_verified": b.split_verified,
                    "witness": list(b.witness.values) if b.witness else None,
                }
                for b in self.branches
            ],
        }


def hilbert_pipeline(r: Polynomial, cfg: SearchConfig = SearchConfig()) -> ReductionReport:
    """Search for an integer root of ``r`` through ``3^n`` positive-coefficient
    comparisons ``P_a(v) >= Q_a(v)``, one per sign vector ``a``."""
    for _, c in r:
        if Fraction(c).denominator != 1:
            raise ValueError(f"R must have integer coefficients: {r}")
    names = r.variables
    branches = []
    for signs in sign_vectors(len(names)):
        square = scale_vars(r, signs, names) ** 2
        p, q = sign_split(square)
        split_ok = q - p == square
        w = witness_search(p, q, cfg.witness_bound, names, cfg.threads)
        if w is not None:
            w = Witness(w.values, names, signs)
            if r.evaluate(w.signed_point()) != 0:
                raise AssertionError(f"witness {w} is not a root of {r}")
        branches.append(Branch(signs, p, q, split_ok, w))
    return ReductionReport(r, names, cfg.witness_bound, tuple(branches))


# Cross check ------------------------------------------------------------------


@dataclass(frozen=True)
class CrossCheck:
    witness: Witness | None
    interpretation: Interpretation | None
    extracted: Witness | None
    theorem_orients: bool | None
    consistent: bool

    @property
    def outcome(self) -> str:
        w = "witness" if self.witness else "no_witness"
        i = "interpretation" if self.interpretation else "no_interpretation"
        return f"{w}/{i}"


def cross_check(
    p: Polynomial,
    q: Polynomial,
    cfg: SearchConfig = SearchConfig(),
    interpretation: Interpretation | None = None,
) -> CrossCheck:
    """Run both sides of the single-rule equivalence and compare.

    Only "an interpretation orients the rule but its extracted witness fails
    ``P >= Q``" is inconsistent; an empty bounded interpretation search next
    to an existing witness is not, since coefficient sizes are unbounded.
    A supplied ``interpretation`` replaces the search and is used only if it
    orients the rule.
    """
    trs = build_single_rule_trs(p, q)
    names = sorted(set(p.variables) | set(q.variables), key=var_key)
    w = witness_search(p, q, cfg.witness_bound, names, cfg.threads)
    theorem_ok = None
    if w is not None:
        try:
            orients_all(theorem_lin_interpretation(w), trs)
            theorem_ok = True
        except NotOriented:
            theorem_ok = False
    if interpretation is None:
        interp = linear_interp_search(trs, cfg)
    else:
        try:
            orients_all(interpretation, trs)
            interp = interpretation
        except NotOriented:
            interp = None
    extracted = None
    consistent = True
    if interp is not None:
        extracted = extract_witness(interp, names)
        point = extracted.point()
        consistent = p.evaluate(point) >= q.evaluate(point)
    return CrossCheck(w, interp, extracted, theorem_ok, consistent)


# Corpus -------------------------------------------------------------------------


def _monomials(names: Sequence[str], max_degree: int) -> list[tuple]:
    out = []
    for exps in itertools.product(range(max_degree + 1), repeat=len(names)):
        if sum(exps) <= max_degree:
            out.append(monomial(zip(names, exps)))
    return out


def corpus(
    n_vars: int = 2,
    max_degree: int = 2,
    max_coeff: int = 2,
    max_terms: int | None = None,
) -> Iterator[tuple[Polynomial, Polynomial]]:
    """All pairs ``(P, Q)`` of polynomials with coefficients in ``0..max_coeff``
    over ``x1..x{n_vars}`` of degree at most ``max_degree``.

    ``max_terms`` caps the number of monomials in each polynomial.
    """
    names = [placeholder(j) for j in range(1, n_vars + 1)]
    monos = _monomials(names, max_degree)
    polys = []
    for coeffs in itertools.product(range(max_coeff + 1), repeat=len(monos)):
        if max_terms is not None and sum(1 for c in coeffs if c) > max_terms:
            continue
        polys.append(Polynomial({m: c for m, c in zip(monos, coeffs) if c}))
    for p in polys:
        for q in polys:
            yield p, q
