from __future__ import annotations

import itertools

import pytest

from polyterm.interp import Interpretation, Witness, extract_witness, is_monotone, orients_all, theorem_lin_interpretation
from polyterm.poly import Polynomial, parse, scale_vars, var
from polyterm.search import SearchConfig, corpus, cross_check, hilbert_pipeline, linear_interp_search, witness_search
from polyterm.trs import A, FunSym, Rule, Trs, Var, build_single_rule_trs

# brute-force oracles -------------------------------------------------------------------


def brute_witness(p, q, bound, names):
    for v in itertools.product(range(1, bound + 1), repeat=len(names)):
        point = dict(zip(names, v))
        if p.evaluate(point) >= q.evaluate(point):
            return v
    return None


def affine(term, coeffs):
    """Evaluate a term under a linear interpretation as {var: coeff, None: const}."""
    if isinstance(term, Var):
        return {term.name: 1}
    c = coeffs[term.sym]
    out = {None: c[0]}
    for k, arg in enumerate(term.args, 1):
        for v, a in affine(arg, coeffs).items():
            out[v] = out.get(v, 0) + c[k] * a
    return out


def brute_linear(trs, bound):
    ranges = []
    for sym in trs.signature:
        ranges.append(range(0, bound + 1))
        ranges.extend(range(1, bound + 1) for _ in range(sym.arity))
    for vec in itertools.product(*ranges):
        coeffs, pos = {}, 0
        for sym in trs.signature:
            coeffs[sym] = vec[pos : pos + sym.arity + 1]
            pos += sym.arity + 1
        ok = True
        for rule in trs.rules:
            l, r = affine(rule.lhs, coeffs), affine(rule.rhs, coeffs)
            keys = set(l) | set(r)
            diff = {k: l.get(k, 0) - r.get(k, 0) for k in keys}
            if diff.get(None, 0) < 1 or any(d < 0 for k, d in diff.items() if k is not None):
                ok = False
                break
        if ok:
            return vec
    return None


def as_vector(interp, signature):
    out = []
    for sym in signature:
        p = interp[sym]
        out.append(p.constant_term)
        out.extend(p.coefficient({f"x{j}": 1}) for j in range(1, sym.arity + 1))
    return tuple(out)


# witness_search --------------------------------------------------------------------------


def test_witness_search_examples():
    x = var("x")
    assert witness_search(2 * x, x**2 + 1, 10).values == (1,)
    assert witness_search(x, 2 * x, 10) is None
    assert witness_search(x**2, x, 10).values == (1,)


def test_witness_search_needs_positive_coefficients():
    with pytest.raises(ValueError):
        witness_search(parse("x - 1"), parse("x"), 5)


def test_witness_search_constants_and_free_variables():
    assert witness_search(parse("3"), parse("2"), 5).values == ()
    assert witness_search(parse("2"), parse("3"), 5) is None
    w = witness_search(parse("x2"), parse("2"), 5, ["x1", "x2"])
    assert w.values == (1, 2) and w.variables == ("x1", "x2")


@pytest.mark.parametrize("p, q", list(corpus(n_vars=2, max_terms=1))[::7])
def test_witness_search_matches_brute_force(p, q):
    names = ["x1", "x2"]
    w = witness_search(p, q, 4, names)
    expected = brute_witness(p, q, 4, names)
    assert (w.values if w else None) == expected


def test_witness_search_parallel_is_deterministic():
    p, q = parse("x1*x2 + x3"), parse("2*x1 + 2*x2 + 3")
    serial = witness_search(p, q, 6)
    assert serial is not None
    assert witness_search(p, q, 6, threads=3) == serial
    assert witness_search(parse("x1"), parse("x1 + 1"), 4, threads=2) is None


# linear_interp_search ------------------------------------------------------------------------


def test_linear_search_examples():
    trs = build_single_rule_trs(parse("x1^2"), parse("x1"))
    i = linear_interp_search(trs, SearchConfig(coeff_bound=2))
    assert i is not None and i.is_linear() and is_monotone(i)
    w = extract_witness(i)
    assert parse("x1^2").evaluate(w.point()) >= parse("x1").evaluate(w.point())
    assert linear_interp_search(build_single_rule_trs(parse("x1"), parse("2*x1")), SearchConfig(coeff_bound=2)) is None


def test_linear_search_empty_trs():
    assert linear_interp_search(Trs()) == Interpretation({})
    g = FunSym("g", 2)
    i = linear_interp_search(Trs([g]))
    assert i[g] == parse("x1 + x2")


@pytest.mark.parametrize(
    "p, q",
    [("x1^2", "x1"), ("x1", "2*x1"), ("2*x1", "x1^2 + 1"), ("x1 + 1", "2*x1"), ("1", "x1"), ("x1^2 + 1", "2*x1^2")],
)
def test_linear_search_is_lexicographically_first(p, q):
    trs = build_single_rule_trs(parse(p), parse(q))
    found = linear_interp_search(trs, SearchConfig(coeff_bound=2))
    expected = brute_linear(trs, 2)
    assert (as_vector(found, trs.signature) if found else None) == expected


@pytest.mark.parametrize("p, q", list(corpus(n_vars=2, max_terms=1))[::5])
def test_linear_search_matches_brute_force_bound_one(p, q):
    trs = build_single_rule_trs(p, q)
    found = linear_interp_search(trs, SearchConfig(coeff_bound=1))
    expected = brute_linear(trs, 1)
    assert (as_vector(found, trs.signature) if found else None) == expected


def test_linear_search_on_a_generic_system():
    # f(g(x)) -> g(f(x)) has no linear interpretation with constant margin
    # unless the constants differ appropriately
    f, g = FunSym("f", 1), FunSym("g", 1)
    x = Var("x")
    trs = Trs([f, g], [Rule(f(g(x)), g(x))])
    i = linear_interp_search(trs, SearchConfig(coeff_bound=2))
    orients_all(i, trs)
    assert as_vector(i, trs.signature) == brute_linear(trs, 2)


def test_linear_search_parallel_is_deterministic():
    for p, q in [("x1^2 + x2", "x1*x2 + 1"), ("x1", "2*x1"), ("2*x1", "x1^2 + 1")]:
        trs = build_single_rule_trs(parse(p), parse(q))
        serial = linear_interp_search(trs, SearchConfig(coeff_bound=2))
        parallel = linear_interp_search(trs, SearchConfig(coeff_bound=2, threads=2))
        assert serial == parallel


def test_extraction_soundness_small_exhaustive():
    # every found interpretation yields a genuine witness
    for p, q in corpus(n_vars=1, max_degree=2, max_coeff=1):
        i = linear_interp_search(build_single_rule_trs(p, q))
        if i is not None:
            w = extract_witness(i, sorted(set(p.variables) | set(q.variables)))
            assert p.evaluate(w.point()) >= q.evaluate(w.point())


def test_found_witness_gives_theorem_certificate():
    for p, q in corpus(n_vars=1, max_coeff=2, max_terms=2):
        w = witness_search(p, q, 5)
        if w is not None:
            orients_all(theorem_lin_interpretation(w), build_single_rule_trs(p, q))


# hilbert_pipeline -----------------------------------------------------------------------------


def check_report(report, r):
    names = report.variables
    assert len(report.branches) == 3 ** len(names)
    for b in report.branches:
        square = scale_vars(r, b.signs, names) ** 2
        assert b.split_verified and b.q - b.p == square
        if b.witness is not None:
            point = b.witness.point()
            assert b.p.evaluate(point) >= b.q.evaluate(point)
            assert r.evaluate(b.witness.signed_point()) == 0


def test_pipeline_linear_root():
    r = parse("x1 - 1")
    report = hilbert_pipeline(r)
    check_report(report, r)
    assert report.verdict == "witness_found"
    assert report.witness.signs == (1,) and report.witness.values == (1,)
    assert r.evaluate(report.root()) == 0


def test_pipeline_no_root():
    r = parse("x1^2 + 1")
    report = hilbert_pipeline(r, SearchConfig(witness_bound=10))
    check_report(report, r)
    assert report.verdict == "none_up_to_bound"
    assert all(b.witness is None for b in report.branches)


def test_pipeline_quadratic():
    r = parse("x1^2 + x1 - 6")
    report = hilbert_pipeline(r)
    check_report(report, r)
    assert report.root() == {"x1": 2}
    roots = sorted(b.witness.signed_point()["x1"] for b in report.branches if b.witness)
    assert roots == [-3, 2]


def test_pipeline_two_variables():
    r = parse("x1^2 - 2*x2^2 - 1")  # Pell: (3, 2) is the smallest positive solution
    report = hilbert_pipeline(r, SearchConfig(witness_bound=5))
    check_report(report, r)
    assert report.verdict == "witness_found"
    assert {tuple(abs(v) for v in b.witness.signed_point().values()) for b in report.branches if b.witness} >= {(3, 2)}


def test_pipeline_zero_sign_uses_origin():
    r = parse("x1*x2")
    report = hilbert_pipeline(r, SearchConfig(witness_bound=3))
    check_report(report, r)
    assert r.evaluate(report.root()) == 0


def test_pipeline_rejects_rational_coefficients():
    with pytest.raises(ValueError):
        hilbert_pipeline(parse("1/2*x1"))


# cross_check --------------------------------------------------------------------------------------


def test_cross_check_consistent_with_witness():
    result = cross_check(parse("x1^2"), parse("x1 + 1"), SearchConfig())
    assert result.witness.values == (2,)
    assert result.theorem_orients is True
    assert result.consistent


def test_cross_check_consistent_without_witness():
    result = cross_check(parse("x1"), parse("2*x1"), SearchConfig())
    assert result.witness is None and result.interpretation is None
    assert result.consistent and result.outcome == "no_witness/no_interpretation"


def test_cross_check_rejects_corrupted_interpretation():
    p, q = parse("x1^2"), parse("x1 + 1")
    good = theorem_lin_interpretation(Witness((2,)))
    bad = dict(good.assignment)
    bad[A] = 2 * var("x1") + var("x2")
    result = cross_check(p, q, SearchConfig(), Interpretation(bad))
    assert result.interpretation is None and result.extracted is None
    assert result.consistent


def test_cross_check_uses_supplied_interpretation():
    p, q = parse("x1^2"), parse("x1 + 1")
    result = cross_check(p, q, SearchConfig(), theorem_lin_interpretation(Witness((3,))))
    assert result.extracted.values == (3,)
    assert result.consistent


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(coeff_bound=0)


def test_corpus_shape():
    pairs = list(corpus(n_vars=1))
    assert len(pairs) == 27 * 27
    assert (Polynomial(), Polynomial()) in pairs
    assert len(list(corpus(n_vars=2, max_terms=1))) == 13 * 13
