from fractions import Fraction

import pytest
import sympy

from semgb.census import enumerate_graphs
from semgb.groebner import Budget
from semgb.identify import (
    AlgebraicallyIdentifiable,
    GenericallyIdentifiable,
    NotGenericallyIdentifiable,
    RationalFormula,
    Unresolved,
    Verdict,
    aggregate_verdict,
    classify_graph,
    classify_parameter,
    elimination_ideal,
    vanishing_ideal,
    verify_numeric,
    verify_report,
)
from semgb.parametrize import ParamRing, all_targets, target_by_name
from semgb.semgraph import parse_graph

INSTRUMENT = parse_graph("3; 1->2 2->3; 2<->3")
BRITO = parse_graph("4; 1->2 2->3 3->4; 1<->2 1<->3 1<->4")
SEC41 = parse_graph("3; 1->2 2->3; 1<->2 2<->3")


def test_instrument_elimination_ideal():
    for method in ("reduced", "full"):
        basis = elimination_ideal(INSTRUMENT, target_by_name(INSTRUMENT, "l23"), method=method)
        assert [p.render() for p in basis] == ["q*s12 - s13"]


def test_instrument_against_sympy_elimination():
    # independent oracle: sympy's lex basis of the graph ideal, intersected with Q[q, s]
    pr = ParamRing(INSTRUMENT)
    t = target_by_name(INSTRUMENT, "l23")
    from semgb.parametrize import sigma_polys

    syms = sympy.symbols(" ".join(pr.ring.names))
    env = dict(zip(pr.ring.names, syms))

    def conv(p):
        return sum((sympy.Rational(c.numerator, c.denominator)
                    * sympy.Mul(*[s ** e for s, e in zip(syms, m)]) for m, c in p.terms.items()),
                   sympy.Integer(0))

    gens = [env["q"] - conv(t.poly)]
    gens += [env[f"s{i}{j}"] - conv(p) for (i, j), p in sigma_polys(INSTRUMENT, pr.ring).items()]
    G = sympy.groebner(gens, *syms, order="lex")
    tset = {env[n] for n in pr.t_names}
    elim = [g for g in G.exprs if not (g.free_symbols & tset)]
    q = [g for g in elim if env["q"] in g.free_symbols]
    assert len(q) == 1
    ratio = sympy.cancel(q[0] / (env["s12"] * env["q"] - env["s13"]))
    assert ratio.is_number and ratio != 0


def test_reduced_and_full_routes_agree_on_all_three_vertex_graphs():
    for g in enumerate_graphs(3):
        pr = ParamRing(g)
        for t in all_targets(g, pr):
            assert elimination_ideal(g, t, method="reduced", pr=pr) == \
                elimination_ideal(g, t, method="full", pr=pr), (str(g), t.name)
        assert vanishing_ideal(g, method="reduced", pr=pr) == vanishing_ideal(g, method="full", pr=pr)


def test_section_41_graph():
    rep = classify_graph(SEC41)
    assert isinstance(rep.status("l12"), NotGenericallyIdentifiable)
    l23 = rep.status("l23")
    assert isinstance(l23, GenericallyIdentifiable)
    assert l23.formula.render() == "s13/s12"
    w23 = rep.status("w23")
    assert w23.formula == RationalFormula.canonical(*_parse_formula(rep, "s12*s23 - s13*s22", "s12"))
    assert rep.status("w11").kind == "generic"
    assert rep.status("w33").kind == "generic"
    assert rep.verdict == Verdict("not")


def _parse_formula(rep, num, den):
    sr = rep.param_ring.sigma_ring
    return sr.parse(num), sr.parse(den)


def test_brito_quadratic():
    st = classify_parameter(BRITO, target_by_name(BRITO, "l23"))
    assert isinstance(st, AlgebraicallyIdentifiable) and st.d == 2
    R = st.ident_poly.ring
    displayed = R.parse(
        "s14*s22*s23*q^2 - s13*s22*s24*q^2"
        " + s13*s23*s24*q - s14*s22*s33*q - s14*s23^2*q + s12*s24*s33*q + s13*s22*s34*q - s12*s23*s34*q"
        " + s14*s23*s33 - s13*s24*s33")
    ratio = None
    for m, c in st.ident_poly.terms.items():
        r = displayed.terms.get(m, 0) / c
        assert r != 0
        ratio = ratio if ratio is not None else r
        assert r == ratio
    assert len(st.ident_poly) == len(displayed)


def test_brito_verdict_and_omega11():
    rep = classify_graph(BRITO, with_vanishing=False)
    assert rep.verdict == Verdict("algebraic", 2)
    w11 = rep.status("w11")
    assert w11.kind == "generic" and w11.formula.render() == "s11"
    for t in rep.targets:
        if t.kind in ("direct", "omega") and t.name != "w11":
            assert rep.statuses[t.name].kind == "algebraic", t.name


def test_canonical_formula():
    sr = ParamRing(INSTRUMENT).sigma_ring
    f = RationalFormula.canonical(sr.parse("-2/3*s13"), sr.parse("-4/3*s12"))
    assert (f.numerator.render(), f.denominator.render()) == ("s13", "2*s12")
    assert f.evaluate({n: 1 for n in sr.names}) == Fraction(1, 2)
    assert RationalFormula.canonical(sr.parse("s13"), sr.parse("s12")).evaluate(
        {n: (0 if n == "s12" else 1) for n in sr.names}) is None


def test_aggregate_verdict_precedence():
    g = GenericallyIdentifiable(None, None)
    a = AlgebraicallyIdentifiable(2, None)
    assert aggregate_verdict([g, g]) == Verdict("generic")
    assert aggregate_verdict([g, a]) == Verdict("algebraic", 2)
    assert aggregate_verdict([a, Unresolved("t")]) == Verdict("unresolved")
    assert aggregate_verdict([Unresolved("t"), NotGenericallyIdentifiable()]) == Verdict("not")
    with pytest.raises(ValueError):
        AlgebraicallyIdentifiable(1, None)


def test_exhausted_budget_is_unresolved_not_misclassified():
    st = classify_parameter(BRITO, target_by_name(BRITO, "l23"), Budget(max_seconds=None, max_pairs=1))
    assert isinstance(st, Unresolved)
    rep = classify_graph(BRITO, Budget(max_seconds=None, max_pairs=1), with_vanishing=False)
    assert rep.verdict == Verdict("unresolved")


def test_empty_graph():
    rep = classify_graph(parse_graph("2; ;"))
    assert rep.status("w11").formula.render() == "s11"
    assert rep.status("w22").formula.render() == "s22"
    assert [p.render() for p in rep.vanishing] == ["s12"]


# ---------------------------------------------------------------------------
# numeric verification


def test_verify_instrument_skips_degenerate_draws():
    rep = classify_graph(INSTRUMENT, with_vanishing=False)
    vr = verify_report(rep, trials=100, seed=0)
    assert vr.ok
    l23 = next(t for t in vr.targets if t.target == "l23")
    assert l23.passed == 100 and l23.skipped > 0


def test_verify_brito_quadratic():
    st = classify_parameter(BRITO, target_by_name(BRITO, "l23"))
    tv = verify_numeric(BRITO, target_by_name(BRITO, "l23"), st, trials=100, seed=3)
    assert tv.ok and tv.passed == 100 and tv.degree_witnessed


def test_verify_is_deterministic():
    rep = classify_graph(INSTRUMENT, with_vanishing=False)
    a = verify_report(rep, trials=30, seed=11)
    b = verify_report(rep, trials=30, seed=11)
    assert a == b


def test_verify_catches_a_wrong_formula():
    rep = classify_graph(INSTRUMENT, with_vanishing=False)
    good = rep.status("l23")
    sr = rep.param_ring.sigma_ring
    bad = GenericallyIdentifiable(RationalFormula(sr.parse("s13"), sr.parse("s11")), good.ident_poly)
    tv = verify_numeric(INSTRUMENT, target_by_name(INSTRUMENT, "l23"), bad, trials=20)
    assert not tv.ok and tv.failures
