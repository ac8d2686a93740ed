import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semgb.identify import sample_theta
from semgb.parametrize import (
    ParamRing,
    all_targets,
    lam,
    leading_minors_positive,
    omega_backsolve_numeric,
    omg,
    pattern_check,
    sig,
    sigma_numeric,
    sigma_polys,
    sigma_values,
    target_by_name,
    theta_values,
    total_effect_poly,
)
from semgb.semgraph import MixedGraph, parse_graph

INSTRUMENT = parse_graph("3; 1->2 2->3; 2<->3")


def test_instrument_sigma_polynomials():
    # the covariance map of the instrumental-variable model, entry by entry
    pr = ParamRing(INSTRUMENT)
    R = pr.ring
    v = {n: R.var(n) for n in pr.t_names}
    l12, l23, w11, w22, w33, w23 = (v[n] for n in ("l12", "l23", "w11", "w22", "w33", "w23"))
    S = sigma_polys(INSTRUMENT, R)
    assert S[(1, 1)] == w11
    assert S[(1, 2)] == w11 * l12
    assert S[(1, 3)] == w11 * l12 * l23
    assert S[(2, 2)] == w22 + w11 * l12 ** 2
    assert S[(2, 3)] == w22 * l23 + w11 * l12 ** 2 * l23 + w23
    assert S[(3, 3)] == w33 + w22 * l23 ** 2 + 2 * w23 * l23 + w11 * l12 ** 2 * l23 ** 2


def test_identity_parameters_give_identity_sigma():
    g = parse_graph("3; 1->2 2->3 1->3; 1<->2")
    lambdas = {e: 0 for e in g.directed}
    S = sigma_numeric(g, lambdas, np.eye(3, dtype=object))
    assert (S == np.eye(3)).all()


@st.composite
def graphs(draw, max_m=4):
    m = draw(st.integers(1, max_m))
    pairs = list(itertools.combinations(range(1, m + 1), 2))
    return MixedGraph(m, [p for p in pairs if draw(st.booleans())], [p for p in pairs if draw(st.booleans())])


@given(graphs(max_m=3))
@settings(max_examples=40, deadline=None)
def test_pattern_matrix_recovers_omega(g):
    pr = ParamRing(g)
    P = pattern_check(g, pr.ring)
    for i in g.vertices:
        for j in g.vertices:
            e = P[i - 1][j - 1]
            if i == j or g.has_bidirected(i, j):
                assert e == pr.ring.var(omg(i, j))
            else:
                assert e.is_zero()


@given(graphs(), st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_numeric_sigma_round_trip(g, seed):
    lambdas, W = sample_theta(g, random.Random(seed))
    S = sigma_numeric(g, lambdas, W)
    assert (S == S.T).all()
    assert leading_minors_positive(S)
    back = omega_backsolve_numeric(g, S, lambdas)
    assert (back == W).all()


@given(graphs(max_m=3), st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_symbolic_and_numeric_sigma_agree(g, seed):
    lambdas, W = sample_theta(g, random.Random(seed))
    theta = theta_values(g, lambdas, W)
    pr = ParamRing(g)
    S = sigma_polys(g, pr.ring)
    num = sigma_values(sigma_numeric(g, lambdas, W))
    for (i, j), p in S.items():
        assert p.substitute(theta) == num[sig(i, j)]


def test_floats_rejected_numerically():
    with pytest.raises(TypeError):
        sigma_numeric(INSTRUMENT, {(1, 2): 0.5, (2, 3): 1}, np.eye(3, dtype=object))


def test_backsolve_rejects_non_pd():
    S = np.array([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(1)]], dtype=object)
    with pytest.raises(ValueError):
        omega_backsolve_numeric(parse_graph("2; ; 1<->2"), S, {})


def test_total_effect_fig3():
    g = parse_graph("4; 1->2 2->3 2->4 3->4; 1<->2 2<->4 3<->4")
    R = ParamRing(g).ring
    assert total_effect_poly(g, 2, 4, R) == R.var("l23") * R.var("l34") + R.var("l24")


def test_target_listing():
    names = [t.name for t in all_targets(INSTRUMENT)]
    assert names == ["l12", "l23", "w11", "w22", "w33", "w23",
                     "TE(1,2)", "TE(1,3)", "TE(2,3)", "PE(1->2)", "PE(1->2->3)", "PE(2->3)"]
    assert target_by_name(INSTRUMENT, "λ23").name == "l23"
    assert lam(10, 11) == "l10_11"


def test_ring_size():
    pr = ParamRing(INSTRUMENT)
    assert len(pr) == len(pr.ring.names) == 2 + 4 + 1 + 6
