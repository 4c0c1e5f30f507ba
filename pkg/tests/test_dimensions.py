from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

import oracles as O
from dimlab import errors as E
from dimlab.core import dual, make_class, two_choice_class
from dimlab.dimensions import (concept_threshold_dim, fat_dim, graph_dim, littlestone_dim, online_dim,
                               seq_fat_dim, threshold_dim_gamma, threshold_dim_rs, vc_dim)
from dimlab.generators import (h0_class, h0_witness_mixture, interval_class, powerset_class,
                               threshold_class, tree_class)
from dimlab.losses import IDENTITY, threshold_loss, truncated_linear
from dimlab.trees import verify, verify_online_witness
from dimlab.witness import witness_from_json

GAMMAS = [F(1, 8), F(1, 4), F(3, 8), F(1, 2), F(1)]


@st.composite
def classes(draw, max_x=4, max_y=5, denom=4, concept=False):
    nx = draw(st.integers(1, max_x))
    ny = draw(st.integers(1, max_y))
    top = 1 if concept else denom
    vals = draw(st.lists(st.lists(st.integers(0, top), min_size=ny, max_size=ny),
                         min_size=nx, max_size=nx))
    return make_class([f"x{i}" for i in range(nx)], [f"y{j}" for j in range(ny)],
                      [[F(v, top) for v in r] for r in vals])


def _single():
    return make_class(["a", "b"], ["h"], [["1/3"], ["2/3"]])


def test_vc_examples():
    assert vc_dim(powerset_class(3))[0] == 3
    assert vc_dim(threshold_class(6))[0] == 1
    assert vc_dim(interval_class(5))[0] == 2
    with pytest.raises(E.NotConceptClass):
        vc_dim(_single())


def test_littlestone_examples():
    assert littlestone_dim(make_class(["a"], ["h"], [[1]]))[0] == 0
    assert littlestone_dim(powerset_class(3))[0] == 3
    assert littlestone_dim(threshold_class(7))[0] == 3


def test_fat_examples():
    assert fat_dim(make_class(["a"], ["h"], [["1/2"]]), F(1, 8))[0] == 0
    H = make_class(["a"], ["p", "q"], [["1/5", "4/5"]])
    assert fat_dim(H, F(1, 4))[0] == 1
    assert fat_dim(H, F(3, 10))[0] == 1
    assert fat_dim(H, F(31, 100))[0] == 0
    with pytest.raises(E.GammaOutOfRange):
        fat_dim(H, 0)
    with pytest.raises(E.GammaOutOfRange):
        fat_dim(H, F(3, 2))


def test_seq_fat_examples():
    assert seq_fat_dim(_single(), F(1, 4))[0] == 0
    assert seq_fat_dim(powerset_class(3), F(1, 2))[0] == 3
    assert seq_fat_dim(tree_class((F(2, 5), F(1, 5), F(1, 10)), 3), F(3, 20))[0] == 2


def test_threshold_examples():
    H = make_class(["a", "b"], ["p", "q"], [["1/4", "1/4"], ["1/4", "1/4"]])
    assert threshold_dim_gamma(H, F(1, 2))[0] == 1
    assert threshold_dim_rs(powerset_class(2), 0, 1)[0] >= 1
    assert concept_threshold_dim(threshold_class(4))[0] == 4
    with pytest.raises(E.BadInterval):
        threshold_dim_rs(H, F(1, 2), F(1, 2))


def test_graph_examples():
    assert graph_dim(_single())[0] == 0
    d, w = graph_dim(powerset_class(2))
    assert d == 2 and verify(powerset_class(2), w)
    H = h0_class(3)
    M = two_choice_class(H, *h0_witness_mixture(3))
    assert graph_dim(M, F(1, 8))[0] >= 3


def test_online_examples():
    assert online_dim(_single())[0] == 0
    assert online_dim(powerset_class(2))[0] == 2
    v, w = online_dim(tree_class((F(1, 4), F(1, 8)), 2))
    assert F(1, 4) <= v <= F(1, 2)
    assert verify_online_witness(tree_class((F(1, 4), F(1, 8)), 2), w)
    with pytest.raises(E.ClassTooLarge):
        online_dim(powerset_class(5))


@settings(max_examples=60, deadline=None)
@given(classes(concept=True))
def test_concept_dims_match_oracles(C):
    vc, w = vc_dim(C)
    assert vc == O.vc(C) and verify(C, w)
    ld, w = littlestone_dim(C)
    assert ld == O.littlestone(C) and verify(C, w)
    for g in (F(1, 8), F(1, 4), F(1, 2)):
        assert fat_dim(C, g)[0] == vc
    for g in GAMMAS:
        assert seq_fat_dim(C, g)[0] == ld


@settings(max_examples=60, deadline=None)
@given(classes(), st.sampled_from(GAMMAS))
def test_real_dims_match_oracles(H, g):
    d, w = fat_dim(H, g)
    assert d == O.fat(H, g) and verify(H, w)
    d, w = seq_fat_dim(H, g)
    assert d == O.seq_fat(H, g) and verify(H, w)
    d, w = threshold_dim_gamma(H, g)
    assert d == O.threshold_gamma(H, g) and verify(H, w)
    d, w = graph_dim(H, g)
    assert d == O.graph(H, g) and verify(H, w)


@settings(max_examples=40, deadline=None)
@given(classes(max_y=4), st.sampled_from([F(0), F(1, 4)]), st.sampled_from([F(1, 2), F(3, 4), F(1)]))
def test_rs_threshold_matches_oracle(H, r, s):
    d, w = threshold_dim_rs(H, r, s)
    assert d == O.threshold_rs(H, r, s) and verify(H, w)


@settings(max_examples=30, deadline=None)
@given(classes(max_x=3, max_y=4),
       st.sampled_from([IDENTITY, truncated_linear(F(1, 4)), threshold_loss(F(1, 4))]))
def test_online_dim_matches_oracle(H, loss):
    v, w = online_dim(H, loss)
    assert v == O.online(H, loss)
    assert verify_online_witness(H, w, loss)
    if v > 0:
        assert not verify_online_witness(H, w, loss, D=v)


@settings(max_examples=40, deadline=None)
@given(classes(max_y=5))
def test_witness_json_round_trip(H):
    for fn in (lambda: fat_dim(H, F(1, 4)), lambda: seq_fat_dim(H, F(1, 4)),
               lambda: threshold_dim_gamma(H, F(1, 4)), lambda: graph_dim(H),
               lambda: online_dim(H)):
        _, w = fn()
        w2 = witness_from_json(w.to_json())
        assert w2 == w
        assert verify(H, w2)


@settings(max_examples=40, deadline=None)
@given(classes())
def test_monotone_in_gamma(H):
    fats = [fat_dim(H, g)[0] for g in GAMMAS]
    seqs = [seq_fat_dim(H, g)[0] for g in GAMMAS]
    assert fats == sorted(fats, reverse=True)
    assert seqs == sorted(seqs, reverse=True)
    assert all(f <= s for f, s in zip(fats, seqs))


@settings(max_examples=40, deadline=None)
@given(classes(), st.sampled_from(GAMMAS))
def test_threshold_gamma_is_self_dual(H, g):
    assert threshold_dim_gamma(H, g)[0] == threshold_dim_gamma(dual(H), g)[0]


@settings(max_examples=30, deadline=None)
@given(classes(max_y=4), st.sampled_from(GAMMAS[:4]))
def test_adding_hypotheses_never_lowers(H, g):
    sub = make_class(H.x_labels, H.y_labels[:-1] or H.y_labels,
                     [r[:-1] or r for r in H.values])
    assert fat_dim(sub, g)[0] <= fat_dim(H, g)[0]
    assert seq_fat_dim(sub, g)[0] <= seq_fat_dim(H, g)[0]
    assert online_dim(sub)[0] <= online_dim(H)[0]


@settings(max_examples=30, deadline=None)
@given(classes(max_x=3, max_y=4), st.sampled_from(GAMMAS))
def test_online_dominates_sequential_fat(H, g):
    d = seq_fat_dim(H, g)[0]
    assert online_dim(H)[0] >= g * d
    eps = F(1, 4)
    assert online_dim(H, truncated_linear(eps))[0] >= d * truncated_linear(eps)(g)


@settings(max_examples=30, deadline=None)
@given(classes(max_y=4), st.sampled_from(GAMMAS[:4]))
def test_gamma_threshold_bounds_rs(H, g):
    # a short gamma sequence forces a short (r, s) sequence when s - r >= gamma
    t = threshold_dim_gamma(H, g)[0]
    for r in (F(0), F(1, 4)):
        s = r + g
        if s <= 1:
            assert threshold_dim_rs(H, r, s)[0] <= t
