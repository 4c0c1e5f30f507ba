from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

import oracles as O
from dimlab import errors as E
from dimlab.core import dual
from dimlab.dimensions import concept_threshold_dim, seq_fat_dim, threshold_dim_rs
from dimlab.generators import (even_interval_class, h0_class, interval_class, powerset_class,
                               rational_fn_class, rectangle_class, threshold_class, tree_class)


def _valid(H):
    assert len(H.values) == H.nx == len(H.x_labels)
    assert all(len(r) == H.ny == len(H.y_labels) for r in H.values)
    assert all(0 <= v <= 1 for r in H.values for v in r)
    assert len(set(H.x_labels)) == H.nx and len(set(H.y_labels)) == H.ny


def test_powerset():
    H = powerset_class(3)
    assert (H.nx, H.ny) == (3, 8)
    assert O.vc(H) == 3
    assert O.littlestone(H) == 3
    with pytest.raises(E.TooLarge):
        powerset_class(21)


def test_threshold_class():
    T = threshold_class(4)
    assert (T.nx, T.ny) == (4, 5)
    assert O.vc(T) == 1
    assert O.littlestone(threshold_class(7)) == 3
    # c_j = {i : i < j}
    assert T.values[0][0] == 0 and T.values[0][1] == 1 and T.values[3][3] == 0 and T.values[3][4] == 1


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_threshold_class_threshold_dims(n):
    T = threshold_class(n)
    assert concept_threshold_dim(T)[0] == n
    # (0,1) sequences may also pair a_i with c_i, which gains one pair per point
    assert threshold_dim_rs(T, 0, 1)[0] == O.threshold_rs(T, 0, 1) == 2 * n


def test_intervals_and_rectangles():
    assert O.vc(interval_class(5)) == 2
    R = rectangle_class(3, 3)
    assert O.vc(R) == 4
    empty = R.y_labels.index("(0,0,0,0)")
    assert all(R.values[i][empty] == 0 for i in range(R.nx))
    with pytest.raises(E.TooLarge):
        rectangle_class(40, 40)


def test_even_intervals():
    C = even_interval_class(8)
    x2, x3 = C.x_labels.index("2"), C.x_labels.index("3")
    assert C.values[x2][C.y_labels.index("(1,3)")] == 1
    assert C.values[x3][C.y_labels.index("(1,5)")] == 0
    assert O.vc(C) == 2


def test_rational_functions():
    H = rational_fn_class([0, 1, 2], [0, 1, 2], 1, 1)
    j = H.y_labels.index("P=(0,1);Q=(1,1)")
    assert [H.values[i][j] for i in range(3)] == [0, F(1, 2), F(2, 3)]
    half = H.y_labels.index("P=(1,0);Q=(2,0)")
    assert set(H.values[i][half] for i in range(3)) == {F(1, 2)}
    # Q = x vanishes at 0
    assert "P=(0,0);Q=(0,1)" not in H.y_labels
    with pytest.raises(E.EmptyClass):
        rational_fn_class([0], [0, 1], 0, 0)


def test_h0_values():
    H = h0_class(3)
    zero = H.y_labels.index("000")
    assert all(H.values[i][zero] == 0 for i in range(3))
    e0 = H.y_labels.index("100")
    assert H.values[0][e0] == F(7, 8)
    assert H.values[1][e0] == F(1, 8)


@pytest.mark.parametrize("k", range(1, 11))
def test_h0_one_sample_identifies(k):
    H = h0_class(k)
    for row in H.values:
        assert len(set(row)) == H.ny


def test_tree_class():
    gs = (F(2, 5), F(1, 5), F(1, 10))
    H = tree_class(gs, 3)
    root = H.x_labels.index("^")
    for j, b in enumerate(H.y_labels):
        assert H.values[root][j] == int(b[0]) * gs[0]
    assert seq_fat_dim(H, F(3, 20))[0] == O.seq_fat(H, F(3, 20)) == 2
    with pytest.raises(E.BadGammaSequence):
        tree_class((F(1, 4), F(1, 2)), 2)
    with pytest.raises(E.BadRange):
        tree_class((F(1, 2),), 2)


def test_dual_tree_class_identifies_parameters():
    D = dual(tree_class((F(1, 2), F(1, 3), F(1, 4)), 3))
    for x in range(D.nx):
        seen = {}
        for j in range(D.ny):
            v = D.values[x][j]
            if v > 0:
                assert v not in seen, (x, j, seen.get(v))
                seen[v] = j


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["powerset", "threshold", "interval", "even", "h0", "rect"]), st.integers(1, 5))
def test_generators_produce_valid_classes(name, n):
    H = {"powerset": lambda: powerset_class(n), "threshold": lambda: threshold_class(n),
         "interval": lambda: interval_class(n), "even": lambda: even_interval_class(n + 1),
         "h0": lambda: h0_class(n), "rect": lambda: rectangle_class(n, 6 - n)}[name]()
    _valid(H)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(1, 12), min_size=1, max_size=4, unique=True), st.integers(1, 4))
def test_tree_class_fuzz(dens, d):
    gs = sorted((F(1, k) for k in dens), reverse=True)
    if d > len(gs):
        return
    H = tree_class(gs, d)
    _valid(H)
    assert (H.nx, H.ny) == (2 ** d - 1, 2 ** d)
    for x, p in enumerate(H.x_labels):
        p = p[1:]
        for j, b in enumerate(H.y_labels):
            want = gs[len(p)] * int(b[len(p)]) if b.startswith(p) else 0
            assert H.values[x][j] == want
