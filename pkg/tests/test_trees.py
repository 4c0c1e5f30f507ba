from dataclasses import replace
from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

import oracles as O
from dimlab import errors as E
from dimlab.core import make_class
from dimlab.dimensions import fat_dim, seq_fat_dim, threshold_dim_gamma, threshold_dim_rs
from dimlab.generators import powerset_class, threshold_class
from dimlab.trees import (BinaryTree, SubtreeEmbedding, gamma_threshold_from_tree, is_valid_embedding,
                          monochromatic_subtree, ones_subtree, rs_threshold_from_gamma,
                          tree_from_rs_threshold, verify_seq_shatter, verify_set_shatter,
                          verify_spread_shatter, verify_threshold)
from dimlab.witness import SetShatterWitness, ThresholdWitness, TreeShatterWitness, node_index, node_moves


def _image_ok(T, emb, colour):
    return all(T.labels[u] == colour for u in emb.image)


def test_heap_addresses_round_trip():
    for k in range(63):
        assert node_index(node_moves(k)) == k


def test_monochromatic_single_colour():
    T = BinaryTree(3, (1,) * 7)
    c, emb = monochromatic_subtree(T, [3])
    assert c == 1 and emb.image == tuple(range(7))
    c, emb = monochromatic_subtree(BinaryTree(3, (2,) * 7), [2, 2])
    assert c == 2 and emb.depth == 2 and is_valid_embedding(emb, 3)


def test_monochromatic_depth_check():
    with pytest.raises(E.DepthTooSmall):
        monochromatic_subtree(BinaryTree(2, (1, 2, 1)), [2, 2])


@pytest.mark.parametrize("depths", [(1, 1), (2, 1), (1, 2, 1), (2, 2, 1), (1, 1, 1), (2, 1, 2)])
def test_monochromatic_exhaustive(depths):
    k = len(depths)
    need = sum(depths) - k + 1
    for cols in product(range(1, k + 1), repeat=(1 << need) - 1):
        T = BinaryTree(need, cols)
        c, emb = monochromatic_subtree(T, depths)
        assert emb.depth == depths[c - 1]
        assert is_valid_embedding(emb, need)
        assert _image_ok(T, emb, c)


def test_embedding_validity_rejects_bad_images():
    assert is_valid_embedding(SubtreeEmbedding(2, (0, 1, 2)), 2)
    # children swapped: left child must go below the root's left child
    assert not is_valid_embedding(SubtreeEmbedding(2, (0, 2, 1)), 2)
    assert not is_valid_embedding(SubtreeEmbedding(2, (0, 1, 9)), 2)


def test_ones_subtree_examples():
    assert ones_subtree(BinaryTree(2, (1, 1, 1)), 2).image == (0, 1, 2)
    emb = ones_subtree(BinaryTree(2, (0, 1, 1)), 1)
    assert emb.image in ((1,), (2,))
    with pytest.raises(E.BranchDeficient) as exc:
        ones_subtree(BinaryTree(2, (0, 1, 0)), 1)
    assert exc.value.detail["branch"][0] == 1  # both right branches lack a 1


def test_ones_subtree_exhaustive():
    d = 3
    for lab in product((0, 1), repeat=7):
        T = BinaryTree(d, lab)
        ok = all(sum(lab[k] for k in _branch(b, d)) >= 2 for b in range(8))
        if not ok:
            with pytest.raises(E.BranchDeficient):
                ones_subtree(T, 2)
            continue
        emb = ones_subtree(T, 2)
        assert is_valid_embedding(emb, d)
        assert all(lab[u] == 1 for u in emb.image)


def _branch(b, d):
    out, k = [], 0
    for t in range(d):
        out.append(k)
        k = 2 * k + (2 if b >> (d - 1 - t) & 1 else 1)
    return out


def test_empty_witnesses_verify():
    H = powerset_class(2)
    assert verify_set_shatter(H, SetShatterWitness(F(1, 2), (), (), (0,)))
    assert verify_seq_shatter(H, TreeShatterWitness(F(1, 2), 0, (), (), (0,)))
    assert verify_threshold(H, ThresholdWitness("gamma", ((0, 0),), gamma=F(1)))


def test_shape_errors():
    H = powerset_class(2)
    with pytest.raises(E.ShapeMismatch):
        verify_seq_shatter(H, TreeShatterWitness(F(1, 2), 1, (0,), (F(1, 2),), (0,)))
    with pytest.raises(E.ShapeMismatch):
        verify_set_shatter(H, SetShatterWitness(F(1, 2), (9,), (F(1, 2),), (0, 1)))


def test_corruption_flips_verdict():
    H = make_class(["a"], ["p", "q"], [["1/4", "3/4"]])
    d, w = fat_dim(H, F(1, 4))
    assert d == 1 and verify_set_shatter(H, w)
    bent = make_class(["a"], ["p", "q"], [[F(1, 4) + F(1, 1000), "3/4"]])
    assert not verify_set_shatter(bent, w)
    d, w = seq_fat_dim(H, F(1, 2))
    assert d == 1 and verify_seq_shatter(H, w)
    assert not verify_seq_shatter(bent, w)
    d, w = threshold_dim_gamma(make_class(["a", "b"], ["p", "q"], [[0, "1/2"], ["1/2", 0]]), F(1, 2))
    assert d == 2
    assert not verify_threshold(make_class(["a", "b"], ["p", "q"], [[0, F(499, 1000)], ["1/2", 0]]), w)


def test_rs_to_tree_examples():
    T = threshold_class(3)
    w = ThresholdWitness("rs", ((0, 0),), r=F(0), s=F(1))
    out = tree_from_rs_threshold(T, w)
    assert out.depth == 0
    d, w = threshold_dim_rs(T, 0, 1)
    w3 = replace(w, pairs=w.pairs[:3])
    out = tree_from_rs_threshold(T, w3)
    assert out.depth == 1 and verify_seq_shatter(T, out)
    assert O.seq_fat(T, F(1)) >= 1
    with pytest.raises(E.BadWitness):
        tree_from_rs_threshold(T, replace(w, pairs=w.pairs[:2]))
    with pytest.raises(E.BadWitness):
        tree_from_rs_threshold(T, ThresholdWitness("gamma", w.pairs[:3], gamma=F(1)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2), st.integers(0, 10 ** 6))
def test_rs_to_tree_on_planted_sequences(d, seed):
    # plant pairs (x_i, y_i) with h_{y_j}(x_i) = 0 and h_{y_i}(x_j) = 1 for i < j
    import random
    rnd = random.Random(seed)
    n = 2 ** (d + 1) - 1
    vals = [[F(rnd.randint(0, 4), 4) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i < j:
                vals[i][j] = F(0)
            elif i > j:
                vals[i][j] = F(1)
    H = make_class([f"a{i}" for i in range(n)], [f"h{j}" for j in range(n)], vals)
    w = ThresholdWitness("rs", tuple((i, i) for i in range(n)), r=F(0), s=F(1))
    out = tree_from_rs_threshold(H, w)
    assert out.depth == d and verify_seq_shatter(H, out)
    assert O.seq_fat(H, F(1)) >= d


def test_gamma_from_tree_precondition():
    H = powerset_class(3)
    _, w = seq_fat_dim(H, F(1, 2))
    with pytest.raises(E.ParameterConstraintViolated):
        gamma_threshold_from_tree(H, w, F(1, 2), F(1, 8), k=5, d=1)
    with pytest.raises(E.ParameterConstraintViolated):
        gamma_threshold_from_tree(H, w, F(1, 2), F(1, 4))
    with pytest.raises(E.ParameterConstraintViolated):
        gamma_threshold_from_tree(H, w, F(1, 2), F(1, 8), k=2, d=1)


def test_gamma_from_tree_base_case():
    # d = 1 with k = 3 needs depth k + 1 = 4
    H = powerset_class(4)
    _, w = seq_fat_dim(H, F(1))
    out = gamma_threshold_from_tree(H, w, F(1), F(1, 4), k=3, d=1)
    assert len(out.pairs) == 1 and verify_threshold(H, out)


def test_gamma_from_tree_depth_13():
    # powerset over 13 points: node at level t asks about point t, so the
    # tree is spread-shattered at gamma = 1; k = 3 and d = 2 need depth 13
    n = 13
    H = powerset_class(n)
    nodes = tuple(node_moves_level(k) for k in range((1 << n) - 1))
    branches = tuple(sum(1 << t for t in range(n) if b >> (n - 1 - t) & 1) for b in range(1 << n))
    assert verify_spread_shatter(H, n, nodes, branches, F(1))
    out = gamma_threshold_from_tree(H, (n, nodes, branches), F(1), F(1, 4), k=3, d=2)
    assert len(out.pairs) == 2 and out.gamma == F(1, 4)
    assert verify_threshold(H, out)


def node_moves_level(k):
    return len(node_moves(k))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_rs_from_gamma_pipeline(seed):
    import random
    rnd = random.Random(seed)
    n = 5
    vals = [[F(rnd.randint(0, 4), 4) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            # h_j(a_i) and h_i(a_j) at least 1/2 apart
            lo = F(rnd.randint(0, 2), 4)
            hi = lo + F(1, 2)
            vals[i][j], vals[j][i] = (lo, hi) if rnd.random() < 0.5 else (hi, lo)
    H = make_class([f"a{i}" for i in range(n)], [f"h{j}" for j in range(n)], vals)
    w = ThresholdWitness("gamma", tuple((i, i) for i in range(n)), gamma=F(1, 2))
    assert verify_threshold(H, w)
    out = rs_threshold_from_gamma(H, w, F(1, 4), 2)
    # two pairs always share one of finitely many colours
    assert out is not None and len(out.pairs) == 2
    assert out.s - out.r == F(1, 4) and verify_threshold(H, out)
