"""Binary trees, subtree embeddings, tree Ramsey and witness verification.

Trees are stored in heap order (see :mod:`dimlab.witness`). An embedding of a
depth-d' tree into a depth-d tree is the tuple of big-tree heap indices that
the small-tree nodes map to.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import ceil

from . import errors as E
from .losses import parse_loss
from .rational import as_rat
from .witness import (GraphDimWitness, OnlineDimWitness, SetShatterWitness, ThresholdWitness,
                      TreeShatterWitness, branch_index, branch_moves, node_index, node_moves)


@dataclass(frozen=True)
class BinaryTree:
    depth: int
    labels: tuple

    def __post_init__(self):
        if self.depth < 0 or len(self.labels) != (1 << self.depth) - 1:
            raise E.ShapeMismatch(f"depth-{self.depth} tree needs {(1 << self.depth) - 1} nodes, "
                                  f"got {len(self.labels)}")

    def __getitem__(self, k):
        return self.labels[k]

    def address(self, k):
        return node_moves(k)


@dataclass(frozen=True)
class SubtreeEmbedding:
    depth: int
    image: tuple


def level(k):
    return (k + 1).bit_length() - 1


def is_descendant(a, b):
    """True when heap node ``a`` equals ``b`` or lies below it."""
    la, lb = level(a), level(b)
    if la < lb:
        return False
    while la > lb:
        a = (a - 1) // 2
        la -= 1
    return a == b


def is_valid_embedding(emb, big_depth):
    img = emb.image
    if len(img) != (1 << emb.depth) - 1:
        return False
    if any(not 0 <= u < (1 << big_depth) - 1 for u in img):
        return False
    for k in range(len(img)):
        for c, side in ((2 * k + 1, 1), (2 * k + 2, 2)):
            if c < len(img) and not is_descendant(img[c], 2 * img[k] + side):
                return False
    return True


def _join(u, left, right):
    """Heap-ordered image of a tree with root ``u`` and the two given subtrees."""
    out = [u]
    t = 0
    while (1 << t) - 1 < len(left):
        a, b = (1 << t) - 1, (1 << (t + 1)) - 1
        out += left[a:b] + right[a:b]
        t += 1
    return out


def subtree_indices(root, depth):
    """Heap indices (level order) of the depth-``depth`` subtree hanging at ``root``."""
    out, layer = [], [root]
    for _ in range(depth):
        out += layer
        layer = [c for u in layer for c in (2 * u + 1, 2 * u + 2)]
    return out


def _two_color(is_first, p, q):
    """Blue/red split: a first-colour subtree of depth p or an other-colour one of depth q."""
    def rec(u, p, q):
        blue = is_first(u)
        if blue and p == 1:
            return True, [u]
        if not blue and q == 1:
            return False, [u]
        if blue:
            L = rec(2 * u + 1, p - 1, q)
            if not L[0]:
                return L
            R = rec(2 * u + 2, p - 1, q)
            if not R[0]:
                return R
            return True, _join(u, L[1], R[1])
        L = rec(2 * u + 1, p, q - 1)
        if L[0]:
            return L
        R = rec(2 * u + 2, p, q - 1)
        if R[0]:
            return R
        return False, _join(u, L[1], R[1])

    return rec(0, p, q)


def monochromatic_subtree(T, depths):
    """Colour index i (1-based) and an embedding of depth d_i whose image has colour i.

    Requires ``T.depth >= sum(depths) - k + 1`` and colours in 1..k.
    """
    depths = [int(d) for d in depths]
    k = len(depths)
    if k == 0 or any(d < 1 for d in depths):
        raise E.BadRange("need at least one positive depth")
    need = sum(depths) - k + 1
    if T.depth < need:
        raise E.DepthTooSmall(f"tree depth {T.depth} < required {need}", required=need)
    for c in T.labels:
        if not 1 <= c <= k:
            raise E.BadRange(f"colour {c} outside 1..{k}")
    labels = list(T.labels)
    colour, img = _mono(labels, depths, 1)
    return colour, SubtreeEmbedding(depths[colour - 1], tuple(img))


def _mono(labels, depths, base):
    k = len(depths)
    if k == 1:
        return base, list(range((1 << depths[0]) - 1))
    p = depths[0]
    q = sum(depths[1:]) - (k - 1) + 1
    blue, img = _two_color(lambda u: labels[u] == base, p, q)
    if blue:
        return base, img
    sub = [labels[u] for u in img]
    colour, inner = _mono(sub, depths[1:], base + 1)
    return colour, [img[i] for i in inner]


def ones_subtree(T, D):
    """Embedding of depth D whose image is labelled 1, when every branch has >= D ones."""
    d = T.depth
    lab = T.labels
    for b in range(1 << d):
        k, ones = 0, 0
        for t in range(d):
            ones += lab[k] == 1
            k = 2 * k + (2 if b >> (d - 1 - t) & 1 else 1)
        if ones < D:
            raise E.BranchDeficient(f"branch has only {ones} ones, need {D}",
                                    branch=list(branch_moves(b, d)))

    def rec(u, D):
        if D == 0:
            return []
        layer = [u]
        while layer:
            hits = [w for w in layer if lab[w] == 1]
            if hits:
                v = hits[0]
                return _join(v, rec(2 * v + 1, D - 1), rec(2 * v + 2, D - 1))
            layer = [c for w in layer for c in (2 * w + 1, 2 * w + 2) if c < len(lab)]
        raise AssertionError("precondition guarantees a 1-node")

    return SubtreeEmbedding(D, tuple(rec(0, D)))


# --- verifiers ---------------------------------------------------------------

def _in_range(H, xs=(), ys=()):
    if any(not 0 <= x < H.nx for x in xs) or any(not 0 <= y < H.ny for y in ys):
        raise E.ShapeMismatch("witness index outside the class")


def verify_set_shatter(H, w, gamma=None):
    g = w.gamma if gamma is None else as_rat(gamma)
    k = len(w.points)
    if len(w.thresholds) != k or len(w.selector) != 1 << k:
        raise E.ShapeMismatch("set witness has inconsistent lengths")
    _in_range(H, w.points, w.selector)
    V = H.values
    for mask, y in enumerate(w.selector):
        for t, (x, s) in enumerate(zip(w.points, w.thresholds)):
            v = V[x][y]
            if mask >> t & 1:
                if v < s + g:
                    return False
            elif v > s - g:
                return False
    return True


def _check_tree_shape(depth, nodes, branches, extra=()):
    if depth < 0 or len(nodes) != (1 << depth) - 1 or len(branches) != 1 << depth:
        raise E.ShapeMismatch("tree witness has inconsistent lengths")
    for e in extra:
        if len(e) != len(nodes):
            raise E.ShapeMismatch("per-node data has the wrong length")


def verify_seq_shatter(H, w, gamma=None):
    """Margins are gamma/2 on each side of the node thresholds."""
    g = w.gamma if gamma is None else as_rat(gamma)
    d = w.depth
    _check_tree_shape(d, w.nodes, w.branches, (w.thresholds,))
    _in_range(H, w.nodes, w.branches)
    V = H.values
    half = g / 2
    for b, y in enumerate(w.branches):
        k = 0
        for t in range(d):
            right = b >> (d - 1 - t) & 1
            v = V[w.nodes[k]][y]
            s = w.thresholds[k]
            if right:
                if v < s + half:
                    return False
            elif v > s - half:
                return False
            k = 2 * k + (2 if right else 1)
    return True


def verify_threshold(H, w):
    pairs = w.pairs
    _in_range(H, [p[0] for p in pairs], [p[1] for p in pairs])
    V = H.values
    if w.mode == "gamma":
        g = w.gamma
        return all(abs(V[xi][yj] - V[xj][yi]) >= g
                   for (xi, yi), (xj, yj) in combinations(pairs, 2))
    if w.mode == "rs":
        return all(V[xi][yj] <= w.r and V[xj][yi] >= w.s
                   for (xi, yi), (xj, yj) in combinations(pairs, 2))
    raise E.ShapeMismatch(f"unknown threshold mode {w.mode!r}")


def verify_graph(H, w, gamma=None):
    g = w.gamma if gamma is None else as_rat(gamma)
    n = len(w.points)
    if len(w.targets) != n or len(w.selector) != 1 << n:
        raise E.ShapeMismatch("graph witness has inconsistent lengths")
    _in_range(H, w.points, w.selector)
    V = H.values
    for beta, y in enumerate(w.selector):
        for t, (x, f) in enumerate(zip(w.points, w.targets)):
            v = V[x][y]
            if beta >> t & 1:
                if not abs(v - f) > g:
                    return False
            elif v != f:
                return False
    return True


def _cross_ok(H, depth, nodes, branches, test):
    """Check ``test(node_index, left_values, right_values)`` at every node."""
    V = H.values
    for k in range(len(nodes)):
        t = level(k)
        pos = k - ((1 << t) - 1)
        span = 1 << (depth - t)
        lo = pos * span
        x = nodes[k]
        left = {V[x][y] for y in branches[lo:lo + span // 2]}
        right = {V[x][y] for y in branches[lo + span // 2:lo + span]}
        if not test(k, left, right):
            return False
    return True


def verify_spread_shatter(H, depth, nodes, branches, eps):
    """Every two branches differ by at least ``eps`` at their last common node."""
    eps = as_rat(eps)
    _check_tree_shape(depth, nodes, branches)
    _in_range(H, nodes, branches)
    return _cross_ok(H, depth, nodes, branches,
                     lambda k, L, R: all(abs(a - b) >= eps for a in L for b in R))


def verify_online_witness(H, w, loss=None, D=None):
    """Crossing condition at every node plus the branch-weight condition.

    With ``D`` given, every branch weight must exceed ``D`` (the defining
    strict inequality). Without it, every branch weight must be at least the
    witness's own ``value``, which certifies online dimension >= value.
    """
    loss = parse_loss(w.loss) if loss is None else parse_loss(loss)
    d = w.depth
    _check_tree_shape(d, w.nodes, w.branches, (w.weights,))
    _in_range(H, w.nodes, w.branches)
    if any(not 0 <= t <= 1 for t in w.weights):
        return False
    if not _cross_ok(H, d, w.nodes, w.branches,
                     lambda k, L, R: all(loss(abs(a - b)) >= w.weights[k] for a in L for b in R)):
        return False
    for b in range(1 << d):
        k, total = 0, Fraction(0)
        for t in range(d):
            total += w.weights[k]
            k = 2 * k + (2 if b >> (d - 1 - t) & 1 else 1)
        if D is None:
            if total < w.value:
                return False
        elif not total > as_rat(D):
            return False
    return True


def verify(H, w, **kw):
    """Dispatch on witness type."""
    if isinstance(w, SetShatterWitness):
        return verify_set_shatter(H, w, kw.get("gamma"))
    if isinstance(w, TreeShatterWitness):
        return verify_seq_shatter(H, w, kw.get("gamma"))
    if isinstance(w, ThresholdWitness):
        return verify_threshold(H, w)
    if isinstance(w, GraphDimWitness):
        return verify_graph(H, w, kw.get("gamma"))
    if isinstance(w, OnlineDimWitness):
        return verify_online_witness(H, w, kw.get("loss"), kw.get("D"))
    raise E.ShapeMismatch(f"unsupported witness {type(w).__name__}")


# --- converters --------------------------------------------------------------

def _rs_order(d):
    """Addresses of {-1,1}^{<=d} in the order used by the threshold-to-tree map.

    A branch E passing right of node u must come before u in the sequence (so
    that h_E(a_u) >= s) and one passing left must come after it, hence: right
    subtree, node, left subtree.
    """
    def walk(u):
        if len(u) == d:
            return [u]
        return walk(u + (1,)) + [u] + walk(u + (-1,))
    return walk(())


def tree_from_rs_threshold(H, w):
    """Depth-d tree fat-shattered at s - r from an (r,s) sequence of length 2^(d+1) - 1."""
    if w.mode != "rs":
        raise E.BadWitness("need an (r,s) threshold witness")
    n = len(w.pairs)
    d = (n + 1).bit_length() - 2
    if n < 1 or (1 << (d + 1)) - 1 != n:
        raise E.BadWitness(f"witness length {n} is not of the form 2^(d+1)-1")
    if not verify_threshold(H, w):
        raise E.BadWitness("threshold witness does not verify")
    nodes = [0] * ((1 << d) - 1)
    branches = [0] * (1 << d)
    for (x, y), u in zip(w.pairs, _rs_order(d)):
        if len(u) == d:
            branches[branch_index(u)] = y
        else:
            nodes[node_index(u)] = x
    gamma = w.s - w.r
    mid = (w.r + w.s) / 2
    out = TreeShatterWitness(gamma, d, tuple(nodes), (mid,) * len(nodes), tuple(branches))
    assert verify_seq_shatter(H, out)
    return out


def ramsey_depth(k, d):
    """(k^(d+1) - 1)/(k - 1): tree depth that guarantees a length-d sequence."""
    return sum(k ** i for i in range(d + 1))


def default_k(gamma, delta):
    return int(1 / (gamma - 2 * delta)) + 1


def gamma_threshold_from_tree(H, witness, gamma, delta, k=None, d=None):
    """delta-threshold sequence of length d from a gamma spread-shattered tree.

    ``witness`` is a :class:`TreeShatterWitness` (sequential shattering at
    gamma implies spread-shattering at gamma) or a tuple
    ``(depth, nodes, branches)``.
    """
    gamma, delta = as_rat(gamma), as_rat(delta)
    if isinstance(witness, TreeShatterWitness):
        depth, nodes, branches = witness.depth, witness.nodes, witness.branches
    else:
        depth, nodes, branches = witness
    if not (0 < delta < gamma / 2):
        raise E.ParameterConstraintViolated(f"need 0 < delta < gamma/2, got delta={delta}, gamma={gamma}")
    if k is None:
        k = default_k(gamma, delta)
    if k < 2 or not k > 1 / (gamma - 2 * delta):
        raise E.ParameterConstraintViolated(f"need k > 1/(gamma - 2 delta) = {1 / (gamma - 2 * delta)}, got {k}")
    if d is None:
        d = 0
        while ramsey_depth(k, d + 1) <= depth:
            d += 1
    need = ramsey_depth(k, d)
    if d >= 1 and depth < need:
        raise E.ParameterConstraintViolated(f"tree depth {depth} < required {need} for d={d}, k={k}",
                                            required=need)
    if not verify_spread_shatter(H, depth, nodes, branches, gamma):
        raise E.BadWitness("tree is not spread-shattered at gamma")
    pairs = _gamma_from_tree(H, list(nodes), list(branches), depth, d, k, delta)
    out = ThresholdWitness("gamma", tuple(pairs), gamma=delta)
    assert verify_threshold(H, out)
    return out


def _interval(v, k):
    """1-based index of the piece [i/k, (i+1)/k) containing v; the last piece is closed."""
    return min(int(v * k), k - 1) + 1


def _dist(vals, lo, hi):
    return min(lo - v if v < lo else (v - hi if v > hi else Fraction(0)) for v in vals)


def _gamma_from_tree(H, nodes, branches, depth, d, k, delta):
    V = H.values
    if d == 0:
        return []
    if d == 1:
        return [(nodes[0] if nodes else 0, branches[0])]
    prev = ramsey_depth(k, d - 1)
    need = k * prev + 1
    h = branches[0]
    colours = BinaryTree(need, tuple(_interval(V[nodes[i]][h], k) for i in range((1 << need) - 1)))
    a, emb = monochromatic_subtree(colours, [prev + 1] * k)
    img = emb.image
    sub_depth = prev + 1
    # branch labels of the embedded tree: leave through the last embedded node, then go left
    last_level = (1 << (sub_depth - 1)) - 1
    first_leaf = (1 << depth) - 1
    sub_branches = []
    for b in range(1 << sub_depth):
        u = img[last_level + b // 2]
        c = 2 * u + (2 if b & 1 else 1)
        while c < first_leaf:
            c = 2 * c + 1
        sub_branches.append(branches[c - first_leaf])
    sub_nodes = [nodes[u] for u in img]
    x_root = sub_nodes[0]
    half = len(sub_branches) // 2
    L = {V[x_root][y] for y in sub_branches[:half]}
    R = {V[x_root][y] for y in sub_branches[half:]}
    lo, hi = Fraction(a - 1, k), Fraction(a, k)
    if _dist(L, lo, hi) >= delta:
        child, side = 1, sub_branches[:half]
    else:
        assert _dist(R, lo, hi) >= delta
        child, side = 2, sub_branches[half:]
    inner_nodes = [sub_nodes[i] for i in subtree_indices(child, prev)]
    rest = _gamma_from_tree(H, inner_nodes, side, prev, d - 1, k, delta)
    return rest + [(x_root, h)]


def rs_threshold_from_gamma(H, w, delta, d):
    """(r,s) sequence with s - r = delta extracted from a gamma-threshold sequence.

    Colours each pair i < j by the first k in 0..n-1 (n = ceil(1/(gamma-delta)))
    and orientation separating the two cross values by [k/n, k/n + delta], then
    searches exhaustively for a monochromatic clique of size d. Returns None
    if there is none.
    """
    delta = as_rat(delta)
    if w.mode != "gamma":
        raise E.BadWitness("need a gamma threshold witness")
    g = w.gamma
    if not 0 < delta < g:
        raise E.ParameterConstraintViolated("need 0 < delta < gamma")
    if not verify_threshold(H, w):
        raise E.BadWitness("threshold witness does not verify")
    n = ceil(1 / (g - delta))
    V = H.values
    P = w.pairs
    m = len(P)

    def colour(i, j):
        (xi, yi), (xj, yj) = P[i], P[j]
        lo_first = V[xi][yj]  # h_j(a_i)
        hi_first = V[xj][yi]  # h_i(a_j)
        for kk in range(n):
            r = Fraction(kk, n)
            if lo_first <= r and hi_first >= r + delta:
                return (kk, 0)
            if hi_first <= r and lo_first >= r + delta:
                return (kk, 1)
        raise AssertionError("gamma gap always admits a colour")

    col = {(i, j): colour(i, j) for i, j in combinations(range(m), 2)}
    if d <= 1:
        if m == 0 or d <= 0:
            return ThresholdWitness("rs", (), r=Fraction(0), s=delta)
        return ThresholdWitness("rs", (P[0],), r=Fraction(0), s=delta)
    for c in sorted(set(col.values())):
        clique = _clique(m, d, lambda i, j: col[(i, j)] == c)
        if clique is not None:
            kk, flip = c
            seq = [P[i] for i in clique]
            if flip:
                seq.reverse()
            out = ThresholdWitness("rs", tuple(seq), r=Fraction(kk, n), s=Fraction(kk, n) + delta)
            assert verify_threshold(H, out)
            return out
    return None


def _clique(m, d, adj):
    def rec(chosen, start):
        if len(chosen) == d:
            return chosen
        for i in range(start, m):
            if all(adj(j, i) for j in chosen):
                r = rec(chosen + [i], i + 1)
                if r:
                    return r
        return None
    return rec([], 0)
