"""Exact combinatorial dimensions of finite classes, each with a witness.

Hypothesis sets are bitmasks over parameter indices. Searches are
deterministic; where several witnesses exist the one met first in index order
is returned.
"""
import sys
from fractions import Fraction
from itertools import combinations, product

from . import errors as E
from .losses import IDENTITY
from .rational import as_rat
from .witness import (GraphDimWitness, OnlineDimWitness, SetShatterWitness, ThresholdWitness,
                      TreeShatterWitness)

HALF = Fraction(1, 2)
MAX_STATES = 2_000_000
MAX_ONLINE_Y = 16

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


def _gamma(g):
    g = as_rat(g)
    if not 0 < g <= 1:
        raise E.GammaOutOfRange(f"gamma {g} outside (0,1]")
    return g


def _require_concept(C):
    if not C.is_concept:
        raise E.NotConceptClass("class has values other than 0 and 1")


def _low(mask):
    return (mask & -mask).bit_length() - 1


def _floor_log2(n):
    return n.bit_length() - 1


def value_masks(H, x):
    """Sorted [(value, mask of hypotheses taking it at x)]."""
    groups = {}
    for j, v in enumerate(H.values[x]):
        groups[v] = groups.get(v, 0) | (1 << j)
    return sorted(groups.items())


# --- VC and fat shattering --------------------------------------------------

def _set_search(nx, ny, cuts, full):
    """Smallest-first search for the largest set shattered by per-point cuts.

    ``cuts[x]`` lists ``(threshold, mask_bit0, mask_bit1)``. Returns
    ``(points, thresholds, selector)`` of a largest shattered set.
    """
    def extend(A, t, groups, chosen):
        if t == len(A):
            return chosen
        full_count = 1 << (t + 1)
        for s, lo, hi in cuts[A[t]]:
            new = {}
            for pat, m in groups.items():
                a, b = m & lo, m & hi
                if a:
                    new[pat] = a
                if b:
                    new[pat | 1 << t] = b
            if len(new) == full_count:
                r = extend(A, t + 1, new, chosen + [(s, new)])
                if r is not None:
                    return r
        return None

    best = ((), (), (0,))
    for k in range(1, nx + 1):
        if 1 << k > ny:
            break
        hit = None
        for A in combinations(range(nx), k):
            r = extend(A, 0, {0: full}, [])
            if r is not None:
                groups = r[-1][1]
                sel = tuple(_low(groups[p]) for p in range(1 << k))
                hit = (A, tuple(s for s, _ in r), sel)
                break
        if hit is None:
            break
        best = hit
    return best


def vc_dim(C):
    _require_concept(C)
    full = (1 << C.ny) - 1
    cuts = []
    for x in range(C.nx):
        ones = sum(1 << j for j, v in enumerate(C.values[x]) if v == 1)
        cuts.append([(HALF, full & ~ones, ones)] if ones and ones != full else [])
    pts, ths, sel = _set_search(C.nx, C.ny, cuts, full)
    return len(pts), SetShatterWitness(HALF, pts, ths, sel)


def fat_cuts(H, x, gap, strict=False):
    """Undominated cuts at x: low = values <= v_i, high = values >= v_j, v_j - v_i >= gap."""
    vm = value_masks(H, x)
    vals = [v for v, _ in vm]
    pre, acc = [], 0
    for _, m in vm:
        acc |= m
        pre.append(acc)
    full = acc
    best_for_j = {}
    for i, vi in enumerate(vals):
        for j in range(i + 1, len(vals)):
            if vals[j] - vi >= gap:
                best_for_j[j] = i  # later i overwrite: largest low set for this j
                break
    out = []
    for j, i in sorted(best_for_j.items(), key=lambda t: t[1]):
        lo = pre[i]
        hi = full & ~pre[j - 1]
        out.append(((vals[i] + vals[j]) / 2, lo, hi))
    return out


def fat_dim(H, gamma):
    g = _gamma(gamma)
    full = (1 << H.ny) - 1
    cuts = [fat_cuts(H, x, 2 * g) for x in range(H.nx)]
    pts, ths, sel = _set_search(H.nx, H.ny, cuts, full)
    return len(pts), SetShatterWitness(g, pts, ths, sel)


# --- trees -------------------------------------------------------------------

def _build_tree(full, depth, split):
    """Materialize a complete tree; ``split(S, k)`` gives (x, s, left, right) for height k."""
    n_nodes = (1 << depth) - 1
    nodes = [0] * n_nodes
    ths = [HALF] * n_nodes
    branches = [0] * (1 << depth)

    def rec(S, idx, level):
        if level == depth:
            branches[idx - n_nodes] = _low(S)
            return
        x, s, L, R = split(S, depth - level)
        nodes[idx], ths[idx] = x, s
        rec(L, 2 * idx + 1, level + 1)
        rec(R, 2 * idx + 2, level + 1)

    rec(full, 0, 0)
    return tuple(nodes), tuple(ths), tuple(branches)


def _tree_dp(H, splits_at):
    """Generic DP d(S) = max over splits (x, s, L, R) of 1 + min(d(L), d(R))."""
    memo = {}

    def d(S):
        r = memo.get(S)
        if r is not None:
            return r
        cap = _floor_log2(S.bit_count())
        best = 0
        if cap > 0:
            for x in range(H.nx):
                for _, L, R in splits_at(S, x):
                    if d(L) < best or d(R) < best:
                        continue
                    v = 1 + min(d(L), d(R))
                    if v > best:
                        best = v
                        if best == cap:
                            break
                if best == cap:
                    break
        memo[S] = best
        if len(memo) > MAX_STATES:
            raise E.TooLarge("tree search exceeded its state budget")
        return best

    def split(S, k):
        for x in range(H.nx):
            for s, L, R in splits_at(S, x):
                if d(L) >= k - 1 and d(R) >= k - 1:
                    return x, s, L, R
        raise AssertionError("DP inconsistency")

    return d, split


def littlestone_dim(C):
    _require_concept(C)
    full = (1 << C.ny) - 1
    ones = [sum(1 << j for j, v in enumerate(C.values[x]) if v == 1) for x in range(C.nx)]

    def splits_at(S, x):
        R = S & ones[x]
        L = S & ~ones[x]
        return ((HALF, L, R),) if L and R else ()

    d, split = _tree_dp(C, splits_at)
    depth = d(full)
    nodes, ths, br = _build_tree(full, depth, split)
    return depth, TreeShatterWitness(Fraction(1), depth, nodes, ths, br)


def seq_fat_dim(H, gamma):
    """Sequential fat-shattering dimension; node thresholds have margin gamma/2 on each side."""
    g = _gamma(gamma)
    full = (1 << H.ny) - 1
    vms = [value_masks(H, x) for x in range(H.nx)]

    def splits_at(S, x):
        present = [(v, m & S) for v, m in vms[x] if m & S]
        out = []
        n = len(present)
        j = 0
        seen_j = {}
        for i in range(n):
            j = max(j, i + 1)
            while j < n and present[j][0] - present[i][0] < g:
                j += 1
            if j >= n:
                break
            seen_j[j] = i
        for j, i in seen_j.items():
            L = 0
            for _, m in present[:i + 1]:
                L |= m
            R = 0
            for _, m in present[j:]:
                R |= m
            out.append(((present[i][0] + present[j][0]) / 2, L, R))
        return out

    d, split = _tree_dp(H, splits_at)
    depth = d(full)
    nodes, ths, br = _build_tree(full, depth, split)
    return depth, TreeShatterWitness(g, depth, nodes, ths, br)


# --- threshold dimensions ----------------------------------------------------

def _threshold_search(H, compat, symmetric, allowed=None):
    nx, ny = H.nx, H.ny
    npairs = nx * ny
    keep = (1 << npairs) - 1
    if allowed is not None:
        keep = sum(1 << q for q in range(npairs) if allowed(*divmod(q, ny)))
    succ = [0] * npairs
    for q in range(npairs):
        x, y = divmod(q, ny)
        m = 0
        for q2 in range(npairs):
            x2, y2 = divmod(q2, ny)
            if compat(x, y, x2, y2):
                m |= 1 << q2
        succ[q] = m & keep
    memo = {}

    def best(C):
        r = memo.get(C)
        if r is not None:
            return r
        b = 0
        rest = C
        while rest:
            q = _low(rest)
            rest &= rest - 1
            nxt = C & succ[q]
            if symmetric:
                nxt &= ~((2 << q) - 1)
            if 1 + nxt.bit_count() <= b:
                continue
            v = 1 + best(nxt)
            if v > b:
                b = v
        memo[C] = b
        if len(memo) > MAX_STATES:
            raise E.TooLarge("threshold search exceeded its state budget")
        return b

    C = keep
    total = best(C)
    seq = []
    need = total
    while need > 0:
        rest = C
        while rest:
            q = _low(rest)
            rest &= rest - 1
            nxt = C & succ[q]
            if symmetric:
                nxt &= ~((2 << q) - 1)
            if 1 + best(nxt) == need:
                seq.append(divmod(q, ny))
                C = nxt
                break
        need -= 1
    return total, tuple(seq)


def threshold_dim_gamma(H, gamma):
    g = _gamma(gamma)
    V = H.values
    # pair (x,y) may precede (x2,y2) iff |h_{y2}(x) - h_y(x2)| >= g
    d, seq = _threshold_search(H, lambda x, y, x2, y2: abs(V[x][y2] - V[x2][y]) >= g, True)
    return d, ThresholdWitness("gamma", seq, gamma=g)


def threshold_dim_rs(H, r, s):
    r, s = as_rat(r), as_rat(s)
    if not (0 <= r < s <= 1):
        raise E.BadInterval(f"need 0 <= r < s <= 1, got r={r}, s={s}")
    V = H.values
    d, seq = _threshold_search(H, lambda x, y, x2, y2: V[x][y2] <= r and V[x2][y] >= s, False)
    return d, ThresholdWitness("rs", seq, r=r, s=s)


def concept_threshold_dim(C):
    """Longest sequence (a_i, c_i) with a_i in c_j exactly when i < j, for all i, j.

    Unlike the (0,1) threshold dimension this also forbids a_i in c_i, so
    ``threshold_class(n)`` has value n here.
    """
    _require_concept(C)
    V = C.values
    d, seq = _threshold_search(C, lambda x, y, x2, y2: V[x][y2] == 1 and V[x2][y] == 0, False,
                               allowed=lambda x, y: V[x][y] == 0)
    return d, ThresholdWitness("rs", seq, r=Fraction(0), s=Fraction(1))


# --- graph dimension -----------------------------------------------------------

def graph_dim(H, gamma=Fraction(1, 8)):
    """Largest n with targets f_i such that every beta in {0,1}^n is realized.

    beta_i = 0 demands h(x_i) = f_i exactly and beta_i = 1 demands
    |h(x_i) - f_i| > gamma. Because of the equality, only values occurring at
    x_i can serve as targets (midpoints of distinct values never occur), and a
    target must be taken by at least 2^(n-1) hypotheses.
    """
    g = _gamma(gamma)
    full = (1 << H.ny) - 1
    per_x = []
    for x in range(H.nx):
        vm = value_masks(H, x)
        opts = []
        for f, eq in vm:
            far = 0
            for v, m in vm:
                if abs(v - f) > g:
                    far |= m
            if far:
                opts.append((f, eq, far))
        per_x.append(opts)

    best = ((), (), (0,))
    for n in range(1, H.nx + 1):
        if 1 << n > H.ny:
            break
        need = 1 << (n - 1)
        cuts = [[c for c in per_x[x] if c[1].bit_count() >= need] for x in range(H.nx)]
        hit = None
        for A in combinations(range(H.nx), n):
            if any(not cuts[x] for x in A):
                continue
            r = _extend_graph(A, cuts, full)
            if r is not None:
                targets, groups = r
                hit = (A, targets, tuple(_low(groups[p]) for p in range(1 << n)))
                break
        if hit is None:
            break
        best = hit
    pts, tg, sel = best
    return len(pts), GraphDimWitness(g, pts, tg, sel)


def _extend_graph(A, cuts, full):
    def rec(t, groups, chosen):
        if t == len(A):
            return tuple(chosen), groups
        for f, eq, far in cuts[A[t]]:
            new = {}
            for pat, m in groups.items():
                a, b = m & eq, m & far
                if a:
                    new[pat] = a
                if b:
                    new[pat | 1 << t] = b
            if len(new) == 1 << (t + 1):
                r = rec(t + 1, new, chosen + [f])
                if r is not None:
                    return r
        return None

    return rec(0, {0: full}, [])


# --- online dimension --------------------------------------------------------

def online_dim(H, loss=IDENTITY):
    """Exact online dimension of a finite class by DP over hypothesis subsets.

    D(S) = max over x and disjoint nonempty A, B of
    min_{a in A, b in B} loss(|a(x) - b(x)|) + min(D(A), D(B)).
    Since D is monotone under inclusion, A and B may be taken to be unions of
    the level sets of S at x, which is what the search enumerates.
    The witness is padded to a complete tree with zero-weight nodes, so its
    minimum branch weight equals the returned value.
    """
    if H.ny > MAX_ONLINE_Y:
        raise E.ClassTooLarge(f"online_dim supports at most {MAX_ONLINE_Y} parameters, got {H.ny}")
    full = (1 << H.ny) - 1
    vms = [value_masks(H, x) for x in range(H.nx)]
    memo = {}
    choice = {}

    def D(S):
        r = memo.get(S)
        if r is not None:
            return r
        best = Fraction(0)
        arg = None
        if S & (S - 1):
            for x in range(H.nx):
                present = [(v, m & S) for v, m in vms[x] if m & S]
                k = len(present)
                if k < 2:
                    continue
                # first present value always goes to A (A/B symmetric)
                for rest in product((0, 1, 2), repeat=k - 1):
                    if 2 not in rest:
                        continue
                    A = present[0][1]
                    av, bv, B = [present[0][0]], [], 0
                    for (v, m), side in zip(present[1:], rest):
                        if side == 1:
                            A |= m
                            av.append(v)
                        elif side == 2:
                            B |= m
                            bv.append(v)
                    tau = min(loss(abs(a - b)) for a in av for b in bv)
                    val = tau + min(D(A), D(B))
                    if val > best:
                        best, arg = val, (x, tau, A, B)
        memo[S] = best
        if arg is not None:
            choice[S] = arg
        return best

    value = D(full)

    def height(S):
        if S not in choice:
            return 0
        _, _, A, B = choice[S]
        return 1 + max(height(A), height(B))

    depth = height(full)
    n_nodes = (1 << depth) - 1
    nodes, weights, branches = [0] * n_nodes, [Fraction(0)] * n_nodes, [0] * (1 << depth)

    def rec(S, idx, level):
        if level == depth:
            branches[idx - n_nodes] = _low(S)
            return
        if S in choice:
            x, tau, A, B = choice[S]
            nodes[idx], weights[idx] = x, tau
        else:
            A = B = S
        rec(A, 2 * idx + 1, level + 1)
        rec(B, 2 * idx + 2, level + 1)

    rec(full, 0, 0)
    return value, OnlineDimWitness(loss.name, value, depth, tuple(nodes), tuple(weights), tuple(branches))
