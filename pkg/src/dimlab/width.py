"""Widths, mean widths and covering numbers of finite point clouds."""
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from . import errors as E
from .rng import make_rng

MAX_EXHAUSTIVE = 10 ** 6


def _dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def width(A, b):
    """max over a in A of <a, b>."""
    A = [tuple(a) for a in A]
    if not A:
        raise E.DimMismatch("empty point cloud")
    n = len(b)
    if any(len(a) != n for a in A):
        raise E.DimMismatch(f"point and direction dimensions differ (direction has {n})")
    return max(_dot(a, b) for a in A)


def signs(n):
    return product((-1, 1), repeat=n)


def _sign_width(A, s):
    # width against a sign vector without building Fractions for the signs
    best = None
    for a in A:
        v = sum((x if si > 0 else -x for x, si in zip(a, s)), Fraction(0))
        if best is None or v > best:
            best = v
    return best


def rademacher_mean_width(A):
    """Exact average of width(A, s) over all sign vectors s."""
    A = [tuple(a) for a in A]
    if not A:
        raise E.DimMismatch("empty point cloud")
    n = len(A[0])
    if any(len(a) != n for a in A):
        raise E.DimMismatch("points of different dimensions")
    if n > 20:
        raise E.TooLarge(f"exact Rademacher width needs n <= 20, got {n}")
    if n == 0:
        return Fraction(0)
    A = list(set(A))
    total = sum((_sign_width(A, s) for s in signs(n)), Fraction(0))
    return total / (1 << n)


def class_cloud(H, xs):
    """H(x_bar, Y): one vector per hypothesis."""
    return [tuple(H.values[x][j] for x in xs) for j in range(H.ny)]


def class_rademacher(H, n, mode="exhaustive", trials=100, seed=0):
    """Sup over x_bar in X^n of the Rademacher mean width of H(x_bar, Y).

    ``mode="sampled"`` maximizes over ``trials`` random tuples instead and so
    returns a certified lower bound. Returns ``(value, x_bar)``.
    """
    if n < 1:
        raise E.BadRange("n must be at least 1")
    if mode == "exhaustive":
        if H.nx ** n > MAX_EXHAUSTIVE:
            raise E.TooLarge(f"|X|^n = {H.nx ** n} tuples exceed the exhaustive cap")
        candidates = product(range(H.nx), repeat=n)
    elif mode == "sampled":
        rng = make_rng(seed)
        candidates = (tuple(int(v) for v in rng.integers(0, H.nx, size=n)) for _ in range(trials))
    else:
        raise E.BadRange(f"unknown mode {mode!r}")
    best, arg = None, None
    seen = set()
    for xs in candidates:
        key = tuple(sorted(xs))  # width is invariant under permuting coordinates
        if key in seen:
            continue
        seen.add(key)
        v = rademacher_mean_width(class_cloud(H, xs))
        if best is None or v > best:
            best, arg = v, tuple(xs)
    return best, arg


def _path_nodes(s):
    """Heap indices of the tree nodes read along sign sequence s."""
    out, k = [], 0
    for si in s:
        out.append(k)
        k = 2 * k + (2 if si > 0 else 1)
    return out


def seq_tree_width(H, tree, n):
    """Average over s in {-1,1}^n of max_h sum_t s_t h(tree(s_1..s_{t-1}))."""
    V = H.values
    total = Fraction(0)
    cols = range(H.ny)
    for s in signs(n):
        pts = [tree[k] for k in _path_nodes(s)]
        best = None
        for j in cols:
            v = sum((V[x][j] if si > 0 else -V[x][j] for x, si in zip(pts, s)), Fraction(0))
            if best is None or v > best:
                best = v
        total += best
    return total / (1 << n)


def seq_class_rademacher(H, n, mode="exhaustive", trials=100, seed=0):
    """Sup over X-valued trees of depth n of the sequential Rademacher mean width.

    The path vector for s puts s_t at the node (s_1, ..., s_{t-1}). Returns
    ``(value, tree)`` with the tree in heap order.
    """
    if n < 1:
        raise E.BadRange("n must be at least 1")
    n_nodes = (1 << n) - 1
    if mode == "exhaustive":
        if H.nx ** n_nodes * (1 << n) > MAX_EXHAUSTIVE:
            raise E.TooLarge("too many trees for exhaustive search")
        trees = product(range(H.nx), repeat=n_nodes)
    elif mode == "sampled":
        rng = make_rng(seed)
        trees = (tuple(int(v) for v in rng.integers(0, H.nx, size=n_nodes)) for _ in range(trials))
    else:
        raise E.BadRange(f"unknown mode {mode!r}")
    best, arg = None, None
    for tree in trees:
        v = seq_tree_width(H, tree, n)
        if best is None or v > best:
            best, arg = v, tuple(tree)
    return best, arg


def gaussian_mean_width(A, trials, seed=0):
    """Monte Carlo estimate of E max_a <a, g> with g standard normal: (estimate, std_error)."""
    if trials < 1:
        raise E.BadRange("trials must be at least 1")
    M = np.array([[float(v) for v in a] for a in A], dtype=float)
    if M.ndim != 2 or M.shape[0] == 0:
        raise E.DimMismatch("empty point cloud")
    rng = make_rng(seed)
    g = rng.standard_normal((trials, M.shape[1]))
    w = (g @ M.T).max(axis=1)
    est = float(w.mean())
    se = float(w.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return est, se


@dataclass(frozen=True)
class Cover:
    count: int
    exact: bool
    centers: tuple


def _close(a, b, gamma, norm, radius_sq):
    if norm == "linf":
        return all(abs(x - y) <= gamma for x, y in zip(a, b))
    r2 = gamma * gamma if radius_sq is None else radius_sq
    return sum((x - y) ** 2 for x, y in zip(a, b)) <= r2


def _free_linf_balls(pts, gamma):
    """Maximal groups of points fitting in one l-inf ball of radius gamma, with centres.

    A group fits exactly when every coordinate spreads by at most 2*gamma; the
    centre is the coordinatewise midpoint of the spread.
    """
    m, dim = len(pts), len(pts[0])
    groups = []

    def grow(i, mask, lo, hi):
        if i == m:
            groups.append((mask, lo, hi))
            return
        p = pts[i]
        nlo = [min(a, b) for a, b in zip(lo, p)] if mask else list(p)
        nhi = [max(a, b) for a, b in zip(hi, p)] if mask else list(p)
        if all(b - a <= 2 * gamma for a, b in zip(nlo, nhi)):
            grow(i + 1, mask | (1 << i), nlo, nhi)
        grow(i + 1, mask, lo, hi)

    grow(0, 0, [0] * dim, [0] * dim)
    masks = {}
    for mask, lo, hi in groups:
        if mask and mask not in masks:
            masks[mask] = tuple((a + b) / 2 for a, b in zip(lo, hi))
    maximal = [k for k in masks if not any(k != o and k & o == k for o in masks)]
    maximal.sort()
    return maximal, [masks[k] for k in maximal]


def covering_number(A, gamma, norm="linf", radius_sq=None, exact_limit=20, centers="data"):
    """Fewest closed balls that cover A.

    ``norm`` is ``"linf"`` or ``"l2"``. By default centres are points of A;
    ``centers="free"`` (l-inf only, at most 14 distinct points) allows any
    centre and so gives the exact covering number. For l2 the radius may
    instead be given squared via ``radius_sq`` (useful for radii like
    gamma*sqrt(n)). Up to ``exact_limit`` distinct points the count is exact;
    beyond that a greedy cover is returned with ``exact=False``.
    """
    if norm not in ("linf", "l2"):
        raise E.BadRange(f"unknown norm {norm!r}")
    if centers not in ("data", "free"):
        raise E.BadRange(f"unknown centre mode {centers!r}")
    pts = sorted(set(tuple(a) for a in A))
    if not pts:
        raise E.DimMismatch("empty point cloud")
    m = len(pts)
    if centers == "free":
        if norm != "linf":
            raise E.BadRange("free centres are supported for the l-inf norm only")
        if m > 14:
            raise E.TooLarge("free-centre covering supports at most 14 distinct points")
        balls, ctr = _free_linf_balls(pts, gamma)
    else:
        balls = [sum(1 << j for j in range(m) if _close(pts[i], pts[j], gamma, norm, radius_sq))
                 for i in range(m)]
        ctr = pts
    nb = len(balls)
    full = (1 << m) - 1
    if m > exact_limit:
        chosen, covered = [], 0
        while covered != full:
            i = max(range(nb), key=lambda i: ((balls[i] & ~covered).bit_count(), -i))
            chosen.append(i)
            covered |= balls[i]
        return Cover(len(chosen), False, tuple(ctr[i] for i in chosen))

    biggest = max(b.bit_count() for b in balls)

    def search(uncovered, budget, chosen):
        if not uncovered:
            return chosen
        if budget == 0 or uncovered.bit_count() > budget * biggest:
            return None
        p = (uncovered & -uncovered).bit_length() - 1
        opts = [i for i in range(nb) if balls[i] >> p & 1]
        opts.sort(key=lambda i: -(balls[i] & uncovered).bit_count())
        for i in opts:
            r = search(uncovered & ~balls[i], budget - 1, chosen + [i])
            if r is not None:
                return r
        return None

    for k in range(1, m + 1):
        r = search(full, k, [])
        if r is not None:
            return Cover(k, True, tuple(ctr[i] for i in r))
    raise AssertionError("unreachable")
