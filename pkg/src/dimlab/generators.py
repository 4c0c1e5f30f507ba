"""Constructors for the named example and counterexample classes."""
from fractions import Fraction
from itertools import product

from . import errors as E
from .core import HypothesisClass, from_columns
from .rational import as_rat

_ZERO, _ONE = Fraction(0), Fraction(1)
MAX_PARAMS = 10_000


def _bit(b):
    return _ONE if b else _ZERO


def powerset_class(n):
    if n < 1:
        raise E.BadRange("n must be at least 1")
    if n > 20:
        raise E.TooLarge(f"powerset_class({n}) would have 2^{n} parameters")
    xs = [str(i) for i in range(1, n + 1)]
    # parameter m encodes the subset {i : bit i-1 of m set}
    ys = ["{" + ",".join(str(i + 1) for i in range(n) if m >> i & 1) + "}" for m in range(2 ** n)]
    vals = tuple(tuple(_bit(m >> i & 1) for m in range(2 ** n)) for i in range(n))
    return HypothesisClass(tuple(xs), tuple(ys), vals)


def threshold_class(n):
    """c_j = {i : i < j} on X = 1..n, Y = 1..n+1."""
    if n < 1:
        raise E.BadRange("n must be at least 1")
    xs = [str(i) for i in range(1, n + 1)]
    ys = [str(j) for j in range(1, n + 2)]
    vals = tuple(tuple(_bit(i < j) for j in range(1, n + 2)) for i in range(1, n + 1))
    return HypothesisClass(tuple(xs), tuple(ys), vals)


def interval_class(n):
    if n < 1:
        raise E.BadRange("n must be at least 1")
    pairs = [(a, b) for a in range(1, n + 1) for b in range(a, n + 1)]
    if len(pairs) > MAX_PARAMS:
        raise E.TooLarge(f"{len(pairs)} intervals exceed the parameter cap")
    xs = [str(i) for i in range(1, n + 1)]
    ys = [f"[{a},{b}]" for a, b in pairs]
    vals = tuple(tuple(_bit(a <= x <= b) for a, b in pairs) for x in range(1, n + 1))
    return HypothesisClass(tuple(xs), tuple(ys), vals)


def rectangle_class(w, h):
    """Axis-aligned rectangles on the grid {1..w} x {1..h}.

    Parameters are (x1, x2, y1, y2) with x1 <= x2, y1 <= y2, plus the
    rectangle (0,0,0,0) that misses the grid entirely.
    """
    if w < 1 or h < 1:
        raise E.BadRange("grid sizes must be at least 1")
    n_params = (w * (w + 1) // 2) * (h * (h + 1) // 2) + 1
    if n_params > MAX_PARAMS:
        raise E.TooLarge(f"{n_params} rectangles exceed the parameter cap")
    rects = [(0, 0, 0, 0)]
    rects += [(a1, a2, b1, b2)
              for a1 in range(1, w + 1) for a2 in range(a1, w + 1)
              for b1 in range(1, h + 1) for b2 in range(b1, h + 1)]
    pts = [(i, j) for i in range(1, w + 1) for j in range(1, h + 1)]
    xs = [f"({i},{j})" for i, j in pts]
    ys = ["(" + ",".join(map(str, r)) + ")" for r in rects]
    vals = tuple(tuple(_bit(r[0] <= i <= r[1] and r[2] <= j <= r[3]) for r in rects) for i, j in pts)
    return HypothesisClass(tuple(xs), tuple(ys), vals)


def even_interval_class(n):
    if n < 2:
        raise E.BadRange("n must be at least 2")
    pairs = [(a, b) for a in range(1, n + 1) for b in range(a, n + 1)]
    xs = [str(i) for i in range(1, n + 1)]
    ys = [f"({a},{b})" for a, b in pairs]
    vals = tuple(tuple(_bit(x % 2 == 0 and a <= x <= b) for a, b in pairs) for x in range(1, n + 1))
    return HypothesisClass(tuple(xs), tuple(ys), vals)


def _poly(coeffs, x):
    acc = _ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def rational_fn_class(coeff_grid, x_grid, deg_p, deg_q):
    """Functions P/Q with coefficients (ascending powers) drawn from ``coeff_grid``.

    Tuples where Q vanishes on ``x_grid`` or P/Q leaves [0,1] there are dropped.
    """
    if not (0 <= deg_p <= 5 and 0 <= deg_q <= 5):
        raise E.BadRange("degrees must lie in 0..5")
    grid = sorted({as_rat(c) for c in coeff_grid})
    xg = [as_rat(x) for x in x_grid]
    if not grid or not xg:
        raise E.BadRange("coefficient and x grids must be nonempty")
    if len(set(xg)) != len(xg):
        raise E.DuplicateLabel("x_grid repeats a point")
    n_params = len(grid) ** (deg_p + deg_q + 2)
    if n_params > MAX_PARAMS:
        raise E.TooLarge(f"{n_params} coefficient tuples exceed the parameter cap")
    cols, ys = [], []
    for p in product(grid, repeat=deg_p + 1):
        for q in product(grid, repeat=deg_q + 1):
            col = []
            for x in xg:
                den = _poly(q, x)
                if den == 0:
                    break
                v = _poly(p, x) / den
                if v < 0 or v > 1:
                    break
                col.append(v)
            else:
                cols.append(tuple(col))
                ys.append("P=(" + ",".join(map(str, p)) + ");Q=(" + ",".join(map(str, q)) + ")")
    if not cols:
        raise E.EmptyClass("no coefficient tuple yields a [0,1]-valued function on the grid")
    return from_columns([str(x) for x in xg], ys, cols)


def h0_value(i, b):
    """(3/4) b_i + (1/8) sum_j b_j 2^-j for a bit tuple b."""
    tail = sum((Fraction(1, 2 ** j) for j, bj in enumerate(b) if bj), _ZERO)
    return Fraction(3, 4) * b[i] + tail / 8


def h0_class(k):
    if k < 1:
        raise E.BadRange("k must be at least 1")
    if k > 20:
        raise E.TooLarge(f"h0_class({k}) would have 2^{k} parameters")
    bits = list(product((0, 1), repeat=k))
    xs = [f"x{i}" for i in range(k)]
    ys = ["".join(map(str, b)) for b in bits]
    vals = tuple(tuple(h0_value(i, b) for b in bits) for i in range(k))
    return HypothesisClass(tuple(xs), tuple(ys), vals)


def h0_witness_mixture(k):
    """Lambdas and pairs of two-choice mixtures that graph-shatter h0_class(k) at 1/8.

    For each b, mixes h_b with h_{1...1} so the value at every x_i with b_i = 0
    is exactly 1/2. Returns (lambdas, pairs) indexed like the parameters of
    ``h0_class(k)``.
    """
    bits = list(product((0, 1), repeat=k))
    ones = len(bits) - 1
    c1 = h0_value(0, bits[ones]) - Fraction(3, 4)
    lambdas, pairs = [], []
    for j, b in enumerate(bits):
        cb = sum((Fraction(1, 2 ** t) for t, bt in enumerate(b) if bt), _ZERO) / 8
        # lam*cb + (1-lam)*(3/4 + c1) = 1/2
        top = Fraction(3, 4) + c1
        lam = (top - Fraction(1, 2)) / (top - cb)
        lambdas.append(lam)
        pairs.append((j, ones))
    return lambdas, pairs


def check_gamma_sequence(gammas):
    gs = [as_rat(g) for g in gammas]
    if not gs:
        raise E.BadGammaSequence("gamma sequence is empty")
    for g in gs:
        if not 0 < g <= 1:
            raise E.BadGammaSequence(f"gamma {g} outside (0,1]")
    for a, b in zip(gs, gs[1:]):
        if not a > b:
            raise E.BadGammaSequence("gammas must be strictly decreasing")
    return gs


def tree_class(gammas, d):
    """Truncation of the binary-tree class: X = strings of length < d, Y = strings of length d.

    h_b(x) = b_{|x|} * gamma_{|x|} when x is a prefix of b, else 0.
    """
    gs = check_gamma_sequence(gammas)
    if d < 1:
        raise E.BadRange("depth must be at least 1")
    if d > len(gs):
        raise E.BadRange(f"depth {d} exceeds the {len(gs)} supplied gammas")
    if d > 12:
        raise E.TooLarge(f"tree_class depth {d} exceeds 12")
    nodes = [p for t in range(d) for p in product((0, 1), repeat=t)]
    branches = list(product((0, 1), repeat=d))
    xs = ["^" + "".join(map(str, p)) for p in nodes]
    ys = ["".join(map(str, b)) for b in branches]
    vals = tuple(
        tuple(gs[len(p)] * b[len(p)] if b[:len(p)] == p else _ZERO for b in branches)
        for p in nodes
    )
    return HypothesisClass(tuple(xs), tuple(ys), vals)
