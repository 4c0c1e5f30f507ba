"""Closed-form sample-complexity and regret bounds (floating point).

Asymptotic bounds take an explicit constant ``C`` (default 1); their values
are meaningful only up to that constant. Logarithms are natural.
"""
import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import errors as E


@dataclass
class BoundReport:
    name: str
    inputs: dict
    value: float
    formula: str
    stages: dict = field(default_factory=dict)

    def to_json(self):
        def enc(v):
            return f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else v
        return {"name": self.name, "inputs": {k: enc(v) for k, v in self.inputs.items()},
                "value": self.value, "formula": self.formula,
                "stages": dict(self.stages)}


def _open01(name, v):
    if not 0 < v < 1:
        raise E.BadRange(f"{name} must lie in (0,1), got {v}")
    return float(v)


def _nonneg(name, v):
    if v < 0:
        raise E.BadRange(f"{name} must be nonnegative, got {v}")
    return float(v)


def fat_pac_bound(dim, eps, delta, C=1):
    """C (1/eps^2) (dim ln^2(1/eps) + ln(1/delta)); dim is the fat dimension at eps/9."""
    e, d = _open01("eps", eps), _open01("delta", delta)
    dim = _nonneg("dim", dim)
    return C * (dim * math.log(1 / e) ** 2 + math.log(1 / d)) / e ** 2


def expectation_pac_bound(d, eps, delta, kind="real", C=1):
    e, dl = _open01("eps", eps), _open01("delta", delta)
    if d < 1:
        raise E.BadRange("d must be at least 1")
    d = float(d)
    if kind == "real":
        return C * (d / e ** 4 * math.log(d / e) ** 2 + math.log(1 / dl) / e ** 2)
    if kind == "concept":
        return C * (d * math.log(d / e) + math.log(1 / dl)) / e ** 2
    raise E.BadRange(f"unknown kind {kind!r}")


def gc_rademacher_bound(n, R_n, delta):
    """(2 R_n / n + delta, exp(-n delta^2 / 2))."""
    if n < 1 or R_n < 0 or delta <= 0:
        raise E.BadRange("need n >= 1, R_n >= 0, delta > 0")
    n, R_n, delta = float(n), float(R_n), float(delta)
    return 2 * R_n / n + delta, math.exp(-n * delta ** 2 / 2)


def gc_expectation_bound(N, eps, delta):
    """N + (8/eps^2) ln(1/delta); delta = 1 is allowed and gives N."""
    if N < 0:
        raise E.BadRange("N must be nonnegative")
    e = _open01("eps", eps)
    if not 0 < delta <= 1:
        raise E.BadRange(f"delta must lie in (0,1], got {delta}")
    return float(N) + 8 / e ** 2 * math.log(1 / float(delta))


def vc_rademacher(d, n):
    """2 sqrt(d n ln(n+1))."""
    d, n = _nonneg("d", d), _nonneg("n", n)
    return 2 * math.sqrt(d * n * math.log(n + 1))


def log_covering_fat_bound(d, gamma, n):
    """Natural log of :func:`covering_fat_bound` (never overflows)."""
    if not 0 < gamma <= 1:
        raise E.BadRange(f"gamma must lie in (0,1], got {gamma}")
    if d < 1 or n < 1:
        raise E.BadRange("d and n must be at least 1")
    g, d, n = float(gamma), float(d), float(n)
    arg = 2 * math.e * n / (d * g)
    if arg <= 1:
        raise E.BadRange("2en/(d gamma) <= 1 makes the bound vacuous")
    return math.log(2) + d * math.log(arg) * math.log(4 * n / g ** 2)


def covering_fat_bound(d, gamma, n):
    """2 (4n/gamma^2)^(d ln(2en/(d gamma))); inf when it overflows a float."""
    lv = log_covering_fat_bound(d, gamma, n)
    try:
        return math.exp(lv)
    except OverflowError:
        return math.inf


def _check_table(table):
    if not table:
        raise E.BadTable("empty sequential fat-shattering table")
    out = {}
    for g, d in table.items():
        gf = float(g)
        if not 0 < gf <= 1 or d < 0:
            raise E.BadTable(f"bad table entry {g} -> {d}")
        out[gf] = float(d)
    return dict(sorted(out.items()))


def _d_at(table, beta):
    """Value at the largest key <= beta (an upper bound, since d is non-increasing)."""
    best = None
    for k, v in table.items():
        if k <= beta + 1e-15:
            best = v
    return best


def _integral(table, gamma, T, points=257):
    keys = [k for k in table if gamma < k < 1]
    cuts = [gamma] + keys + [1.0]
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        if b <= a:
            continue
        d = _d_at(table, a)
        if d == 0:
            continue
        beta = np.linspace(a, b, points)
        f = np.sqrt(d * np.log(2 * math.e * T / beta))
        total += float(np.trapezoid(f, beta))
    return total


def regret_bounds(table, T, grid=None):
    """(lower, upper) minimax regret bounds from a table gamma -> sequential fat dimension.

    ``d(beta)`` in the integral is read from the largest table key <= beta;
    grid points below the smallest key are skipped.
    """
    tab = _check_table(table)
    if T < 1:
        raise E.BadRange("T must be at least 1")
    T = float(T)
    lower = max(min(math.sqrt(d * T), T) for d in tab.values()) / (4 * math.sqrt(2))
    grid = sorted(tab) if grid is None else sorted(float(g) for g in grid)
    lo_key = min(tab)
    cands = []
    for g in grid:
        if g < lo_key or g > 1:
            continue
        cands.append(4 * g * T + 12 * math.sqrt(T) * _integral(tab, g, T))
    if not cands:
        raise E.BadTable("no grid point at or above the smallest table key")
    return lower, min(cands)


def expectation_regret_bound(d, gamma, n):
    """4 gamma n + 12 (1 - gamma) sqrt(d n ln(2en/gamma))."""
    if not 0 < gamma <= 1:
        raise E.BadRange(f"gamma must lie in (0,1], got {gamma}")
    d, n, g = _nonneg("d", d), _nonneg("n", n), float(gamma)
    if n == 0:
        return 0.0
    return 4 * g * n + 12 * (1 - g) * math.sqrt(d * n * math.log(2 * math.e * n / g))


def littlestone_regret(d, T, C=1):
    return C * math.sqrt(float(d) * float(T))


def aggregation_J(m, d_star, variant="linear"):
    """25 m d* (ln 90 + ln m + ln d*)^2, or with m^2 for ``variant="quadratic"``."""
    if m < 1 or d_star < 1:
        raise E.BadRange("m and d* must be at least 1")
    m, ds = float(m), float(d_star)
    lg = (math.log(90) + math.log(m) + math.log(ds)) ** 2
    if variant == "linear":
        return 25 * m * ds * lg
    if variant == "quadratic":
        return 25 * m * m * ds * lg
    raise E.BadRange(f"unknown variant {variant!r}")


def dual_dist_chain(d, d_star, gamma, L_prime=1, delta=0.05, variant="linear", C=1):
    """Three stages: sample count n_k, aggregated dimension J, final sample bound.

    n_k = L' d / gamma^2; J = aggregation_J(n_k, d*); final =
    C (1/eps^2) (d d* / (eps/9)^2 ln^2(1/eps) + ln(1/delta)) with eps = gamma.
    """
    if d <= 0 or d_star <= 0 or L_prime <= 0:
        raise E.BadRange("d, d*, L' must be positive")
    g = _open01("gamma", gamma)
    dl = _open01("delta", delta)
    n_k = float(L_prime) * float(d) / g ** 2
    J = aggregation_J(max(n_k, 1.0), d_star, variant)
    final = C * (float(d) * float(d_star) / (g / 9) ** 2 * math.log(1 / g) ** 2 + math.log(1 / dl)) / g ** 2
    return BoundReport(
        "dual_dist_chain",
        {"d": d, "d_star": d_star, "gamma": gamma, "L_prime": L_prime, "delta": delta,
         "variant": variant, "C": C},
        final,
        "C/eps^2 * (d*d_star/(eps/9)^2 * ln(1/eps)^2 + ln(1/delta)), eps = gamma",
        {"n_k": n_k, "J": J, "final": final},
    )


def sigmod_baseline(lam, eps):
    """eps^-(lambda+1), polylog factors dropped."""
    if lam < 0:
        raise E.BadRange("lambda must be nonnegative")
    e = _open01("eps", eps)
    return e ** (-(float(lam) + 1))


BOUNDS = {
    "fat_pac": fat_pac_bound,
    "expectation_pac": expectation_pac_bound,
    "gc_rademacher": gc_rademacher_bound,
    "gc_expectation": gc_expectation_bound,
    "vc_rademacher": vc_rademacher,
    "covering_fat": covering_fat_bound,
    "expectation_regret": expectation_regret_bound,
    "littlestone_regret": littlestone_regret,
    "aggregation_J": aggregation_J,
    "sigmod_baseline": sigmod_baseline,
}


def grid_csv(fn, grid):
    """Evaluate ``fn`` over the product of the named parameter lists; return CSV text."""
    names = list(grid)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names + ["value"])
    for combo in product(*(grid[k] for k in names)):
        kwargs = dict(zip(names, combo))
        try:
            v = fn(**kwargs)
        except E.BadRange:
            v = "NA"
        if isinstance(v, tuple):
            v = ";".join(repr(float(t)) for t in v)
        elif isinstance(v, BoundReport):
            v = repr(v.value)
        elif v != "NA":
            v = repr(float(v))
        w.writerow([str(c) for c in combo] + [v])
    return buf.getvalue()
