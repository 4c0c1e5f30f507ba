"""Monte Carlo PAC experiments on finite classes.

Losses are squared, ``(h(x) - y)^2``. Randomness only picks the sample; every
empirical and true risk inside a trial is computed exactly.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import errors as E
from .bounds import gc_expectation_bound
from .core import dual_distribution_class, uniform
from .rational import as_rat, fmt_rat
from .rng import make_rng

ZERO = Fraction(0)


@dataclass(frozen=True)
class SamplePoint:
    x: int
    y: Fraction


@dataclass(frozen=True)
class FiniteDistributionP:
    """Distribution on X x [0,1] given by weighted atoms ``(SamplePoint, weight)``."""

    atoms: tuple

    def __post_init__(self):
        if not self.atoms:
            raise E.BadDistribution("no atoms")
        for pt, w in self.atoms:
            if w <= 0:
                raise E.BadDistribution("atom weights must be positive")
            if not 0 <= pt.y <= 1:
                raise E.ValueOutOfRange(f"label {pt.y} outside [0,1]")
        if sum(w for _, w in self.atoms) != 1:
            raise E.BadDistribution("atom weights must sum to 1")

    def to_json(self):
        return {"atoms": [[a.x, fmt_rat(a.y), fmt_rat(w)] for a, w in self.atoms]}


def make_p(atoms):
    """Build from ``[(x, y, weight), ...]``."""
    return FiniteDistributionP(tuple((SamplePoint(int(x), as_rat(y)), as_rat(w)) for x, y, w in atoms))


def realizable_p(H, j, D):
    """Labels from hypothesis j, points drawn from the distribution D on X."""
    return FiniteDistributionP(tuple((SamplePoint(x, H.values[x][j]), w) for x, w in D.items()))


@dataclass(frozen=True)
class StatReport:
    name: str
    fraction: float
    trials: int
    seed: int
    params: dict

    @property
    def sigma(self):
        f = self.fraction
        return math.sqrt(f * (1 - f) / self.trials)

    @property
    def interval(self):
        s = 3 * self.sigma
        return (max(0.0, self.fraction - s), min(1.0, self.fraction + s))

    def to_json(self):
        return {"name": self.name, "fraction": self.fraction, "trials": self.trials,
                "seed": self.seed, "sigma": self.sigma, "interval_3sigma": list(self.interval),
                "params": self.params}


def _check_x(H, x):
    if not 0 <= x < H.nx:
        raise IndexError(f"point index {x} out of range")


def exp_loss(H, h, P):
    if not 0 <= h < H.ny:
        raise IndexError(f"hypothesis index {h} out of range")
    total = ZERO
    for pt, w in P.atoms:
        _check_x(H, pt.x)
        total += w * (H.values[pt.x][h] - pt.y) ** 2
    return total


def best_exp_loss(H, P):
    losses = [exp_loss(H, j, P) for j in range(H.ny)]
    best = min(losses)
    return best, losses.index(best)


def erm(H, samples):
    if not samples:
        raise E.EmptySample("ERM needs at least one sample")
    best, arg = None, None
    for j in range(H.ny):
        s = ZERO
        for pt in samples:
            _check_x(H, pt.x)
            s += (H.values[pt.x][j] - pt.y) ** 2
        if best is None or s < best:
            best, arg = s, j
    return arg


def _scaled(mat):
    """Integer matrix equal to ``mat * K`` for the lcm K of its denominators."""
    K = 1
    for row in mat:
        for v in row:
            K = math.lcm(K, v.denominator)
    return [[int(v * K) for v in row] for row in mat], K


def _int_array(rows, bound):
    return np.array(rows, dtype=np.int64 if bound < 2 ** 62 else object)


def _positive(name, v):
    if isinstance(v, bool) or int(v) != v or v < 1:
        raise E.BadRange(f"{name} must be a positive integer, got {v}")
    return int(v)


def _draw_counts(rng, weights, m, trials):
    p = np.array([float(w) for w in weights])
    p /= p.sum()
    idx = rng.choice(len(p), size=(trials, m), p=p)
    counts = np.zeros((trials, len(p)), dtype=np.int64)
    for k in range(len(p)):
        counts[:, k] = (idx == k).sum(axis=1)
    return counts


def gc_estimate(H, D, m, trials, eps, seed=0):
    """Fraction of m-samples from D where some h has |empirical mean - E_D h| > eps."""
    m, trials = _positive("m", m), _positive("trials", trials)
    eps = as_rat(eps)
    if eps <= 0:
        raise E.BadRange("eps must be positive")
    for x in D.support:
        _check_x(H, x)
    sup = list(D.support)
    mean = [sum((w * H.values[x][j] for x, w in D.items()), ZERO) for j in range(H.ny)]
    vals, K = _scaled([[H.values[x][j] for j in range(H.ny)] for x in sup])
    A = _int_array(vals, K * m)
    counts = _draw_counts(make_rng(seed), D.weights, m, trials)
    sums = counts @ A  # trials x ny, equals m*K*empirical mean
    bad = 0
    cache = {}
    for row in map(tuple, sums):
        r = cache.get(row)
        if r is None:
            r = any(abs(Fraction(int(s), m * K) - mu) > eps for s, mu in zip(row, mean))
            cache[row] = r
        bad += r
    return StatReport("gc_estimate", bad / trials, trials, int(seed),
                      {"m": m, "eps": fmt_rat(eps)})


def pac_trial(H, P, n, trials, eps, seed=0):
    """Fraction of trials where ERM on n samples from P is within eps of the best expected loss."""
    n, trials = _positive("n", n), _positive("trials", trials)
    eps = as_rat(eps)
    if eps <= 0:
        raise E.BadRange("eps must be positive")
    for pt, _ in P.atoms:
        _check_x(H, pt.x)
    true = [exp_loss(H, j, P) for j in range(H.ny)]
    best = min(true)
    good = [t <= best + eps for t in true]
    L, K = _scaled([[(H.values[pt.x][j] - pt.y) ** 2 for j in range(H.ny)] for pt, _ in P.atoms])
    A = _int_array(L, K * n)
    counts = _draw_counts(make_rng(seed), [w for _, w in P.atoms], n, trials)
    emp = counts @ A
    ok = 0
    for row in emp:
        j = int(np.argmin(row))  # first minimum, i.e. lowest index
        ok += good[j]
    return StatReport("pac_trial", ok / trials, trials, int(seed),
                      {"n": n, "eps": fmt_rat(eps)})


def massart_N(size, eps):
    """Smallest N with sqrt(2 ln|H| / n) <= eps/4 for n >= N (Rademacher bound of a finite class)."""
    if size <= 1:
        return 0
    return math.ceil(32 * math.log(size) / float(eps) ** 2)


def pac_sample_size(H, eps, delta):
    """Sample size from the GC bound at (eps/2, delta/2) for the finite squared-loss class."""
    e2 = as_rat(eps) / 2
    N = massart_N(H.ny, e2)
    return math.ceil(gc_expectation_bound(N, e2, float(delta) / 2))


@dataclass(frozen=True)
class SelectivityReport:
    n: int
    trials: int
    seed: int
    mean_excess: float
    median_excess: float
    best_loss: Fraction
    best_candidate: int

    def to_json(self):
        return {"n": self.n, "trials": self.trials, "seed": self.seed,
                "mean_excess": self.mean_excess, "median_excess": self.median_excess,
                "best_loss": fmt_rat(self.best_loss), "best_candidate": self.best_candidate}


def selectivity_demo(base, mu, candidates, n, trials, seed=0):
    """Learn a selectivity function from labelled ranges.

    Ranges are the parameters of ``base`` drawn uniformly; the label of range c
    is its hidden mass mu(c). ERM runs over the candidate distributions.
    """
    if not candidates:
        raise E.BadRange("no candidate distributions")
    n, trials = _positive("n", n), _positive("trials", trials)
    Hd = dual_distribution_class(base, candidates)
    target = dual_distribution_class(base, [mu])
    ranges = uniform(range(base.ny))
    P = FiniteDistributionP(tuple((SamplePoint(c, target.values[c][0]), w) for c, w in ranges.items()))
    true = [exp_loss(Hd, j, P) for j in range(Hd.ny)]
    best = min(true)
    L, K = _scaled([[(Hd.values[pt.x][j] - pt.y) ** 2 for j in range(Hd.ny)] for pt, _ in P.atoms])
    A = _int_array(L, K * n)
    counts = _draw_counts(make_rng(seed), [w for _, w in P.atoms], n, trials)
    emp = counts @ A
    excess = [float(true[int(np.argmin(row))] - best) for row in emp]
    return SelectivityReport(n, trials, int(seed), float(np.mean(excess)), float(np.median(excess)),
                             best, true.index(best))

