"""Finite hypothesis classes with exact rational values, and derived classes."""
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from . import errors as E
from .rational import as_rat, fmt_rat

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True, eq=True)
class HypothesisClass:
    """Rows are range points ``X``, columns are parameters ``Y``.

    ``values[i][j]`` is ``h_{y_j}(x_i)``. Build through :func:`make_class`
    unless the inputs are already validated tuples of Fractions.
    """

    x_labels: tuple
    y_labels: tuple
    values: tuple

    @property
    def nx(self):
        return len(self.x_labels)

    @property
    def ny(self):
        return len(self.y_labels)

    @cached_property
    def cols(self):
        """Hypotheses as tuples of values indexed by x."""
        return tuple(zip(*self.values))

    @cached_property
    def is_concept(self):
        return all(v == 0 or v == 1 for row in self.values for v in row)

    def value(self, i, j):
        return self.values[i][j]

    def distinct_values(self):
        return sorted({v for row in self.values for v in row})

    def to_json(self):
        return {
            "x": list(self.x_labels),
            "y": list(self.y_labels),
            "values": [[fmt_rat(v) for v in row] for row in self.values],
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self):
        return f"HypothesisClass(|X|={self.nx}, |Y|={self.ny})"


def _check_labels(labels, what):
    labels = tuple(str(s) for s in labels)
    if not labels:
        raise E.DimensionMismatch(f"{what} label list is empty")
    if len(set(labels)) != len(labels):
        seen, dup = set(), None
        for s in labels:
            if s in seen:
                dup = s
                break
            seen.add(s)
        raise E.DuplicateLabel(f"duplicate {what} label {dup!r}", label=dup)
    return labels


def make_class(x_labels, y_labels, values):
    xl = _check_labels(x_labels, "x")
    yl = _check_labels(y_labels, "y")
    if len(values) != len(xl):
        raise E.DimensionMismatch(f"expected {len(xl)} rows, got {len(values)}")
    rows = []
    for i, row in enumerate(values):
        if len(row) != len(yl):
            raise E.DimensionMismatch(f"row {i} has {len(row)} entries, expected {len(yl)}")
        out = []
        for j, v in enumerate(row):
            q = as_rat(v)
            if q < 0 or q > 1:
                raise E.ValueOutOfRange(f"value {q} at ({i},{j}) outside [0,1]", row=i, col=j)
            out.append(q)
        rows.append(tuple(out))
    return HypothesisClass(xl, yl, tuple(rows))


def class_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        return make_class(obj["x"], obj["y"], obj["values"])
    except KeyError as exc:
        raise E.ParseError(f"class JSON lacks key {exc}") from None


def from_columns(x_labels, y_labels, cols):
    """Build from hypothesis vectors (already-valid Fractions)."""
    values = tuple(tuple(c[i] for c in cols) for i in range(len(x_labels)))
    return HypothesisClass(tuple(x_labels), tuple(y_labels), values)


def _unique(labels):
    # derived parameter labels can collide (e.g. two identical tuples); suffix them
    seen = {}
    out = []
    for s in labels:
        if s in seen:
            seen[s] += 1
            out.append(f"{s}#{seen[s]}")
        else:
            seen[s] = 0
            out.append(s)
    return tuple(out)


@dataclass(frozen=True)
class Distribution:
    support: tuple
    weights: tuple
    over: str = "y"

    def __post_init__(self):
        if len(self.support) != len(self.weights):
            raise E.BadDistribution("support and weights differ in length")
        if not self.support:
            raise E.BadDistribution("empty support")
        if len(set(self.support)) != len(self.support):
            raise E.BadDistribution("support indices repeat")
        if any(w <= 0 for w in self.weights):
            raise E.BadDistribution("weights must be positive")
        if sum(self.weights) != 1:
            raise E.BadDistribution(f"weights sum to {sum(self.weights)}, not 1")

    def items(self):
        return zip(self.support, self.weights)

    def to_json(self, labels=None):
        sup = [labels[i] for i in self.support] if labels is not None else list(self.support)
        return {"over": self.over, "support": sup, "weights": [fmt_rat(w) for w in self.weights]}


def make_distribution(support, weights, over="y"):
    return Distribution(tuple(int(i) for i in support), tuple(as_rat(w) for w in weights), over)


def point_mass(i, over="y"):
    return Distribution((i,), (ONE,), over)


def uniform(indices, over="y"):
    idx = tuple(indices)
    return Distribution(idx, tuple(Fraction(1, len(idx)) for _ in idx), over)


def distribution_from_json(obj, labels=None):
    """Support entries may be integer indices or labels (resolved against ``labels``)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    sup = []
    for s in obj["support"]:
        if isinstance(s, int):
            sup.append(s)
        elif labels is not None and s in labels:
            sup.append(labels.index(s))
        else:
            raise E.SupportOutOfRange(f"unknown support element {s!r}")
    return make_distribution(sup, obj["weights"], obj.get("over", "y"))


@dataclass(frozen=True)
class MeasurableFamily:
    omega_weights: tuple
    classes: tuple

    def __post_init__(self):
        if len(self.omega_weights) != len(self.classes) or not self.classes:
            raise E.DimensionMismatch("weights and classes must be nonempty lists of equal length")
        if any(w <= 0 for w in self.omega_weights) or sum(self.omega_weights) != 1:
            raise E.BadDistribution("family weights must be positive and sum to 1")
        H0 = self.classes[0]
        for H in self.classes[1:]:
            if H.x_labels != H0.x_labels or H.y_labels != H0.y_labels:
                raise E.DimensionMismatch("family members must share X and Y labels")


@dataclass(frozen=True)
class MonotoneMap:
    breakpoints: tuple

    def __post_init__(self):
        bp = self.breakpoints
        if len(bp) < 2:
            raise E.BadMonotoneMap("need at least two breakpoints")
        if bp[0] != (0, 0) or bp[-1] != (1, 1):
            raise E.BadMonotoneMap("breakpoints must start at (0,0) and end at (1,1)")
        for (a, fa), (b, fb) in zip(bp, bp[1:]):
            if not (a < b and fa < fb):
                raise E.BadMonotoneMap("breakpoints must be strictly increasing in both coordinates")

    def __call__(self, v):
        bp = self.breakpoints
        for (a, fa), (b, fb) in zip(bp, bp[1:]):
            if a <= v <= b:
                return fa + (fb - fa) * (v - a) / (b - a)
        raise E.ValueOutOfRange(f"{v} outside [0,1]")


def make_monotone_map(breakpoints):
    return MonotoneMap(tuple((as_rat(a), as_rat(b)) for a, b in breakpoints))


IDENTITY_MAP = MonotoneMap(((ZERO, ZERO), (ONE, ONE)))


# --- derived classes --------------------------------------------------------

def dual(H):
    return HypothesisClass(H.y_labels, H.x_labels, H.cols)


def compose_monotone(H, f):
    vals = tuple(tuple(f(v) for v in row) for row in H.values)
    return HypothesisClass(H.x_labels, H.y_labels, vals)


def _check_support(mu, n):
    for i in mu.support:
        if not 0 <= i < n:
            raise E.SupportOutOfRange(f"support index {i} outside 0..{n - 1}", index=i)


def distribution_class(H, mus):
    """Parameters are the given distributions on Y; ``value(x, mu) = E_{p~mu} h_p(x)``."""
    mus = list(mus)
    if not mus:
        raise E.EmptyClass("no distributions given")
    for mu in mus:
        _check_support(mu, H.ny)
    cols = []
    for mu in mus:
        cols.append(tuple(sum((w * H.values[i][p] for p, w in mu.items()), ZERO) for i in range(H.nx)))
    return from_columns(H.x_labels, [f"mu[{k}]" for k in range(len(mus))], cols)


def dual_distribution_class(H, nus):
    D = distribution_class(dual(H), nus)
    return HypothesisClass(D.x_labels, tuple(f"nu[{k}]" for k in range(D.ny)), D.values)


def expectation_class(F):
    H0 = F.classes[0]
    vals = tuple(
        tuple(sum((w * H.values[i][j] for w, H in zip(F.omega_weights, F.classes)), ZERO) for j in range(H0.ny))
        for i in range(H0.nx)
    )
    return HypothesisClass(H0.x_labels, H0.y_labels, vals)


def avg_class(H, tuples):
    """Class on ``Y`` (range) indexed by tuples of X points; averages ``h_c`` over the tuple."""
    tuples = [tuple(t) for t in tuples]
    if not tuples:
        raise E.EmptyClass("no tuples given")
    for t in tuples:
        if not t:
            raise E.EmptyTuple("tuples must have length at least 1")
        for i in t:
            if not 0 <= i < H.nx:
                raise E.SupportOutOfRange(f"x index {i} out of range", index=i)
    cols = []
    for t in tuples:
        m = len(t)
        cols.append(tuple(sum((H.values[i][c] for i in t), ZERO) / m for c in range(H.ny)))
    labels = _unique(["avg(" + ",".join(H.x_labels[i] for i in t) + ")" for t in tuples])
    return from_columns(H.y_labels, labels, cols)


def two_choice_class(H, lambdas, pairs):
    lambdas = [as_rat(l) for l in lambdas]
    if len(lambdas) != len(pairs):
        raise E.DimensionMismatch("lambdas and pairs differ in length")
    if not pairs:
        raise E.EmptyClass("no mixtures given")
    cols, labels = [], []
    for lam, (y, y2) in zip(lambdas, pairs):
        if lam < 0 or lam > 1:
            raise E.LambdaOutOfRange(f"lambda {lam} outside [0,1]")
        for j in (y, y2):
            if not 0 <= j < H.ny:
                raise E.SupportOutOfRange(f"y index {j} out of range", index=j)
        cols.append(tuple(lam * H.values[i][y] + (1 - lam) * H.values[i][y2] for i in range(H.nx)))
        labels.append(f"mix({fmt_rat(lam)},{H.y_labels[y]},{H.y_labels[y2]})")
    return from_columns(H.x_labels, _unique(labels), cols)
