"""Witness records and their JSON form.

Binary trees use heap layout: the node reached by the moves
``(m_0, ..., m_{t-1})`` (each -1 or 1) sits at index ``2^t - 1 + v`` where
``v`` reads the moves as bits (-1 -> 0, 1 -> 1), first move most significant.
Children of node ``k`` are ``2k+1`` (move -1) and ``2k+2`` (move 1). A branch
of a depth-d tree is indexed by the same bit reading of its d moves.
"""
from dataclasses import dataclass, field
from fractions import Fraction

from . import errors as E
from .rational import fmt_rat, parse_rat


def node_index(moves):
    v = 0
    for m in moves:
        v = 2 * v + (1 if m == 1 else 0)
    return (1 << len(moves)) - 1 + v


def node_moves(k):
    """Inverse of :func:`node_index`."""
    t = (k + 1).bit_length() - 1
    v = k - ((1 << t) - 1)
    return tuple(1 if v >> (t - 1 - i) & 1 else -1 for i in range(t))


def branch_index(moves):
    return node_index(moves) - ((1 << len(moves)) - 1)


def branch_moves(b, d):
    return tuple(1 if b >> (d - 1 - i) & 1 else -1 for i in range(d))


def branch_nodes(b, d):
    """Heap indices of the nodes along branch ``b`` of a depth-``d`` tree, root first."""
    out, k = [], 0
    for i in range(d):
        out.append(k)
        k = 2 * k + (2 if b >> (d - 1 - i) & 1 else 1)
    return out


@dataclass(frozen=True)
class SetShatterWitness:
    gamma: Fraction
    points: tuple
    thresholds: tuple
    selector: tuple  # selector[mask] -> y; bit i of mask set means points[i] is in E
    kind: str = field(default="set_shatter", init=False)

    @property
    def size(self):
        return len(self.points)

    def to_json(self):
        return {"kind": self.kind, "gamma": fmt_rat(self.gamma), "points": list(self.points),
                "thresholds": [fmt_rat(s) for s in self.thresholds], "selector": list(self.selector)}


@dataclass(frozen=True)
class TreeShatterWitness:
    gamma: Fraction
    depth: int
    nodes: tuple
    thresholds: tuple
    branches: tuple
    kind: str = field(default="tree_shatter", init=False)

    def to_json(self):
        return {"kind": self.kind, "gamma": fmt_rat(self.gamma), "depth": self.depth,
                "nodes": list(self.nodes), "thresholds": [fmt_rat(s) for s in self.thresholds],
                "branches": list(self.branches)}


@dataclass(frozen=True)
class ThresholdWitness:
    mode: str  # "gamma" or "rs"
    pairs: tuple
    gamma: Fraction = None
    r: Fraction = None
    s: Fraction = None
    kind: str = field(default="threshold", init=False)

    @property
    def size(self):
        return len(self.pairs)

    def to_json(self):
        out = {"kind": self.kind, "mode": self.mode, "pairs": [list(p) for p in self.pairs]}
        if self.mode == "gamma":
            out["gamma"] = fmt_rat(self.gamma)
        else:
            out["r"], out["s"] = fmt_rat(self.r), fmt_rat(self.s)
        return out


@dataclass(frozen=True)
class GraphDimWitness:
    gamma: Fraction
    points: tuple
    targets: tuple
    selector: tuple  # selector[beta mask] -> y; bit i set means beta_i = 1
    kind: str = field(default="graph", init=False)

    @property
    def size(self):
        return len(self.points)

    def to_json(self):
        return {"kind": self.kind, "gamma": fmt_rat(self.gamma), "points": list(self.points),
                "targets": [fmt_rat(f) for f in self.targets], "selector": list(self.selector)}


@dataclass(frozen=True)
class OnlineDimWitness:
    loss: str
    value: Fraction
    depth: int
    nodes: tuple
    weights: tuple
    branches: tuple
    kind: str = field(default="online", init=False)

    def to_json(self):
        return {"kind": self.kind, "loss": self.loss, "value": fmt_rat(self.value), "depth": self.depth,
                "nodes": list(self.nodes), "weights": [fmt_rat(w) for w in self.weights],
                "branches": list(self.branches)}


def _rats(xs):
    return tuple(parse_rat(x) for x in xs)


def _ints(xs):
    return tuple(int(x) for x in xs)


def witness_from_json(obj):
    try:
        kind = obj["kind"]
        if kind == "set_shatter":
            return SetShatterWitness(parse_rat(obj["gamma"]), _ints(obj["points"]),
                                     _rats(obj["thresholds"]), _ints(obj["selector"]))
        if kind == "tree_shatter":
            return TreeShatterWitness(parse_rat(obj["gamma"]), int(obj["depth"]), _ints(obj["nodes"]),
                                      _rats(obj["thresholds"]), _ints(obj["branches"]))
        if kind == "threshold":
            pairs = tuple((int(a), int(b)) for a, b in obj["pairs"])
            if obj["mode"] == "gamma":
                return ThresholdWitness("gamma", pairs, gamma=parse_rat(obj["gamma"]))
            if obj["mode"] == "rs":
                return ThresholdWitness("rs", pairs, r=parse_rat(obj["r"]), s=parse_rat(obj["s"]))
            raise E.ParseError(f"unknown threshold mode {obj['mode']!r}")
        if kind == "graph":
            return GraphDimWitness(parse_rat(obj["gamma"]), _ints(obj["points"]),
                                   _rats(obj["targets"]), _ints(obj["selector"]))
        if kind == "online":
            return OnlineDimWitness(obj["loss"], parse_rat(obj["value"]), int(obj["depth"]),
                                    _ints(obj["nodes"]), _rats(obj["weights"]), _ints(obj["branches"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, E.DimlabError):
            raise
        raise E.ParseError(f"malformed witness: {exc}") from None
    raise E.ParseError(f"unknown witness kind {obj.get('kind')!r}")
