"""Exact finite-horizon online learning games.

Protocol per round: the adversary shows a point x, the learner commits to a
prediction (or a distribution over predictions), then the label y is revealed
and the learner pays loss(|prediction - y|).

Realizable games track the version space as a bitmask over parameters.
Agnostic games track the vector of cumulative losses of every hypothesis,
shifted so its minimum is zero; stage games are solved exactly by a rational
simplex.
"""
from dataclasses import dataclass, field
from fractions import Fraction

from . import errors as E
from .dimensions import value_masks
from .losses import IDENTITY, LossFunction, parse_loss
from .rational import as_rat, fmt_rat
from .rng import make_rng

ZERO = Fraction(0)
ONE = Fraction(1)
MAX_REALIZABLE_Y = 16
MAX_AGNOSTIC_Y = 12
MAX_STATES = 1_000_000


def loss_eval(loss, x):
    x = as_rat(x)
    if not 0 <= x <= 1:
        raise E.ValueOutOfRange(f"loss argument {x} outside [0,1]")
    return parse_loss(loss)(x)


@dataclass(frozen=True)
class Transcript:
    """Rounds of (x index, label y, prediction y')."""

    rounds: tuple = ()

    def __post_init__(self):
        for x, y, yp in self.rounds:
            if not (0 <= y <= 1 and 0 <= yp <= 1):
                raise E.ValueOutOfRange(f"round ({x}, {y}, {yp}) has a value outside [0,1]")

    def __len__(self):
        return len(self.rounds)

    def to_json(self):
        return {"rounds": [[x, fmt_rat(y), fmt_rat(yp)] for x, y, yp in self.rounds]}


def make_transcript(rounds):
    return Transcript(tuple((int(x), as_rat(y), as_rat(yp)) for x, y, yp in rounds))


@dataclass(frozen=True)
class GameValue:
    value: Fraction
    T: int
    exact: bool = True
    first_moves: dict = field(default_factory=dict)
    states: int = 0

    def to_json(self):
        moves = {}
        for k, v in self.first_moves.items():
            if isinstance(v, Fraction):
                v = fmt_rat(v)
            elif isinstance(v, (list, tuple)):
                v = [[fmt_rat(a), fmt_rat(b)] if isinstance(a, Fraction) else [a, fmt_rat(b)]
                     for a, b in v]
            moves[k] = v
        return {"value": fmt_rat(self.value), "T": self.T, "exact": self.exact,
                "first_moves": moves, "states": self.states}


def regret(t, H, loss=IDENTITY):
    loss = parse_loss(loss)
    learner = ZERO
    totals = [ZERO] * H.ny
    for x, y, yp in t.rounds:
        if not 0 <= x < H.nx:
            raise IndexError(f"point index {x} out of range")
        learner += loss(abs(yp - y))
        row = H.values[x]
        for j in range(H.ny):
            totals[j] += loss(abs(row[j] - y))
    return learner - (min(totals) if totals else ZERO)


def default_grid(H):
    vals = H.distinct_values()
    grid = set(vals)
    for i, a in enumerate(vals):
        for b in vals[i + 1:]:
            grid.add((a + b) / 2)
    return sorted(grid)


def _grid(g, H):
    if g is None:
        return default_grid(H)
    if isinstance(g, str):
        if g != "exact":
            raise E.BadRange(f"unknown grid {g!r}")
        return g
    out = sorted({as_rat(v) for v in g})
    if not out:
        raise E.BadRange("grid is empty")
    for v in out:
        if not 0 <= v <= 1:
            raise E.ValueOutOfRange(f"grid value {v} outside [0,1]")
    return out


def _stage_candidates(opts, eps):
    """Predictions where max_i loss(|p - v_i|) + c_i can attain its minimum over [0,1].

    For the identity and truncated losses the objective is convex and piecewise
    linear, so a vertex is optimal: a kink v_i +- eps or a crossing of two
    pieces. For the threshold loss it is piecewise constant with jumps at
    v_i +- eps, so midpoints between consecutive breakpoints cover every piece.
    """
    pts = {ZERO, ONE}
    for v, c in opts:
        pts.update((v - eps, v + eps))
    for v, c in opts:
        for w, e in opts:
            # rising piece of (v, c) meets the falling or the flat piece of (w, e)
            pts.add((v + w + e - c) / 2)
            pts.add(v + eps + e - c)
            pts.add(w - eps + c - e)
    pts = sorted(p for p in pts if 0 <= p <= 1)
    return pts + [(a + b) / 2 for a, b in zip(pts, pts[1:])]


def _horizon(T):
    if isinstance(T, bool) or int(T) != T or T < 0:
        raise E.BadRange(f"horizon must be a nonnegative integer, got {T}")
    return int(T)


# --- exact matrix games -------------------------------------------------------

def solve_matrix_game(M):
    """Value and optimal row mixture of a game where rows minimize ``p^T M q``."""
    v, p, _ = solve_matrix_game_full(M)
    return v, p


def solve_matrix_game_full(M):
    """Value, optimal row mixture p and optimal column mixture q.

    With A = M^T shifted positive, the LP maximize sum(u) subject to
    A u <= 1, u >= 0 has optimum 1/v where v = min_p max_j (p^T M)_j, and
    p = v u. The column mixture is read off the slack reduced costs.
    Bland's rule prevents cycling.
    """
    m, n = len(M), len(M[0])
    shift = ONE - min(min(r) for r in M)
    # n constraints (columns of M), m variables (rows of M)
    tab = [[M[i][j] + shift for i in range(m)] + [ONE if k == j else ZERO for k in range(n)] + [ONE]
           for j in range(n)]
    obj = [ONE] * m + [ZERO] * n + [ZERO]
    basis = [m + j for j in range(n)]
    while True:
        enter = next((k for k in range(m + n) if obj[k] > 0), None)
        if enter is None:
            break
        best, leave = None, None
        for r in range(n):
            a = tab[r][enter]
            if a > 0:
                ratio = tab[r][-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best, leave = ratio, r
        piv = tab[leave][enter]
        row = [v / piv for v in tab[leave]]
        tab[leave] = row
        for r in range(n):
            if r != leave and tab[r][enter] != 0:
                f = tab[r][enter]
                tab[r] = [a - f * b for a, b in zip(tab[r], row)]
        f = obj[enter]
        obj = [a - f * b for a, b in zip(obj, row)]
        basis[leave] = enter
    v = 1 / -obj[-1]
    p = [ZERO] * m
    for r, b in enumerate(basis):
        if b < m:
            p[b] = tab[r][-1] * v
    q = [-obj[m + j] * v for j in range(n)]
    return v - shift, p, q


# --- realizable games -----------------------------------------------------------

class _Realizable:
    def __init__(self, H, loss, grid):
        if H.ny > MAX_REALIZABLE_Y:
            raise E.ClassTooLarge(f"realizable games support at most {MAX_REALIZABLE_Y} parameters")
        self.H, self.loss, self.grid = H, loss, grid
        self.vms = [value_masks(H, x) for x in range(H.nx)]
        self.memo = {}

    def present(self, S, x):
        return [(v, m & S) for v, m in self.vms[x] if m & S]

    def stage(self, S, x, t):
        """(best prediction, value) when x is shown with t rounds left including this one."""
        opts = [(v, self.V(m, t - 1)) for v, m in self.present(S, x)]
        best = None
        grid = self.grid
        if grid == "exact":
            grid = _stage_candidates(opts, self.loss.eps)
        for yh in grid:
            worst = max(self.loss(abs(yh - v)) + c for v, c in opts)
            if best is None or worst < best[1]:
                best = (yh, worst)
        return best

    def V(self, S, t):
        if t == 0:
            return ZERO
        key = (S, t)
        r = self.memo.get(key)
        if r is None:
            r = max(self.stage(S, x, t)[1] for x in range(self.H.nx))
            self.memo[key] = r
        return r

    def best_x(self, S, t):
        best = None
        for x in range(self.H.nx):
            v = self.stage(S, x, t)[1]
            if best is None or v > best[1]:
                best = (x, v)
        return best[0]


def realizable_value(H, loss=IDENTITY, T=1, pred_grid=None):
    loss = parse_loss(loss)
    T = _horizon(T)
    g = _Realizable(H, loss, _grid(pred_grid, H))
    full = (1 << H.ny) - 1
    value = g.V(full, T)
    moves = {}
    if T > 0 and H.nx:
        x = g.best_x(full, T)
        moves = {"x": x, "prediction": g.stage(full, x, T)[0]}
    return GameValue(value, T, True, moves, len(g.memo))


def realizable_plateau(H, loss=IDENTITY, pred_grid=None, extra=2):
    """Realizable values for T = 0 .. |Y|-1+extra and the plateau, if one is seen.

    When the grid holds every value of H, no round can cost anything once the
    version space cannot shrink, so V is constant from T = |Y|-1 on. For other
    grids the plateau is reported only if the tail of the sequence is flat.
    """
    loss = parse_loss(loss)
    g = _Realizable(H, loss, _grid(pred_grid, H))
    full = (1 << H.ny) - 1
    vals = [g.V(full, t) for t in range(H.ny + extra)]
    tail = vals[max(H.ny - 1, 0):]
    plateau = tail[0] if all(v == tail[0] for v in tail) else None
    return plateau, vals


POLICIES = {}


def _policy(name):
    def deco(fn):
        POLICIES[name] = fn
        return fn
    return deco


@_policy("play_zero")
def play_zero(H, S, x):
    """Predict the common value once the version space agrees at x, else 0."""
    vals = {H.values[x][j] for j in range(H.ny) if S >> j & 1}
    return vals.pop() if len(vals) == 1 else ZERO


@_policy("consistent_low")
def consistent_low(H, S, x):
    """Predict the value of the lowest-index consistent hypothesis."""
    j = (S & -S).bit_length() - 1
    return H.values[x][j]


def policy_value(H, policy, loss=IDENTITY, T=1):
    """Worst-case cumulative loss of a fixed deterministic learner in the realizable game."""
    loss = parse_loss(loss)
    T = _horizon(T)
    if isinstance(policy, str):
        if policy not in POLICIES:
            raise E.PolicyError(f"unknown learner policy {policy!r}")
        policy = POLICIES[policy]
    if H.ny > MAX_REALIZABLE_Y:
        raise E.ClassTooLarge(f"realizable games support at most {MAX_REALIZABLE_Y} parameters")
    vms = [value_masks(H, x) for x in range(H.nx)]
    memo = {}

    def W(S, t):
        if t == 0:
            return ZERO
        key = (S, t)
        if key not in memo:
            best = ZERO
            for x in range(H.nx):
                yh = policy(H, S, x)
                for v, m in vms[x]:
                    if m & S:
                        best = max(best, loss(abs(yh - v)) + W(m & S, t - 1))
            memo[key] = best
        return memo[key]

    return GameValue(W((1 << H.ny) - 1, T), T, True, {}, len(memo))


# --- agnostic games -------------------------------------------------------------

class _Agnostic:
    def __init__(self, H, loss, pred_grid, label_grid, max_states):
        if H.ny > MAX_AGNOSTIC_Y:
            raise E.ClassTooLarge(f"agnostic games support at most {MAX_AGNOSTIC_Y} parameters")
        self.H, self.loss = H, loss
        self.P, self.Y = pred_grid, label_grid
        self.max_states = max_states
        self.memo = {}
        # per (x, label) loss vector of the hypotheses
        self.hl = [[tuple(loss(abs(v - y)) for v in H.values[x]) for y in label_grid]
                   for x in range(H.nx)]
        self.pl = [[loss(abs(p - y)) for y in label_grid] for p in pred_grid]

    def step(self, L, x, k):
        new = [a + b for a, b in zip(L, self.hl[x][k])]
        m = min(new)
        return tuple(a - m for a in new), m

    def matrix(self, L, x, t):
        cont = []
        for k in range(len(self.Y)):
            L2, m = self.step(L, x, k)
            cont.append(self.V(L2, t - 1) - m)
        return [[self.pl[i][k] + cont[k] for k in range(len(self.Y))] for i in range(len(self.P))]

    def stage(self, L, x, t):
        return solve_matrix_game(self.matrix(L, x, t))

    def V(self, L, t):
        """Minimax future regret from normalized loss state L with t rounds left."""
        if t == 0:
            return ZERO
        key = (L, t)
        r = self.memo.get(key)
        if r is None:
            if len(self.memo) >= self.max_states:
                raise E.StateExplosion(f"agnostic game exceeded {self.max_states} states")
            r = max(self.stage(L, x, t)[0] for x in range(self.H.nx))
            self.memo[key] = r
        return r

    def best_x(self, L, t):
        best = None
        for x in range(self.H.nx):
            v, p = self.stage(L, x, t)
            if best is None or v > best[1]:
                best = (x, v, p)
        return best


def complete_pred_grid(labels, loss=IDENTITY):
    """Predictions that suffice for a randomized learner against the given labels.

    Between consecutive points of {y, y - eps, y + eps} every loss is linear
    (identity, truncated) or constant (threshold) in the prediction, so any
    prediction there is matched by a mixture of the endpoints or by the midpoint.
    """
    eps = parse_loss(loss).eps
    pts = sorted({p for y in labels for p in (y - eps, y, y + eps) if 0 <= p <= 1} | {ZERO, ONE})
    return sorted(set(pts) | {(a + b) / 2 for a, b in zip(pts, pts[1:])})


def _agnostic_grids(H, loss, pred_grid, label_grid):
    Yg = _grid(label_grid if label_grid is not None else [0, 1], H)
    if Yg == "exact":
        raise E.BadRange("the label grid must be explicit")
    P = _grid(pred_grid, H)
    if P == "exact":
        P = complete_pred_grid(Yg, loss)
    if len(P) > 32 or len(Yg) > 32:
        raise E.TooLarge("stage matrices are limited to 32x32")
    return P, Yg


def agnostic_minimax(H, loss=IDENTITY, T=1, pred_grid=None, label_grid=None, max_states=MAX_STATES):
    """Exact minimax expected regret against an adaptive adversary.

    Defaults: prediction grid = values of H plus midpoints, label grid = {0, 1}.
    ``pred_grid="exact"`` uses :func:`complete_pred_grid` for the label grid.
    """
    loss = parse_loss(loss)
    T = _horizon(T)
    P, Yg = _agnostic_grids(H, loss, pred_grid, label_grid)
    g = _Agnostic(H, loss, P, Yg, max_states)
    L0 = tuple([ZERO] * H.ny)
    value = g.V(L0, T)
    moves = {}
    if T > 0 and H.nx:
        x, _, p = g.best_x(L0, T)
        moves = {"x": x, "mixture": [(a, b) for a, b in zip(P, p) if b]}
    return GameValue(value, T, True, moves, len(g.memo))


# --- simulation -------------------------------------------------------------------

LEARNERS = ("follow_the_leader", "minimax_extract")
ADVERSARIES = ("consistent", "worst_case_extract", "scripted")


def _parse_adversary(adv):
    if isinstance(adv, str):
        name, _, arg = adv.partition(":")
        if name == "consistent":
            return ("consistent", int(arg or 0))
        if name == "worst_case_extract":
            return ("worst_case_extract", None)
        raise E.PolicyError(f"unknown adversary {adv!r}")
    name = adv[0]
    if name not in ADVERSARIES:
        raise E.PolicyError(f"unknown adversary {name!r}")
    return (name, adv[1] if len(adv) > 1 else None)


def run_game(learner, adversary, H, loss=IDENTITY, T=1, seed=0, pred_grid=None,
             label_grid=None, setting="realizable"):
    """Play T rounds between built-in policies and return the transcript.

    ``adversary`` is ``"consistent:j"``, ``"worst_case_extract"``,
    ``("consistent", j)`` or ``("scripted", [(x, y), ...])``. In the agnostic
    setting the minimax learner samples its stage mixture with the seeded rng.
    """
    loss = parse_loss(loss)
    T = _horizon(T)
    if learner not in LEARNERS:
        raise E.PolicyError(f"unknown learner {learner!r}; choose from {LEARNERS}")
    if setting not in ("realizable", "agnostic"):
        raise E.PolicyError(f"unknown setting {setting!r}")
    adv, arg = _parse_adversary(adversary)
    rng = make_rng(seed)
    if adv == "consistent" and not 0 <= arg < H.ny:
        raise E.PolicyError(f"consistent adversary hypothesis {arg} out of range")
    if adv == "scripted":
        script = [(int(x), as_rat(y)) for x, y in arg]
        if len(script) < T:
            raise E.PolicyError(f"script has {len(script)} rounds, need {T}")
        for x, y in script:
            if not 0 <= x < H.nx:
                raise E.PolicyError(f"scripted point {x} out of range")
    if adv == "worst_case_extract" and setting == "agnostic" and learner != "minimax_extract":
        raise E.PolicyError("agnostic worst_case_extract needs the minimax learner")

    if setting == "realizable":
        game = _Realizable(H, loss, _grid(pred_grid, H))
    else:
        P, Yg = _agnostic_grids(H, loss, pred_grid, label_grid)
        game = _Agnostic(H, loss, P, Yg, MAX_STATES)
    S = (1 << H.ny) - 1
    L = tuple([ZERO] * H.ny)
    totals = [ZERO] * H.ny
    rounds = []
    for r in range(T):
        left = T - r
        # adversary chooses x
        if adv == "scripted":
            x = script[r][0]
        elif adv == "consistent":
            x = int(rng.integers(H.nx))
        elif setting == "realizable":
            x = game.best_x(S, left) if S else 0
        else:
            x = game.best_x(L, left)[0]
        # learner predicts
        mix = None
        if learner == "follow_the_leader":
            j = min(range(H.ny), key=lambda k: (totals[k], k))
            yp = H.values[x][j]
        elif setting == "realizable":
            yp = game.stage(S, x, left)[0] if S else H.values[x][0]
        else:
            _, mix = game.stage(L, x, left)
            u = rng.random()
            acc, yp = ZERO, game.P[-1]
            for p, w in zip(game.P, mix):
                acc += w
                if w and u < acc:
                    yp = p
                    break
        # adversary labels
        if adv == "scripted":
            y = script[r][1]
        elif adv == "consistent":
            y = H.values[x][arg]
        elif setting == "realizable":
            opts = [(v, m) for v, m in game.present(S, x)]
            y = max(opts, key=lambda o: (loss(abs(yp - o[0])) + game.V(o[1], left - 1), -o[0]))[0]
        else:
            M = game.matrix(L, x, left)
            col = [sum(p * M[i][k] for i, p in enumerate(mix)) for k in range(len(game.Y))]
            y = game.Y[max(range(len(col)), key=lambda k: (col[k], -k))]
        rounds.append((x, y, yp))
        for j in range(H.ny):
            totals[j] += loss(abs(H.values[x][j] - y))
        S &= sum(1 << j for j in range(H.ny) if H.values[x][j] == y)
        if setting == "agnostic":
            if y in game.Y:
                L = game.step(L, x, game.Y.index(y))[0]
            else:
                m = min(totals)
                L = tuple(a - m for a in totals)
    return Transcript(tuple(rounds))
