"""Command line entry point.

Every command reads JSON (``-`` means stdin), writes sorted-key JSON (or CSV
for bound sweeps) to ``--out`` or stdout, and emits a run manifest to stderr
or to ``--manifest``. Exit status: 0 ok, 2 bad input, 3 resource cap hit.
"""
import argparse
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import product

from . import __version__
from . import bounds as B
from . import core, dimensions as dims, games, generators as gen, pacsim, trees, width
from . import errors as E
from .losses import parse_loss
from .rational import fmt_rat, parse_rat
from .witness import witness_from_json


class _Inputs:
    """Reads input files once and remembers their digests."""

    def __init__(self):
        self.digests = {}

    def read(self, path):
        if path == "-":
            data = sys.stdin.buffer.read()
        else:
            try:
                with open(path, "rb") as fh:
                    data = fh.read()
            except OSError as exc:
                raise E.ParseError(f"cannot read {path}: {exc.strerror}", path=path) from None
        self.digests[path] = hashlib.sha256(data).hexdigest()
        return data

    def json(self, path):
        try:
            return json.loads(self.read(path))
        except json.JSONDecodeError as exc:
            raise E.ParseError(f"{path} is not valid JSON: {exc.msg}", path=path) from None

    def hclass(self, path):
        return core.class_from_json(self.json(path))


def _jsonable(v):
    if isinstance(v, Fraction):
        return fmt_rat(v)
    if hasattr(v, "to_json"):
        return v.to_json()
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _rats(text):
    return [parse_rat(t) for t in text.split(",") if t != ""]


def _ints(text):
    return [int(t) for t in text.split(",") if t != ""]


# --- subcommands ------------------------------------------------------------

def cmd_gen(a, io):
    fam, args = a.family, a.args
    n = [int(v) for v in args] if fam not in ("tree", "rational_fn") else None
    if fam == "powerset":
        H = gen.powerset_class(*n)
    elif fam == "threshold":
        H = gen.threshold_class(*n)
    elif fam == "interval":
        H = gen.interval_class(*n)
    elif fam == "even_interval":
        H = gen.even_interval_class(*n)
    elif fam == "rectangle":
        H = gen.rectangle_class(*n)
    elif fam == "h0":
        H = gen.h0_class(*n)
    elif fam == "tree":
        if not a.gammas or len(args) != 1:
            raise E.BadRange("usage: gen tree DEPTH --gammas g0,g1,...")
        H = gen.tree_class(_rats(a.gammas), int(args[0]))
    else:  # rational_fn
        if not (a.coeffs and a.xs) or len(args) != 2:
            raise E.BadRange("usage: gen rational_fn DEG_P DEG_Q --coeffs c,.. --xs x,..")
        H = gen.rational_fn_class(_rats(a.coeffs), _rats(a.xs), int(args[0]), int(args[1]))
    return H.to_json()


def cmd_dim(a, io):
    H = io.hclass(a.cls)
    k = a.kind
    if k == "vc":
        d, w = dims.vc_dim(H)
    elif k == "littlestone":
        d, w = dims.littlestone_dim(H)
    elif k == "fat":
        d, w = dims.fat_dim(H, parse_rat(a.gamma))
    elif k == "seq_fat":
        d, w = dims.seq_fat_dim(H, parse_rat(a.gamma))
    elif k == "threshold_gamma":
        d, w = dims.threshold_dim_gamma(H, parse_rat(a.gamma))
    elif k == "threshold_rs":
        d, w = dims.threshold_dim_rs(H, parse_rat(a.r), parse_rat(a.s))
    elif k == "concept_threshold":
        d, w = dims.concept_threshold_dim(H)
    elif k == "graph":
        d, w = dims.graph_dim(H, parse_rat(a.gamma) if a.gamma else Fraction(1, 8))
    else:
        d, w = dims.online_dim(H, parse_loss(a.loss))
    return {"kind": k, "dim": d, "witness": w}


def cmd_derive(a, io):
    H = io.hclass(a.cls)
    op = a.op
    if op == "dual":
        return core.dual(H).to_json()
    if op == "compose":
        pts = [tuple(parse_rat(v) for v in p.split(":")) for p in a.map.split(",")]
        return core.compose_monotone(H, core.make_monotone_map(pts)).to_json()
    if op in ("distribution", "dual_distribution"):
        raw = io.json(a.dists)
        labels = list(H.y_labels if op == "distribution" else H.x_labels)
        ds = [core.distribution_from_json(d, labels) for d in raw]
        fn = core.distribution_class if op == "distribution" else core.dual_distribution_class
        return fn(H, ds).to_json()
    if op == "avg":
        tuples = [_ints(t) for t in a.tuples.split(";")]
        return core.avg_class(H, tuples).to_json()
    if op == "two_choice":
        pairs = [tuple(_ints(p)) for p in a.pairs.split(";")]
        return core.two_choice_class(H, _rats(a.lambdas), pairs).to_json()
    # expectation: the class argument is a family file
    raise E.BadRange(f"unknown derive op {op!r}")


def cmd_family(a, io):
    raw = io.json(a.family)
    F = core.MeasurableFamily(tuple(parse_rat(w) for w in raw["weights"]),
                              tuple(core.class_from_json(c) for c in raw["classes"]))
    return core.expectation_class(F).to_json()


def _cloud(raw):
    return [tuple(parse_rat(v) for v in row) for row in raw]


def cmd_width(a, io):
    op = a.op
    if op in ("rademacher", "gaussian", "cover"):
        A = _cloud(io.json(a.input))
        if op == "rademacher":
            return {"rademacher": width.rademacher_mean_width(A)}
        if op == "gaussian":
            est, se = width.gaussian_mean_width(A, a.trials, a.seed)
            return {"estimate": est, "std_error": se, "trials": a.trials, "seed": a.seed}
        cov = width.covering_number(A, parse_rat(a.gamma), a.norm)
        return {"count": cov.count, "exact": cov.exact, "centers": cov.centers}
    H = io.hclass(a.input)
    mode = "sampled" if a.sampled else "exhaustive"
    if op == "class":
        v, xs = width.class_rademacher(H, a.n, mode, a.trials, a.seed)
        return {"rademacher": v, "points": list(xs), "mode": mode}
    v, tree = width.seq_class_rademacher(H, a.n, mode, a.trials, a.seed)
    return {"seq_rademacher": v, "tree": list(tree), "mode": mode}


def _param(v):
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        return v


def _eval_point(args):
    name, kwargs = args
    r = B.BOUNDS[name](**kwargs)
    return r.value if isinstance(r, B.BoundReport) else r


def cmd_bounds(a, io):
    name = a.name
    if name == "regret":
        table = {float(parse_rat(k)): float(v) for k, v in io.json(a.table).items()}
        lo, hi = B.regret_bounds(table, a.T)
        return {"lower": lo, "upper": hi, "T": a.T}
    if name == "dual_dist_chain":
        kw = {k: _param(v) for k, v in (p.split("=", 1) for p in a.params)}
        return B.dual_dist_chain(**kw).to_json()
    if name not in B.BOUNDS:
        raise E.BadRange(f"unknown bound {name!r}; choose from {sorted(B.BOUNDS)} or regret, dual_dist_chain")
    grid = {}
    for p in a.params:
        if "=" not in p:
            raise E.ParseError(f"parameter {p!r} is not key=value")
        k, v = p.split("=", 1)
        grid[k] = [_param(x) for x in v.split(",")]
    names = list(grid)
    points = [dict(zip(names, c)) for c in product(*(grid[k] for k in names))]
    try:
        if a.jobs > 1 and len(points) > 1:
            with ProcessPoolExecutor(a.jobs) as ex:
                vals = list(ex.map(_eval_point, [(name, p) for p in points]))
        else:
            vals = [_eval_point((name, p)) for p in points]
    except TypeError as exc:
        raise E.ParseError(f"bad parameters for {name}: {exc}") from None
    if a.format == "csv":
        rows = [",".join(names + ["value"])]
        rows += [",".join([str(p[k]) for k in names] + [repr(v)]) for p, v in zip(points, vals)]
        return "\n".join(rows) + "\n"
    if len(points) == 1:
        return {"bound": name, "params": points[0], "value": vals[0]}
    return {"bound": name, "rows": [{"params": p, "value": v} for p, v in zip(points, vals)]}


def cmd_game(a, io):
    H = io.hclass(a.cls)
    loss = parse_loss(a.loss)
    grid = None
    if a.grid:
        grid = "exact" if a.grid == "exact" else _rats(a.grid)
    if a.mode == "realizable":
        return games.realizable_value(H, loss, a.T, grid).to_json()
    labels = _rats(a.labels) if a.labels else None
    if a.mode == "agnostic":
        return games.agnostic_minimax(H, loss, a.T, grid, labels, a.max_states).to_json()
    adv = a.adversary
    if a.script:
        adv = ("scripted", [(x, parse_rat(y)) for x, y in io.json(a.script)])
    t = games.run_game(a.learner, adv, H, loss, a.T, a.seed, grid, labels, a.setting)
    out = t.to_json()
    out["regret"] = fmt_rat(games.regret(t, H, loss))
    out["seed"] = a.seed
    return out


def cmd_pac(a, io):
    H = io.hclass(a.cls)
    if a.op == "gc":
        D = core.distribution_from_json(io.json(a.dist), list(H.x_labels))
        return pacsim.gc_estimate(H, D, a.m, a.trials, parse_rat(a.eps), a.seed).to_json()
    if a.op == "trial":
        raw = io.json(a.dist)
        P = pacsim.make_p([(x, parse_rat(y), parse_rat(w)) for x, y, w in raw["atoms"]])
        n = a.n if a.n else pacsim.pac_sample_size(H, parse_rat(a.eps), a.delta)
        out = pacsim.pac_trial(H, P, n, a.trials, parse_rat(a.eps), a.seed).to_json()
        return out
    raw = io.json(a.dist)
    labels = list(H.x_labels)
    mu = core.distribution_from_json(raw["hidden"], labels)
    cands = [core.distribution_from_json(c, labels) for c in raw["candidates"]]
    return pacsim.selectivity_demo(H, mu, cands, a.n or 10, a.trials, a.seed).to_json()


def cmd_convert(a, io):
    H = io.hclass(a.cls)
    raw = io.json(a.witness)
    w = witness_from_json(raw["witness"] if isinstance(raw.get("witness"), dict) else raw)
    if a.op == "rs-to-tree":
        return trees.tree_from_rs_threshold(H, w)
    if a.op == "tree-to-gamma":
        return trees.gamma_threshold_from_tree(H, w, parse_rat(a.gamma), parse_rat(a.delta),
                                               a.k, a.d)
    out = trees.rs_threshold_from_gamma(H, w, parse_rat(a.delta), a.d)
    return {"witness": out, "found": out is not None}


def cmd_verify(a, io):
    H = io.hclass(a.cls)
    obj = io.json(a.witness)
    if isinstance(obj.get("witness"), dict):
        obj = obj["witness"]
    w = witness_from_json(obj)
    ok = trees.verify(H, w)
    return {"valid": bool(ok), "kind": w.kind}


# --- parser -----------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="dimlab", description="Exact learning-theory dimensions and games.")
    p.add_argument("--version", action="version", version=f"dimlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--manifest", help="write the run manifest here instead of stderr")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--jobs", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", parents=[common], help="generate a named class")
    s.add_argument("family", choices=("powerset", "threshold", "interval", "even_interval", "rectangle",
                                      "h0", "tree", "rational_fn"))
    s.add_argument("args", nargs="*")
    s.add_argument("--gammas")
    s.add_argument("--coeffs")
    s.add_argument("--xs")
    s.set_defaults(fn=cmd_gen)

    s = sub.add_parser("dim", parents=[common], help="compute a dimension with witness")
    s.add_argument("kind", choices=("vc", "littlestone", "fat", "seq_fat", "threshold_gamma",
                                    "threshold_rs", "concept_threshold", "graph", "online"))
    s.add_argument("cls")
    s.add_argument("--gamma")
    s.add_argument("--r", default="0")
    s.add_argument("--s", default="1")
    s.add_argument("--loss", default="id")
    s.set_defaults(fn=cmd_dim)

    s = sub.add_parser("derive", parents=[common], help="build a derived class")
    s.add_argument("op", choices=("dual", "compose", "distribution", "dual_distribution", "avg",
                                  "two_choice", "expectation"))
    s.add_argument("cls", help="class JSON (for expectation: family JSON with weights and classes)")
    s.add_argument("--map", help="breakpoints a:f(a),... for compose")
    s.add_argument("--dists", help="JSON list of distributions")
    s.add_argument("--tuples", help="x-index tuples like 0,1;2")
    s.add_argument("--lambdas")
    s.add_argument("--pairs", help="y-index pairs like 0,3;1,3")
    s.set_defaults(fn=cmd_derive)

    s = sub.add_parser("width", parents=[common], help="mean widths and covering numbers")
    s.add_argument("op", choices=("rademacher", "gaussian", "cover", "class", "seq"))
    s.add_argument("input", help="point cloud JSON (list of vectors) or class JSON")
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--gamma", default="1/4")
    s.add_argument("--norm", choices=("linf", "l2"), default="linf")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--sampled", action="store_true")
    s.set_defaults(fn=cmd_width)

    s = sub.add_parser("bounds", parents=[common], help="evaluate a bound, sweeping comma lists")
    s.add_argument("name")
    s.add_argument("params", nargs="*", help="key=value or key=v1,v2,...")
    s.add_argument("--table", help="regret: JSON map gamma -> sequential fat dimension")
    s.add_argument("--T", type=int, default=1)
    s.set_defaults(fn=cmd_bounds)

    s = sub.add_parser("game", parents=[common], help="solve or simulate online games")
    s.add_argument("mode", choices=("realizable", "agnostic", "simulate"))
    s.add_argument("cls")
    s.add_argument("--loss", default="id")
    s.add_argument("--T", type=int, default=1)
    s.add_argument("--grid", help="prediction grid, comma separated, or 'exact'")
    s.add_argument("--labels", help="agnostic label grid, comma separated")
    s.add_argument("--max-states", dest="max_states", type=int, default=games.MAX_STATES)
    s.add_argument("--learner", default="minimax_extract")
    s.add_argument("--adversary", default="worst_case_extract")
    s.add_argument("--script", help="JSON list of [x, y] rounds for a scripted adversary")
    s.add_argument("--setting", choices=("realizable", "agnostic"), default="realizable")
    s.set_defaults(fn=cmd_game)

    s = sub.add_parser("pac", parents=[common], help="Monte Carlo PAC experiments")
    s.add_argument("op", choices=("gc", "trial", "selectivity"))
    s.add_argument("cls")
    s.add_argument("dist", help="gc: distribution on X; trial: {atoms}; selectivity: {hidden, candidates}")
    s.add_argument("--m", type=int, default=10)
    s.add_argument("--n", type=int)
    s.add_argument("--eps", default="1/10")
    s.add_argument("--delta", type=float, default=0.1)
    s.add_argument("--trials", type=int, default=1000)
    s.set_defaults(fn=cmd_pac)

    s = sub.add_parser("convert", parents=[common], help="witness converters")
    s.add_argument("op", choices=("rs-to-tree", "tree-to-gamma", "gamma-to-rs"))
    s.add_argument("cls")
    s.add_argument("witness")
    s.add_argument("--gamma")
    s.add_argument("--delta")
    s.add_argument("--k", type=int)
    s.add_argument("--d", type=int)
    s.set_defaults(fn=cmd_convert)

    s = sub.add_parser("verify", parents=[common], help="check a witness against a class")
    s.add_argument("cls")
    s.add_argument("witness")
    s.set_defaults(fn=cmd_verify)
    return p


def _render(result, fmt):
    if isinstance(result, str):
        return result
    return json.dumps(_jsonable(result), sort_keys=True) + "\n"


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    io = _Inputs()
    status, outputs = 0, []
    try:
        if a.command == "derive" and a.op == "expectation":
            a.family = a.cls
            result = cmd_family(a, io)
        else:
            result = a.fn(a, io)
        text = _render(result, a.format)
        if a.out:
            with open(a.out, "w") as fh:
                fh.write(text)
            outputs.append({"path": a.out, "sha256": hashlib.sha256(text.encode()).hexdigest()})
        else:
            sys.stdout.write(text)
            outputs.append({"path": "-", "sha256": hashlib.sha256(text.encode()).hexdigest()})
    except E.ResourceLimit as exc:
        sys.stderr.write(json.dumps(exc.to_json(), sort_keys=True, default=str) + "\n")
        status = 3
    except (E.DimlabError, IndexError, KeyError, TypeError) as exc:
        if isinstance(exc, E.DimlabError):
            diag = exc.to_json()
        else:
            diag = {"error": "bad_input", "message": f"{type(exc).__name__}: {exc}"}
        sys.stderr.write(json.dumps(diag, sort_keys=True, default=str) + "\n")
        status = 2
    manifest = {"argv": argv, "seed": a.seed, "inputs": io.digests, "version": __version__,
                "outputs": outputs, "status": status}
    mtext = json.dumps({"manifest": manifest}, sort_keys=True) + "\n"
    if a.manifest:
        with open(a.manifest, "w") as fh:
            fh.write(mtext)
    else:
        sys.stderr.write(mtext)
    return status


if __name__ == "__main__":
    sys.exit(main())
