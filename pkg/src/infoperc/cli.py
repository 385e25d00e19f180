"""Command-line front end.

Subcommands: eta, perc, verify, broadcast, wigner, sbm, coupling, curves,
sweep.  Output is CSV on stdout (or --out), starting with a comment line that
records the artifact version and the full configuration.  Exit codes:
0 success, 2 usage error, 3 enumeration budget exceeded, 4 bound violation
detected by a verify run.

Reruns with the same configuration and seed are byte-identical for any
--threads setting.
"""

import argparse
import configparser
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, bounds
from .channels import eta_kl, eta_kl_closed, eta_kl_numeric, parse_channel
from .errors import BudgetExceededError
from .exact_mi import (binary_symmetric_model, random_factor_model,
                       verify_compare, verify_thm1, verify_thm2)
from .graphs import (complete_graph, cycle_graph, dary_tree_graph,
                     grid2d_graph, incidence_factor_graph, path_graph)
from .percolation import (grid_two_point, grid_two_point_curve, perc_exact,
                          perc_mc)
from .rng import DEFAULT_SEED, trial_base
from .simulators import (BroadcastSpec, broadcast_mi, gw_coupling, sample_sbm,
                         sample_wigner, wigner_bayes_overlap)

SLACK_TOL = 1e-10

_CHANNEL_ARGS = ("kind", "delta", "p", "q", "pass_prob", "mu0", "mu1",
                 "sigma", "components")


def _fmt(v):
    """Shortest decimal that round-trips; integral floats print as integers."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isfinite(v) and v == int(v) and abs(v) < 1e15:
            return str(int(v))
        return repr(v)
    return str(v)


def _csv(rows):
    return [",".join(_fmt(v) for v in row) for row in rows]


def _comment(command, params, seed, trials):
    items = " ".join(f"{k}={_fmt(v)}" for k, v in sorted(params.items())
                     if v is not None)
    return f"# infoperc {__version__} | command={command} seed={seed} trials={trials} {items}".rstrip()


def parse_graph_spec(spec):
    """triangle | square | path:N | cycle:N | complete:N | star:N |
    grid:WxH | tree:DxDEPTH"""
    alias = {"triangle": "complete:3", "square": "cycle:4"}
    spec = alias.get(spec, spec)
    kind, _, arg = spec.partition(":")
    if kind in ("path", "cycle", "complete", "star"):
        n = int(arg)
        if kind == "star":
            return dary_tree_graph(n, 1)
        return {"path": path_graph, "cycle": cycle_graph,
                "complete": complete_graph}[kind](n)
    if kind in ("grid", "tree"):
        a, _, b = arg.partition("x")
        if kind == "grid":
            return grid2d_graph(int(a), int(b))
        return dary_tree_graph(int(a), int(b))
    raise ValueError(f"unknown graph spec {spec!r}")


def _parse_vertex_set(text):
    if text is None or text.strip() == "":
        return ()
    return tuple(sorted({int(v) for v in text.split(",")}))


def _parse_grid(text):
    if ":" in text:
        lo, hi, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        count = int(round((hi - lo) / step)) + 1
        vals = [lo + i * step for i in range(count)]
        return [v for v in vals if v <= hi + 1e-12]
    return [float(x) for x in text.split(",")]


def _channel_spec(params):
    spec = {}
    for key in _CHANNEL_ARGS:
        if params.get(key) is not None:
            spec["pass" if key == "pass_prob" else key] = str(params[key])
    return spec


def _run_eta(params, seed, trials):
    ch = parse_channel(_channel_spec(params))
    method = params.get("method") or "auto"
    tol = params.get("tol") or 1e-10
    if method == "closed":
        value = eta_kl_closed(ch)
    elif method == "numeric":
        value = eta_kl_numeric(ch, tol)
    elif method == "auto":
        value = eta_kl(ch, tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    return [[value]], 0


def _run_perc(params, seed, trials):
    eta = params["eta"]
    if params.get("lattice"):
        n = params["lattice"]
        est = grid_two_point(n, eta, trials, seed, params.get("margin"))
        return [[eta, n, est.mean, est.stderr, est.trials]], 0
    g = parse_graph_spec(params["graph"])
    fg = incidence_factor_graph(g, None, eta)
    s1 = _parse_vertex_set(params.get("s1"))
    s2 = _parse_vertex_set(params.get("s2"))
    if params.get("exact"):
        return [[params["graph"], eta, len(s1), len(s2),
                 perc_exact(fg, s1, s2), 0.0, 0]], 0
    est = perc_mc(fg, s1, s2, trials, seed)
    return [[params["graph"], eta, len(s1), len(s2),
             est.mean, est.stderr, est.trials]], 0


def _thm1_pairs(n, v=None, s=None):
    if v is not None:
        return [(v, s or ())]
    pairs = []
    for vv in range(n):
        pairs.append((vv, ()))
        for i in range(n):
            pairs.append((vv, (i,)))
            for j in range(i + 1, n):
                pairs.append((vv, (i, j)))
    return pairs


def _run_verify(params, seed, trials):
    target = params["target"]
    rows = []
    worst = math.inf
    if target == "thm1":
        if not params.get("graph") or params.get("delta") is None:
            raise ValueError("verify thm1 needs --graph and --delta")
        g = parse_graph_spec(params["graph"])
        model = binary_symmetric_model(g, params["delta"])
        pairs = _thm1_pairs(g.n, params.get("v"),
                            _parse_vertex_set(params.get("s")) or None)
        for v, s in pairs:
            name = f"{params['graph']}[v={v};s={'-'.join(map(str, s))}]"
            rep = verify_thm1(model, v, s, name)
            rows.append(rep.row())
            worst = min(worst, rep.slack)
    elif target in ("thm2", "compare"):
        n_inst = params.get("instances") or 10
        max_vars = params.get("max_vars") or 5
        for i in range(n_inst):
            dependent = target == "compare" and i % 5 == 0
            model, s1, s2 = random_factor_model(
                trial_base(seed, i), dependent=dependent, max_vars=max_vars)
            name = f"{target}-rand{i}" + ("-dep" if dependent else "")
            rep = (verify_thm2 if target == "thm2" else verify_compare)(
                model, s1, s2, name)
            rows.append(rep.row())
            worst = min(worst, rep.slack)
    else:
        raise ValueError(f"unknown verify target {target!r}")
    return rows, (4 if worst < -SLACK_TOL else 0)


def _run_broadcast(params, seed, trials):
    spec = BroadcastSpec(params["d"], params["delta"], params["depth"],
                         params.get("population") or 100_000)
    res = broadcast_mi(spec, seed)
    rows = [[spec.d, spec.delta, int(t), mi, se, res.population, seed]
            for t, mi, se in zip(res.depths, res.mi_bits, res.stderr)]
    return rows, 0


def _run_wigner(params, seed, trials):
    n, lam = params["n"], params["lam"]
    n_seeds = params.get("seeds") or 200
    overlaps = np.empty(n_seeds)
    mmses = np.empty(n_seeds)
    for i in range(n_seeds):
        inst = sample_wigner(n, lam, trial_base(seed, i))
        overlaps[i], mmses[i] = wigner_bayes_overlap(inst)
    rows = []
    for metric, vals in (("overlap", overlaps), ("mmse_xx", mmses)):
        rows.append([metric, lam, n, float(vals.mean()),
                     float(vals.std(ddof=1) / math.sqrt(n_seeds)), n_seeds, seed])
    return rows, 0


def _run_sbm(params, seed, trials):
    inst = sample_sbm(params["n"], params["k"], params["a"], params["b"], seed)
    return [[inst.n, inst.k, inst.a, inst.b, inst.n_edges,
             inst.mean_degree(), seed]], 0


def _run_coupling(params, seed, trials):
    stats = gw_coupling(params["k"], params["d"], params["depth"], trials, seed)
    return [[params["k"], params["d"], params["depth"],
             stats.survival.mean, stats.survival.stderr,
             stats.uncouple_rate.mean, stats.uncouple_rate.stderr,
             trials, seed]], 0


def _run_curves(params, seed, trials):
    curve = params["curve"]
    k = params.get("k") or 2
    if params.get("bgrid"):
        bs = _parse_grid(params["bgrid"])
    elif params.get("b") is not None:
        bs = [params["b"]]
    else:
        raise ValueError("curves needs --b or --bgrid")
    rows = [[curve, k, b, bounds.curve_value(curve, k, b)] for b in bs]
    return rows, 0


# command -> (typed parameter schema, runner, parameters accepted as sweeps)
COMMANDS = {
    "eta": ({"kind": str, "delta": float, "p": float, "q": float,
             "pass_prob": float, "mu0": float, "mu1": float, "sigma": float,
             "components": str, "method": str, "tol": float},
            _run_eta,
            ("delta", "p", "q", "pass_prob", "mu0", "mu1", "sigma")),
    "perc": ({"graph": str, "lattice": int, "eta": float, "s1": str,
              "s2": str, "exact": bool, "margin": int},
             _run_perc, ("eta",)),
    "verify": ({"target": str, "graph": str, "delta": float, "v": int,
                "s": str, "instances": int, "max_vars": int},
               _run_verify, ()),
    "broadcast": ({"d": int, "delta": float, "depth": int, "population": int},
                  _run_broadcast, ("delta", "d", "depth")),
    "wigner": ({"n": int, "lam": float, "seeds": int}, _run_wigner,
               ("lam", "n")),
    "sbm": ({"n": int, "k": int, "a": float, "b": float}, _run_sbm,
            ("a", "b")),
    "coupling": ({"k": int, "d": float, "depth": int}, _run_coupling,
                 ("d", "depth")),
    "curves": ({"curve": str, "k": int, "b": float, "bgrid": str},
               _run_curves, ("b",)),
}


def _run_sweep(config_path, seed, trials, threads):
    cfg = configparser.ConfigParser()
    read = cfg.read(config_path)
    if not read:
        raise ValueError(f"cannot read config {config_path!r}")
    if "sweep" not in cfg:
        raise ValueError("config needs a [sweep] section")
    sweep = dict(cfg["sweep"])
    command = sweep.pop("command", None)
    param = sweep.pop("param", None)
    grid_text = sweep.pop("grid", None)
    seed = int(sweep.pop("seed", seed))
    trials = int(sweep.pop("trials", trials))
    threads = int(sweep.pop("threads", threads))
    if sweep:
        raise ValueError(f"unknown [sweep] keys: {sorted(sweep)}")
    if command not in COMMANDS:
        raise ValueError(f"unknown sweep command {command!r}")
    schema, runner, sweepable = COMMANDS[command]
    if param not in sweepable:
        raise ValueError(f"parameter {param!r} is not sweepable for {command}")
    if grid_text is None:
        raise ValueError("missing grid")
    grid = _parse_grid(grid_text)

    fixed = {}
    if command in cfg:
        for key, raw in cfg[command].items():
            if key not in schema:
                raise ValueError(f"unknown key {key!r} for [{command}]")
            fixed[key] = (raw.lower() in ("1", "true", "yes")
                          if schema[key] is bool else schema[key](raw))

    cast = schema[param]
    comment = _comment(f"sweep:{command}", {**fixed, "param": param,
                                            "grid": grid_text}, seed, trials)

    # Lattice two-point sweeps share one weight per bond across the whole
    # grid (sorted-weight sweep), so the curve is exactly monotone.
    if command == "perc" and fixed.get("lattice") and param == "eta":
        ests = grid_two_point_curve(fixed["lattice"], grid, trials, seed,
                                    fixed.get("margin"))
        rows = [[eta, fixed["lattice"], e.mean, e.stderr, e.trials]
                for eta, e in zip(grid, ests)]
        return [comment] + _csv(rows), 0

    def one_point(i):
        params = dict(fixed)
        params[param] = cast(grid[i])
        return runner(params, trial_base(seed, i), trials)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one_point, range(len(grid))))
    else:
        results = [one_point(i) for i in range(len(grid))]
    lines = [comment]
    code = 0
    for i, (rows, rc) in enumerate(results):
        code = max(code, rc)
        lines += _csv([[grid[i]] + row for row in rows])
    return lines, code


def build_parser():
    parser = argparse.ArgumentParser(
        prog="infoperc",
        description="Percolation-style information bounds: channels, exact "
                    "verification, simulators, and threshold curves.")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"master seed (default {DEFAULT_SEED})")
    parser.add_argument("--trials", type=int, default=10_000)
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--out", help="write CSV here instead of stdout")

    # The global flags are also accepted after the subcommand.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--trials", type=int, default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=lambda **kw: argparse.ArgumentParser(
                                    parents=[common], **kw))

    sp = sub.add_parser("eta", help="contraction coefficient of a channel")
    sp.add_argument("--kind", required=True)
    for key in ("delta", "p", "q", "mu0", "mu1", "sigma", "tol"):
        sp.add_argument(f"--{key}", type=float)
    sp.add_argument("--pass", dest="pass_prob", type=float)
    sp.add_argument("--components")
    sp.add_argument("--method", choices=("auto", "closed", "numeric"),
                    default="auto")

    sp = sub.add_parser("perc", help="connection probabilities")
    sp.add_argument("--graph")
    sp.add_argument("--lattice", type=int,
                    help="two-point function to (n, n) on the square lattice")
    sp.add_argument("--margin", type=int)
    sp.add_argument("--eta", type=float, required=True)
    sp.add_argument("--s1")
    sp.add_argument("--s2")
    sp.add_argument("--exact", action="store_true")

    sp = sub.add_parser("verify", help="check the information bounds exactly")
    sp.add_argument("target", choices=("thm1", "thm2", "compare"))
    sp.add_argument("--graph")
    sp.add_argument("--delta", type=float)
    sp.add_argument("--v", type=int)
    sp.add_argument("--s")
    sp.add_argument("--instances", type=int, default=10)
    sp.add_argument("--max-vars", dest="max_vars", type=int, default=5)

    sp = sub.add_parser("broadcast", help="tree broadcasting population dynamics")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--population", type=int, default=100_000)

    sp = sub.add_parser("wigner", help="spiked-matrix Bayes overlap")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--lam", "--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--seeds", type=int, default=200)

    sp = sub.add_parser("sbm", help="sample a block model and report stats")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)

    sp = sub.add_parser("coupling", help="label-coupling branching process")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--d", type=float, required=True)
    sp.add_argument("--depth", type=int, required=True)

    sp = sub.add_parser("curves", help="impossibility boundary curves")
    sp.add_argument("--curve", required=True,
                    choices=("mns", "perc2sbm", "ksbm", "banks", "gupo"))
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--b", type=float)
    sp.add_argument("--bgrid")

    sp = sub.add_parser("sweep", help="run a command over a parameter grid")
    sp.add_argument("config")
    return parser


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        if args.command == "sweep":
            lines, code = _run_sweep(args.config, args.seed, args.trials,
                                     args.threads)
            _emit(lines, args.out)
            return code
        schema, runner, _ = COMMANDS[args.command]
        params = {k: getattr(args, k, None) for k in schema}
        rows, code = runner(params, args.seed, args.trials)
        if args.command == "eta":
            _emit([_fmt(rows[0][0])], args.out)
            return code
        comment = _comment(args.command, params, args.seed, args.trials)
        _emit([comment] + _csv(rows), args.out)
        return code
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
