"""Command-line entry point: ``palab gen | solve | exp``.

Exit status: 0 success, 1 input/usage error, 2 capacity error. Human-readable
messages go to standard error; machine-readable output goes to the paths named
by ``-o``/``--summary`` or to standard output.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

from .errors import CapacityError, InputError
from .exact import BOUNDARY, DEFAULT_BUDGET, INTERIOR, exact_pa, exact_pa_boundary, oracle_enumerate
from .graphs import build_mst, pt_heuristic
from .instances import default_seed, dumps_instance, gen_uniform, load_instance

EXPERIMENTS = ("gamma", "ratio", "d1", "smooth", "close", "tail", "emptyball", "longestedge", "cone", "additivity")
ALGORITHMS = ("mst", "pt", "pa-exact", "pab-exact", "oracle")


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class Command:
    name: str
    args: dict = field(default_factory=dict)
    sub: str | None = None


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="palab", description="Minimum-power connectivity laboratory")
    sp = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sp.add_parser("gen", help="generate a uniform random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--p", type=float, default=2.0)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--trial", type=int, default=0)
    g.add_argument("-o", "--out")

    s = sp.add_parser("solve", help="solve one instance")
    s.add_argument("--alg", choices=ALGORITHMS, required=True)
    s.add_argument("-i", "--in", dest="inp", required=True)
    s.add_argument("-o", "--out")
    s.add_argument("--mode", choices=(INTERIOR, BOUNDARY), default=INTERIOR, help="oracle mode")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--force", action="store_true")

    e = sp.add_parser("exp", help="run a Monte Carlo experiment")
    e.add_argument("kind", choices=EXPERIMENTS)
    e.add_argument("--functional", choices=("MST", "PT", "PA_exact", "PA_B_exact"), default="MST")
    e.add_argument("--n", type=_int_list, default=None)
    e.add_argument("--d", type=int, default=2)
    e.add_argument("--p", type=float, default=1.0)
    e.add_argument("--trials", type=int, default=10)
    e.add_argument("--samples", type=int, default=100_000, help="cone probe triples")
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--workers", type=int, default=None)
    e.add_argument("-o", "--out")
    e.add_argument("--summary")
    e.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    e.add_argument("--force", action="store_true")
    e.add_argument("--grid", type=int, default=8)
    e.add_argument("--alpha", type=float, default=math.pi / 6)
    e.add_argument("--cball", type=float, default=2.0)
    e.add_argument("--thresholds", type=_float_list, default=[0.05, 0.1, 0.2])
    e.add_argument("--timing", action="store_true", help="fill wall_ms (output no longer reproducible)")
    return ap


_EXACT_EXPERIMENTS = ("close", "additivity")


def parse(argv) -> Command:
    ns = _parser().parse_args(argv)
    args = vars(ns)
    name = args.pop("command")
    sub = args.pop("kind", None)
    if "p" in args and not args["p"] > 0:
        raise UsageError("p must be > 0")
    if "d" in args and args["d"] < 1:
        raise UsageError("d must be >= 1")
    if name == "gen" and args["n"] < 1:
        raise UsageError("n must be >= 1")
    if name in ("gen", "exp") and args.get("seed") is None:
        args["seed"] = default_seed()
    if args.get("seed") is not None and not 0 <= args["seed"] < 2**64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    if "budget" in args:
        if args["budget"] < 1:
            raise UsageError("budget must be >= 1")
        if args["budget"] > DEFAULT_BUDGET and not args["force"]:
            raise UsageError(f"raising the exact budget above {DEFAULT_BUDGET} requires --force")
    if name == "exp":
        if args["trials"] < 1:
            raise UsageError("trials must be >= 1")
        if args["n"] is None:
            args["n"] = [8] if sub in _EXACT_EXPERIMENTS else [100]
        if min(args["n"]) < 1:
            raise UsageError("n must be >= 1")
        if args["workers"] is not None and args["workers"] < 1:
            raise UsageError("workers must be >= 1")
        exact = sub in _EXACT_EXPERIMENTS or args["functional"] in ("PA_exact", "PA_B_exact")
        if exact and max(args["n"]) > args["budget"]:
            if not args["force"]:
                raise CapacityError(
                    f"exact solver requested with n={max(args['n'])} over the budget {args['budget']}; "
                    f"pass --force to raise it", budget=args["budget"])
            args["budget"] = max(args["n"])
    return Command(name, args, sub)


def _write(text: str, path: str | None):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _echo(cmd: Command, resolved: dict):
    label = f"{cmd.name} {cmd.sub}" if cmd.sub else cmd.name
    print(f"# palab {label} config: {json.dumps(resolved, sort_keys=True)}", file=sys.stderr)


def _run_gen(cmd: Command):
    a = cmd.args
    _echo(cmd, a)
    inst = gen_uniform(a["seed"], a["trial"], a["n"], a["d"], a["p"])
    _write(dumps_instance(inst), a["out"])


def _floats(x) -> list:
    return [float(v) for v in x]


def _run_solve(cmd: Command):
    a = cmd.args
    _echo(cmd, a)
    if a["budget"] > DEFAULT_BUDGET:
        print(f"warning: exact budget raised to {a['budget']}; search may be slow", file=sys.stderr)
    inst = load_instance(a["inp"])
    alg = a["alg"]
    out = {"n": inst.n, "d": inst.d, "p": inst.p}
    if alg == "mst":
        m = build_mst(inst)
        out.update(functional="MST", value=m.total, edges=m.edges.tolist(), longest_edge=m.longest_edge,
                   max_degree=m.max_degree, heavy=m.heavy, light=m.light)
    elif alg == "pt":
        s = pt_heuristic(inst)
        out.update(functional="PT", value=s.value, powers=_floats(s.powers))
    elif alg == "pa-exact":
        s = exact_pa(inst, budget=a["budget"])
        out.update(functional="PA", value=s.value, powers=_floats(s.powers))
    elif alg == "pab-exact":
        s = exact_pa_boundary(inst, budget=a["budget"])
        out.update(functional="PA_B", value=s.value, powers=_floats(s.powers),
                   boundary_links=sorted(s.boundary_links))
    else:
        s = oracle_enumerate(inst, a["mode"])
        out.update(functional="PA_B" if a["mode"] == BOUNDARY else "PA", value=s.value,
                   powers=_floats(s.powers), method="oracle")
    _write(json.dumps(out, sort_keys=True) + "\n", a["out"])


def _run_exp(cmd: Command):
    from . import experiments as ex

    a = cmd.args
    kind = cmd.sub
    workers = a["workers"]
    resolved = dict(a, kind=kind)
    resolved["workers"] = workers if workers is not None else ex.harness.default_workers()
    _echo(cmd, resolved)
    if a["force"] and a["budget"] > DEFAULT_BUDGET:
        print(f"warning: exact budget raised to {a['budget']}; search may be slow", file=sys.stderr)
    cfg_fields = dict(functional=a["functional"], d=a["d"], p=a["p"], n_values=tuple(a["n"]),
                      trials=a["trials"], seed=a["seed"], budget=a["budget"], grid=a["grid"],
                      c_ball=a["cball"], thresholds=tuple(a["thresholds"]), alpha=a["alpha"],
                      timing=a["timing"])
    if kind == "cone":
        res = ex.probe_cone(a["samples"], a["alpha"], a["seed"], d=a["d"], p=a["p"], batches=a["trials"])
        config = {"kind": kind, "samples": a["samples"], "alpha": a["alpha"], "seed": a["seed"],
                  "d": a["d"], "p": a["p"], "batches": a["trials"]}
    elif kind == "additivity":
        res = ex.probe_additivity(a["trials"], max(a["n"]), a["seed"], d=a["d"], p=a["p"],
                                  budget=a["budget"], workers=workers)
        config = {"kind": kind, "trials": a["trials"], "n_max": max(a["n"]), "seed": a["seed"],
                  "d": a["d"], "p": a["p"], "budget": a["budget"]}
    else:
        cfg = ex.ExperimentConfig(**cfg_fields)
        config = dict(cfg.echo(), kind=kind)
        if kind == "gamma":
            g = ex.run_gamma(cfg, workers)
            res = ex.ExperimentResult(f"gamma-{cfg.functional}", g.records,
                                      {"normalized": g.summary(), "trend": g.trend})
        else:
            fn = {"ratio": ex.run_ratio, "d1": ex.run_d1, "smooth": ex.probe_smoothness,
                  "close": ex.probe_closeness, "tail": ex.probe_tail, "emptyball": ex.probe_empty_ball,
                  "longestedge": ex.probe_longest_edge}[kind]
            res = fn(cfg, workers)
    _write(ex.csv_text(res.records), a["out"])
    text = ex.summary_json(config, res.summary)
    if a["summary"]:
        _write(text, a["summary"])
    elif a["out"]:
        sys.stdout.write(text)


def run(cmd: Command) -> int:
    try:
        {"gen": _run_gen, "solve": _run_solve, "exp": _run_exp}[cmd.name](cmd)
    except CapacityError as e:
        print(f"capacity error: {e}", file=sys.stderr)
        return 2
    except (InputError, OSError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cmd = parse(argv)
    except CapacityError as e:
        print(f"capacity error: {e}", file=sys.stderr)
        return 2
    except InputError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    return run(cmd)


if __name__ == "__main__":
    sys.exit(main())
