"""Command-line entry point: ``hslt route|quality|throughput|validate``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import experiments as ex
from .lightforest import (
    InvalidSession,
    MulticastSession,
    first_tree_destinations,
    forest_cost,
    forest_from_dict,
    forest_to_json,
    link_stress,
    validate_forest,
)
from .routing import ALGORITHMS, build_forest
from .topology import TopologyError, resolve_topology
from .wdm import WavelengthState, admit_session


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def _int_range(text: str) -> list[int]:
    """``a:b`` (inclusive), ``a:b:step`` or a comma list."""
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        if len(parts) == 2:
            parts.append(1)
        lo, hi, step = parts
        return list(range(lo, hi + 1, step))
    return _int_list(text)


def _group_size(text: str) -> ex.GroupSize:
    if ":" in text:
        lo, hi = (int(x) for x in text.split(":"))
        return (lo, hi)
    return int(text)


def _algos(text: str) -> list[str]:
    out = [a.strip().lower() for a in text.split(",") if a.strip()]
    for a in out:
        if a not in ALGORITHMS:
            raise argparse.ArgumentTypeError(f"unknown algorithm {a!r}")
    return out


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_route(args) -> int:
    g = resolve_topology(args.topology).with_mc(args.mc)
    ms = MulticastSession(args.source, args.dests)
    forest = build_forest(g, ms, args.algo)
    state = WavelengthState(g, args.W)
    result = admit_session(state, forest)
    if args.json:
        print(forest_to_json(forest, sorted(g.mc_nodes)))
        return 0
    print(f"topology {g.name}  algorithm {forest.algorithm}  source {ms.source}  "
          f"destinations {','.join(map(str, sorted(ms.destinations)))}")
    print(f"stress {link_stress(forest)}  cost {forest_cost(forest, g):g}  "
          f"first_tree {first_tree_destinations(forest)}")
    slots = result.assignments if result.accepted else (None,) * forest.k
    for t, slot in zip(forest.trees, slots):
        edges = " ".join(f"{u}-{v}" for u, v in sorted(t.edges))
        print(f"  tree {t.serial}  wavelength {slot}  served {sorted(t.served)}  edges {edges}")
    if args.trace:
        for serial, steps in enumerate(forest.trace, start=1):
            for step in steps:
                print(f"  trace tree {serial}: dest {step.dest} via connector "
                      f"{step.connector} path {step.path} cost {step.path.cost:g}")
    return 0


def cmd_quality(args) -> int:
    cfg = ex.ExperimentConfig(
        topology=args.topology, algorithms=args.algos, group_size=args.group_size,
        mc_counts=args.mc_sweep, sessions=args.sessions, seed=args.seed, jobs=args.jobs,
    )
    rows = ex.run_quality_experiment(cfg)
    _write(ex.quality_csv(rows), args.output)
    return 0


def cmd_throughput(args) -> int:
    cfg = ex.ExperimentConfig(
        topology=args.topology, algorithms=args.algos, group_size=args.group_size,
        mc_counts=args.mc, W=args.W, seed=args.seed, streams=args.streams, jobs=args.jobs,
    )
    rows = ex.run_throughput_experiment(cfg)
    _write(ex.throughput_csv(rows), args.output)
    if args.occupancy:
        _, state = ex.run_throughput_stream(cfg, cfg.algorithms[0], cfg.seed, cfg.mc_counts[0])
        _write(state.to_csv(), args.occupancy)
    return 0


def cmd_validate(args) -> int:
    with open(args.forest, encoding="utf-8") as fh:
        forest, mc_nodes = forest_from_dict(json.load(fh))
    if args.mc is not None:
        mc_nodes = args.mc
    g = resolve_topology(args.topology).with_mc(mc_nodes)
    problems = validate_forest(g, forest)
    for p in problems:
        print(p)
    if problems:
        return 1
    print(f"ok: {forest.k} tree(s), cost {forest_cost(forest, g):g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hslt", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("route", help="build the light-forest for one session")
    r.add_argument("--topology", default="nsf14")
    r.add_argument("--source", type=int, required=True)
    r.add_argument("--dests", type=_int_list, required=True)
    r.add_argument("--mc", type=_int_list, default=[])
    r.add_argument("--algo", default="hslt", choices=sorted(ALGORITHMS))
    r.add_argument("--W", type=int, default=20)
    r.add_argument("--trace", action="store_true")
    r.add_argument("--json", action="store_true", help="print the forest as JSON")
    r.set_defaults(func=cmd_route)

    q = sub.add_parser("quality", help="stress / first-tree / cost sweep over MC counts")
    q.add_argument("--topology", default="longhaul28")
    q.add_argument("--group-size", type=_group_size, default=14)
    q.add_argument("--mc-sweep", type=_int_range, default=[0])
    q.add_argument("--sessions", type=int, default=1000)
    q.add_argument("--algos", type=_algos, default=list(ex.DEFAULT_ALGORITHMS))
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--jobs", type=int, default=1)
    q.add_argument("--output", "-o")
    q.set_defaults(func=cmd_quality)

    t = sub.add_parser("throughput", help="sessions admitted until first blocking")
    t.add_argument("--topology", default="longhaul28")
    t.add_argument("--group-size", type=_group_size, default=(3, 28))
    t.add_argument("--mc", type=_int_range, default=[0])
    t.add_argument("--W", type=int, default=20)
    t.add_argument("--streams", type=int, default=10)
    t.add_argument("--algos", type=_algos, default=["mo", "hslt"])
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--jobs", type=int, default=1)
    t.add_argument("--output", "-o")
    t.add_argument("--occupancy", help="write the first stream's slot occupancy CSV here")
    t.set_defaults(func=cmd_throughput)

    v = sub.add_parser("validate", help="check a serialized forest against a topology")
    v.add_argument("forest")
    v.add_argument("--topology", default="nsf14")
    v.add_argument("--mc", type=_int_list)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (TopologyError, InvalidSession, ex.ConfigError, KeyError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
