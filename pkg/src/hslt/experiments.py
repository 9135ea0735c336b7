"""Random multicast scenarios and the batch experiments built on them.

Every session draws from its own generator seeded by ``(seed, mc_count,
index)`` (quality) or ``(stream_seed, index)`` (throughput), so results do
not depend on execution order or on the number of worker processes.
"""
from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .lightforest import InvalidSession, MulticastSession, first_tree_destinations, forest_cost
from .routing import ALGORITHMS, build_forest
from .topology import Topology, resolve_topology
from .wdm import WavelengthState, admit_session, wavelength_efficiency

log = logging.getLogger(__name__)

QUALITY_HEADER = ["algo", "mc_count", "group_size", "mean_stress", "mean_l1", "mean_cost"]
THROUGHPUT_HEADER = ["algo", "W", "seed", "accepted", "efficiency"]
DEFAULT_ALGORITHMS = ("r2s", "mo", "hslt")

GroupSize = int | tuple[int, int]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    topology: str = "longhaul28"
    algorithms: Sequence[str] = DEFAULT_ALGORITHMS
    group_size: GroupSize = 14
    mc_counts: Sequence[int] = (0,)
    sessions: int = 1000
    W: int = 20
    seed: int = 0
    streams: int = 1
    jobs: int = 1
    output: str | None = None
    _graph: Topology | None = field(default=None, repr=False, compare=False)

    @property
    def graph(self) -> Topology:
        if self._graph is None:
            self._graph = resolve_topology(self.topology)
        return self._graph

    def group_bounds(self) -> tuple[int, int]:
        if isinstance(self.group_size, int):
            return self.group_size, self.group_size
        lo, hi = self.group_size
        return int(lo), int(hi)

    def validate(self, g: Topology | None = None) -> None:
        g = g or self.graph
        lo, hi = self.group_bounds()
        if not 2 <= lo <= hi <= g.N:
            raise ConfigError(f"group size {self.group_size} outside [2, {g.N}]")
        for mc in self.mc_counts:
            if not 0 <= mc <= g.N:
                raise ConfigError(f"mc count {mc} outside [0, {g.N}]")
        if self.sessions < 1 or self.streams < 1:
            raise ConfigError("sessions and streams must be >= 1")
        if self.W < 1:
            raise ConfigError("W must be >= 1")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a!r}")


@dataclass
class MetricRow:
    algorithm: str
    mc_count: int
    group_size: GroupSize
    mean_stress: float = float("nan")
    mean_first_tree: float = float("nan")
    mean_cost: float = float("nan")
    accepted: int = 0
    efficiency: float = float("nan")
    W: int = 0
    seed: int = 0
    completed: int = 0
    skipped: int = 0


def draw_mc(rng: np.random.Generator, g: Topology, mc_count: int) -> set[int]:
    nodes = np.array(g.nodes)
    return {int(n) for n in rng.choice(nodes, size=mc_count, replace=False)}


def draw_session(
    rng: np.random.Generator, g: Topology, group_size: GroupSize, session_id: int = 0
) -> MulticastSession:
    if isinstance(group_size, int):
        size = group_size
    else:
        size = int(rng.integers(group_size[0], group_size[1] + 1))
    members = rng.choice(np.array(g.nodes), size=size, replace=False)
    return MulticastSession(int(members[0]), [int(m) for m in members[1:]], session_id)


def gen_scenario(
    rng: np.random.Generator,
    g: Topology,
    cfg: ExperimentConfig,
    mc_count: int | None = None,
    session_id: int = 0,
) -> tuple[set[int], MulticastSession]:
    """MC placement, then a group whose first drawn member is the source."""
    mc_count = cfg.mc_counts[0] if mc_count is None else mc_count
    lo, hi = cfg.group_bounds()
    if not (0 <= mc_count <= g.N and 2 <= lo <= hi <= g.N):
        raise ConfigError("scenario infeasible for this topology")
    mc = draw_mc(rng, g, mc_count)
    return mc, draw_session(rng, g, cfg.group_size, session_id)


def _session_metrics(g: Topology, mc: set[int], ms: MulticastSession, algorithms):
    gm = g.with_mc(mc)
    out = []
    for algo in algorithms:
        try:
            f = build_forest(gm, ms, algo)
        except InvalidSession as exc:
            log.warning("session %d skipped: %s", ms.id, exc)
            out.append(None)
            continue
        out.append((f.k, first_tree_destinations(f), forest_cost(f, gm)))
    return out


def _quality_chunk(args):
    g, cfg, mc_count, start, stop = args
    results = []
    for i in range(start, stop):
        rng = np.random.default_rng([cfg.seed, mc_count, i])
        mc, ms = gen_scenario(rng, g, cfg, mc_count, i)
        results.append(_session_metrics(g, mc, ms, cfg.algorithms))
    return results


def _chunks(n: int, parts: int):
    step = max(1, -(-n // max(1, parts * 4)))
    return [(a, min(n, a + step)) for a in range(0, n, step)]


def run_quality_experiment(cfg: ExperimentConfig) -> list[MetricRow]:
    """Mean stress, first-tree size and total cost per (algorithm, MC count)."""
    g = cfg.graph
    cfg.validate(g)
    rows = []
    for mc_count in cfg.mc_counts:
        tasks = [(g, cfg, mc_count, a, b) for a, b in _chunks(cfg.sessions, cfg.jobs)]
        if cfg.jobs > 1:
            with ProcessPoolExecutor(cfg.jobs) as pool:
                parts = list(pool.map(_quality_chunk, tasks))
        else:
            parts = [_quality_chunk(t) for t in tasks]
        per_session = [r for part in parts for r in part]
        for j, algo in enumerate(cfg.algorithms):
            done = [r[j] for r in per_session if r[j] is not None]
            row = MetricRow(algo, mc_count, cfg.group_size, completed=len(done),
                            skipped=len(per_session) - len(done))
            if done:
                n = len(done)
                row.mean_stress = sum(d[0] for d in done) / n
                row.mean_first_tree = sum(d[1] for d in done) / n
                row.mean_cost = sum(d[2] for d in done) / n
            rows.append(row)
    return rows


def run_throughput_stream(
    cfg: ExperimentConfig, algorithm: str, stream_seed: int, mc_count: int | None = None
) -> tuple[MetricRow, WavelengthState]:
    """Admit sessions on one network until the first rejection.

    The MC placement is drawn once for the stream; session ``i`` comes from
    its own generator so every algorithm sees the same arrival sequence.
    """
    g = cfg.graph
    mc_count = cfg.mc_counts[0] if mc_count is None else mc_count
    mc = draw_mc(np.random.default_rng([stream_seed]), g, mc_count)
    gm = g.with_mc(mc)
    state = WavelengthState(gm, cfg.W)
    # every accepted session holds at least one slot, so this bounds the loop
    limit = gm.M * cfg.W + 1
    for i in range(limit):
        ms = draw_session(np.random.default_rng([stream_seed, i]), g, cfg.group_size, i)
        forest = build_forest(gm, ms, algorithm)
        if not admit_session(state, forest).accepted:
            break
    row = MetricRow(
        algorithm, mc_count, cfg.group_size,
        accepted=state.accepted,
        efficiency=wavelength_efficiency(state, gm),
        W=cfg.W,
        seed=stream_seed,
    )
    return row, state


def _throughput_task(args):
    cfg, algo, stream_seed, mc_count = args
    return run_throughput_stream(cfg, algo, stream_seed, mc_count)[0]


def run_throughput_experiment(cfg: ExperimentConfig) -> list[MetricRow]:
    """One row per (algorithm, stream); stream seeds are ``seed .. seed+streams-1``."""
    g = cfg.graph
    cfg.validate(g)
    tasks = [
        (cfg, algo, cfg.seed + s, mc)
        for mc in cfg.mc_counts
        for algo in cfg.algorithms
        for s in range(cfg.streams)
    ]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            return list(pool.map(_throughput_task, tasks, chunksize=8))
    return [_throughput_task(t) for t in tasks]


def format_group_size(group_size: GroupSize) -> str:
    if isinstance(group_size, int):
        return str(group_size)
    return f"{group_size[0]}:{group_size[1]}"


def quality_csv(rows: Sequence[MetricRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(QUALITY_HEADER)
    for r in rows:
        writer.writerow([
            r.algorithm, r.mc_count, format_group_size(r.group_size),
            f"{r.mean_stress:.6f}", f"{r.mean_first_tree:.6f}", f"{r.mean_cost:.6f}",
        ])
    return buf.getvalue()


def throughput_csv(rows: Sequence[MetricRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(THROUGHPUT_HEADER)
    for r in rows:
        writer.writerow([r.algorithm, r.W, r.seed, r.accepted, f"{r.efficiency:.6f}"])
    return buf.getvalue()
