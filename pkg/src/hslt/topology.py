"""Graph model of a WDM mesh with sparse light splitting.

A :class:`Topology` is an immutable undirected graph whose nodes carry a
splitting capability: ``MC`` (multicast capable, owns a light splitter) or
``MI`` (multicast incapable, tap-and-continue only). Node ids are 1-based
integers as written in ``.topo`` files.

File format (line oriented, ``#`` starts a comment)::

    topology <name>
    node <id> <MC|MI>
    edge <u> <v> [cost]

Edge cost defaults to 1 (unit hop count).
"""
from __future__ import annotations

import os
import warnings
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Iterator, Mapping

MC = "MC"
MI = "MI"
KINDS = (MC, MI)

BUILTIN_NAMES = ("nsf14", "longhaul28")
TOPOLOGY_DIR_ENV = "HSLT_TOPOLOGY_DIR"

Edge = tuple[int, int]


class TopologyError(ValueError):
    """Malformed topology file or inconsistent graph."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingElementWarning(UserWarning):
    """delete_from was asked to remove something the graph does not have."""


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Path:
    """Simple path as an ordered node sequence with its additive cost."""

    nodes: tuple[int, ...]
    cost: float

    @property
    def edges(self) -> list[Edge]:
        return [edge_key(a, b) for a, b in zip(self.nodes, self.nodes[1:])]

    @property
    def interior(self) -> tuple[int, ...]:
        return self.nodes[1:-1]

    def reversed(self) -> "Path":
        return Path(self.nodes[::-1], self.cost)

    def __len__(self) -> int:
        return len(self.nodes)

    def __str__(self) -> str:
        return "-".join(map(str, self.nodes))


class Topology:
    """Undirected weighted graph with a splitting capability per node.

    Instances are treated as immutable; every derived graph (see
    :func:`delete_from`, :meth:`with_mc`) is a fresh object.
    """

    __slots__ = ("name", "_kinds", "_adj", "_edge_sig")

    def __init__(
        self,
        name: str,
        kinds: Mapping[int, str],
        edges: Mapping[Edge, float] | Iterable[Edge],
    ):
        self.name = name
        self._kinds: dict[int, str] = {}
        for node, kind in kinds.items():
            if kind not in KINDS:
                raise TopologyError(f"node {node}: unknown capability {kind!r}")
            self._kinds[int(node)] = kind
        if not isinstance(edges, Mapping):
            edges = {e: 1 for e in edges}
        self._adj: dict[int, dict[int, float]] = {n: {} for n in sorted(self._kinds)}
        for (u, v), cost in edges.items():
            if u == v:
                raise TopologyError(f"self-loop at node {u}")
            if u not in self._kinds or v not in self._kinds:
                raise TopologyError(f"edge {u}-{v} references an unknown node")
            if cost <= 0:
                raise TopologyError(f"edge {u}-{v} has non-positive cost {cost}")
            if v in self._adj[u]:
                raise TopologyError(f"duplicate edge {u}-{v}")
            self._adj[u][v] = cost
            self._adj[v][u] = cost
        self._edge_sig = None

    @classmethod
    def _raw(cls, name, kinds, adj) -> "Topology":
        # trusted constructor for derived graphs; skips validation
        t = cls.__new__(cls)
        t.name = name
        t._kinds = kinds
        t._adj = adj
        t._edge_sig = None
        return t

    # -- queries ---------------------------------------------------------
    @property
    def nodes(self) -> list[int]:
        return list(self._adj)

    @property
    def N(self) -> int:
        return len(self._adj)

    @property
    def M(self) -> int:
        return sum(len(nbrs) for nbrs in self._adj.values()) // 2

    def edges(self) -> Iterator[tuple[int, int, float]]:
        for u, nbrs in self._adj.items():
            for v, cost in nbrs.items():
                if u < v:
                    yield u, v, cost

    def edge_set(self) -> set[Edge]:
        return {(u, v) for u, v, _ in self.edges()}

    def neighbors(self, node: int) -> Mapping[int, float]:
        return self._adj[node]

    def has_node(self, node: int) -> bool:
        return node in self._adj

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._adj and v in self._adj[u]

    def cost(self, u: int, v: int) -> float:
        return self._adj[u][v]

    def kind(self, node: int) -> str:
        return self._kinds[node]

    def is_mc(self, node: int) -> bool:
        return self._kinds[node] == MC

    @property
    def mc_nodes(self) -> set[int]:
        return {n for n, k in self._kinds.items() if k == MC and n in self._adj}

    def path_cost(self, nodes: Iterable[int]) -> float:
        nodes = list(nodes)
        return sum(self._adj[a][b] for a, b in zip(nodes, nodes[1:]))

    def edge_signature(self) -> tuple:
        """Hashable description of the weighted graph, ignoring capabilities."""
        if self._edge_sig is None:
            self._edge_sig = (tuple(self._adj), tuple(sorted(self.edges())))
        return self._edge_sig

    def is_connected(self) -> bool:
        if not self._adj:
            return True
        start = next(iter(self._adj))
        seen = {start}
        stack = [start]
        while stack:
            for v in self._adj[stack.pop()]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == len(self._adj)

    # -- derivation ------------------------------------------------------
    def with_mc(self, mc_nodes: Iterable[int]) -> "Topology":
        """Same graph with exactly ``mc_nodes`` marked MC and the rest MI."""
        mc_nodes = set(mc_nodes)
        unknown = mc_nodes - set(self._kinds)
        if unknown:
            raise TopologyError(f"unknown MC nodes {sorted(unknown)}")
        kinds = {n: (MC if n in mc_nodes else MI) for n in self._kinds}
        t = Topology._raw(self.name, kinds, self._adj)
        t._edge_sig = self._edge_sig
        return t

    def __eq__(self, other) -> bool:
        if not isinstance(other, Topology):
            return NotImplemented
        return (
            self.name == other.name
            and self._kinds == other._kinds
            and self._adj == other._adj
        )

    def __hash__(self) -> int:
        return hash((self.name, self.edge_signature(), tuple(sorted(self.mc_nodes))))

    def __repr__(self) -> str:
        return f"Topology({self.name!r}, N={self.N}, M={self.M}, mc={sorted(self.mc_nodes)})"


def delete_from(
    g: Topology, nodes: Iterable[int] = (), edges: Iterable[Edge] = ()
) -> Topology:
    """Return ``g`` without ``nodes`` (and their incident edges) and ``edges``.

    Elements absent from ``g`` are skipped and reported through a
    :class:`MissingElementWarning`. ``g`` itself is never modified.
    """
    adj = {u: dict(nbrs) for u, nbrs in g._adj.items()}
    missing = []
    for u, v in edges:
        if v in adj.get(u, ()):
            del adj[u][v]
            del adj[v][u]
        else:
            missing.append((u, v))
    for n in nodes:
        if n not in adj:
            missing.append(n)
            continue
        for v in adj.pop(n):
            del adj[v][n]
    if missing:
        warnings.warn(
            f"delete_from: {len(missing)} element(s) not in graph: {missing}",
            MissingElementWarning,
            stacklevel=2,
        )
    return Topology._raw(g.name, g._kinds, adj)


def parse_topology(text: str) -> Topology:
    name = None
    kinds: dict[int, str] = {}
    edges: dict[Edge, float] = {}
    edge_lines: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        keyword = parts[0].lower()
        try:
            if keyword == "topology":
                if len(parts) != 2:
                    raise TopologyError("expected 'topology <name>'", lineno)
                if name is not None:
                    raise TopologyError("repeated topology header", lineno)
                name = parts[1]
            elif keyword == "node":
                if len(parts) != 3:
                    raise TopologyError("expected 'node <id> <MC|MI>'", lineno)
                node = int(parts[1])
                kind = parts[2].upper()
                if node < 1:
                    raise TopologyError(f"node id {node} must be >= 1", lineno)
                if kind not in KINDS:
                    raise TopologyError(f"unknown capability {parts[2]!r}", lineno)
                if node in kinds:
                    raise TopologyError(f"duplicate node {node}", lineno)
                kinds[node] = kind
            elif keyword == "edge":
                if len(parts) not in (3, 4):
                    raise TopologyError("expected 'edge <u> <v> [cost]'", lineno)
                u, v = int(parts[1]), int(parts[2])
                cost = float(parts[3]) if len(parts) == 4 else 1
                if cost == int(cost):
                    cost = int(cost)
                if u == v:
                    raise TopologyError(f"self-loop at node {u}", lineno)
                if cost <= 0:
                    raise TopologyError(f"non-positive cost {cost} on edge {u}-{v}", lineno)
                key = edge_key(u, v)
                if key in edges:
                    raise TopologyError(f"duplicate edge {u}-{v}", lineno)
                edges[key] = cost
                edge_lines.append((u, v, lineno))
            else:
                raise TopologyError(f"unknown keyword {parts[0]!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, TopologyError):
                raise
            raise TopologyError(f"malformed line {raw.strip()!r}", lineno) from None
    if name is None:
        raise TopologyError("missing 'topology <name>' header")
    for u, v, lineno in edge_lines:
        for n in (u, v):
            if n not in kinds:
                raise TopologyError(f"edge {u}-{v} references unknown node {n}", lineno)
    return Topology(name, kinds, edges)


def render_topology(g: Topology) -> str:
    lines = [f"topology {g.name}"]
    lines += [f"node {n} {g.kind(n)}" for n in g.nodes]
    for u, v, cost in g.edges():
        lines.append(f"edge {u} {v}" if cost == 1 else f"edge {u} {v} {cost}")
    return "\n".join(lines) + "\n"


def load_topology(path: str | os.PathLike) -> Topology:
    with open(path, encoding="utf-8") as fh:
        return parse_topology(fh.read())


def builtin_topology(name: str) -> Topology:
    if name not in BUILTIN_NAMES:
        raise KeyError(f"unknown builtin topology {name!r}; choose from {BUILTIN_NAMES}")
    text = resources.files("hslt.data").joinpath(f"{name}.topo").read_text("utf-8")
    return parse_topology(text)


def resolve_topology(name: str) -> Topology:
    """Load a topology from a builtin name, a file path, or the env directory.

    Lookup order: existing file path, ``$HSLT_TOPOLOGY_DIR/<name>.topo``,
    then the builtin set.
    """
    if os.path.isfile(name):
        return load_topology(name)
    directory = os.environ.get(TOPOLOGY_DIR_ENV)
    if directory:
        candidate = os.path.join(directory, f"{name}.topo")
        if os.path.isfile(candidate):
            return load_topology(candidate)
    return builtin_topology(name)
