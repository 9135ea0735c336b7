"""Light-trees, light-forests and the connector bookkeeping used while growing them.

A light-tree is rooted at the session source and occupies one wavelength.
Non-root MI nodes may have at most one child; MC nodes and the source
(which can drive several emitters on the same wavelength) may branch freely.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .topology import MC, Edge, Path, Topology, edge_key


class ConstraintViolation(ValueError):
    """A tree extension would break the splitting or tree constraints."""


class InvalidSession(ValueError):
    pass


@dataclass(frozen=True)
class MulticastSession:
    source: int
    destinations: frozenset[int]
    id: int = 0

    def __init__(self, source: int, destinations: Iterable[int], id: int = 0):
        object.__setattr__(self, "source", int(source))
        object.__setattr__(self, "destinations", frozenset(int(d) for d in destinations))
        object.__setattr__(self, "id", id)
        if not self.destinations:
            raise InvalidSession("session needs at least one destination")
        if self.source in self.destinations:
            raise InvalidSession(f"source {self.source} listed as a destination")

    @property
    def K(self) -> int:
        return len(self.destinations)

    def check(self, g: Topology) -> None:
        for n in (self.source, *self.destinations):
            if not g.has_node(n):
                raise InvalidSession(f"session node {n} not in topology {g.name}")
        if self.K > g.N - 1:
            raise InvalidSession("more destinations than nodes")


@dataclass(frozen=True)
class LightTree:
    """A tree on one wavelength, stored as an undirected edge set plus root.

    ``served`` holds only the destinations this tree serves for the first
    time; earlier-served destinations may still appear as pass-through nodes.
    """

    root: int
    edges: frozenset[Edge] = frozenset()
    served: frozenset[int] = frozenset()
    serial: int = 1
    wavelength: int | None = None

    @property
    def nodes(self) -> set[int]:
        out = {self.root}
        for u, v in self.edges:
            out.add(u)
            out.add(v)
        return out

    def degree(self) -> dict[int, int]:
        deg = {self.root: 0}
        for u, v in self.edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        return deg

    @property
    def parent(self) -> dict[int, int]:
        """child -> parent, by BFS from the root (partial if not a tree)."""
        adj: dict[int, list[int]] = {}
        for u, v in sorted(self.edges):
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
        parent: dict[int, int] = {}
        seen = {self.root}
        queue = deque([self.root])
        while queue:
            u = queue.popleft()
            for v in adj.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    parent[v] = u
                    queue.append(v)
        return parent

    def children(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for child, par in sorted(self.parent.items()):
            out.setdefault(par, []).append(child)
        return out

    def path_from_root(self, node: int) -> list[int]:
        parent = self.parent
        out = [node]
        while out[-1] != self.root:
            out.append(parent[out[-1]])
        return out[::-1]

    def cost(self, g: Topology | None = None) -> float:
        if g is None:
            return len(self.edges)
        return sum(g.cost(u, v) for u, v in self.edges)


def tree_cost(t: LightTree, g: Topology | None = None) -> float:
    """Sum of edge costs; unit costs assumed when ``g`` is omitted."""
    return t.cost(g)


@dataclass(frozen=True)
class ConnectionChoice:
    dest: int
    connector: int
    path: Path  # runs dest -> connector


@dataclass(frozen=True)
class LightForest:
    session: MulticastSession
    trees: tuple[LightTree, ...]
    algorithm: str = ""
    trace: tuple[tuple[ConnectionChoice, ...], ...] = ()
    sweeps: int = 0

    @property
    def k(self) -> int:
        return len(self.trees)


def forest_cost(f: LightForest, g: Topology | None = None) -> float:
    return sum(t.cost(g) for t in f.trees)


def link_stress(f: LightForest) -> int:
    return len(f.trees)


def first_tree_destinations(f: LightForest) -> int:
    if not f.trees:
        raise ValueError("empty forest")
    return len(f.trees[0].served)


def validate_tree(g: Topology, t: LightTree) -> list[str]:
    problems = []
    for u, v in sorted(t.edges):
        if not g.has_edge(u, v):
            problems.append(f"foreign edge {u}-{v}")
    nodes = t.nodes
    reached = set(t.parent) | {t.root}
    for n in sorted(nodes - reached):
        problems.append(f"node {n} disconnected from root {t.root}")
    if len(t.edges) != len(nodes) - 1 and not nodes - reached:
        problems.append(f"cycle: {len(t.edges)} edges on {len(nodes)} nodes")
    for n, deg in sorted(t.degree().items()):
        # non-root child count is degree - 1 once the edges form a tree
        if n != t.root and g.has_node(n) and not g.is_mc(n) and deg > 2:
            problems.append(f"MI branching at {n}")
    for d in sorted(t.served - nodes):
        problems.append(f"served destination {d} not in tree")
    return problems


def validate_forest(g: Topology, f: LightForest) -> list[str]:
    """Tree-level checks for every tree plus the served-set partition laws."""
    problems = []
    seen: set[int] = set()
    for t in f.trees:
        problems += [f"tree {t.serial}: {p}" for p in validate_tree(g, t)]
        if t.root != f.session.source:
            problems.append(f"tree {t.serial}: root {t.root} is not the source")
        if not t.served:
            problems.append(f"tree {t.serial}: serves no new destination")
        foreign = t.served - f.session.destinations
        if foreign:
            problems.append(f"tree {t.serial}: serves non-members {sorted(foreign)}")
        overlap = t.served & seen
        if overlap:
            problems.append(f"tree {t.serial}: re-serves {sorted(overlap)}")
        seen |= t.served
    missing = f.session.destinations - seen
    if missing:
        problems.append(f"destinations never served: {sorted(missing)}")
    return problems


@dataclass
class GrowState:
    """Mutable construction state for one light-tree.

    ``mc_set`` holds the connectors (root, MC tree nodes, leaf MI tree nodes),
    ``mi_set`` the exhausted non-leaf MI nodes, ``remaining`` the destinations
    not yet served by this or any earlier tree.
    """

    g: Topology
    root: int
    remaining: set[int]
    working: Topology | None = None
    parent: dict[int, int] = field(default_factory=dict)
    mc_set: set[int] = field(default_factory=set)
    mi_set: set[int] = field(default_factory=set)
    served: set[int] = field(default_factory=set)

    def __post_init__(self):
        if self.working is None:
            self.working = self.g
        if not self.mc_set:
            self.mc_set = {self.root}

    @property
    def tree_nodes(self) -> set[int]:
        return set(self.parent) | {self.root}

    @property
    def tree_edges(self) -> set[Edge]:
        return {edge_key(c, p) for c, p in self.parent.items()}

    def snapshot(self) -> "GrowState":
        return GrowState(
            g=self.g,
            root=self.root,
            remaining=set(self.remaining),
            working=self.working,
            parent=dict(self.parent),
            mc_set=set(self.mc_set),
            mi_set=set(self.mi_set),
            served=set(self.served),
        )

    def to_tree(self, serial: int) -> LightTree:
        return LightTree(
            root=self.root,
            edges=frozenset(self.tree_edges),
            served=frozenset(self.served),
            serial=serial,
        )

    def check_invariants(self) -> list[str]:
        problems = []
        nodes = self.tree_nodes
        child_count: dict[int, int] = {}
        for p in self.parent.values():
            child_count[p] = child_count.get(p, 0) + 1
        if self.mc_set & self.mi_set:
            problems.append(f"MC_SET and MI_SET overlap: {sorted(self.mc_set & self.mi_set)}")
        expected_mi = {
            n for n in nodes
            if n != self.root and not self.g.is_mc(n) and child_count.get(n, 0) > 0
        }
        if self.mi_set != expected_mi:
            problems.append(f"MI_SET {sorted(self.mi_set)} != non-leaf MI {sorted(expected_mi)}")
        expected_mc = {self.root} | {
            n for n in nodes if self.g.is_mc(n) or child_count.get(n, 0) == 0
        }
        if self.mc_set != expected_mc:
            problems.append(f"MC_SET {sorted(self.mc_set)} != connectors {sorted(expected_mc)}")
        for n, c in child_count.items():
            if n != self.root and not self.g.is_mc(n) and c > 1:
                problems.append(f"MI branching at {n}")
        return problems


def extend_tree(state: GrowState, path: Path | Sequence[int], connector: int, dest: int) -> GrowState:
    """Graft ``path`` (dest -> connector) onto the tree under construction.

    Updates the state in place and returns it.
    """
    nodes = tuple(path.nodes if isinstance(path, Path) else path)
    if len(nodes) < 2 or nodes[0] != dest or nodes[-1] != connector:
        raise ConstraintViolation(f"path {nodes} must run from {dest} to {connector}")
    if connector not in state.mc_set:
        raise ConstraintViolation(f"connector {connector} is not in MC_SET")
    if dest not in state.remaining:
        raise ConstraintViolation(f"destination {dest} is not pending")
    if len(set(nodes)) != len(nodes):
        raise ConstraintViolation(f"path {nodes} repeats a node")
    tree = state.tree_nodes
    for n in nodes[:-1]:
        if n in state.mi_set:
            raise ConstraintViolation(f"path enters exhausted MI node {n}")
        if n in tree:
            raise ConstraintViolation(f"path re-enters tree at node {n}")
    for a, b in zip(nodes, nodes[1:]):
        if not state.g.has_edge(a, b):
            raise ConstraintViolation(f"no edge {a}-{b}")

    # signal flows connector -> dest
    for child, par in zip(nodes[:-1], nodes[1:]):
        state.parent[child] = par
    g = state.g
    if connector != state.root and not g.is_mc(connector):
        state.mc_set.discard(connector)
        state.mi_set.add(connector)
    for n in nodes[1:-1]:
        if g.is_mc(n):
            state.mc_set.add(n)
        else:
            state.mi_set.add(n)
        # a pending member on the path taps the signal on its way through
        if n in state.remaining:
            state.remaining.discard(n)
            state.served.add(n)
    state.mc_set.add(dest)
    state.remaining.discard(dest)
    state.served.add(dest)
    return state


# -- serialization ------------------------------------------------------------

def forest_to_dict(f: LightForest, mc_nodes: Iterable[int] = ()) -> dict:
    return {
        "algorithm": f.algorithm,
        "session": {
            "id": f.session.id,
            "source": f.session.source,
            "destinations": sorted(f.session.destinations),
            "mc_nodes": sorted(mc_nodes),
        },
        "trees": [
            {
                "serial": t.serial,
                "wavelength": t.wavelength,
                "edges": [list(e) for e in sorted(t.edges)],
                "served": sorted(t.served),
            }
            for t in f.trees
        ],
    }


def forest_to_json(f: LightForest, mc_nodes: Iterable[int] = (), indent: int | None = 2) -> str:
    return json.dumps(forest_to_dict(f, mc_nodes), indent=indent)


def forest_from_dict(data: dict) -> tuple[LightForest, list[int]]:
    s = data["session"]
    session = MulticastSession(s["source"], s["destinations"], s.get("id", 0))
    trees = tuple(
        LightTree(
            root=session.source,
            edges=frozenset(edge_key(int(u), int(v)) for u, v in t["edges"]),
            served=frozenset(t["served"]),
            serial=t.get("serial", i + 1),
            wavelength=t.get("wavelength"),
        )
        for i, t in enumerate(data["trees"])
    )
    return LightForest(session, trees, data.get("algorithm", "")), list(s.get("mc_nodes", []))
