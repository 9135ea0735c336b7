"""Shortest paths and the three light-forest builders.

Tie-breaking is deterministic everywhere. A search label is ``(cost, seq)``
where ``seq`` is the node sequence from the search origin, so among
equal-cost paths the lexicographically smallest sequence wins; with several
origins that means the lowest origin id first. Candidate connections are
ranked by ``(cost, dest, connector, seq)``.
"""
from __future__ import annotations

import heapq
from collections import deque
from enum import Enum
from typing import Callable, Iterable

from .lightforest import (
    ConnectionChoice,
    GrowState,
    InvalidSession,
    LightForest,
    LightTree,
    MulticastSession,
    extend_tree,
)
from .topology import Path, Topology, delete_from, edge_key


class AlgorithmKind(str, Enum):
    HSLT = "hslt"
    MEMBER_ONLY = "mo"
    REROUTE_TO_SOURCE = "r2s"

    def __str__(self) -> str:
        return self.value


Label = tuple[float, tuple[int, ...]]
Observer = Callable[[GrowState, "ConnectionChoice | None"], None]


def _sweep(
    g: Topology,
    origins: Iterable[int],
    targets: Iterable[int] | None = None,
    first_target_only: bool = False,
) -> dict[int, Label]:
    """Multi-origin Dijkstra. Returns the settled label of every reached node.

    With ``first_target_only`` the search stops as soon as every node at the
    distance of the nearest target has been settled.
    """
    heap: list[Label] = [(0, (o,)) for o in sorted(set(origins)) if g.has_node(o)]
    heapq.heapify(heap)
    targets = set(targets) if targets is not None else None
    settled: dict[int, Label] = {}
    bound = None
    while heap:
        dist, seq = heapq.heappop(heap)
        if bound is not None and dist > bound:
            break
        u = seq[-1]
        if u in settled:
            continue
        settled[u] = (dist, seq)
        if targets is not None and u in targets:
            targets.discard(u)
            if first_target_only and bound is None:
                bound = dist
            if not targets:
                break
        for v, c in g.neighbors(u).items():
            if v not in settled:
                heapq.heappush(heap, (dist + c, seq + (v,)))
    return settled


def shortest_path(g: Topology, u: int, v: int) -> Path | None:
    for n in (u, v):
        if not g.has_node(n):
            raise KeyError(f"unknown node {n}")
    label = _sweep(g, [u], [v]).get(v)
    if label is None:
        return None
    return Path(label[1], label[0])


def nearest_destination(
    g: Topology, connectors: Iterable[int], dests: Iterable[int]
) -> ConnectionChoice | None:
    """Closest (dest, connector) pair found with a single multi-origin sweep.

    All connectors start at distance 0, so the label reaching a destination
    already names its best connector.
    """
    dests = {d for d in dests if g.has_node(d)}
    connectors = [c for c in connectors if g.has_node(c)]
    if not dests or not connectors:
        return None
    settled = _sweep(g, connectors, dests, first_target_only=True)
    best = None
    for d in dests:
        label = settled.get(d)
        if label is not None and (best is None or (label[0], d) < (best[0], best[1])):
            best = (label[0], d, label[1])
    if best is None:
        return None
    cost, d, seq = best
    return ConnectionChoice(dest=d, connector=seq[0], path=Path(seq[::-1], cost))


class ShortestPathTable:
    """Lazily filled all-pairs shortest paths for one weighted graph."""

    def __init__(self, g: Topology):
        self.g = g
        self._rows: dict[int, dict[int, Label]] = {}

    def row(self, source: int) -> dict[int, Label]:
        row = self._rows.get(source)
        if row is None:
            row = self._rows[source] = _sweep(self.g, [source])
        return row

    def get(self, u: int, v: int) -> Label | None:
        return self.row(u).get(v)


_TABLES: dict[tuple, ShortestPathTable] = {}


def shortest_path_table(g: Topology) -> ShortestPathTable:
    key = g.edge_signature()
    table = _TABLES.get(key)
    if table is None:
        if len(_TABLES) >= 32:
            _TABLES.clear()
        table = _TABLES[key] = ShortestPathTable(g)
    return table


def _reachable(g: Topology, source: int) -> set[int]:
    seen = {source}
    queue = deque([source])
    while queue:
        for v in g.neighbors(queue.popleft()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def _check_session(g: Topology, ms: MulticastSession) -> None:
    ms.check(g)
    unreachable = ms.destinations - _reachable(g, ms.source)
    if unreachable:
        raise InvalidSession(
            f"destinations {sorted(unreachable)} unreachable from source {ms.source}"
        )


def hslt_deletions(state: GrowState, choice: ConnectionChoice) -> tuple[set[int], list]:
    """Nodes and edges removed from the working graph after ``choice`` is grafted.

    Interior MI nodes and a non-root MI connector become non-leaf and are
    dropped; the newly reached destination stays as a leaf connector.
    """
    g = state.g
    nodes = {n for n in choice.path.interior if not g.is_mc(n)}
    c = choice.connector
    if c != state.root and not g.is_mc(c):
        nodes.add(c)
    return nodes, choice.path.edges


def hslt_select(state: GrowState) -> ConnectionChoice | None:
    return nearest_destination(state.working, state.mc_set, state.remaining)


def hslt_build(
    g: Topology, ms: MulticastSession, observer: Observer | None = None
) -> LightForest:
    """Hypo-Steiner light-forest.

    Each tree grows on a progressively pruned copy of ``g``: after every graft
    the used edges and the exhausted MI nodes are deleted, so the nearest
    destination in the pruned graph is always reachable by a
    constraint-satisfying path, possibly longer than the original shortest path.
    """
    _check_session(g, ms)
    remaining = set(ms.destinations)
    trees: list[LightTree] = []
    trace = []
    sweeps = 0
    while remaining:
        state = GrowState(g=g, root=ms.source, remaining=remaining, working=g)
        steps = []
        while state.remaining:
            choice = hslt_select(state)
            sweeps += 1
            if observer is not None:
                observer(state.snapshot(), choice)
            if choice is None:
                break
            nodes, edges = hslt_deletions(state, choice)
            extend_tree(state, choice.path, choice.connector, choice.dest)
            state.working = delete_from(state.working, nodes, edges)
            steps.append(choice)
        if not state.served:
            raise InvalidSession(f"no destination reachable for tree {len(trees) + 1}")
        trees.append(state.to_tree(len(trees) + 1))
        trace.append(tuple(steps))
        remaining = state.remaining
    return LightForest(ms, tuple(trees), AlgorithmKind.HSLT.value, tuple(trace), sweeps)


def member_only_select(state: GrowState, table: ShortestPathTable | None = None) -> ConnectionChoice | None:
    """Nearest (dest, connector) whose original-graph shortest path is usable.

    A path qualifies when, apart from its connector end, it touches no node
    of the current tree (which covers every MI_SET node).
    """
    table = table or shortest_path_table(state.g)
    tree = state.tree_nodes
    best = None
    for c in sorted(state.mc_set):
        row = table.row(c)
        for d in sorted(state.remaining):
            label = row.get(d)
            if label is None:
                continue
            cost, seq = label
            if best is not None and cost > best[0]:
                continue
            if any(n in tree for n in seq[1:]):
                continue
            key = (cost, d, c, seq)
            if best is None or key < best:
                best = key
    if best is None:
        return None
    cost, d, c, seq = best
    return ConnectionChoice(dest=d, connector=c, path=Path(seq[::-1], cost))


def member_only_build(
    g: Topology, ms: MulticastSession, observer: Observer | None = None
) -> LightForest:
    _check_session(g, ms)
    table = shortest_path_table(g)
    remaining = set(ms.destinations)
    trees: list[LightTree] = []
    trace = []
    while remaining:
        state = GrowState(g=g, root=ms.source, remaining=remaining)
        steps = []
        while state.remaining:
            choice = member_only_select(state, table)
            if observer is not None:
                observer(state.snapshot(), choice)
            if choice is None:
                break
            extend_tree(state, choice.path, choice.connector, choice.dest)
            steps.append(choice)
        if not state.served:
            raise InvalidSession(f"no destination reachable for tree {len(trees) + 1}")
        trees.append(state.to_tree(len(trees) + 1))
        trace.append(tuple(steps))
        remaining = state.remaining
    return LightForest(ms, tuple(trees), AlgorithmKind.MEMBER_ONLY.value, tuple(trace), 0)


def _subtree(children: dict[int, list[int]], top: int) -> list[int]:
    out = [top]
    i = 0
    while i < len(out):
        out.extend(children.get(out[i], ()))
        i += 1
    return out


def _first_overloaded(g: Topology, root: int, parent: dict[int, int]) -> int | None:
    children: dict[int, list[int]] = {}
    for ch, p in parent.items():
        children.setdefault(p, []).append(ch)
    frontier = [root]
    while frontier:
        for n in sorted(frontier):
            if n != root and not g.is_mc(n) and len(children.get(n, ())) > 1:
                return n
        frontier = [c for n in frontier for c in children.get(n, ())]
    return None


def reroute_to_source_build(g: Topology, ms: MulticastSession) -> LightForest:
    """Shortest-path tree from the source, split at every overloaded MI node.

    At an MI node with several children the branch holding the most
    destinations stays (ties: lowest child id); every other branch moves to
    a new tree whose trunk repeats the source-to-node path.
    """
    _check_session(g, ms)
    s = ms.source
    labels = _sweep(g, [s], ms.destinations)
    parent: dict[int, int] = {}
    for d in sorted(ms.destinations):
        seq = labels[d][1]
        for a, b in zip(seq, seq[1:]):
            parent[b] = a
    # work items: (parent map, served destinations)
    work: list[tuple[dict[int, int], set[int]]] = [(parent, set(ms.destinations))]
    trees: list[LightTree] = []
    i = 0
    while i < len(work):
        par, served = work[i]
        while True:
            x = _first_overloaded(g, s, par)
            if x is None:
                break
            children: dict[int, list[int]] = {}
            for ch, p in sorted(par.items()):
                children.setdefault(p, []).append(ch)
            branches = []
            for ch in children[x]:
                members = _subtree(children, ch)
                branches.append((-len(served.intersection(members)), ch, members))
            branches.sort()
            trunk = {}
            n = x
            while n != s:
                trunk[n] = par[n]
                n = par[n]
            for _, ch, members in branches[1:]:
                moved = {m: par[m] for m in members}
                for m in members:
                    del par[m]
                moved.update(trunk)
                moved_served = served.intersection(members)
                served -= moved_served
                work.append((moved, moved_served))
        trees.append(
            LightTree(
                root=s,
                edges=frozenset(edge_key(c, p) for c, p in par.items()),
                served=frozenset(served),
                serial=len(trees) + 1,
            )
        )
        i += 1
    return LightForest(ms, tuple(trees), AlgorithmKind.REROUTE_TO_SOURCE.value, (), 1)


ALGORITHMS: dict[str, Callable[[Topology, MulticastSession], LightForest]] = {
    AlgorithmKind.HSLT.value: hslt_build,
    AlgorithmKind.MEMBER_ONLY.value: member_only_build,
    AlgorithmKind.REROUTE_TO_SOURCE.value: reroute_to_source_build,
}


def build_forest(g: Topology, ms: MulticastSession, algorithm: str | AlgorithmKind) -> LightForest:
    try:
        builder = ALGORITHMS[AlgorithmKind(algorithm).value]
    except ValueError:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {list(ALGORITHMS)}") from None
    return builder(g, ms)
