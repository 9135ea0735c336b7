"""Brute-force references for small instances.

Nothing here shares code with the routing heuristics beyond the graph and
state containers; paths are enumerated outright and forests are searched
exhaustively, so results can certify the heuristics' outputs.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import combinations

from .lightforest import GrowState, MulticastSession
from .topology import Path, Topology


class OracleBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_nodes: int = 8
    max_paths: int = 200_000

    def check(self, g: Topology) -> None:
        if g.N > self.max_nodes:
            raise OracleBudgetExceeded(f"{g.N} nodes exceeds oracle cap {self.max_nodes}")


DEFAULT_BUDGET = OracleBudget()


def simple_paths(g: Topology, start: int, allowed: set[int], ends: set[int], budget: OracleBudget = DEFAULT_BUDGET):
    """Every simple path from ``start`` whose last node is in ``ends``.

    Interior nodes must come from ``allowed``; a path stops at the first end
    node it reaches. Neighbours are visited in ascending id order.
    """
    count = 0
    stack = [(start,)]
    while stack:
        seq = stack.pop()
        last = seq[-1]
        if len(seq) > 1 and last in ends:
            count += 1
            if count > budget.max_paths:
                raise OracleBudgetExceeded(f"more than {budget.max_paths} paths")
            yield seq
            continue
        for v in sorted(g.neighbors(last), reverse=True):
            if v in seq:
                continue
            if v in ends or v in allowed:
                stack.append(seq + (v,))


def shortest_feasible_path(
    g: Topology, state: GrowState, dest: int, budget: OracleBudget = DEFAULT_BUDGET
) -> Path | None:
    """Cheapest path from ``dest`` into the tree through a connector.

    Interior nodes must lie outside the tree under construction (which
    rules out every exhausted MI node). Ties go to the lowest connector,
    then the lexicographically smallest connector-to-dest sequence.
    """
    budget.check(g)
    tree = set(state.parent) | {state.root} | state.mi_set
    connectors = set(state.mc_set)
    allowed = set(g.nodes) - tree - connectors
    best = None
    for seq in simple_paths(g, dest, allowed, connectors, budget):
        cost = sum(g.cost(a, b) for a, b in zip(seq, seq[1:]))
        key = (cost, seq[::-1])
        if best is None or key < best:
            best = key
    if best is None:
        return None
    return Path(best[1][::-1], best[0])


def _tree_costs(g: Topology, root: int) -> dict[frozenset[int], float]:
    """Minimum cost of a valid light-tree spanning exactly each node set.

    Search state: (node set, exhausted MI nodes). A tree grows one edge at a
    time from any node still allowed to take a child.
    """
    start = (frozenset([root]), frozenset())
    dist = {start: 0}
    heap = [(0, sorted(start[0]), sorted(start[1]), start)]
    best: dict[frozenset[int], float] = {}
    while heap:
        d, _, _, key = heapq.heappop(heap)
        if dist.get(key, float("inf")) < d:
            continue
        nodes, used = key
        if nodes not in best or d < best[nodes]:
            best[nodes] = d
        for u in sorted(nodes):
            if u in used:
                continue
            for v, c in g.neighbors(u).items():
                if v in nodes:
                    continue
                nused = used | {u} if (u != root and not g.is_mc(u)) else used
                nkey = (nodes | {v}, nused)
                nd = d + c
                if nd < dist.get(nkey, float("inf")):
                    dist[nkey] = nd
                    heapq.heappush(heap, (nd, sorted(nkey[0]), sorted(nkey[1]), nkey))
    return best


def min_stress_forest(
    g: Topology, ms: MulticastSession, budget: OracleBudget = DEFAULT_BUDGET
) -> tuple[int, float]:
    """Fewest light-trees covering the session, and the least total cost among those.

    Returns ``(k*, cost*)``; raises ``ValueError`` if some destination is
    unreachable.
    """
    budget.check(g)
    tree_costs = _tree_costs(g, ms.source)
    dests = sorted(ms.destinations)
    index = {d: i for i, d in enumerate(dests)}
    full = (1 << len(dests)) - 1
    # cheapest tree serving each destination subset (other members may pass through)
    cover = [float("inf")] * (full + 1)
    for nodes, cost in tree_costs.items():
        mask = 0
        for n in nodes:
            if n in index:
                mask |= 1 << index[n]
        # every subset of a coverable set is served by the same tree
        sub = mask
        while True:
            if cost < cover[sub]:
                cover[sub] = cost
            if sub == 0:
                break
            sub = (sub - 1) & mask
    if cover[full] == float("inf") and any(cover[1 << i] == float("inf") for i in range(len(dests))):
        raise ValueError("some destination unreachable from the source")
    best: list[tuple[int, float]] = [(0, 0.0)] + [(10**9, float("inf"))] * full
    for mask in range(1, full + 1):
        low = mask & -mask
        # the block containing the lowest member fixes a canonical partition order
        rest = mask ^ low
        sub = rest
        while True:
            block = sub | low
            if cover[block] < float("inf"):
                k, c = best[mask ^ block]
                cand = (k + 1, c + cover[block])
                if cand < best[mask]:
                    best[mask] = cand
            if sub == 0:
                break
            sub = (sub - 1) & rest
    k, cost = best[full]
    return k, cost


def enumerate_partitions_check(g: Topology, ms: MulticastSession) -> int:
    """Slow cross-check of k*: smallest k for which the destinations split into coverable blocks."""
    tree_costs = _tree_costs(g, ms.source)
    coverable = [frozenset(n for n in nodes if n in ms.destinations) for nodes in tree_costs]
    dests = sorted(ms.destinations)
    for k in range(1, len(dests) + 1):
        for labels in _labelings(len(dests), k):
            blocks = [frozenset(d for d, lab in zip(dests, labels) if lab == b) for b in range(k)]
            if all(any(b <= cov for cov in coverable) for b in blocks):
                return k
    raise ValueError("no feasible forest")


def _labelings(n: int, k: int):
    # restricted growth strings with exactly k blocks
    def rec(prefix, used):
        if len(prefix) == n:
            if used == k:
                yield tuple(prefix)
            return
        for lab in range(min(used + 1, k)):
            yield from rec(prefix + [lab], max(used, lab + 1))
    yield from rec([], 0)


__all__ = [
    "OracleBudget",
    "OracleBudgetExceeded",
    "shortest_feasible_path",
    "min_stress_forest",
    "simple_paths",
]
