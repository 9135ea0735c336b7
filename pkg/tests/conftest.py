import heapq
import random

import pytest
from hypothesis import strategies as st

from hslt import MC, MI, Topology, builtin_topology

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    def report(criterion: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def nsf14():
    return builtin_topology("nsf14")


@pytest.fixture(scope="session")
def longhaul():
    return builtin_topology("longhaul28")


def reference_distances(g: Topology, source: int) -> dict[int, float]:
    """Textbook Dijkstra on distances only; deliberately shares nothing with hslt.routing."""
    dist = {source: 0}
    heap = [(0, source)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, c in g.neighbors(u).items():
            nd = d + c
            if nd < dist.get(v, float("inf")):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def random_connected_graph(rng: random.Random, n: int, extra: int, mc_prob: float = 0.3,
                           max_cost: int = 1) -> Topology:
    nodes = list(range(1, n + 1))
    edges = {}
    for v in nodes[1:]:
        u = rng.choice(nodes[: v - 1])
        edges[(min(u, v), max(u, v))] = rng.randint(1, max_cost)
    pairs = [(a, b) for a in nodes for b in nodes if a < b and (a, b) not in edges]
    rng.shuffle(pairs)
    for e in pairs[:extra]:
        edges[e] = rng.randint(1, max_cost)
    kinds = {v: (MC if rng.random() < mc_prob else MI) for v in nodes}
    return Topology(f"rand{n}", kinds, edges)


@st.composite
def small_graphs(draw, min_nodes=3, max_nodes=8, max_cost=1):
    n = draw(st.integers(min_nodes, max_nodes))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    extra = draw(st.integers(0, n * (n - 1) // 2 - (n - 1)))
    return random_connected_graph(rng, n, extra, mc_prob=draw(st.floats(0, 1)), max_cost=max_cost)


@st.composite
def graph_and_session(draw, min_nodes=3, max_nodes=8, max_cost=1):
    g = draw(small_graphs(min_nodes, max_nodes, max_cost))
    members = draw(st.permutations(g.nodes))
    k = draw(st.integers(1, g.N - 1))
    return g, members[0], members[1 : k + 1]
