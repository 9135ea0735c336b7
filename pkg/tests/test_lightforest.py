import json

import pytest

from hslt import (
    ConstraintViolation,
    GrowState,
    InvalidSession,
    LightForest,
    LightTree,
    MulticastSession,
    extend_tree,
    first_tree_destinations,
    forest_cost,
    hslt_build,
    link_stress,
    member_only_build,
    tree_cost,
    validate_forest,
    validate_tree,
)
from hslt.lightforest import forest_from_dict, forest_to_dict, forest_to_json
from hslt.topology import Path, edge_key


def path_edges(*paths):
    return frozenset(edge_key(a, b) for p in paths for a, b in zip(p, p[1:]))


@pytest.fixture
def g8(nsf14):
    return nsf14.with_mc([8])


def test_session_rules():
    with pytest.raises(InvalidSession):
        MulticastSession(1, [])
    with pytest.raises(InvalidSession):
        MulticastSession(1, [1, 2])
    assert MulticastSession(1, [2, 3]).K == 2


def test_extend_example1(g8):
    state = GrowState(g8, root=8, remaining={4, 6})
    extend_tree(state, Path((4, 5, 7, 8), 3), connector=8, dest=4)
    assert state.mc_set == {8, 4}
    assert state.mi_set == {5, 7}
    assert state.remaining == {6}
    assert state.check_invariants() == []


def test_extend_adjacent_destination(g8):
    state = GrowState(g8, root=8, remaining={10})
    extend_tree(state, (10, 8), connector=8, dest=10)
    assert state.mi_set == set()
    assert state.mc_set == {8, 10}


def test_extend_example2_state(g8):
    state = GrowState(g8, root=8, remaining={9, 10, 11})
    extend_tree(state, (10, 8), 8, 10)
    extend_tree(state, (11, 10), 10, 11)
    assert state.mc_set == {8, 11}
    assert state.mi_set == {10}
    assert state.check_invariants() == []


def test_extend_rejects_exhausted_node(g8):
    state = GrowState(g8, root=8, remaining={9, 10, 11})
    extend_tree(state, (10, 8), 8, 10)
    extend_tree(state, (11, 10), 10, 11)
    with pytest.raises(ConstraintViolation, match="10"):
        extend_tree(state, (9, 12, 10, 8), 8, 9)
    with pytest.raises(ConstraintViolation, match="MC_SET"):
        extend_tree(state, (9, 12, 10), 10, 9)


def test_extend_rejects_tree_reentry(g8):
    state = GrowState(g8, root=8, remaining={4, 5, 6})
    extend_tree(state, (4, 5, 7, 8), 8, 4)
    with pytest.raises(ConstraintViolation):
        extend_tree(state, (6, 5, 4), 4, 6)


def test_validate_single_node():
    assert validate_tree(None, LightTree(root=3)) == []


def test_validate_mi_branching(g8):
    t = LightTree(root=8, edges=path_edges((8, 10, 11), (10, 12)), served=frozenset({11, 12}))
    assert validate_tree(g8, t) == ["MI branching at 10"]
    # an MC node may branch
    assert validate_tree(g8.with_mc([8, 10]), t) == []


def test_validate_structure_errors(g8):
    cyc = LightTree(root=8, edges=path_edges((8, 7, 5, 6, 11, 10, 8)))
    assert any("cycle" in p for p in validate_tree(g8, cyc))
    split = LightTree(root=8, edges=path_edges((8, 7), (4, 9)))
    assert any("disconnected" in p for p in validate_tree(g8, split))
    foreign = LightTree(root=8, edges=path_edges((8, 9)))
    assert "foreign edge 8-9" in validate_tree(g8, foreign)


def test_validate_example1_output(g8):
    f = hslt_build(g8, MulticastSession(8, [4, 6]))
    assert validate_tree(g8, f.trees[0]) == []


def test_tree_cost():
    assert tree_cost(LightTree(root=1)) == 0
    ex1 = LightTree(root=8, edges=path_edges((8, 7, 5, 4), (8, 10, 11, 6)))
    ex2 = LightTree(root=8, edges=path_edges((8, 10), (10, 11), (8, 7, 5, 4, 9)))
    assert tree_cost(ex1) == 6
    assert tree_cost(ex2) == 6


def test_forest_metrics_example2(g8):
    ms = MulticastSession(8, [9, 10, 11])
    h = hslt_build(g8, ms)
    mo = member_only_build(g8, ms)
    assert forest_cost(h) == 6
    assert link_stress(h) == 1 and link_stress(mo) == 2
    assert first_tree_destinations(h) == 3
    assert first_tree_destinations(mo) == 2


def test_empty_forest_metrics():
    ms = MulticastSession(1, [2])
    assert forest_cost(LightForest(ms, (LightTree(root=1),))) == 0
    with pytest.raises(ValueError):
        first_tree_destinations(LightForest(ms, ()))


def test_validate_forest_partition(g8):
    ms = MulticastSession(8, [9, 10, 11])
    t1 = LightTree(root=8, edges=path_edges((8, 10, 11)), served=frozenset({10, 11}), serial=1)
    t2 = LightTree(root=8, edges=path_edges((8, 10, 12, 9)), served=frozenset({9, 10}), serial=2)
    problems = validate_forest(g8, LightForest(ms, (t1, t2)))
    assert any("re-serves [10]" in p for p in problems)
    problems = validate_forest(g8, LightForest(ms, (t1,)))
    assert any("never served: [9]" in p for p in problems)


def test_json_round_trip(g8):
    f = member_only_build(g8, MulticastSession(8, [9, 10, 11], id=4))
    text = forest_to_json(f, [8])
    data = json.loads(text)
    assert list(data) == ["algorithm", "session", "trees"]
    assert list(data["trees"][0]) == ["serial", "wavelength", "edges", "served"]
    back, mc = forest_from_dict(data)
    assert mc == [8]
    assert back.session == f.session
    assert [t.edges for t in back.trees] == [t.edges for t in f.trees]
    assert forest_to_dict(back, mc)["trees"] == data["trees"]
