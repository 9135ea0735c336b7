import numpy as np
import pytest

from hslt.experiments import (
    QUALITY_HEADER,
    THROUGHPUT_HEADER,
    ConfigError,
    ExperimentConfig,
    gen_scenario,
    quality_csv,
    run_quality_experiment,
    run_throughput_experiment,
    run_throughput_stream,
    throughput_csv,
)


def test_scenario_extremes(longhaul):
    cfg = ExperimentConfig(group_size=5)
    mc, ms = gen_scenario(np.random.default_rng(1), longhaul, cfg, mc_count=longhaul.N)
    assert mc == set(longhaul.nodes)
    mc, ms = gen_scenario(np.random.default_rng(1), longhaul, cfg, mc_count=0)
    assert mc == set() and ms.K == 4
    assert ms.source not in ms.destinations


def test_scenario_reproducible(longhaul):
    cfg = ExperimentConfig(group_size=(3, 28))
    a = gen_scenario(np.random.default_rng([4, 2]), longhaul, cfg, mc_count=7)
    b = gen_scenario(np.random.default_rng([4, 2]), longhaul, cfg, mc_count=7)
    assert a == b
    assert 2 <= a[1].K <= 27 and len(a[0]) == 7


def test_scenario_infeasible(longhaul):
    with pytest.raises(ConfigError):
        gen_scenario(np.random.default_rng(0), longhaul, ExperimentConfig(group_size=30), 0)


@pytest.mark.parametrize(
    "kwargs",
    [{"group_size": 1}, {"group_size": 29}, {"mc_counts": (40,)}, {"sessions": 0},
     {"W": 0}, {"algorithms": ("steiner",)}],
)
def test_config_rejected(kwargs):
    with pytest.raises(ConfigError):
        run_quality_experiment(ExperimentConfig(**kwargs))


def test_single_session_reproducible():
    cfg = ExperimentConfig(sessions=1, seed=3)
    assert quality_csv(run_quality_experiment(cfg)) == quality_csv(run_quality_experiment(cfg))


def test_quality_rows_and_csv():
    rows = run_quality_experiment(ExperimentConfig(sessions=30, mc_counts=(0, 14), seed=1))
    assert [(r.algorithm, r.mc_count) for r in rows] == [
        (a, m) for m in (0, 14) for a in ("r2s", "mo", "hslt")
    ]
    assert all(r.completed == 30 and r.mean_stress >= 1 for r in rows)
    lines = quality_csv(rows).splitlines()
    assert lines[0] == ",".join(QUALITY_HEADER)
    assert len(lines) == 7 and lines[1].startswith("r2s,0,14,")


def test_parallel_matches_sequential():
    base = dict(sessions=40, mc_counts=(0, 7), seed=9)
    seq = run_quality_experiment(ExperimentConfig(**base))
    par = run_quality_experiment(ExperimentConfig(jobs=2, **base))
    assert quality_csv(seq) == quality_csv(par)
    tb = dict(group_size=(3, 28), algorithms=("mo", "hslt"), streams=3, seed=2)
    assert throughput_csv(run_throughput_experiment(ExperimentConfig(**tb))) == \
        throughput_csv(run_throughput_experiment(ExperimentConfig(jobs=2, **tb)))


def test_throughput_single_wavelength():
    cfg = ExperimentConfig(group_size=(3, 28), W=1)
    total = 0
    for seed in range(10):
        row, state = run_throughput_stream(cfg, "hslt", seed)
        assert row.accepted == state.accepted == len(state.admitted)
        # one slot per edge, so only single-tree sessions can fit
        assert all(f.k == 1 for f, _ in state.admitted)
        assert all(set(slots) <= {1} for slots in state.occupancy.values())
        total += row.accepted
    assert total > 0


def test_throughput_csv_shape():
    rows = run_throughput_experiment(
        ExperimentConfig(group_size=(3, 28), algorithms=("mo",), streams=2, seed=10)
    )
    lines = throughput_csv(rows).splitlines()
    assert lines[0] == ",".join(THROUGHPUT_HEADER)
    assert [l.split(",")[:3] for l in lines[1:]] == [["mo", "20", "10"], ["mo", "20", "11"]]
