import json

import pytest

from hslt.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_route_hslt_example1(capsys):
    code, out, _ = run(capsys, "route", "--source", "8", "--dests", "4,6", "--mc", "8")
    assert code == 0
    assert "stress 1  cost 6  first_tree 2" in out
    assert "wavelength 1" in out


def test_route_member_only_example2(capsys):
    code, out, _ = run(capsys, "route", "--source", "8", "--dests", "9,10,11", "--mc", "8",
                       "--algo", "mo", "--trace")
    assert code == 0 and "stress 2" in out
    assert "wavelength 2" in out and "trace tree 2" in out


def test_route_json_then_validate(capsys, tmp_path):
    code, out, _ = run(capsys, "route", "--source", "8", "--dests", "9,10,11", "--mc", "8", "--json")
    data = json.loads(out)
    assert data["session"]["mc_nodes"] == [8] and len(data["trees"]) == 1
    path = tmp_path / "forest.json"
    path.write_text(out)
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 0 and out.startswith("ok: 1 tree")
    # a spur at MI node 10 makes it branch
    data["trees"][0]["edges"].append([10, 12])
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 1 and out.strip()


def test_quality_csv_output(capsys, tmp_path):
    dest = tmp_path / "q.csv"
    code, _, _ = run(capsys, "quality", "--sessions", "5", "--mc-sweep", "0:14:7", "-o", str(dest))
    lines = dest.read_text().splitlines()
    assert code == 0 and len(lines) == 1 + 3 * 3
    assert lines[0] == "algo,mc_count,group_size,mean_stress,mean_l1,mean_cost"


def test_throughput_csv_output(capsys, tmp_path):
    occ = tmp_path / "occ.csv"
    code, out, _ = run(capsys, "throughput", "--streams", "2", "--W", "4", "--occupancy", str(occ))
    assert code == 0
    assert out.splitlines()[0] == "algo,W,seed,accepted,efficiency"
    assert len(out.splitlines()) == 5
    assert occ.read_text().startswith("edge_u,edge_v,slot,session_id,tree_serial\n")


@pytest.mark.parametrize(
    "argv",
    [
        ["route", "--source", "8", "--dests", "8,4"],
        ["route", "--topology", "nowhere", "--source", "1", "--dests", "2"],
        ["quality", "--group-size", "40", "--sessions", "1"],
        ["validate", "/nonexistent/forest.json"],
    ],
)
def test_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")
