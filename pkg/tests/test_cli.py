import json
import subprocess
import sys

import pytest

from conftest import TEN_NODE, RETARGET_CASE, SPARSIFY_CASE
from hyperfibre import parse_hypergraph, project
from hyperfibre.cli import angle, main, parse_values


@pytest.fixture
def ten_node_file(tmp_path):
    path = tmp_path / "ten_node.txt"
    path.write_text(TEN_NODE)
    return path


def run(*argv):
    return main([str(a) for a in argv])


class TestHelpers:
    @pytest.mark.parametrize("text,value", [("0", 0.0), ("pi/2", 1.5707963267948966),
                                            ("3*pi/5", 3 * 3.141592653589793 / 5), ("-0.25", -0.25)])
    def test_angle(self, text, value):
        assert angle(text) == pytest.approx(value)

    @pytest.mark.parametrize("text", ["__import__('os')", "pi**2", "e", ""])
    def test_angle_rejects(self, text):
        with pytest.raises(Exception):
            angle(text)

    def test_values(self):
        assert parse_values("0:1:3") == [0.0, 0.5, 1.0]
        assert parse_values("0,pi") == [0.0, pytest.approx(3.141592653589793)]


class TestCommands:
    def test_fibres(self, ten_node_file, tmp_path, capsys):
        out = tmp_path / "p.json"
        assert run("fibres", ten_node_file, "-o", out) == 0
        data = json.loads(out.read_text())
        assert len(data["classes"]) == 7
        assert json.loads(capsys.readouterr().out)["nontrivial"] == 3

    def test_stats(self, ten_node_file, capsys):
        assert run("stats", ten_node_file, "--header") == 0
        assert capsys.readouterr().out == "dataset,N,E,N/C,nontrivial\nten_node,10,9,1.43,3\n"

    def test_project_round_trip(self, ten_node_file, tmp_path):
        once, twice = tmp_path / "a.txt", tmp_path / "b.txt"
        assert run("project", ten_node_file, "--mode", "simple", "-o", once) == 0
        assert run("project", once, "--mode", "simple", "-o", twice) == 0
        assert once.read_text() == twice.read_text()
        assert parse_hypergraph(once.read_text()).edge_count == 12

    def test_project_multi(self, ten_node_file, capsys):
        run("project", ten_node_file, "--mode", "multi")
        out = capsys.readouterr().out
        assert out == "".join(f"{a} {b}\n" for a, b in
                              (map(str, e) for e in _multi_labels()))

    def test_simulate_constant_order(self, ten_node_file, tmp_path):
        traj, order = tmp_path / "t.csv", tmp_path / "r.csv"
        assert run("simulate", ten_node_file, "--alpha2", "0", "--alpha3", "0", "--tmax", "5",
                   "-o", traj, "--order-output", order) == 0
        rows = order.read_text().splitlines()
        assert len(rows) == 52
        assert all(set(r.split(",")[1:]) == {"1"} for r in rows[1:])

    def test_simulate_then_clusters(self, ten_node_file, tmp_path, capsys):
        traj = tmp_path / "t.csv"
        run("simulate", ten_node_file, "--alpha2", "pi/6", "--alpha3", "pi/6", "-o", traj)
        assert run("sync-clusters", ten_node_file, "--trajectory", traj) == 0
        assert len(json.loads(capsys.readouterr().out)["classes"]) == 7

    def test_sweep(self, ten_node_file, capsys):
        assert run("sweep", ten_node_file, "--alpha2-values", "0,0.5", "--alpha3-values", "0:1:3",
                   "--steps", "20") == 0
        rows = capsys.readouterr().out.splitlines()
        assert rows[0] == "alpha2\\alpha3,0,0.5,1"
        assert rows[1].split(",")[:2] == ["0", "1"]

    def test_sparsify(self, tmp_path, capsys):
        src = tmp_path / "c1.txt"
        src.write_text(SPARSIFY_CASE)
        out = tmp_path / "out.txt"
        assert run("sparsify", src, "-o", out) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["removed"] == [["A", "C"], ["B", "C"]]
        assert out.read_text() == "A B C\nA D\nB D\n"

    def test_retarget_exit_codes(self, tmp_path, capsys):
        src = tmp_path / "c3.txt"
        src.write_text(RETARGET_CASE)
        target = tmp_path / "t.json"
        target.write_text('{"classes": [["A", "B"], ["C"], ["D"]]}')
        assert run("retarget", src, "--target", target) == 0
        assert json.loads(capsys.readouterr().out)["added"] == [["B", "C"]]
        hard = tmp_path / "hard.json"
        hard.write_text('{"classes": [["A", "B", "C", "D"]]}')
        assert run("retarget", src, "--target", hard, "--max-iter", "1") == 3

    def test_inject(self, tmp_path, capsys):
        src = tmp_path / "c2.txt"
        src.write_text("A B C\nD A\nD B\n")
        assert run("inject", src, "--K", "2") == 0
        assert json.loads(capsys.readouterr().out)["converged"] is True

    def test_tune_freq(self, ten_node_file, tmp_path, capsys):
        omega = tmp_path / "w.csv"
        assert run("tune-freq", ten_node_file, "-o", omega) == 0
        bound = json.loads(capsys.readouterr().out)
        assert bound["delta_max"] == 0.1
        lines = omega.read_text().splitlines()
        assert lines[0] == "label,omega"
        assert "6,3.55884572681" in lines

    def test_omega_file_feeds_simulate(self, ten_node_file, tmp_path):
        omega, order = tmp_path / "w.csv", tmp_path / "r.csv"
        run("tune-freq", ten_node_file, "-o", omega, "--bound-output", tmp_path / "b.json")
        assert run("simulate", ten_node_file, "--omega-file", omega, "--sigma2", "0.6", "--sigma3", "0.8",
                   "--alpha2", "pi/3", "--alpha3", "pi/6", "--theta0", "1.0471975511965976",
                   "--tmax", "10", "--order-output", order, "-o", tmp_path / "t.csv") == 0
        assert all(r.split(",")[1] == "1" for r in order.read_text().splitlines()[1:])

    def test_byte_identical_reruns(self, ten_node_file, tmp_path):
        outs = []
        for k in range(2):
            path = tmp_path / f"r{k}.txt"
            run("inject", ten_node_file, "--K", "4", "--seed", "3", "-o", path, "--report", tmp_path / f"j{k}")
            outs.append((path.read_bytes(), (tmp_path / f"j{k}").read_bytes()))
        assert outs[0] == outs[1]

    def test_json_input(self, tmp_path, capsys):
        src = tmp_path / "h.json"
        src.write_text(json.dumps({"hyperedges": [["a", "b"], ["b", "c"]]}))
        assert run("fibres", src) == 0
        assert json.loads(capsys.readouterr().out)["classes"] == [["a", "c"], ["b"]]


class TestErrors:
    def error(self, capsys):
        return json.loads(capsys.readouterr().err.strip().splitlines()[-1])

    def test_empty_input(self, tmp_path, capsys):
        src = tmp_path / "e.txt"
        src.write_text("")
        assert run("fibres", src) == 2
        assert self.error(capsys) == {"error": "EmptyInput", "message": "no hyperedges in input",
                                      "exit_code": 2}

    def test_malformed(self, tmp_path, capsys):
        src = tmp_path / "m.txt"
        src.write_text("a b\nc $\n")
        assert run("stats", src) == 2
        assert self.error(capsys)["error"] == "MalformedLine"

    def test_missing_file(self, tmp_path, capsys):
        assert run("fibres", tmp_path / "nope.txt") == 2
        assert self.error(capsys)["exit_code"] == 2

    def test_disconnected_sparsify(self, tmp_path, capsys):
        src = tmp_path / "d.txt"
        src.write_text("a b\nc d\n")
        assert run("sparsify", src) == 2
        assert self.error(capsys)["error"] == "Disconnected"

    def test_high_order_simulate(self, tmp_path, capsys):
        src = tmp_path / "q.txt"
        src.write_text("a b c d\n")
        assert run("simulate", src, "--tmax", "1") == 2

    def test_numeric_failure(self, tmp_path, capsys):
        src = tmp_path / "p.txt"
        src.write_text("a b\n")
        assert run("simulate", src, "--omega", "inf", "--tmax", "1") == 4
        assert self.error(capsys)["error"] == "NonFiniteState"

    def test_atomic_write_leaves_no_temp(self, ten_node_file, tmp_path):
        run("fibres", ten_node_file, "-o", tmp_path / "p.json")
        assert sorted(p.name for p in tmp_path.iterdir()) == ["p.json", "ten_node.txt"]


def test_console_entry_point(ten_node_file):
    res = subprocess.run([sys.executable, "-m", "hyperfibre.cli", "stats", str(ten_node_file)],
                         capture_output=True, text=True, check=True)
    assert res.stdout == "ten_node,10,9,1.43,3\n"


def _multi_labels():
    g = project(parse_hypergraph(TEN_NODE), "multi")
    return [tuple(g.label(v) for v in e) for e in g.hyperedges]
