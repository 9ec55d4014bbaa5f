import json
import subprocess
import sys


from scaleinv import cli
from scaleinv.serialize import parse_graph, parse_table


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_nucleus_json(capsys):
    code, out, _ = _run(capsys, "nucleus", "--group", "heis-ex1")
    doc = json.loads(out)
    assert code == 0
    assert doc["payload"]["size"] == 25 and doc["payload"]["open_set_condition"]
    assert doc["provenance"]["command"] == "scaleinv nucleus --group heis-ex1"


def test_nucleus_csv_moore_diagram(capsys):
    code, out, _ = _run(capsys, "nucleus", "--group", "heis-ex2", "--format", "table-csv")
    rows = parse_table(out)
    assert code == 0 and rows[0][:4] == ["state", "input", "output", "target"]
    assert len(rows) == 1 + 17 * 4


def test_not_contracting_exits_one(capsys):
    code, out, _ = _run(capsys, "nucleus", "--group", "lamplighter", "--max-elements", "200")
    assert code == 1
    assert json.loads(out)["payload"]["status"] == "NotContractingWithinBudget"


def test_recursion_words(capsys):
    code, out, _ = _run(capsys, "recursion", "--group", "heis-ex1", "--word", "A", "--word", "CAC^-1")
    recs = {r["word"]: r for r in json.loads(out)["payload"]["recursions"]}
    assert code == 0
    assert recs["A"]["permutation"] == "(01)(23)"
    assert recs["CAC^-1"]["permutation"] == "(03)(12)"


def test_usage_errors_exit_two(capsys):
    assert _run(capsys, "tiling", "--group", "heis-ex1")[0] == 2  # --seed missing
    assert _run(capsys, "nucleus", "--group", "nope")[0] == 2
    assert _run(capsys, "witness", "--family", "unipotent")[0] == 2
    assert _run(capsys, "intersect", "--group", "heis-ex1")[0] == 2
    code, out, err = _run(capsys, "witness", "--family", "bs", "--m", "2", "--ell", "4")
    assert code == 2 and out == "" and "coprime" in err
    assert _run(capsys)[0] == 2


def test_witness_families(capsys):
    for argv in (["--family", "lamplighter", "--k", "5"],
                 ["--family", "bs", "--p", "2", "--a", "4"],
                 ["--family", "affine", "--v", "1,2,3", "--p", "2"],
                 ["--family", "unipotent", "--seed", "4", "--d", "3", "--p", "2"]):
        code, out, _ = _run(capsys, "witness", *argv)
        doc = json.loads(out)["payload"]
        assert code == 0 and doc["verdict"] == "Fixed" and all(doc["checks"].values())


def test_ball_graph_output_to_file(capsys, tmp_path):
    target = tmp_path / "ball.dot"
    code, out, _ = _run(capsys, "ball", "--group", "z", "--radius", "3", "--format", "graph-dot",
                        "--out", str(target))
    assert code == 0 and out == ""
    graph = parse_graph(target.read_text(), "graph-dot")
    assert graph.number_of_vertices() == 7 and graph.number_of_edges() == 6
    assert str(tmp_path) not in target.read_text()


def test_percolate_table(capsys):
    code, out, _ = _run(capsys, "percolate", "--seed", "1", "--n", "8", "12", "--trials", "5")
    rows = parse_table(out)
    assert code == 0 and rows[0] == ["n", "trials", "good", "fraction"] and len(rows) == 3
    assert "# seed: 1" in out


def test_intersect_and_dlcheck(capsys):
    code, out, _ = _run(capsys, "intersect", "--group", "heis-2-4-2", "--depth", "4", "--bound", "6")
    payload = json.loads(out)["payload"]
    assert code == 0 and payload["index"] == 16 and payload["identity_only"]
    code, out, _ = _run(capsys, "dlcheck", "--radius", "3", "--seed", "2")
    assert code == 0 and json.loads(out)["payload"]["homomorphism"]


def test_monotile_and_tiling(capsys):
    code, out, _ = _run(capsys, "monotile", "--group", "lamplighter", "--level", "1", "--radius", "5")
    assert code == 0 and json.loads(out)["payload"]["partition"]
    code, out, _ = _run(capsys, "tiling", "--group", "heis-ex2", "--seed", "3", "--radius", "2",
                        "--depth", "3")
    payload = json.loads(out)["payload"]
    assert code == 0 and payload["tiling"]["ok"] and payload["folner_agrees"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "scaleinv.cli", "ball", "--group", "z", "--radius", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert len(json.loads(proc.stdout)["graph"]["vertices"]) == 3
