import json
import shutil
import subprocess

from ramseychi.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_and_inv(capsys):
    code, out, _ = run(capsys, "gen", "Cycle(5)")
    assert code == 0 and out.strip() == "Dhc"
    code, out, _ = run(capsys, "inv", "Dhc")
    doc = json.loads(out)
    assert code == 0 and (doc["chi"], doc["omega"], doc["alpha"]) == (3, 2, 2)


def test_gen_out_file(capsys, tmp_path):
    path = tmp_path / "g.g6"
    assert run(capsys, "gen", "Petersen()", "--out", str(path))[0] == 0
    assert path.read_text().strip()


def test_free(capsys):
    code, out, _ = run(capsys, "free", "Dhc", "--pattern", "Path(5)")
    assert code == 0 and json.loads(out)["free"] is True
    code, out, _ = run(capsys, "free", "Dhc", "--pattern", "Path(4)")
    assert json.loads(out)["free"] is False


def test_extract(capsys):
    code, out, _ = run(capsys, "extract", "stablechi", "Dhc", "--s", "2", "--q", "1")
    doc = json.loads(out)
    assert code == 0 and doc["revalidated"] and doc["certificate"]["kind"] == "HypothesisUnmet"
    code, out, _ = run(capsys, "extract", "gyarfas", "Dhc", "--force")
    assert code == 0 and json.loads(out)["revalidated"]


def test_parameter_error_exit_2(capsys):
    code, _, err = run(capsys, "gen", "Path(0)")
    assert code == 2 and "ParameterError" in err
    code, _, err = run(capsys, "inv", "D h")
    assert code == 2


def test_hypothesis_unmet_exit_2(capsys):
    code, _, err = run(capsys, "skeleton", "grow", "Dhc", "--c", "1/4", "--d", "3", "--h", "1")
    assert code == 2 and "HypothesisUnmet" in err


def test_skeleton_find(capsys):
    code, out, _ = run(capsys, "skeleton", "find", "Dhc", "--d", "2", "--h", "1")
    doc = json.loads(out)
    assert code == 0 and doc["found"] and doc["skeleton"]["map"] == [0, 1, 4]
    code, out, _ = run(capsys, "skeleton", "find", "Dhc", "--d", "2", "--h", "2")
    assert json.loads(out)["found"] is False


def test_tree_forced_planted(capsys):
    from ramseychi.graph6 import write_graph6
    from ramseychi.planted import planted_star
    inst = planted_star(2, arms=2)
    code, out, _ = run(capsys, "tree", write_graph6(inst.host), "--target", "Star(2)", "--c", "49/100",
                       "--force", "--width", "24")
    doc = json.loads(out)
    assert code == 0 and doc["embedding"] is not None


def test_scan_csv_and_exit_codes(capsys, tmp_path):
    out_path = tmp_path / "r.csv"
    code, out, _ = run(capsys, "scan", "--source", "enum:5", "--check", "cocktailks", "--format", "csv",
                       "--out", str(out_path))
    assert code == 0 and "FAIL=0" in out
    assert out_path.read_text().splitlines()[0].startswith("index,graph6,n,m")
    code, out, _ = run(capsys, "scan", "--source", "graph6:Dhc", "--check", "cocktailks",
                       "--param", "m=2", "--param", "s=3")
    assert code == 0 and json.loads(out)["rows"][0]["check"] == "cocktailks(m=2,s=3,k=5)"


def test_scan_seeded_random_deterministic(capsys):
    args = ("--seed", "9", "scan", "--source", "random:8,1/2,3", "--check", "kssparse")
    a = run(capsys, *args)
    b = run(capsys, *args)
    assert a == b and a[0] == 0


def test_extremal(capsys):
    code, out, _ = run(capsys, "extremal", "--source", "enum:6", "--bound", "p5c4-5x/4", "--top", "2")
    doc = json.loads(out)
    assert code == 0 and len(doc["top"]) == 2


def test_ramsey_table_flag(capsys, tmp_path):
    code, _, err = run(capsys, "--ramsey-table", str(tmp_path / "absent.txt"), "inv", "Dhc")
    assert code == 2


def test_console_script():
    exe = shutil.which("ramseychi")
    if exe is None:
        import pytest
        pytest.skip("console script not on PATH")
    res = subprocess.run([exe, "gen", "Complete(3)"], capture_output=True, text=True, check=True)
    assert res.stdout.strip() == "Bw"
