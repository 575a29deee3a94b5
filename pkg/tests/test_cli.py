import json

import pytest

from confstab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_dim_table_csv(capsys):
    code, out, _ = run(capsys, "dim-table", "--p", "3", "--n", "2", "--max-deg", "10", "--max-par", "20", "--format", "csv")
    rows = out.splitlines()
    assert code == 0
    assert rows[0] == "i\\k," + ",".join(map(str, range(21)))
    assert len(rows) == 12 and all(len(r.split(",")) == 22 for r in rows)


def test_formats_agree(capsys):
    args = ("--p", "2", "--max-deg", "6", "--max-par", "12", "--threads", "1")
    _, csv_out, _ = run(capsys, "dim-table", *args, "--format", "csv")
    _, js, _ = run(capsys, "dim-table", *args, "--format", "json")
    _, md, _ = run(capsys, "dim-table", *args, "--format", "md")
    csv_dims = [[int(x) for x in r.split(",")[1:]] for r in csv_out.splitlines()[1:]]
    md_dims = [[int(x) for x in r.strip("| ").split(" | ")[1:]] for r in md.splitlines()[2:]]
    assert json.loads(js)["dims"] == csv_dims == md_dims


def test_poincare_matches_dim_table(capsys):
    args = ("--p", "5", "--max-deg", "9", "--max-par", "25", "--format", "json")
    _, a, _ = run(capsys, "dim-table", *args)
    _, b, _ = run(capsys, "poincare", *args)
    assert json.loads(a)["dims"] == json.loads(b)["dims"]


def test_verify_range(capsys):
    code, out, _ = run(capsys, "verify-range", "--p", "3", "--n", "2", "--m", "1", "--k-max", "40")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and rep["violations"] == []
    code, out, _ = run(capsys, "verify-range", "--p", "2", "--m", "1", "--k-max", "20", "--slack", "1")
    assert code == 2 and json.loads(out)["violations"]
    code, _, _ = run(capsys, "verify-range", "--p", "2", "--m", "2", "--k-max", "20", "--statement", "ideal")
    assert code == 0


def test_bracket_check(capsys):
    code, out, _ = run(capsys, "bracket-check", "--p", "3", "--n", "2", "--class", "y1")
    assert code == 0 and json.loads(out)["verdict"] == "Vanishes"
    code, out, _ = run(capsys, "bracket-check", "--p", "3", "--class", "e", "--format", "csv")
    assert code == 2 and "NormalForm" in out and "gen(z0)" in out
    code, out, _ = run(capsys, "bracket-check", "--p", "5", "--n", "3", "--class", "e^p", "--format", "md")
    assert code == 0 and "**Vanishes**" in out
    code, _, _ = run(capsys, "bracket-check", "--p", "2", "--n", "4", "--class", "w2")
    assert code == 0


def test_optimality(capsys):
    code, out, _ = run(capsys, "optimality", "--p", "3", "--m", "0", "--k-max", "10")
    assert code == 0 and json.loads(out)["witness"]["monomial"] == "z0"
    code, out, _ = run(capsys, "optimality", "--p", "3", "--m", "1", "--k-max", "10")
    rep = json.loads(out)
    assert code == 2 and rep["witness"] is None and rep["nearest_failure"]["monomial"] == "z0 z1"


def test_cone_dim(capsys):
    code, out, _ = run(capsys, "cone-dim", "--p", "3", "--m", "2", "--max-deg", "5", "--max-par", "6", "--format", "json")
    dims = json.loads(out)["dims"]
    assert code == 0 and dims[1][2] == 1 and dims[4][6] == 0


def test_words_verify(capsys):
    code, out, _ = run(capsys, "words-verify", "--n", "3", "--m", "1", "--max-par", "32")
    assert code == 0 and json.loads(out)["passed"]
    code, _, _ = run(capsys, "words-verify", "--n", "3", "--m", "1", "--max-par", "32", "--strict")
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["dim-table", "--p", "4", "--max-deg", "2", "--max-par", "2"],
    ["dim-table", "--p", "3", "--max-deg", "-1", "--max-par", "2"],
    ["dim-table", "--p", "3", "--n", "3", "--max-deg", "2", "--max-par", "2"],
    ["bracket-check", "--p", "3", "--class", "q7"],
    ["bracket-check", "--p", "3", "--class", "y0"],
    ["words-verify", "--n", "2", "--m", "1", "--max-par", "8"],
    ["nonsense"],
    [],
])
def test_usage_errors(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_output_is_deterministic(capsys, tmp_path):
    outs = []
    for threads in ("1", "4"):
        f = tmp_path / f"t{threads}.json"
        assert main(["verify-range", "--p", "2", "--m", "2", "--k-max", "30", "--threads", threads, "--out", str(f)]) == 0
        outs.append(f.read_bytes())
    assert outs[0] == outs[1]
