import json

import pytest

from k3db.cli import main
from k3db.db import dumps, load


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_hilbert_numerator(capsys):
    code, out, _ = run(capsys, "hilbert", "--kind", "k3", "--genus", "-1",
                       "--basket", "3/1,4/1,11/2", "--weights", "2,3,4,11")
    assert code == 0
    assert out.strip() == "-t^20 - t^15 - t^13 - t^11 + t^9 + t^7 + t^5 + 1"


def test_hilbert_terms(capsys):
    code, out, _ = run(capsys, "hilbert", "--kind", "curve", "--genus", "3", "--basket", "", "--terms", "4")
    assert code == 0 and out.strip() == "1, 3, 6, 10, 14"


def test_hilbert_orders(capsys):
    args = ["hilbert", "--kind", "k3", "--genus", "-1", "--basket", "2/1,5/2,13/4", "--weights", "4,5,13,22"]
    assert run(capsys, *args, "--order", "asc")[1].strip() == "1 - t^44"
    assert run(capsys, *args)[1].strip() == "-t^44 + 1"


def test_hilbert_not_polynomial(capsys):
    code, _, err = run(capsys, "hilbert", "--kind", "k3", "--genus", "-1",
                       "--basket", "2/1,5/2,13/4", "--weights", "2")
    assert code == 2 and "divisible" in err


def test_hilbert_json(capsys):
    code, out, _ = run(capsys, "hilbert", "--kind", "k3", "--genus", "2", "--terms", "3", "--format", "json")
    assert json.loads(out) == {"coefficients": ["1", "3", "6", "11"]}


def test_candidate(capsys):
    code, out, _ = run(capsys, "candidate", "--genus", "-1", "--basket", "2/1,17/7")
    assert code == 0
    assert out.splitlines() == [
        "Codimension 2 K3 surface with data",
        "  Weights: [ 3, 4, 7, 10, 17 ]",
        "  Numerator: t^41 - t^21 - t^20 + 1",
        "  Basket: [ 2, 1 ], [ 17, 7 ]",
    ]


def test_candidate_json_and_fano(capsys):
    code, out, _ = run(capsys, "candidate", "--kind", "fano", "--genus", "-1",
                       "--basket", "2/1,5/2,13/4", "--format", "json")
    rec = json.loads(out)
    assert code == 0 and rec["weights"] == [1, 4, 5, 13, 22] and rec["numerator"] == [[0, 1], [44, -1]]


def test_candidate_failure(capsys):
    code, _, _ = run(capsys, "candidate", "--genus", "-1", "--basket", "2/1,2/1,2/1,2/1,2/1,2/1,2/1,5/1")
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["candidate", "--genus", "x"],
    ["candidate", "--genus", "-1", "--basket", "4/2"],
    ["hilbert", "--kind", "k3", "--genus", "0", "--weights", "1,x"],
    ["hilbert", "--kind", "k3", "--genus", "0", "--weights", "1", "--terms", "3"],
    ["baskets", "--bound", "0"],
    ["nonsense"],
    ["db", "search", "--file", "/nonexistent/k3.jsonl"],
])
def test_invalid_input(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_baskets(capsys):
    code, out, _ = run(capsys, "baskets", "--bound", "12")
    assert code == 0 and out.splitlines()[-1] == "count: 329"
    assert out.splitlines()[0] == "[]"
    assert run(capsys, "baskets", "--bound", "12", "--no-include-empty")[1].splitlines()[-1] == "count: 328"
    data = json.loads(run(capsys, "baskets", "--bound", "3", "--kind", "fano", "--format", "json")[1])
    assert data["count"] == len(data["baskets"])


def test_db_search(capsys, k3_db_file):
    code, out, _ = run(capsys, "db", "search", "--file", str(k3_db_file), "--index", "17")
    assert code == 0 and out.splitlines()[-1] == "count: 2"
    assert "Weights: [ 3, 4, 7, 10, 17 ]" in out and "Weights: [ 2, 3, 5, 5, 7, 12, 17 ]" in out
    code, out, _ = run(capsys, "db", "search", "--file", str(k3_db_file), "--codim", "4", "--format", "json")
    assert json.loads(out)["count"] == 142
    assert run(capsys, "db", "search", "--file", str(k3_db_file), "--index", "19")[0] == 2


def test_db_chains(capsys, k3_db_file):
    code, out, _ = run(capsys, "db", "chains", "--file", str(k3_db_file), "--weights", "3,4,5,6,7,10,13")
    assert code == 0
    rows = [l.strip() for l in out.splitlines()[1:]]
    db = load(k3_db_file)
    last = [r for r in db if r.weights == (3, 4, 5, 6)][0]
    assert rows[0].split(") ")[1].startswith("[13,3,10] ->")
    assert rows[-1] == f"({last.id}, 1)"
    assert len(rows) == 4


def test_db_centres_and_verify(capsys, k3_db_file, tmp_path):
    out_file = tmp_path / "centres.jsonl"
    code, out, _ = run(capsys, "db", "centres", "--file", str(k3_db_file), "--out", str(out_file))
    assert code == 0
    # recomputing centres on an annotated file changes nothing
    assert out_file.read_text() == k3_db_file.read_text()
    code, out, _ = run(capsys, "verify", "--file", str(out_file))
    assert code == 0 and "391 records checked: ok" in out


def test_verify_detects_tampering(capsys, k3_db_file, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text(k3_db_file.read_text().replace('"genus":-1', '"genus":0', 1))
    assert run(capsys, "verify", "--file", str(bad))[0] == 3
    assert run(capsys, "db", "search", "--file", str(bad), "--index", "17")[0] == 3


def test_db_build_small(capsys, tmp_path):
    out_file = tmp_path / "small.jsonl"
    code, out, _ = run(capsys, "db", "build", "--max-codim", "1", "--bound", "4", "--out", str(out_file))
    assert code == 0
    db = load(out_file)
    assert out.strip().startswith(f"{len(db)} records")
    assert all(r.codim == 1 for r in db)
    again = tmp_path / "again.jsonl"
    run(capsys, "db", "build", "--max-codim", "1", "--bound", "4", "--out", str(again), "--jobs", "2")
    assert again.read_text() == dumps(db)


def test_build_with_overrides(capsys, tmp_path):
    ov = tmp_path / "ov.txt"
    ov.write_text("3; ; 2\n")
    out_file = tmp_path / "ov.jsonl"
    code, _, _ = run(capsys, "db", "build", "--max-codim", "2", "--bound", "2",
                     "--out", str(out_file), "--overrides", str(ov))
    assert code == 0
    assert any(r.weights == (1, 1, 1, 1, 2) for r in load(out_file))
    assert run(capsys, "db", "build", "--max-codim", "2", "--out", str(out_file),
               "--overrides", str(tmp_path / "missing.txt"))[0] == 1
