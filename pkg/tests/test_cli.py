import io
import json
import subprocess
import sys

import pytest

from hyperflat.cli import CAP, MISMATCH, OK, PRECONDITION, main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_classes_ls_ten():
    code, text = run("classes", "--variant", "ls", "--n", "10", "--json")
    assert code == OK
    (rep,) = json.loads(text)
    assert all(rep["w"][str(j)] for j in range(1, 10))
    assert rep["p_mod2"]["1"]


def test_classes_cover_six():
    code, text = run("classes", "--variant", "ls-cover", "--n", "6", "--json")
    assert code == OK
    (rep,) = json.loads(text)
    assert rep["w"]["3"] and not rep["w"]["1"]


def test_classes_klein_bottle_table():
    code, text = run("classes", "--variant", "ls", "--n", "2")
    assert code == OK
    rows = [line.split() for line in text.strip().splitlines()[1:]]
    assert [r[3] for r in rows] == ["1", "0"]


def test_classes_csv_and_range():
    code, text = run("classes", "--n", "3-5", "--format", "csv")
    assert code == OK
    lines = text.strip().splitlines()
    assert lines[0].startswith("variant,n,k")
    assert len(lines) == 1 + 3 + 4 + 5


def test_classes_threads_give_identical_output():
    _, serial = run("classes", "--n", "4-7", "--json", "--threads", "1")
    _, parallel = run("classes", "--n", "4-7", "--json", "--threads", "2")
    assert serial == parallel


def test_classes_cap():
    assert run("classes", "--n", "21")[0] == CAP
    assert run("classes", "--variant", "ls-cover", "--n", "17")[0] == CAP


def test_cubulate_examples(tmp_path):
    code, text = run("cubulate", "--variant", "hat-torus", "--n", "3", "--json")
    s = json.loads(text)
    assert code == OK and s["cells"][0] == 8 and s["foldable"] and s["flat"]
    code, text = run("cubulate", "--variant", "torus", "--n", "2", "--json")
    assert code == OK and not json.loads(text)["foldable"]
    path = tmp_path / "ls3.json"
    code, text = run("cubulate", "--variant", "ls", "--n", "3", "--json", "--out", str(path))
    s = json.loads(text)
    assert s["cells"][0] == 16 and s["cells"][3] == 16 and s["euler_characteristic"] == 0
    assert json.loads(path.read_text())["version"] == 1


def test_cubulate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("cubulate", "--variant", "ls-cover", "--n", "3", "--out", str(a))
    run("cubulate", "--variant", "ls-cover", "--n", "3", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_cubulate_user_group(tmp_path):
    group = {"n": 2, "generators": [{"signs": [1, 1], "translation": ["1", "0"]}, {"signs": [-1, 1], "translation": ["0", "1/2"]}]}
    path = tmp_path / "g.json"
    path.write_text(json.dumps(group))
    code, text = run("cubulate", "--group", str(path), "--n", "2", "--json")
    assert code == OK and json.loads(text)["cells"] == [8, 16, 8]
    path.write_text(json.dumps({"n": 1, "generators": [{"signs": [1], "translation": ["1/3"]}]}))
    assert run("cubulate", "--group", str(path), "--n", "1")[0] == PRECONDITION


def test_cubulate_cap():
    assert run("cubulate", "--n", "7")[0] == CAP


def test_hyperbolize_examples(tmp_path):
    code, text = run("hyperbolize", "--variant", "hat-torus", "--n", "3", "--json")
    s = json.loads(text)
    assert code == OK and s["pieces"] == 8 and s["source_degree"] == 8 and s["injrad_bound"] == "1/8"
    code, text = run("hyperbolize", "--variant", "ls", "--n", "2", "--json")
    assert json.loads(text)["pieces"] == 8
    assert run("hyperbolize", "--variant", "torus", "--n", "2")[0] == PRECONDITION


def test_hyperbolize_single_cube_file(tmp_path):
    from hyperflat.cube_complex import single_cube, to_json

    path = tmp_path / "cube.json"
    path.write_text(to_json(single_cube(3)))
    code, text = run("hyperbolize", "--complex", str(path), "--json")
    s = json.loads(text)
    assert code == OK and s["pieces"] == 1 and s["gluings"] == 0


def test_verify_default_passes():
    code, text = run("verify")
    assert code == OK
    assert "FAIL" not in text


def test_verify_wk2_sweep():
    code, text = run("verify", "--sweep", "wk2", "--n-max", "18")
    assert code == OK and "0 mismatches" in text


def test_verify_corrupted_complex(tmp_path):
    from hyperflat.cube_complex import single_cube, to_json

    doc = json.loads(to_json(single_cube(2)))
    doc["facets"][0][3] = 99
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, text = run("verify", "--complex", str(path))
    assert code == MISMATCH
    assert "missing facet 99" in text
    path.write_text("{not json")
    code, text = run("verify", "--complex", str(path))
    assert code == MISMATCH and "FAIL" in text


def test_verify_cap():
    assert run("verify", "--n-max", "19")[0] == CAP


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hyperflat", "cubulate", "--variant", "hat-torus", "--n", "2", "--json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["cells"] == [4, 8, 4]


def test_bad_range_is_an_argument_error():
    with pytest.raises(SystemExit):
        run("classes", "--n", "9-3")
