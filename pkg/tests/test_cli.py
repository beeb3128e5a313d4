import json

import pytest

from elimdist.cli import main, random_graph
from elimdist.forest import parse_forest


def _write(path, text):
    path.write_text(text)
    return str(path)


@pytest.fixture
def files(tmp_path):
    return {
        "triangle": _write(tmp_path / "triangle.el", "0 1\n1 2\n0 2\n"),
        "path": _write(tmp_path / "path.el", "0 1\n1 2\n2 3\n"),
        "k5": _write(tmp_path / "k5.el", "".join(f"{u} {v}\n" for u in range(5) for v in range(u + 1, 5))),
        "bad": _write(tmp_path / "bad.el", "0 1\n1 x\n"),
    }


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ed_examples(capsys, files):
    assert run(capsys, "ed", "--family", "K3", files["triangle"], "--k", "3")[:2] == (0, "ed = 1\n")
    assert run(capsys, "ed", "--family", "K3", files["path"], "--k", "0")[:2] == (0, "ed = 0\n")
    assert run(capsys, "ed", "--family", "K4", files["k5"], "--k", "0")[:2] == (1, "ed > 0\n")


def test_ed_oracle_flag_agrees(capsys, files):
    a = run(capsys, "ed", "-F", "K3", files["k5"], "--oracle")
    b = run(capsys, "ed", "-F", "K3", files["k5"])
    assert a[:2] == b[:2] == (0, "ed = 3\n")


def test_annotated(capsys, files, tmp_path):
    s0 = _write(tmp_path / "s0.txt", "0\n")
    assert run(capsys, "ed", "-F", "K3", files["path"], "--annotate", s0)[:2] == (0, "annotated ed = 1\n")
    foreign = _write(tmp_path / "s1.txt", "9\n")
    assert run(capsys, "ed", "-F", "K3", files["path"], "--annotate", foreign)[0] == 2


def test_forest_round_trip(capsys, files, tmp_path):
    out = tmp_path / "grid.forest"
    grid = tmp_path / "grid.el"
    assert main(["gen", "grid", "--k", "3", "--r", "3", "--out", str(grid)]) == 0
    code, text, _ = run(capsys, "ed", "-F", "K3", str(grid), "--forest", str(out))
    assert code == 0 and text.startswith("ed = 2\n")
    assert parse_forest(out.read_text()).height == 2
    assert run(capsys, "check", str(grid), str(out), "-F", "K3")[:2] == (0, "ok (height 2)\n")
    code, text, _ = run(capsys, "check", str(grid), str(out), "-F", "K2")
    assert code == 1 and text.startswith("violation axiom4")


def test_parse_errors(capsys, files, tmp_path):
    assert run(capsys, "ed", "-F", "K3", files["bad"])[0] == 2
    assert run(capsys, "ed", "-F", "K3", str(tmp_path / "missing.el"))[0] == 2
    assert run(capsys, "ed", "-F", "K9", files["path"])[0] == 2
    assert run(capsys, "ed", "-F", "K3", files["path"], "--threads", "0")[0] == 2
    assert run(capsys, "obs", "-F", "nope", "--k", "0", "--nmax", "3")[0] == 2
    assert run(capsys, "gen", "wall", "--r", "4")[0] == 2


def test_resource_limits(capsys, tmp_path):
    wall = tmp_path / "w5.el"
    main(["gen", "wall", "--r", "5", "--out", str(wall)])
    assert run(capsys, "ed", "-F", "K3", str(wall), "--oracle")[0] == 3
    assert run(capsys, "obs", "-F", "K3", "--k", "0", "--nmax", "9")[0] == 3


def test_obs(capsys, tmp_path):
    code, text, _ = run(capsys, "obs", "--family", "K3", "--k", "0", "--nmax", "4", "--out", str(tmp_path / "o"))
    assert code == 0
    assert text.startswith("# obstruction 1: n=3 m=3\n")
    man = json.loads(text.splitlines()[-1].removeprefix("# manifest "))
    assert man["count"] == 1
    assert json.loads((tmp_path / "o" / "manifest.json").read_text()) == man


def test_gen(capsys):
    code, text, _ = run(capsys, "gen", "wall", "--r", "3")
    assert code == 0 and text.startswith("# elementary wall r=3\n")
    assert len(text.splitlines()) == 1 + 19
    _, grid, _ = run(capsys, "gen", "grid", "--k", "3", "--r", "3")
    assert len(grid.splitlines()) == 1 + 12
    a = run(capsys, "gen", "random", "--n", "8", "--p", "0.3", "--seed", "7")[1]
    b = run(capsys, "gen", "random", "--n", "8", "--p", "0.3", "--seed", "7")[1]
    assert a == b and "seed=7" in a.splitlines()[0]
    assert random_graph(8, 0.3, 7) == random_graph(8, 0.3, 7)


def test_report_small(capsys, tmp_path):
    code, text, _ = run(capsys, "report", "--random", "1", "--k", "1", "--out", str(tmp_path / "rep"))
    assert code == 0 and text
    names = sorted(p.name for p in (tmp_path / "rep").iterdir())
    assert names == [
        "characteristic_sizes.png",
        "characteristics.csv",
        "representative_sizes.png",
        "representatives.csv",
    ]
