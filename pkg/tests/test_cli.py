import json
import shutil
import subprocess
import sys

from milnorkit.cli import fixture_dir, main
from milnorkit.coiso import SparseSignMatrix, octahedron_boundary
from milnorkit.magnus import LinkSystem


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_mu_borromean(capsys):
    code, res = run_json(capsys, "mu", "--link", "borromean.json", "--indices", "1,2,3")
    assert code == 0
    assert res["value"] == 1 and res["defined"] is True and res["schema"] == "v1"


def test_mu_fixture_by_bare_name(capsys):
    code, res = run_json(capsys, "mu", "--link", "commutator_d4_n2", "--indices", "1,2,3,4")
    assert code == 0 and res["value"] == 4096


def test_mu_obstructed_exits_one(capsys):
    w = lambda g: {"rank": 2, "letters": [[g, 1]]}
    link = json.dumps({"r": 2, "longitudes": [w(2), w(1)]})
    code, res = run_json(capsys, "mu", "--link", link, "--indices", "1,1,2")
    assert code == 1 and res["defined"] is False and res["obstructions"]


def test_fk_length_only(capsys):
    code, out, _ = run(capsys, "fk", "--q", "2", "--variant", "single", "--length-only")
    assert code == 0 and out.strip() == "10"


def test_fk_coefficient(capsys):
    code, res = run_json(capsys, "fk", "--q", "2", "--variant", "multi", "--l", "100")
    assert code == 0
    assert res["coefficient"] in ("2^100", "-2^100")
    assert res["length"] == res["literal_length"] == 10


def test_empty_file_is_input_error(capsys, tmp_path):
    f = tmp_path / "empty.json"
    f.write_text("")
    code, out, err = run(capsys, "mu", "--link", str(f), "--indices", "1,2,3")
    assert code == 2 and out == ""
    assert "cannot parse" in json.loads(err)["error"]


def test_schema_violation_names_field(capsys):
    code, _, err = run(capsys, "mu", "--link", '{"r": 2}', "--indices", "1,2")
    assert code == 2 and "longitudes" in err


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 2


def test_expand(capsys):
    code, res = run_json(capsys, "expand", "--word", "[1,2,-1,-2]", "--maxdeg", "2")
    assert code == 0
    assert res["terms"] == [[[], "1"], [[1, 2], "1"], [[2, 1], "-1"]]


def test_shuffle_check(capsys):
    code, res = run_json(capsys, "shuffle-check", "--word", "[1,1,2,-1]", "--I", "1", "--J", "1,2")
    assert code == 0 and res["residual"] == "0"
    code, res = run_json(capsys, "shuffle-check", "--word", "[1,1,1]", "--I", "1", "--J", "1", "--no-merge")
    assert code == 1 and res["residual"] == "3"


def test_pair_and_dual_basis(capsys):
    code, res = run_json(capsys, "pair", "--degrees", "1,1", "--I", "2,1", "--tree", "[1,2]")
    assert code == 0 and res["value"] == -1
    code, res = run_json(capsys, "dual-basis", "--degrees", "2,2,3,4")
    assert code == 0 and res["signed_identity"] and len(res["matrix"]) == 6
    code, _, _ = run(capsys, "pair", "--degrees", "1,2,2", "--I", "1,2,3", "--tree", "[[1,2],3]")
    assert code == 2


def test_massey_borromean(capsys):
    code, res = run_json(capsys, "massey", "--dga", "borromean_dga", "--classes", "x1,x2,x3",
                         "--perturbations", "20", "--dual", "x1*y1")
    assert code == 0
    assert res["coefficient"] == "1" and res["status"] == "class"


def test_massey_unknown_class(capsys):
    code, _, _ = run(capsys, "massey", "--dga", "borromean_dga", "--classes", "x1,zz")
    assert code == 2


def test_coiso_solve(capsys):
    A = json.dumps(SparseSignMatrix.from_dense([[1, 1], [-1, -1]]).to_json())
    code, res = run_json(capsys, "coiso-solve", "--matrix", A, "--b", "1,-1")
    assert code == 0
    code, res = run_json(capsys, "coiso-solve", "--matrix", A, "--b", "1,1")
    assert code == 1 and "certificate" in res


def test_coboundary(capsys):
    K = json.dumps(octahedron_boundary().to_json())
    code, res = run_json(capsys, "coboundary", "--complex", K, "--q", "2")
    assert code == 0 and res["p"] == 3
    back = SparseSignMatrix.from_json(res["matrix"])
    assert (back.M, back.N) == (8, 12)


def test_bounds(capsys):
    code, res = run_json(capsys, "bounds", "--m", "5", "--p", "2,2,3", "--indices", "1,2,3", "--tau", "1/2")
    assert code == 0
    assert res["regime"]["name"] == "Exponential" and res["bound"]["ln_exponent"] == "32"
    code, res = run_json(capsys, "bounds", "--m", "4", "--p", "1,1,1", "--indices", "1,2,3")
    assert code == 1 and res["dimension_ok"] is False


def test_dichotomy_csv_and_format_position(capsys):
    a = run(capsys, "--format", "csv", "dichotomy", "--m", "5", "--d", "3", "--n-max", "3")
    b = run(capsys, "dichotomy", "--m", "5", "--d", "3", "--n-max", "3", "--format", "csv")
    assert a == b and a[0] == 0
    assert a[1].splitlines()[0].startswith("n,tau")


def test_text_format(capsys):
    code, out, _ = run(capsys, "mu", "--link", "borromean", "--indices", "1,2,3", "--format", "text")
    assert code == 0 and "value: 1" in out.splitlines()


def test_determinism(capsys):
    argv = ["massey", "--dga", "borromean_dga", "--classes", "x1,x2,x3", "--perturbations", "15", "--seed", "4"]
    assert run(capsys, *argv) == run(capsys, *argv)


def test_round_trip_of_link_output(capsys):
    code, res = run_json(capsys, "mu", "--link", "whitehead", "--indices", "1,1,2,2")
    assert code == 0 and res["value"] == 1
    L = LinkSystem.from_json(json.loads((fixture_dir() / "whitehead.json").read_text()))
    assert LinkSystem.from_json(L.to_json()) == L


def test_fixture_env_override(capsys, tmp_path, monkeypatch):
    shutil.copy(fixture_dir() / "borromean.json", tmp_path / "mine.json")
    monkeypatch.setenv("MILNORKIT_FIXTURES", str(tmp_path))
    code, res = run_json(capsys, "mu", "--link", "mine", "--indices", "1,2,3")
    assert code == 0 and res["value"] == 1
    code, _, _ = run(capsys, "mu", "--link", "borromean", "--indices", "1,2,3")
    assert code == 2


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "milnorkit.cli", "fk", "--q", "1", "--length-only"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.strip() == "4"
