"""CLI wiring: exit codes, report formats, error codes, determinism."""

import contextlib
import hashlib
import io
import json
import os

import pytest

from fillnorm.catalog import genus2_complex, rp2_complex, torus_complex
from fillnorm.cli import main
from fillnorm.complexes import complex_to_text
from fillnorm.covers import mod_p_homology_rep, permrep_to_text
from fillnorm.duality import boundary_four_simplex, triangulation_to_text


def run(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    root = tmp_path_factory.mktemp("fixtures")
    paths = {}
    for name, x in (("rp2", rp2_complex()), ("torus", torus_complex()),
                    ("genus2", genus2_complex())):
        path = root / f"{name}.cx"
        path.write_text(complex_to_text(x))
        paths[name] = str(path)
    tri = root / "bd4.tri"
    tri.write_text(triangulation_to_text(boundary_four_simplex()))
    paths["tri"] = str(tri)
    rep = root / "rp2mod2.pr"
    rep.write_text(permrep_to_text(mod_p_homology_rep(rp2_complex(), 2)))
    paths["rep"] = str(rep)
    chain = root / "target.json"
    chain.write_text('{"degree": 1, "coeffs": {"a": 2}}')
    paths["chain"] = str(chain)
    paths["root"] = str(root)
    return paths


def test_rho_subcommand(files):
    code, out = run(["rho", "--complex", files["rp2"], "--ring", "both"])
    assert code == 0
    data = json.loads(out)
    assert data["rho_real"] == "2"
    assert data["rho_integer"] == "2"


def test_fill_not_a_boundary(files):
    code, out = run(["fill", "--complex", files["rp2"], "--target",
                     '{"degree":1,"coeffs":{"a":1}}', "--ring", "int"])
    assert code == 1
    data = json.loads(out)
    assert data["error"]["code"] == "NOT_A_BOUNDARY"


def test_fill_from_file(files):
    code, out = run(["fill", "--complex", files["rp2"], "--target",
                     files["chain"], "--ring", "int"])
    assert code == 0
    data = json.loads(out)
    assert data["value"] == "1"
    assert data["optimal"] is True


def test_unknown_subcommand_exits_2(capsys):
    code, _ = run(["frobnicate"])
    assert code == 2
    capsys.readouterr()


def test_missing_argument_exits_2(capsys):
    code, _ = run(["fill"])
    assert code == 2
    capsys.readouterr()


def test_homology_single_degree(files):
    code, out = run(["homology", "--complex", files["rp2"], "--degree", "1"])
    assert code == 0
    assert json.loads(out) == {"degree": 1, "betti": 0, "torsion": [2]}


def test_cover_report_keys(files):
    code, out = run(["cover", "--complex", files["rp2"], "--rep", files["rep"]])
    assert code == 0
    data = json.loads(out)
    assert data["level"] == 1
    assert data["degree"] == 2
    assert data["cells"] == [2, 2, 2]
    assert data["chi"] == 2
    assert data["b1"] == 0


def test_cover_emit_complex(files):
    out_path = os.path.join(files["root"], "cover.cx")
    code, _ = run(["cover", "--complex", files["rp2"], "--rep", files["rep"],
                   "--emit-complex", out_path])
    assert code == 0
    from fillnorm.complexes import parse_complex
    cover = parse_complex(open(out_path).read())
    assert cover.cell_counts() == [2, 2, 2]


def test_primitive_and_agree(files):
    code, out = run(["agree", "--complex", files["rp2"], "--samples", "6"])
    assert code == 0
    data = json.loads(out)
    assert data["equal"] is True
    assert data["constant_real"] == data["constant_integer"] == "1/2"
    code, out = run(["agree", "--complex", files["torus"]])
    assert code == 1
    assert json.loads(out)["error"]["code"] == "PRECONDITION_VIOLATED"


def test_tower_with_plot(files, tmp_path):
    plot_dir = str(tmp_path / "figs")
    out_file = str(tmp_path / "report.json")
    code, _ = run(["tower", "--base", files["torus"], "--modp", "2",
                   "--levels", "1", "--eps", "1/10", "--plot", plot_dir,
                   "--out", out_file])
    assert code == 0
    data = json.loads(open(out_file).read())
    assert data["schema"] == "fillnorm/tower-report/1"
    assert data["verdict"] == "b1_positive"
    assert [lvl["b1"] for lvl in data["levels"]] == [2, 2]
    produced = sorted(os.listdir(plot_dir))
    assert "levels.csv" in produced
    assert any(name.endswith(".png") for name in produced)
    with open(os.path.join(plot_dir, "levels.csv")) as handle:
        header = handle.readline().strip().split(",")
    assert "level" in header and "b1" in header


def test_tower_from_rep_files(files):
    code, out = run(["tower", "--base", files["rp2"], "--reps", files["rep"],
                     "--eps", "1/10", "--loop-cap", "2"])
    assert code == 0
    data = json.loads(out)
    assert len(data["levels"]) == 2
    assert data["levels"][1]["b1"] == 0


def test_dualize_and_pdcheck(files):
    code, out = run(["dualize", "--tri", files["tri"]])
    assert code == 0
    data = json.loads(out)
    assert data["dual_cells"] == [5, 10, 10, 5]
    code, out = run(["pdcheck", "--tri", files["tri"], "--chains", "12"])
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_codim2(files):
    code, out = run(["codim2", "--tri", files["tri"], "--target",
                     '{"degree":1,"coeffs":{}}', "--ring", "int"])
    assert code == 0
    assert json.loads(out)["value"] == "0"


def test_delta_and_systole(files):
    code, out = run(["delta", "--complex", files["torus"]])
    assert code == 0
    assert json.loads(out)["delta"] == "0"
    code, out = run(["systole", "--complex", files["rp2"], "--cap", "2"])
    assert code == 0
    data = json.loads(out)
    assert data["found"] is True and data["length"] == 1


def test_tube_and_trace(files, tmp_path):
    from fillnorm.catalog import annulus_complex
    from fillnorm.complexes import complex_to_text
    ann_path = str(tmp_path / "ann.cx")
    open(ann_path, "w").write(complex_to_text(annulus_complex(9)))
    loop = " ".join(f"g{i}" for i in range(9))
    code, out = run(["tube", "--complex", ann_path, "--loop", loop])
    assert code == 0
    data = json.loads(out)
    assert data["radius"] == 2
    chain = json.dumps({"degree": 2,
                        "coeffs": {f"q{i}": 1 for i in range(9)}})
    code, out = run(["trace", "--complex", ann_path, "--loop", loop,
                     "--chain", chain, "--m", "1", "--delta", "2"])
    assert code == 0
    data = json.loads(out)
    assert data["path_count"] == 1
    assert data["superlinear"]["holds"] is True


def test_tube_uncertified_loop_rejected(files):
    code, out = run(["tube", "--complex", files["rp2"], "--loop", "a a"])
    assert code == 1
    assert json.loads(out)["error"]["code"] == "PRECONDITION_VIOLATED"


def test_error_code_appears_once(files):
    code, out = run(["fill", "--complex", files["rp2"], "--target",
                     '{"degree":1,"coeffs":{"a":1}}', "--ring", "int"])
    assert out.count("NOT_A_BOUNDARY") == 1


def test_rho_ring_variants(files):
    code, out = run(["rho", "--complex", files["rp2"], "--ring", "real"])
    assert code == 0
    data = json.loads(out)
    assert data["rho_real"] == "2" and data["rho_integer"] is None
    code, out = run(["rho", "--complex", files["rp2"], "--ring", "int"])
    assert code == 0
    data = json.loads(out)
    assert data["rho_integer"] == "2" and data["rho_real"] is None


def test_caps_env_profile(files, monkeypatch):
    monkeypatch.setenv("FILLNORM_CAPS", '{"dim_cap": 1}')
    code, out = run(["rho", "--complex", files["torus"]])
    assert code == 0  # convention branch needs no enumeration
    from fillnorm.catalog import sphere_complex
    sphere_path = os.path.join(files["root"], "sphere.cx")
    open(sphere_path, "w").write(complex_to_text(sphere_complex()))
    code, out = run(["rho", "--complex", sphere_path])
    assert code == 0  # ambient dimension 1 is within the tiny cap
    monkeypatch.setenv("FILLNORM_CAPS", '{"dim_cap": 0}')
    code, out = run(["rho", "--complex", sphere_path])
    assert code == 1
    assert json.loads(out)["error"]["code"] == "DIMENSION_CAP_EXCEEDED"
    # explicit flags override the profile
    code, out = run(["rho", "--complex", sphere_path, "--dim-cap", "4"])
    assert code == 0


def test_caps_json_file(files, tmp_path):
    caps = tmp_path / "caps.json"
    caps.write_text('{"node_cap": 50000, "dim_cap": 10}')
    code, out = run(["tower", "--base", files["rp2"], "--reps", files["rep"],
                     "--caps", str(caps), "--loop-cap", "1"])
    assert code == 0
    data = json.loads(out)
    assert data["config"]["caps"]["node_cap"] == 50000


def test_presentation_format_accepted(files, tmp_path):
    pres = tmp_path / "t2.pres"
    pres.write_text("presentation t2\ngens: a b\nrel: a b -a -b\n")
    code, out = run(["homology", "--complex", str(pres), "--degree", "1"])
    assert code == 0
    assert json.loads(out)["betti"] == 2


def test_determinism_across_subcommands(files):
    invocations = [
        ["homology", "--complex", files["rp2"]],
        ["rho", "--complex", files["rp2"], "--ring", "both"],
        ["fill", "--complex", files["rp2"], "--target", files["chain"],
         "--ring", "int"],
        ["agree", "--complex", files["rp2"], "--samples", "5", "--seed", "7"],
        ["cover", "--complex", files["rp2"], "--rep", files["rep"]],
        ["tower", "--base", files["torus"], "--modp", "2", "--levels", "1"],
        ["dualize", "--tri", files["tri"]],
        ["pdcheck", "--tri", files["tri"], "--chains", "16", "--seed", "3"],
        ["delta", "--complex", files["torus"]],
        ["systole", "--complex", files["rp2"], "--cap", "2"],
    ]
    for argv in invocations:
        code1, out1 = run(argv)
        code2, out2 = run(argv)
        assert code1 == code2 == 0
        h1 = hashlib.sha256(out1.encode()).hexdigest()
        h2 = hashlib.sha256(out2.encode()).hexdigest()
        assert h1 == h2, argv
