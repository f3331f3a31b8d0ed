import json
from fractions import Fraction

import pytest

from orderlam import domains
from orderlam.cli import (
    BUNDLED,
    ComplexFile,
    bundled_path,
    complex_document,
    group_document,
    jsonable,
    main,
    run_pipeline,
    with_dependencies,
)
from orderlam.errors import ParseError


def load(name):
    return json.loads(bundled_path(name).read_text())


def write(tmp_path, doc, name="in.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def floats(x):
    if isinstance(x, float):
        return [x]
    if isinstance(x, dict):
        return [f for v in x.values() for f in floats(v)]
    if isinstance(x, list):
        return [f for v in x for f in floats(v)]
    return []


# ------------------------------------------------------------ parsing

def test_unknown_top_level_key(tmp_path):
    doc = load("torus")
    doc["colour"] = "blue"
    assert main([str(write(tmp_path, doc)), "--out", str(tmp_path / "o")]) == 2


@pytest.mark.parametrize("section,key", [("group", "flavour"), ("options", "speed"), ("complex", "cells")])
def test_unknown_nested_key(section, key):
    doc = load("torus")
    doc[section][key] = 1
    with pytest.raises(ParseError, match="unknown keys"):
        ComplexFile(doc)


def test_identity_label_rejected():
    doc = load("torus")
    doc["complex"]["sides"][0]["label"] = ["a", "-a"]
    with pytest.raises(ParseError, match="identity"):
        ComplexFile(doc)


def test_unknown_generator_rejected():
    doc = load("torus")
    doc["complex"]["sides"][0]["label"] = ["z"]
    with pytest.raises(ParseError):
        ComplexFile(doc)


def test_bad_json_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main([str(p), "--out", str(tmp_path / "o")]) == 2
    assert "parse error" in capsys.readouterr().err


def test_unknown_stage_exits_2(tmp_path):
    assert main(["torus", "--stages", "validate,paint", "--out", str(tmp_path)]) == 2


def test_order_must_fit_group():
    doc = load("torus")
    doc["group"]["order"] = {"kind": "MagnusFree"}
    with pytest.raises(ParseError):
        ComplexFile(doc)


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_inputs_match_domains(name):
    cf = ComplexFile(load(name))
    ref = {
        "torus": domains.torus_square,
        "genus2": lambda: domains.surface_polygon(2),
        "genus3": lambda: domains.surface_polygon(3),
        "t3_cube": domains.t3_cube,
        "mapping_torus_g2": domains.mapping_torus,
    }[name]()
    assert cf.spec == ref.spec
    if ref.dimension == 2:
        assert cf.complex == ref
    else:
        assert cf.complex.describe() == ref.describe()
        assert cf.complex.label == ref.label and cf.complex.mate == ref.mate


@pytest.mark.parametrize("make", [domains.t3_cube, domains.hexagonal_prism, domains.rhombic_dodecahedron])
def test_polyhedron_round_trip(make):
    P = make()
    doc = {"group": {**group_document(P.spec), "order": {"kind": "LexFreeAbelian"}},
           "complex": complex_document(P)}
    Q = ComplexFile(json.loads(json.dumps(doc))).complex
    assert Q.faces == P.faces and Q.mate == P.mate and Q.label == P.label


def test_dependencies_follow_stage_order():
    assert with_dependencies(["diagnostics"]) == ["validate", "standardize", "orient", "diagnostics"]
    assert with_dependencies(["divisions"]) == ["validate", "divisions"]
    assert with_dependencies(["carrier", "validate"]) == [
        "validate", "standardize", "orient", "divisions", "carrier"]


def test_jsonable():
    assert jsonable(Fraction(-3, 4)) == [-3, 4]
    assert jsonable({1: {Fraction(2)}}) == {"1": [[2, 1]]}


# ------------------------------------------------------------ runs

@pytest.fixture(scope="module")
def torus_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("torus")
    status, report = run_pipeline("torus", out=out)
    return status, report, out


def test_torus_run(torus_run):
    status, report, out = torus_run
    assert status == 0
    sec = report["sections"]
    assert sec["diagnostics"]["cusps"] == 2
    assert sec["diagnostics"]["extendability"] == "ExtendsToTautFoliation"
    assert all(s["status"] == "pass" for s in sec.values())
    assert {p.name for p in out.iterdir()} == {"report.json", "spine.svg", "leaves.svg"}


def test_report_is_exact_and_sorted(torus_run):
    _, _, out = torus_run
    text = (out / "report.json").read_text()
    data = json.loads(text)
    assert floats(data) == []
    assert text == json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    # e-values are written as [numerator, denominator]
    ev = dict((k, tuple(v)) for k, v in data["sections"]["divisions"]["census"]["e_values"])
    assert ev["H"] == (0, 1) and ev["Hbar"] == (1, 1)


def test_genus2_obstruction_is_a_finding(tmp_path):
    status, report = run_pipeline("genus2", out=tmp_path)
    assert status == 0
    d = report["sections"]["diagnostics"]
    assert d["cusps"] == 6 and d["extendability"] == "Obstructed"


def test_mapping_torus_boundary(tmp_path):
    status, report = run_pipeline("mapping_torus_g2", stages="diagnostics", out=tmp_path)
    assert status == 0
    assert report["sections"]["diagnostics"]["vertical_boundary_components"] == 1
    # no SVG for three-dimensional input
    assert {p.name for p in tmp_path.iterdir()} == {"report.json"}


def test_expectation_mismatch_fails(tmp_path, capsys):
    doc = load("torus")
    doc["options"]["expect"]["cusps"] = 3
    status, report = run_pipeline(write(tmp_path, doc), stages="diagnostics", out=tmp_path / "o")
    assert status == 1
    assert "diagnostics" in capsys.readouterr().err
    assert report["sections"]["diagnostics"]["mismatched"]["cusps"] == {"expected": 3, "found": 2}


def test_stage_error_names_section(tmp_path, capsys):
    # standardized torus labels have length 2, beyond a radius-1 family
    assert main(["torus", "--truncation", "1", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "carrier" in err and "PairingOutsideBall" in json.dumps(
        json.loads((tmp_path / "report.json").read_text())["sections"]["carrier"])


def test_invalid_complex_fails_validate(tmp_path, capsys):
    doc = load("torus")
    # a square with sides a, a^-1, b, b^-1 is a sphere, not a torus
    doc["complex"]["sides"] = [{"label": ["a"]}, {"label": ["-a"]}, {"label": ["b"]}, {"label": ["-b"]}]
    doc["complex"].pop("pairs")
    status, report = run_pipeline(write(tmp_path, doc), stages="orient", out=tmp_path / "o")
    assert status == 1
    assert report["sections"]["validate"]["status"] == "fail"
    assert report["sections"]["orient"]["status"] == "skipped"
    assert "validate" in capsys.readouterr().err


def test_seed_report_then_compare(tmp_path, capsys):
    args = ["torus", "--stages", "diagnostics", "--out", str(tmp_path)]
    assert main(args + ["--seed-report"]) == 0
    assert (tmp_path / "report.golden.json").read_bytes() == (tmp_path / "report.json").read_bytes()
    assert main(args) == 0
    golden = json.loads((tmp_path / "report.golden.json").read_text())
    golden["sections"]["diagnostics"]["cusps"] = 4
    (tmp_path / "report.golden.json").write_text(json.dumps(golden))
    capsys.readouterr()
    assert main(args) == 1
    assert "diagnostics" in capsys.readouterr().err


def test_flags_override_options(tmp_path):
    _, report = run_pipeline("torus", stages="divisions", out=tmp_path, truncation=1, radius=1)
    assert report["options"] == {"radius": 1, "truncation": 1}
    assert report["sections"]["divisions"]["census"]["members"] == 10
