import json
from fractions import Fraction as F

import pytest
from click.testing import CliRunner

from alphalim import schema
from alphalim.cli import main
from alphalim.constructors import arc_realization
from alphalim.maps import Conjugate, IntervalPL, MapSpec
from alphalim.spaces import build_named_space


def _build(tmp_path, name, cfg):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / name
    res = CliRunner().invoke(main, ["build", str(path), "--out", str(out)])
    return res, out


def test_build_extended_sine(tmp_path):
    res, out = _build(tmp_path, "x", {"space": {"kind": "extended_sine", "h": "1/128"}})
    assert res.exit_code == 0, res.output
    assert (out / "space.json").exists() and (out / "space.svg").read_text().startswith("<svg")


def test_build_Z_has_A_landmarks(tmp_path):
    res, out = _build(tmp_path, "z", {"space": {"kind": "Z", "pieces": 6, "h": "1/128"}})
    assert res.exit_code == 0, res.output
    lm = json.loads((out / "space.json").read_text())["landmarks"]
    assert {"A1", "A2", "A3", "A4"} <= set(lm)


def test_build_bad_mesh_exit_2(tmp_path):
    res, _ = _build(tmp_path, "bad", {"space": {"kind": "sine", "h": 0}})
    assert res.exit_code == 2
    assert "space.h" in res.output


def test_build_missing_config_exit_3(tmp_path):
    res = CliRunner().invoke(main, ["build", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")])
    assert res.exit_code == 3


def test_build_idempotent(tmp_path):
    cfg = {"space": {"kind": "sine", "h": "1/64"}, "map": {"name": "sine"}}
    _, a = _build(tmp_path, "a", cfg)
    _, b = _build(tmp_path, "b", cfg)
    for f in ("space.json", "map.json", "space.svg", "graph.csv"):
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_alpha_sine_b(tmp_path):
    _, out = _build(tmp_path, "s", {"space": {"kind": "sine", "h": "1/128"}, "map": {"name": "sine"}})
    res = CliRunner().invoke(main, ["alpha", "--artifacts", str(out), "--basepoint", "b", "--expect", "[a,b]"])
    assert res.exit_code == 0, res.output
    assert "verdict.within_1_cell_collar: pass" in res.output
    rep = out / "alpha_graph"
    assert (rep / "members.csv").read_text().startswith("cell,label")
    assert (rep / "overlay.svg").exists()
    first = (rep / "report.txt").read_bytes()
    CliRunner().invoke(main, ["alpha", "--artifacts", str(out), "--basepoint", "b", "--expect", "[a,b]"])
    assert (rep / "report.txt").read_bytes() == first


def test_alpha_expectation_failure_exit_5(tmp_path):
    _, out = _build(tmp_path, "s", {"space": {"kind": "sine", "h": "1/64"}, "map": {"name": "sine"}})
    res = CliRunner().invoke(main, ["alpha", "--artifacts", str(out), "--basepoint", "b", "--expect", "P3"])
    assert res.exit_code == 5


def test_alpha_F4_exact(tmp_path):
    _, out = _build(tmp_path, "f", {"space": {"kind": "F4", "h": "1"}, "map": {"name": "F4"}})
    res = CliRunner().invoke(main, ["alpha", "--artifacts", str(out), "--basepoint", "origin",
                                    "--engine", "exact", "--K", "40", "--eps", "0.05"])
    assert res.exit_code == 0, res.output
    assert "verdict.forward_invariance: strict inclusion" in res.output


def test_alpha_horseshoe_all_cells(tmp_path):
    _, out = _build(tmp_path, "h", {"space": {"kind": "interval", "h": "1/64"}, "map": {"name": "horseshoe"}})
    res = CliRunner().invoke(main, ["alpha", "--artifacts", str(out), "--basepoint", "I:1/5"])
    assert res.exit_code == 0
    assert "member_cells: 128 of 128" in res.output


def test_alpha_missing_artifacts_exit_3(tmp_path):
    res = CliRunner().invoke(main, ["alpha", "--artifacts", str(tmp_path), "--basepoint", "b"])
    assert res.exit_code == 3


def _write_artifacts(out, space, fmap):
    out.mkdir()
    (out / "space.json").write_text(schema.dumps(schema.space_to_dict(space)))
    (out / "map.json").write_text(schema.dumps(fmap.to_dict()))


def test_alpha_graph_engine_inapplicable_exit_4(tmp_path):
    s = build_named_space("sine", "1/16")
    r = arc_realization(s, s.landmark("P2").cells)
    _write_artifacts(tmp_path / "arc", s, r.map)
    res = CliRunner().invoke(main, ["alpha", "--artifacts", str(tmp_path / "arc"), "--basepoint", "b"])
    assert res.exit_code == 4


def test_alpha_exact_engine_inapplicable_exit_4(tmp_path):
    s = build_named_space("interval", "1/16")
    flat = IntervalPL([(F(-1), F(-1)), (F(0), F(0)), (F(1, 2), F(0)), (F(1), F(1))])
    _write_artifacts(tmp_path / "flat", s, MapSpec(s, {"I": Conjugate(flat)}, "flat"))
    res = CliRunner().invoke(main, ["alpha", "--artifacts", str(tmp_path / "flat"), "--basepoint", "I:0",
                                    "--engine", "exact"])
    assert res.exit_code == 4


def test_facts_table(tmp_path):
    _, out = _build(tmp_path, "h", {"space": {"kind": "interval", "h": "1/32"}, "map": {"name": "horseshoe"}})
    res = CliRunner().invoke(main, ["facts", "--artifacts", str(out), "--basepoint", "I:0"])
    assert res.exit_code == 0
    assert "I:0\tF3\tpass" in res.output


def test_survey_records_seed():
    res = CliRunner().invoke(main, ["survey", "--space", "interval", "--h", "1/16", "--random", "3", "--seed", "5"])
    assert res.exit_code == 0, res.output
    assert res.output.startswith("seed: 5")
    again = CliRunner().invoke(main, ["survey", "--space", "interval", "--h", "1/16", "--random", "3", "--seed", "5"])
    assert again.output == res.output


def test_survey_unknown_landmark_exit_2():
    res = CliRunner().invoke(main, ["survey", "--space", "Z", "--h", "1/32", "--landmark", "A_n"])
    assert res.exit_code == 2


def test_product_line():
    res = CliRunner().invoke(main, ["product-line", "--sets", "30", "--seed", "2"])
    assert res.exit_code == 0 and "disagreements: 0" in res.output


def test_quotient(tmp_path):
    res = CliRunner().invoke(main, ["quotient", "--out", str(tmp_path / "q")])
    assert res.exit_code == 0, res.output
    assert (tmp_path / "q" / "space.json").exists()


def test_gallery_only_Z(tmp_path):
    res = CliRunner().invoke(main, ["gallery", "--only", "af-survey:Z", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    assert "8/8 realized" in res.output
    table = (tmp_path / "summary.tsv").read_text().splitlines()
    assert table[0] == "claim\texpected\tobserved\tverdict" and table[1].endswith("\tpass")
    assert (tmp_path / "rows" / "af-survey_Z" / "row.txt").exists()


def test_gallery_render(tmp_path):
    res = CliRunner().invoke(main, ["gallery", "--only", "sine", "--render", "--out", str(tmp_path)])
    assert res.exit_code == 0
    assert {p.name for p in tmp_path.glob("*.svg")} >= {"sine.svg", "extended_sine.svg", "chain_of_sines.svg"}


def test_gallery_unknown_row_exit_2(tmp_path):
    res = CliRunner().invoke(main, ["gallery", "--only", "nope", "--out", str(tmp_path)])
    assert res.exit_code == 2
