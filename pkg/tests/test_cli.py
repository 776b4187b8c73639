import json
import os
import subprocess
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from laxord.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
SCHEMA = json.loads(resources.files("laxord").joinpath("report.schema.json").read_text())


def run(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = main([*map(str, argv), "--json", str(out)])
    report = json.loads(out.read_text()) if out.exists() else None
    if report is not None:
        jsonschema.validate(report, SCHEMA)
    return code, report


def test_descent_fzz(tmp_path, capsys):
    code, report = run(tmp_path, "descent", FIXTURES / "descent.lax", "--morphism", "fzz")
    assert code == 1
    assert report["result"] == "NotEffective"
    assert report["witnesses"]["ED_ord"] == ["z0", "z1", "z2"]
    assert report["evidence"] == {"regepi_lax": True, "stable_regepi_lax": True, "ED_ord": False, "PED": False}
    assert "NotEffective" in capsys.readouterr().out


def test_descent_gap_and_strict(tmp_path):
    code, report = run(tmp_path, "descent", FIXTURES / "descent.lax", "--morphism", "gap", "--strict")
    assert code == 1 and report["result"] == "Unknown"
    assert report["inputs"]["strict"] is True


def test_construct_exponential(tmp_path, capsys):
    code, report = run(tmp_path, "construct", "exponential", FIXTURES / "exponential.lax", "--of", "B", "--exp", "A")
    assert code == 0
    out = capsys.readouterr().out
    assert "structure" in out and "{*->0}" in out
    assert report["result"]["structure"] == {"{*->0}": "0", "{*->1}": "1"}


@pytest.mark.parametrize(
    "argv",
    [
        ["product", "--objects", "ZZa", "C3b"],
        ["coproduct", "--objects", "ZZa", "C3b"],
        ["equalizer", "--pair", "fzz", "fzz"],
        ["coequalizer", "--pair", "fzz", "fzz"],
        ["pullback", "--pair", "fzz", "fzz"],
        ["power", "--weight", "One", "--object", "C3b"],
        ["copower", "--weight", "One", "--object", "C3b"],
        ["lift", "--source", "ZZ", "--family", "fzz_map:C3b"],
    ],
)
def test_construct_kinds(tmp_path, argv):
    code, report = run(tmp_path, "construct", argv[0], FIXTURES / "descent.lax", *argv[1:])
    assert code == 0 and report["command"] == "construct"


@pytest.mark.parametrize(
    "prop,name,expected",
    [
        ("regular-epi-ord", "fzz_map", 0),
        ("stable-regular-epi-ord", "fzz_map", 0),
        ("effective-descent-ord", "fzz_map", 1),
        ("regular-epi-lax", "fzz", 0),
        ("stable-regular-epi-lax", "gap", 0),
        ("ped", "gap", 1),
        ("cartesian-closed", "B2", 0),
        ("cartesian-closed", "M3", 1),
        ("exponentiable", "Apq", 0),
        ("exponentiable-strict", "ZZa", 1),
        ("exponentiable-strict", "C3b", 0),
        ("monotone", "collapse", 0),
    ],
)
def test_check(tmp_path, prop, name, expected):
    code, report = run(tmp_path, "check", prop, FIXTURES / "descent.lax", name)
    assert code == expected
    assert report["result"] is (expected == 0)


def test_presheaf_commands(tmp_path):
    code, report = run(tmp_path, "presheaf", FIXTURES / "descent.lax", "--morphism", "fzz")
    assert code == 1 and report["witnesses"]["descent_levelwise"][0] == "z0"
    code, report = run(tmp_path, "presheaf", FIXTURES / "descent.lax", "--morphism", "gap", "--obstruct", "1")
    assert code == 1 and "obstruction_refused" in report["witnesses"]
    code, report = run(tmp_path, "presheaf", FIXTURES / "descent.lax", "--morphism", "gap", "--obstruct", "1",
                       "--no-precondition")
    assert code == 0 and report["evidence"]["certificates"] == len(report["result"]) > 0
    code, report = run(tmp_path, "presheaf", FIXTURES / "presheaf.lax", "--represent", "G")
    assert code == 1 and report["witnesses"]["reason"] == "join-closure"
    code, report = run(tmp_path, "presheaf", FIXTURES / "presheaf.lax", "--represent", "PiA")
    assert code == 0


def test_oracle_commands(tmp_path):
    assert run(tmp_path, "oracle", "regepi-ord", FIXTURES / "descent.lax", "--morphism", "fzz_map")[0] == 0
    assert run(tmp_path, "oracle", "regepi-lax", FIXTURES / "descent.lax", "--morphism", "fzz")[0] == 0
    assert run(tmp_path, "oracle", "stable", FIXTURES / "descent.lax", "--morphism", "gap", "--bound", "1")[0] == 0
    code, report = run(tmp_path, "oracle", "universal", "--kind", "initial_lift", "--seed", "3", "--count", "10")
    assert code == 0 and report["seed"] == 3


def test_hunt(tmp_path):
    out = tmp_path / "certs.json"
    code, report = run(tmp_path, "hunt", "--base", "B2", "--max-size", "2", "--seed", "7", "--budget", "3000",
                       "--out", out)
    assert code == 0 and report["seed"] == 7
    certs = json.loads(out.read_text())
    assert certs == report["result"]
    assert {"structure": {"y0": "p", "y1": "q"}, "elems": ["y0", "y1"], "le": []} in [c["source"] for c in certs]


@pytest.mark.parametrize(
    "argv",
    [
        ["descent", "missing.lax", "--morphism", "fzz"],
        ["descent", str(FIXTURES / "descent.lax"), "--morphism", "nope"],
        ["descent", str(FIXTURES / "descent.lax"), "--morphism", "ZZ"],
        ["hunt", "--base", "Q7", "--seed", "1"],
        ["construct", "exponential", str(FIXTURES / "descent.lax"), "--of", "C3b"],
        ["oracle", "universal"],
    ],
)
def test_invalid_input_exits_2(argv, capsys):
    assert main(argv) == 2
    assert "laxord:" in capsys.readouterr().err


def test_parse_error_exits_2(tmp_path):
    bad = tmp_path / "bad.lax"
    bad.write_text("poset C { elems: 0 1; le: 0 1; }\nmap swap : C -> C { 0 -> 1; 1 -> 0; }\n")
    assert main(["check", "monotone", str(bad), "swap"]) == 2


def test_unknown_command_and_missing_seed():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["hunt", "--base", "B2"])
    assert err.value.code == 2


def test_hunt_is_byte_identical_across_hash_seeds(tmp_path):
    outs = []
    for hashseed in ("0", "4242"):
        out = tmp_path / f"h{hashseed}.json"
        env = dict(os.environ, PYTHONHASHSEED=hashseed)
        subprocess.run(
            [sys.executable, "-m", "laxord", "hunt", "--base", "B2", "--max-size", "2", "--seed", "7",
             "--budget", "1500", "--out", str(out)],
            check=True, env=env, capture_output=True,
        )
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
